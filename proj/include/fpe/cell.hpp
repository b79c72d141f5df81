#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fpe/activation.hpp>
#include <fpe/errors.hpp>

namespace fpe {

using FootprintId = std::uint64_t;

/// Running average of every manifestation assigned to one commonality,
/// plus the support count. A footprint's output is itself: the projection
/// is the combination built so far.
class Footprint {
public:
    Footprint(FootprintId id, std::vector<Scalar> value)
        : id_(id), count_(1), value_(std::move(value)) {
        if (value_.empty())
            throw ArgumentError("footprint value must have at least one dimension");
    }

    /// Rebuilds a footprint from stored state, re-checking invariants.
    static Footprint restore(FootprintId id, std::uint64_t count, std::vector<Scalar> value) {
        if (count < 1)
            throw ValidationError("footprint count must be at least 1");
        for (Scalar v : value) {
            if (!(v >= 0.0 && v <= 1.0))
                throw ValidationError("footprint value component out of [0,1]");
        }
        Footprint fp(id, std::move(value));
        fp.count_ = count;
        return fp;
    }

    FootprintId id() const noexcept { return id_; }
    std::uint64_t count() const noexcept { return count_; }
    const std::vector<Scalar>& value() const noexcept { return value_; }
    std::size_t dim() const noexcept { return value_.size(); }

    ActivationVector projection() const { return ActivationVector(value_); }

    /// Folds x into the running mean. Absent dimensions are imputed from the
    /// footprint's own value, so they carry no weight and never drift.
    void learn(std::span<const Scalar> x, const Mask& m) {
        if (x.size() != value_.size() || m.dim() != value_.size())
            throw DimensionError("footprint learn: dimension mismatch");
        ++count_;
        const double inv = 1.0 / static_cast<double>(count_);
        for (std::size_t i = 0; i < value_.size(); ++i) {
            if (m[i])
                value_[i] += (x[i] - value_[i]) * inv;
        }
    }

    friend bool operator==(const Footprint&, const Footprint&) = default;

private:
    FootprintId id_ = 0;
    std::uint64_t count_ = 0;
    std::vector<Scalar> value_;
};

/// What a cell did with one input.
struct CellOutcome {
    FootprintId footprint_id = 0;
    double similarity = 0.0;
    bool created = false;
    ActivationVector projection;
};

/// A set of footprints sharing one similarity threshold.
///
/// Processing an input matches it to the most similar footprint at or above
/// the threshold; in learn mode a below-threshold input grows a new
/// footprint instead. Query mode never mutates and answers with the best
/// match regardless of the threshold (pattern completion fills the gaps).
class Cell {
public:
    Cell(std::size_t dim, double theta) : dim_(dim), theta_(theta) {
        if (dim_ == 0)
            throw ArgumentError("cell dimension must be positive");
        if (!(theta_ >= 0.0 && theta_ <= 1.0))
            throw ArgumentError("cell threshold must lie in [0,1]");
    }

    static Cell restore(std::size_t dim, double theta, FootprintId next_id,
                        std::vector<Footprint> footprints) {
        Cell cell(dim, theta);
        for (const Footprint& fp : footprints) {
            if (fp.dim() != dim)
                throw ValidationError("cell footprint dimension mismatch");
            if (fp.id() >= next_id)
                throw ValidationError("cell footprint id not below next_id");
            for (const Footprint& other : footprints) {
                if (&other != &fp && other.id() == fp.id())
                    throw ValidationError("duplicate footprint id in cell");
            }
        }
        cell.next_id_ = next_id;
        cell.footprints_ = std::move(footprints);
        return cell;
    }

    std::size_t dim() const noexcept { return dim_; }
    double theta() const noexcept { return theta_; }
    bool empty() const noexcept { return footprints_.empty(); }
    std::size_t size() const noexcept { return footprints_.size(); }
    FootprintId next_id() const noexcept { return next_id_; }
    const std::vector<Footprint>& footprints() const noexcept { return footprints_; }

    const Footprint& footprint(FootprintId id) const {
        for (const Footprint& fp : footprints_)
            if (fp.id() == id)
                return fp;
        throw LookupError("cell has no footprint with id " + std::to_string(id));
    }

    /// Total manifestations absorbed in learn mode.
    std::uint64_t learned_count() const noexcept {
        std::uint64_t sum = 0;
        for (const Footprint& fp : footprints_)
            sum += fp.count();
        return sum;
    }

    /// Best match without mutating; no outcome when the cell is empty.
    std::optional<CellOutcome> query(const ActivationVector& x, const Mask& m) const {
        check_dims(x, m);
        auto best = best_match(x, m);
        if (!best)
            return std::nullopt;
        const Footprint& fp = footprints_[best->first];
        return CellOutcome{fp.id(), best->second, false, fp.projection()};
    }

    /// Match-or-create. In learn mode the selected footprint absorbs x, or a
    /// new footprint is created from x when nothing reaches the threshold
    /// (absent dimensions fill with 0). Ties select the lowest footprint id.
    std::optional<CellOutcome> process(const ActivationVector& x, const Mask& m, bool learn) {
        if (!learn)
            return query(x, m);
        check_dims(x, m);
        auto best = best_match(x, m);
        if (!best || best->second < theta_) {
            std::vector<Scalar> value(x.data());
            for (std::size_t i = 0; i < value.size(); ++i)
                if (!m[i])
                    value[i] = 0.0;
            Footprint fp(next_id_++, std::move(value));
            double sim = similarity(x.span(), fp.value(), m);
            footprints_.push_back(std::move(fp));
            const Footprint& stored = footprints_.back();
            return CellOutcome{stored.id(), sim, true, stored.projection()};
        }
        Footprint& fp = footprints_[best->first];
        fp.learn(x.span(), m);
        return CellOutcome{fp.id(), best->second, false, fp.projection()};
    }

    friend bool operator==(const Cell&, const Cell&) = default;

private:
    void check_dims(const ActivationVector& x, const Mask& m) const {
        if (x.dim() != dim_ || m.dim() != dim_)
            throw DimensionError("cell process: input dimension mismatch");
    }

    // (index, similarity) of the argmax footprint; scanning in id order makes
    // ties land on the lowest id.
    std::optional<std::pair<std::size_t, double>> best_match(const ActivationVector& x,
                                                             const Mask& m) const {
        std::optional<std::pair<std::size_t, double>> best;
        for (std::size_t i = 0; i < footprints_.size(); ++i) {
            double s = similarity(x.span(), footprints_[i].value(), m);
            if (!best || s > best->second)
                best = {i, s};
        }
        return best;
    }

    std::size_t dim_ = 0;
    double theta_ = 0.0;
    FootprintId next_id_ = 0;
    std::vector<Footprint> footprints_;
};

} // namespace fpe
