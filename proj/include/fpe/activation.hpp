#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <fpe/errors.hpp>

namespace fpe {

using Scalar = double;

/// Dense activation vector with every component in [0, 1].
///
/// Binary vectors are the sparse-distributed special case; dense values
/// appear as soon as manifestations are averaged. One type covers both so
/// every level of the hierarchy speaks the same currency.
class ActivationVector {
public:
    ActivationVector() = default;

    explicit ActivationVector(std::vector<Scalar> values) : values_(std::move(values)) {
        if (values_.empty())
            throw ArgumentError("activation vector must have at least one dimension");
        for (Scalar v : values_) {
            if (!(v >= 0.0 && v <= 1.0))
                throw ArgumentError("activation value out of [0,1] range");
        }
    }

    ActivationVector(std::initializer_list<Scalar> values)
        : ActivationVector(std::vector<Scalar>(values)) {}

    static ActivationVector zeros(std::size_t dim) {
        if (dim == 0)
            throw ArgumentError("activation vector must have at least one dimension");
        ActivationVector v;
        v.values_.assign(dim, 0.0);
        return v;
    }

    std::size_t dim() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    Scalar operator[](std::size_t i) const { return values_[i]; }
    std::span<const Scalar> span() const noexcept { return values_; }
    const std::vector<Scalar>& data() const noexcept { return values_; }

    bool is_binary() const noexcept {
        return std::all_of(values_.begin(), values_.end(),
                           [](Scalar v) { return v == 0.0 || v == 1.0; });
    }

    friend bool operator==(const ActivationVector&, const ActivationVector&) = default;

private:
    std::vector<Scalar> values_;
};

/// Presence flags for the dimensions of an activation vector.
/// The all-present mask is the identity for every masked operation.
class Mask {
public:
    Mask() = default;

    explicit Mask(std::vector<std::uint8_t> present) : present_(std::move(present)) {
        for (auto& p : present_)
            p = p ? 1 : 0;
    }

    static Mask all(std::size_t dim) {
        Mask m;
        m.present_.assign(dim, 1);
        return m;
    }

    static Mask none(std::size_t dim) {
        Mask m;
        m.present_.assign(dim, 0);
        return m;
    }

    std::size_t dim() const noexcept { return present_.size(); }
    bool operator[](std::size_t i) const { return present_[i] != 0; }

    bool any() const noexcept {
        return std::any_of(present_.begin(), present_.end(), [](std::uint8_t p) { return p != 0; });
    }
    bool all_present() const noexcept {
        return std::all_of(present_.begin(), present_.end(), [](std::uint8_t p) { return p != 0; });
    }
    std::size_t present_count() const noexcept {
        return static_cast<std::size_t>(std::count_if(
            present_.begin(), present_.end(), [](std::uint8_t p) { return p != 0; }));
    }

    friend bool operator==(const Mask&, const Mask&) = default;

private:
    std::vector<std::uint8_t> present_;
};

struct Segment {
    std::string name;
    std::size_t offset = 0;
    std::size_t length = 0;

    friend bool operator==(const Segment&, const Segment&) = default;
};

/// Contiguous, non-overlapping named slices covering [0, total) exactly.
/// Records where each child's representation lives inside a parent input.
class SegmentLayout {
public:
    SegmentLayout() = default;

    /// Builds a layout from (name, length) pairs laid out back to back.
    static SegmentLayout from_sizes(const std::vector<std::pair<std::string, std::size_t>>& parts) {
        SegmentLayout layout;
        for (const auto& [name, length] : parts) {
            if (name.empty())
                throw ArgumentError("segment name must not be empty");
            if (length == 0)
                throw ArgumentError("segment '" + name + "' must have nonzero length");
            if (layout.contains(name))
                throw ArgumentError("duplicate segment name '" + name + "'");
            layout.segments_.push_back({name, layout.total_, length});
            layout.total_ += length;
        }
        return layout;
    }

    std::size_t total() const noexcept { return total_; }
    const std::vector<Segment>& segments() const noexcept { return segments_; }

    bool contains(std::string_view name) const noexcept {
        return std::any_of(segments_.begin(), segments_.end(),
                           [&](const Segment& s) { return s.name == name; });
    }

    const Segment& at(std::string_view name) const {
        for (const Segment& s : segments_) {
            if (s.name == name)
                return s;
        }
        throw LookupError("unknown segment '" + std::string(name) + "'");
    }

    friend bool operator==(const SegmentLayout&, const SegmentLayout&) = default;

private:
    std::vector<Segment> segments_;
    std::size_t total_ = 0;
};

/// Cosine similarity restricted to the present dimensions, in [0, 1].
///
/// Conventions: both restrictions all-zero -> 1.0 (vacuously identical);
/// exactly one all-zero -> 0.0. Bit-identical restrictions return exactly
/// 1.0, so a threshold of 1.0 keeps its intuitive meaning.
inline double similarity(std::span<const Scalar> a, std::span<const Scalar> b, const Mask& m) {
    if (a.size() != b.size() || m.dim() != a.size())
        throw DimensionError("similarity: vectors and mask must share one dimension");
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!m[i])
            continue;
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    // Identical restrictions accumulate identical sums; this also covers the
    // both-zero convention.
    if (dot == na && dot == nb)
        return 1.0;
    if (na == 0.0 || nb == 0.0)
        return 0.0;
    // sqrt(na*nb) rounds once, so integer-valued sums (binary inputs) keep
    // exactly representable cosines exact and thresholds compare cleanly.
    return std::clamp(dot / std::sqrt(na * nb), 0.0, 1.0);
}

inline double similarity(const ActivationVector& a, const ActivationVector& b, const Mask& m) {
    return similarity(a.span(), b.span(), m);
}

/// Concatenates parts in order. The inverse of segment() under a covering layout.
inline ActivationVector concat(std::span<const ActivationVector> parts) {
    if (parts.empty())
        throw ArgumentError("concat: parts must be non-empty");
    std::vector<Scalar> out;
    std::size_t total = 0;
    for (const auto& p : parts)
        total += p.dim();
    out.reserve(total);
    for (const auto& p : parts)
        out.insert(out.end(), p.data().begin(), p.data().end());
    return ActivationVector(std::move(out));
}

inline ActivationVector concat(std::initializer_list<ActivationVector> parts) {
    return concat(std::span<const ActivationVector>(parts.begin(), parts.size()));
}

inline Mask concat_masks(std::span<const Mask> parts) {
    if (parts.empty())
        throw ArgumentError("concat_masks: parts must be non-empty");
    std::vector<std::uint8_t> out;
    for (const auto& p : parts) {
        for (std::size_t i = 0; i < p.dim(); ++i)
            out.push_back(p[i] ? 1 : 0);
    }
    return Mask(std::move(out));
}

/// Extracts the named contiguous slice of v.
inline ActivationVector segment(const ActivationVector& v, const SegmentLayout& layout,
                                std::string_view name) {
    const Segment& s = layout.at(name);
    if (layout.total() != v.dim())
        throw DimensionError("segment: layout total does not match vector dimension");
    std::vector<Scalar> out(v.data().begin() + static_cast<std::ptrdiff_t>(s.offset),
                            v.data().begin() + static_cast<std::ptrdiff_t>(s.offset + s.length));
    return ActivationVector(std::move(out));
}

/// Thresholds v into a binary vector; the boundary is inclusive.
inline ActivationVector binarize(const ActivationVector& v, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0))
        throw ArgumentError("binarize: tau must lie in [0,1]");
    std::vector<Scalar> out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i)
        out[i] = v[i] >= tau ? 1.0 : 0.0;
    return ActivationVector(std::move(out));
}

} // namespace fpe
