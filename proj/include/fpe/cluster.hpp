#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fpe/activation.hpp>
#include <fpe/cell.hpp>
#include <fpe/errors.hpp>

namespace fpe {

/// How a cluster grows: the seed threshold, the per-level increment, and
/// when a footprint's domain is large enough to deserve a child cell.
struct ClusterPolicy {
    double theta_seed = 0.35;
    double theta_step = 0.15;
    double theta_max = 1.0;
    std::uint64_t spawn_count = 50;
    std::size_t max_depth = 8;

    void validate() const {
        if (!(theta_seed >= 0.0 && theta_seed <= 1.0))
            throw ValidationError("policy.theta_seed must lie in [0,1]");
        if (!(theta_step > 0.0))
            throw ValidationError("policy.theta_step must be positive");
        if (!(theta_max <= 1.0 && theta_max >= theta_seed))
            throw ValidationError("policy.theta_max must lie in [theta_seed,1]");
        if (spawn_count < 2)
            throw ValidationError("policy.spawn_count must be at least 2");
        if (max_depth < 1)
            throw ValidationError("policy.max_depth must be at least 1");
    }

    friend bool operator==(const ClusterPolicy&, const ClusterPolicy&) = default;
};

struct TraceStep {
    int cell_id = 0;
    std::size_t depth = 1;
    CellOutcome outcome;
};

/// The root-to-leaf path one input took through a cluster. The projection is
/// the deepest selected footprint (most concrete); the archetype is the
/// seed-level one (most abstract).
class Trace {
public:
    Trace() = default;
    explicit Trace(std::vector<TraceStep> steps) : steps_(std::move(steps)) {}

    bool matched() const noexcept { return !steps_.empty(); }
    const std::vector<TraceStep>& steps() const noexcept { return steps_; }
    std::size_t depth() const noexcept { return steps_.size(); }

    const ActivationVector& projection() const {
        require_match();
        return steps_.back().outcome.projection;
    }

    const ActivationVector& archetype() const {
        require_match();
        return steps_.front().outcome.projection;
    }

private:
    void require_match() const {
        if (steps_.empty())
            throw ArgumentError("no-match trace carries no value");
    }

    std::vector<TraceStep> steps_;
};

/// A tree of cells. The seed cell holds the most generic commonalities;
/// each child cell refines exactly one parent footprint at a strictly
/// higher threshold. Inputs descend greedily along matching footprints, so
/// a learn call touches exactly one branch.
class Cluster {
public:
    struct CellNode {
        int id = 0;
        std::size_t depth = 1;
        int parent = -1;            // -1 marks the seed
        FootprintId parent_footprint = 0;
        Cell cell;
        std::map<FootprintId, int> children;

        friend bool operator==(const CellNode&, const CellNode&) = default;
    };

    Cluster(std::size_t dim, ClusterPolicy policy) : dim_(dim), policy_(policy) {
        policy_.validate();
        if (dim_ == 0)
            throw ArgumentError("cluster dimension must be positive");
        nodes_.push_back(CellNode{0, 1, -1, 0, Cell(dim_, policy_.theta_seed), {}});
    }

    static Cluster restore(std::size_t dim, ClusterPolicy policy, std::vector<CellNode> nodes);

    std::size_t dim() const noexcept { return dim_; }
    const ClusterPolicy& policy() const noexcept { return policy_; }
    const std::vector<CellNode>& cells() const noexcept { return nodes_; }
    std::size_t cell_count() const noexcept { return nodes_.size(); }

    const CellNode& cell(int id) const {
        if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
            throw LookupError("cluster has no cell with id " + std::to_string(id));
        return nodes_[static_cast<std::size_t>(id)];
    }

    /// Deepest level any cell occupies (1 = seed only).
    std::size_t depth() const noexcept {
        std::size_t d = 1;
        for (const CellNode& n : nodes_)
            d = std::max(d, n.depth);
        return d;
    }

    std::uint64_t total_footprints() const noexcept {
        std::uint64_t sum = 0;
        for (const CellNode& n : nodes_)
            sum += n.cell.size();
        return sum;
    }

    bool empty() const noexcept { return nodes_[0].cell.empty(); }

    /// Read-only descent; a no-match trace means the seed cell is empty.
    Trace query(const ActivationVector& x, const Mask& m) const {
        check_dims(x, m);
        return Trace(descend([&](int node) { return nodes_[static_cast<std::size_t>(node)].cell.query(x, m); }));
    }

    /// Greedy descent. In learn mode every cell on the path absorbs the
    /// input, and when the deepest selected footprint's count just reached
    /// spawn_count an empty child cell is attached for future inputs.
    Trace process(const ActivationVector& x, const Mask& m, bool learn) {
        if (!learn)
            return query(x, m);
        check_dims(x, m);
        std::vector<TraceStep> steps =
            descend([&](int node) { return nodes_[static_cast<std::size_t>(node)].cell.process(x, m, true); });
        if (!steps.empty())
            maybe_spawn(steps.back());
        return Trace(std::move(steps));
    }

    /// DOT rendering of the tree: one node per cell (threshold + footprint
    /// count), one edge per attachment labeled with the parent footprint.
    std::string to_dot() const {
        std::string out = "digraph cluster {\n  node [shape=box];\n";
        for (const CellNode& n : nodes_) {
            out += "  c" + std::to_string(n.id) + " [label=\"cell " + std::to_string(n.id) +
                   "\\ntheta=" + format_theta(n.cell.theta()) +
                   "\\nfootprints=" + std::to_string(n.cell.size()) + "\"];\n";
        }
        for (const CellNode& n : nodes_) {
            if (n.parent >= 0)
                out += "  c" + std::to_string(n.parent) + " -> c" + std::to_string(n.id) +
                       " [label=\"fp " + std::to_string(n.parent_footprint) + "\"];\n";
        }
        out += "}\n";
        return out;
    }

    friend bool operator==(const Cluster&, const Cluster&) = default;

private:
    static std::string format_theta(double theta) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6g", theta);
        return buf;
    }

    void check_dims(const ActivationVector& x, const Mask& m) const {
        if (x.dim() != dim_ || m.dim() != dim_)
            throw DimensionError("cluster process: input dimension mismatch");
    }

    template <typename CellFn>
    std::vector<TraceStep> descend(CellFn&& fn) const {
        std::vector<TraceStep> steps;
        int node = 0;
        std::size_t depth = 1;
        for (;;) {
            std::optional<CellOutcome> out = fn(node);
            if (!out)
                break;
            steps.push_back(TraceStep{node, depth, std::move(*out)});
            if (steps.back().outcome.created)
                break;
            const CellNode& n = nodes_[static_cast<std::size_t>(node)];
            auto it = n.children.find(steps.back().outcome.footprint_id);
            if (it == n.children.end())
                break;
            node = it->second;
            ++depth;
        }
        return steps;
    }

    void maybe_spawn(const TraceStep& deepest) {
        CellNode& n = nodes_[static_cast<std::size_t>(deepest.cell_id)];
        const Footprint& fp = n.cell.footprint(deepest.outcome.footprint_id);
        if (fp.count() != policy_.spawn_count)
            return;
        if (n.depth >= policy_.max_depth)
            return;
        if (!(n.cell.theta() < policy_.theta_max))
            return;
        double child_theta = std::min(n.cell.theta() + policy_.theta_step, policy_.theta_max);
        int child_id = static_cast<int>(nodes_.size());
        nodes_.push_back(CellNode{child_id, n.depth + 1, n.id, fp.id(),
                                  Cell(dim_, child_theta), {}});
        nodes_[static_cast<std::size_t>(deepest.cell_id)].children[deepest.outcome.footprint_id] =
            child_id;
    }

    std::size_t dim_ = 0;
    ClusterPolicy policy_;
    std::vector<CellNode> nodes_;
};

inline Cluster Cluster::restore(std::size_t dim, ClusterPolicy policy,
                                std::vector<CellNode> nodes) {
    Cluster c(dim, policy);
    if (nodes.empty())
        throw ValidationError("cluster payload must contain the seed cell");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const CellNode& n = nodes[i];
        if (n.id != static_cast<int>(i))
            throw ValidationError("cluster cell ids must be dense and in creation order");
        if (n.cell.dim() != dim)
            throw ValidationError("cluster cell dimension mismatch");
        if (i == 0) {
            if (n.parent != -1 || n.depth != 1)
                throw ValidationError("cluster seed cell must be the root");
            if (n.cell.theta() != policy.theta_seed)
                throw ValidationError("cluster seed threshold must match policy.theta_seed");
        } else {
            if (n.parent < 0 || static_cast<std::size_t>(n.parent) >= i)
                throw ValidationError("cluster cell parent must precede the cell");
            const CellNode& parent = nodes[static_cast<std::size_t>(n.parent)];
            if (n.depth != parent.depth + 1)
                throw ValidationError("cluster cell depth must be parent depth + 1");
            if (n.depth > policy.max_depth)
                throw ValidationError("cluster cell depth exceeds policy.max_depth");
            if (!(n.cell.theta() > parent.cell.theta()))
                throw ValidationError("cluster child threshold must exceed its parent's");
            try {
                parent.cell.footprint(n.parent_footprint);
            } catch (const LookupError&) {
                throw ValidationError("cluster cell attached to a missing parent footprint");
            }
            auto it = parent.children.find(n.parent_footprint);
            if (it == parent.children.end() || it->second != n.id)
                throw ValidationError("cluster parent/child links are inconsistent");
        }
        for (const auto& [fp_id, child] : n.children) {
            if (child <= n.id || static_cast<std::size_t>(child) >= nodes.size())
                throw ValidationError("cluster child reference out of range");
            if (nodes[static_cast<std::size_t>(child)].parent != n.id ||
                nodes[static_cast<std::size_t>(child)].parent_footprint != fp_id)
                throw ValidationError("cluster parent/child links are inconsistent");
        }
    }
    c.nodes_ = std::move(nodes);
    return c;
}

} // namespace fpe
