#pragma once

// Step-by-step reference simulator for the cell-tree contract: greedy
// descent from the seed, match-or-create per cell, child spawn when a
// footprint's support reaches spawn_count. Built on the naive leader
// oracle's arithmetic (stored members, exact means, long double cosine)
// and entirely separate from the engine's data structures.

#include <cstddef>
#include <cstdint>
#include <map>
#include <vector>

#include "reference_leader.hpp"

namespace refimpl {

struct SimPolicy {
    double theta_seed = 0.35;
    double theta_step = 0.15;
    double theta_max = 1.0;
    std::uint64_t spawn_count = 50;
    std::size_t max_depth = 8;
};

class ClusterSimulator {
public:
    struct SimCell {
        double theta = 0.0;
        std::size_t depth = 1;
        std::vector<std::vector<std::vector<double>>> members; // per footprint
        std::map<std::size_t, std::size_t> children;           // footprint -> cell
    };

    explicit ClusterSimulator(SimPolicy policy) : policy_(policy) {
        cells_.push_back(SimCell{policy.theta_seed, 1, {}, {}});
    }

    // Returns the (cell, footprint) path the input took.
    std::vector<std::pair<std::size_t, std::size_t>> learn(const std::vector<double>& x) {
        std::vector<std::pair<std::size_t, std::size_t>> path;
        std::size_t cell = 0;
        for (;;) {
            SimCell& c = cells_[cell];
            std::size_t best = 0;
            long double best_sim = -1.0L;
            for (std::size_t f = 0; f < c.members.size(); ++f) {
                long double s = LeaderClustering::cosine(x, mean_of(c.members[f]));
                if (s > best_sim) {
                    best_sim = s;
                    best = f;
                }
            }
            bool created = c.members.empty() || best_sim < static_cast<long double>(c.theta);
            if (created) {
                c.members.push_back({x});
                path.emplace_back(cell, c.members.size() - 1);
                break;
            }
            c.members[best].push_back(x);
            path.emplace_back(cell, best);
            auto it = c.children.find(best);
            if (it != c.children.end()) {
                cell = it->second;
                continue;
            }
            if (c.members[best].size() == policy_.spawn_count && c.depth < policy_.max_depth &&
                c.theta < policy_.theta_max) {
                double child_theta = c.theta + policy_.theta_step;
                if (child_theta > policy_.theta_max)
                    child_theta = policy_.theta_max;
                cells_.push_back(SimCell{child_theta, c.depth + 1, {}, {}});
                cells_[cell].children[best] = cells_.size() - 1;
            }
            break;
        }
        return path;
    }

    std::size_t cell_count() const { return cells_.size(); }
    const SimCell& cell(std::size_t i) const { return cells_[i]; }

    std::vector<double> footprint_mean(std::size_t cell, std::size_t footprint) const {
        return mean_of(cells_[cell].members[footprint]);
    }

private:
    static std::vector<double> mean_of(const std::vector<std::vector<double>>& group) {
        std::vector<double> mean(group.front().size(), 0.0);
        for (std::size_t d = 0; d < mean.size(); ++d) {
            long double sum = 0.0L;
            for (const auto& x : group)
                sum += static_cast<long double>(x[d]);
            mean[d] = static_cast<double>(sum / static_cast<long double>(group.size()));
        }
        return mean;
    }

    SimPolicy policy_;
    std::vector<SimCell> cells_;
};

} // namespace refimpl
