#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <fpe/activation.hpp>
#include <fpe/cluster.hpp>
#include <fpe/errors.hpp>

namespace fpe {

/// Declarative memory: a sliding window of the last n frames, concatenated
/// into an episode and clustered. Matching a partial episode against stored
/// ones is what turns the window into context-sensitive prediction.
class DeclarativeMemory {
public:
    DeclarativeMemory(std::size_t frame_dim, std::size_t episode_length, ClusterPolicy policy)
        : frame_dim_(frame_dim),
          capacity_(episode_length),
          cluster_(frame_dim * episode_length, policy) {
        if (frame_dim_ == 0)
            throw ArgumentError("declarative memory frame dimension must be positive");
        if (capacity_ < 2)
            throw ArgumentError("declarative memory needs an episode length of at least 2");
        std::vector<std::pair<std::string, std::size_t>> sizes;
        for (std::size_t i = 0; i < capacity_; ++i)
            sizes.emplace_back("slot" + std::to_string(i), frame_dim_);
        slots_ = SegmentLayout::from_sizes(sizes);
    }

    static DeclarativeMemory restore(std::size_t frame_dim, std::size_t episode_length,
                                     std::deque<ActivationVector> frames, Cluster cluster) {
        DeclarativeMemory dm(frame_dim, episode_length, cluster.policy());
        if (cluster.dim() != frame_dim * episode_length)
            throw ValidationError("declarative cluster dimension must be frames * episode length");
        if (frames.size() > episode_length)
            throw ValidationError("declarative buffer holds more frames than the episode length");
        for (const auto& f : frames)
            if (f.dim() != frame_dim)
                throw ValidationError("declarative buffer frame has wrong dimension");
        dm.frames_ = std::move(frames);
        dm.cluster_ = std::move(cluster);
        return dm;
    }

    std::size_t frame_dim() const noexcept { return frame_dim_; }
    std::size_t episode_length() const noexcept { return capacity_; }
    const std::deque<ActivationVector>& frames() const noexcept { return frames_; }
    const Cluster& episode_cluster() const noexcept { return cluster_; }
    const SegmentLayout& slots() const noexcept { return slots_; }

    ActivationVector slot_of(const ActivationVector& episode, std::size_t index) const {
        return segment(episode, slots_, "slot" + std::to_string(index));
    }

    /// Pushes a frame (evicting the oldest when full). Returns nothing while
    /// the window is still warming up; afterwards the concatenated episode
    /// goes through the cluster and its trace is returned.
    std::optional<Trace> observe(const ActivationVector& frame, bool learn) {
        if (frame.dim() != frame_dim_)
            throw DimensionError("declarative observe: frame dimension mismatch");
        frames_.push_back(frame);
        if (frames_.size() > capacity_)
            frames_.pop_front();
        if (frames_.size() < capacity_)
            return std::nullopt;
        std::vector<ActivationVector> parts(frames_.begin(), frames_.end());
        ActivationVector episode = concat(parts);
        return cluster_.process(episode, Mask::all(episode.dim()), learn);
    }

    /// Queries with n-1 frames in the oldest slots and the newest slot
    /// masked out. Read-only.
    Trace query_episode(std::span<const ActivationVector> recent) const {
        if (recent.size() != capacity_ - 1)
            throw ArgumentError("declarative query needs exactly episode_length-1 frames");
        std::vector<ActivationVector> parts;
        std::vector<Mask> mask_parts;
        for (const ActivationVector& f : recent) {
            if (f.dim() != frame_dim_)
                throw ArgumentError("declarative query frame has wrong dimension");
            parts.push_back(f);
            mask_parts.push_back(Mask::all(frame_dim_));
        }
        parts.push_back(ActivationVector::zeros(frame_dim_));
        mask_parts.push_back(Mask::none(frame_dim_));
        return cluster_.query(concat(parts), concat_masks(mask_parts));
    }

    /// The newest slot of the best-matching stored episode: the predicted
    /// next frame. Empty when no episode has been stored yet.
    std::optional<ActivationVector> predict(std::span<const ActivationVector> recent) const {
        Trace t = query_episode(recent);
        if (!t.matched())
            return std::nullopt;
        return slot_of(t.projection(), capacity_ - 1);
    }

    friend bool operator==(const DeclarativeMemory&, const DeclarativeMemory&) = default;

private:
    std::size_t frame_dim_ = 0;
    std::size_t capacity_ = 0;
    SegmentLayout slots_;
    std::deque<ActivationVector> frames_;
    Cluster cluster_;
};

} // namespace fpe
