#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <fpe/codec.hpp>
#include <fpe/episodic.hpp>
#include <fpe/metacluster.hpp>

namespace fpe {

enum class AgentMode { reactive, episodic };

/// One acted step. The motor vector always has the motor channel's
/// dimension; the decode is present when that channel carries a
/// categorical codec. The bottom-up pass result rides along for
/// diagnostics.
struct StepResult {
    ActivationVector motor;
    std::optional<std::pair<std::size_t, double>> decoded_motor;
    AgentMode mode_used = AgentMode::reactive;
    bool fell_back = false;
    MetaResult motoperceptive;
};

struct TrainStepResult {
    MetaResult motoperceptive;
    bool declarative_enabled = false;
    bool declarative_pending = false;
};

/// The assembled agent: a motoperceptive metacluster over the embodiment's
/// channels, optionally stacked with a declarative memory whose frames are
/// the metacluster's root input vectors. Reactive steps complete the motor
/// channel from the current sensors alone; episodic steps match the recent
/// frame history against stored episodes first, so the same sensors can
/// yield different actions in different contexts.
class SyntheticCognition {
public:
    SyntheticCognition(Metacluster motoperceptive, std::string motor_channel, AgentMode mode,
                       std::optional<std::size_t> episode_length = std::nullopt,
                       std::optional<ClusterPolicy> episode_policy = std::nullopt)
        : mp_(std::move(motoperceptive)), motor_(std::move(motor_channel)), mode_(mode) {
        mp_.channel(motor_); // LookupError on unknown channel
        if (episode_length) {
            ClusterPolicy policy = episode_policy.value_or(default_episode_policy());
            declarative_.emplace(mp_.root_dim(), *episode_length, policy);
        }
        if (mode_ == AgentMode::episodic && !declarative_)
            throw ValidationError("episodic mode requires an episode length");
    }

    static SyntheticCognition restore(Metacluster motoperceptive, std::string motor_channel,
                                      AgentMode mode, std::optional<DeclarativeMemory> declarative) {
        if (declarative && declarative->frame_dim() != motoperceptive.root_dim())
            throw ValidationError(
                "declarative frame dimension must equal the metacluster root dimension");
        if (mode == AgentMode::episodic && !declarative)
            throw ValidationError("episodic mode requires a declarative memory");
        SyntheticCognition sc(std::move(motoperceptive), std::move(motor_channel),
                              AgentMode::reactive, std::nullopt, std::nullopt);
        sc.mode_ = mode;
        sc.declarative_ = std::move(declarative);
        return sc;
    }

    static ClusterPolicy default_episode_policy() {
        ClusterPolicy p;
        p.theta_seed = 0.9;
        p.theta_step = 0.05;
        p.spawn_count = 1000;
        p.max_depth = 1;
        return p;
    }

    const Metacluster& motoperceptive() const noexcept { return mp_; }
    const std::optional<DeclarativeMemory>& declarative() const noexcept { return declarative_; }
    AgentMode mode() const noexcept { return mode_; }
    const std::string& motor_channel() const noexcept { return motor_; }

    /// Supervised/demonstration step: every channel present, everything
    /// learns. The root input vector of the pass is observed as the next
    /// declarative frame.
    TrainStepResult train_step(const ChannelInputs& full) {
        for (const ChannelSpec& ch : mp_.spec().channels) {
            if (!full.count(ch.name))
                throw ArgumentError("training step is missing channel '" + ch.name + "'");
        }
        TrainStepResult result{mp_.process(full, true), false, false};
        if (declarative_) {
            result.declarative_enabled = true;
            result.declarative_pending = !declarative_->observe(result.motoperceptive.root_input,
                                                                true)
                                              .has_value();
        }
        return result;
    }

    /// Acting step: sensors only, never learns. Returns nothing when the
    /// model has no memory to answer from.
    std::optional<StepResult> step(const ChannelInputs& sensors) const {
        if (sensors.count(motor_))
            throw ArgumentError("acting step must not receive the motor channel");
        if (sensors.empty())
            throw ArgumentError("acting step needs at least one sensor channel");

        MetaResult pass = mp_.query(sensors);
        if (mode_ == AgentMode::episodic && episodic_ready()) {
            auto motor = episodic_motor(pass);
            if (!motor)
                return std::nullopt;
            return finish(std::move(*motor), AgentMode::episodic, false, std::move(pass));
        }

        // Reactive: refine the motor segment of the top match back down
        // through the motor cluster.
        if (!pass.root_matched)
            return std::nullopt;
        auto motor = mp_.complete_from_root(*pass.top_projection, motor_);
        if (!motor)
            return std::nullopt;
        bool fell_back = mode_ == AgentMode::episodic;
        return finish(std::move(*motor), AgentMode::reactive, fell_back, std::move(pass));
    }

    friend bool operator==(const SyntheticCognition&, const SyntheticCognition&) = default;

private:
    bool episodic_ready() const {
        return declarative_ && !declarative_->episode_cluster().empty() &&
               declarative_->frames().size() >= declarative_->episode_length() - 2;
    }

    // Matches [recent observed frames, current frame] against stored
    // episodes; the completed current frame's motor segment, refined through
    // the motor leaf cluster, is the action.
    std::optional<ActivationVector> episodic_motor(const MetaResult& pass) const {
        const std::size_t n = declarative_->episode_length();
        std::vector<ActivationVector> recent;
        const auto& buffered = declarative_->frames();
        std::size_t take = n - 2;
        for (std::size_t i = buffered.size() - take; i < buffered.size(); ++i)
            recent.push_back(buffered[i]);
        recent.push_back(pass.root_input);
        Trace t = declarative_->query_episode(recent);
        if (!t.matched())
            return std::nullopt;
        ActivationVector completed_current = declarative_->slot_of(t.projection(), n - 2);
        return mp_.complete_from_root(completed_current, motor_);
    }

    StepResult finish(ActivationVector motor, AgentMode used, bool fell_back,
                      MetaResult pass) const {
        StepResult result;
        result.decoded_motor = decode_motor(motor);
        result.motor = std::move(motor);
        result.mode_used = used;
        result.fell_back = fell_back;
        result.motoperceptive = std::move(pass);
        return result;
    }

    std::optional<std::pair<std::size_t, double>> decode_motor(const ActivationVector& v) const {
        const ChannelSpec& ch = mp_.channel(motor_);
        if (!ch.codec || !std::holds_alternative<CategoricalCodec>(*ch.codec))
            return std::nullopt;
        return std::get<CategoricalCodec>(*ch.codec).decode(v);
    }

    Metacluster mp_;
    std::string motor_;
    AgentMode mode_;
    std::optional<DeclarativeMemory> declarative_;
};

} // namespace fpe
