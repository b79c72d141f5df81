#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <fpe/codec.hpp>
#include <fpe/metacluster.hpp>

namespace fpe::synthetic {

/// Deterministic multimodal corpus: K patterns pairing a random binary image
/// and a sound symbol with the motor symbol of the same index. Exercises the
/// image+sound -> motor completion loop end to end.
struct SensorimotorCorpus {
    MetaclusterSpec spec;
    ImageCodec image_codec;
    CategoricalCodec sound_codec;
    CategoricalCodec motor_codec;
    std::vector<ChannelInputs> patterns;
    std::vector<std::size_t> motor_symbols;
};

inline SensorimotorCorpus make_sensorimotor_corpus(std::uint64_t seed, std::size_t k = 8,
                                                   std::size_t image_side = 16,
                                                   std::size_t block_size = 4) {
    SensorimotorCorpus corpus;
    corpus.image_codec = ImageCodec(image_side, image_side, 0.5);
    corpus.sound_codec = CategoricalCodec(k, block_size);
    corpus.motor_codec = CategoricalCodec(k, block_size);

    ClusterPolicy leaf_policy;
    leaf_policy.theta_seed = 0.7;
    leaf_policy.theta_step = 0.1;
    leaf_policy.spawn_count = 1000;
    leaf_policy.max_depth = 2;
    ClusterPolicy top_policy = leaf_policy;
    top_policy.theta_seed = 0.9;

    corpus.spec.channels = {
        {"image", corpus.image_codec.dim(), Codec(corpus.image_codec)},
        {"sound", corpus.sound_codec.dim(), Codec(corpus.sound_codec)},
        {"motor", corpus.motor_codec.dim(), Codec(corpus.motor_codec)},
    };
    corpus.spec.nodes = {
        {"image_leaf", {"image"}, leaf_policy},
        {"sound_leaf", {"sound"}, leaf_policy},
        {"motor_leaf", {"motor"}, leaf_policy},
        {"top", {"image_leaf", "sound_leaf", "motor_leaf"}, top_policy},
    };

    std::mt19937 rng(static_cast<std::uint32_t>(seed));
    std::bernoulli_distribution bit(0.5);
    for (std::size_t p = 0; p < k; ++p) {
        std::vector<Scalar> image(corpus.image_codec.dim());
        for (auto& px : image)
            px = bit(rng) ? 1.0 : 0.0;
        ChannelInputs inputs;
        inputs.emplace("image", ActivationVector(std::move(image)));
        inputs.emplace("sound", corpus.sound_codec.encode(p));
        inputs.emplace("motor", corpus.motor_codec.encode(p));
        corpus.patterns.push_back(std::move(inputs));
        corpus.motor_symbols.push_back(p);
    }
    return corpus;
}

/// Flips each bit of a binary vector independently with the given rate.
inline ActivationVector flip_bits(const ActivationVector& v, double rate, std::mt19937& rng) {
    std::bernoulli_distribution flip(rate);
    std::vector<Scalar> out = v.data();
    for (auto& x : out)
        if (flip(rng))
            x = 1.0 - x;
    return ActivationVector(std::move(out));
}

/// Two demonstration sequences over a sensor and a motor channel where the
/// shared probe state demands different motor responses depending on the
/// preceding context. Reactive agents cannot tell the contexts apart;
/// episodic ones can.
struct TwoContextCorpus {
    MetaclusterSpec spec;
    CategoricalCodec sensor_codec; // 0: context-a, 1: probe, 2: context-c
    CategoricalCodec motor_codec;  // responses 0..3
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> sequences;
    std::size_t context_a = 0;
    std::size_t probe = 1;
    std::size_t context_c = 2;
    std::size_t motor_after_a = 1;
    std::size_t motor_after_c = 3;

    ChannelInputs encode_step(std::size_t sensor, std::size_t motor) const {
        ChannelInputs inputs;
        inputs.emplace("sensor", sensor_codec.encode(sensor));
        inputs.emplace("motor", motor_codec.encode(motor));
        return inputs;
    }
};

inline TwoContextCorpus make_two_context_corpus() {
    TwoContextCorpus corpus;
    corpus.sensor_codec = CategoricalCodec(3, 8);
    corpus.motor_codec = CategoricalCodec(4, 8);

    ClusterPolicy leaf_policy;
    leaf_policy.theta_seed = 0.7;
    leaf_policy.theta_step = 0.1;
    leaf_policy.spawn_count = 1000;
    leaf_policy.max_depth = 2;
    ClusterPolicy top_policy = leaf_policy;
    top_policy.theta_seed = 0.9;

    corpus.spec.channels = {
        {"sensor", corpus.sensor_codec.dim(), Codec(corpus.sensor_codec)},
        {"motor", corpus.motor_codec.dim(), Codec(corpus.motor_codec)},
    };
    corpus.spec.nodes = {
        {"sensor_leaf", {"sensor"}, leaf_policy},
        {"motor_leaf", {"motor"}, leaf_policy},
        {"top", {"sensor_leaf", "motor_leaf"}, top_policy},
    };

    // (sensor, motor) per step: context a demands response 1 to the probe,
    // context c demands response 3.
    corpus.sequences = {
        {{corpus.context_a, 0}, {corpus.probe, corpus.motor_after_a}},
        {{corpus.context_c, 2}, {corpus.probe, corpus.motor_after_c}},
    };
    return corpus;
}

} // namespace fpe::synthetic
