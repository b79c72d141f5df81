#pragma once

// Deterministic MNIST-shaped fixture: 28x28 grayscale digits drawn as random
// walks around per-class stroke prototypes, written as IDX files. Used by
// the CLI and acceptance tests whenever a real dataset is not supplied.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

namespace testdata {

struct Dataset {
    std::size_t rows = 28;
    std::size_t cols = 28;
    std::vector<std::vector<std::uint8_t>> images;
    std::vector<std::uint8_t> labels;
};

inline Dataset make_digit_like_dataset(std::uint32_t seed, std::size_t count,
                                       std::size_t classes = 10) {
    Dataset data;
    std::mt19937 rng(seed);
    const std::size_t dim = data.rows * data.cols;

    // Per-class stroke prototype: a random walk that thickens as it goes.
    std::vector<std::vector<std::uint8_t>> prototypes;
    std::uniform_int_distribution<int> start(6, 21);
    std::uniform_int_distribution<int> step(-1, 1);
    for (std::size_t c = 0; c < classes; ++c) {
        std::vector<std::uint8_t> proto(dim, 0);
        int y = start(rng);
        int x = start(rng);
        for (int walk = 0; walk < 90; ++walk) {
            y = std::min<int>(26, std::max(1, y + step(rng)));
            x = std::min<int>(26, std::max(1, x + step(rng)));
            for (int dy = 0; dy <= 1; ++dy)
                for (int dx = 0; dx <= 1; ++dx)
                    proto[static_cast<std::size_t>((y + dy) * 28 + (x + dx))] = 1;
        }
        prototypes.push_back(std::move(proto));
    }

    std::uniform_int_distribution<int> label(0, static_cast<int>(classes) - 1);
    std::bernoulli_distribution drop(0.1);
    std::bernoulli_distribution sprinkle(0.01);
    std::uniform_int_distribution<int> bright(170, 255);
    std::uniform_int_distribution<int> dark(0, 80);
    for (std::size_t i = 0; i < count; ++i) {
        int cls = label(rng);
        std::vector<std::uint8_t> img(dim);
        const auto& proto = prototypes[static_cast<std::size_t>(cls)];
        for (std::size_t p = 0; p < dim; ++p) {
            bool on = proto[p] ? !drop(rng) : sprinkle(rng);
            img[p] = static_cast<std::uint8_t>(on ? bright(rng) : dark(rng));
        }
        data.images.push_back(std::move(img));
        data.labels.push_back(static_cast<std::uint8_t>(cls));
    }
    return data;
}

inline void write_u32_be(std::ofstream& out, std::uint32_t v) {
    char bytes[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16),
                     static_cast<char>(v >> 8), static_cast<char>(v)};
    out.write(bytes, 4);
}

inline void write_idx(const Dataset& data, const std::filesystem::path& images_path,
                      const std::filesystem::path& labels_path) {
    std::ofstream images(images_path, std::ios::binary);
    if (!images)
        throw std::runtime_error("cannot write " + images_path.string());
    write_u32_be(images, 0x00000803);
    write_u32_be(images, static_cast<std::uint32_t>(data.images.size()));
    write_u32_be(images, static_cast<std::uint32_t>(data.rows));
    write_u32_be(images, static_cast<std::uint32_t>(data.cols));
    for (const auto& img : data.images)
        images.write(reinterpret_cast<const char*>(img.data()),
                     static_cast<std::streamsize>(img.size()));

    std::ofstream labels(labels_path, std::ios::binary);
    if (!labels)
        throw std::runtime_error("cannot write " + labels_path.string());
    write_u32_be(labels, 0x00000801);
    write_u32_be(labels, static_cast<std::uint32_t>(data.labels.size()));
    labels.write(reinterpret_cast<const char*>(data.labels.data()),
                 static_cast<std::streamsize>(data.labels.size()));
}

} // namespace testdata
