#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include <fpe/activation.hpp>
#include <fpe/errors.hpp>

namespace fpe {

/// Encodes row-major 8-bit grayscale images into binary activation vectors
/// and decodes activation vectors back into viewable images.
struct ImageCodec {
    std::size_t width = 0;
    std::size_t height = 0;
    double threshold = 0.5;

    ImageCodec() = default;
    ImageCodec(std::size_t w, std::size_t h, double thr = 0.5)
        : width(w), height(h), threshold(thr) {
        if (width == 0 || height == 0)
            throw ValidationError("image codec: width and height must be positive");
        if (!(threshold >= 0.0 && threshold <= 1.0))
            throw ValidationError("image codec: threshold must lie in [0,1]");
    }

    std::size_t dim() const noexcept { return width * height; }

    /// Bit i is 1 iff pixels[i]/255 >= threshold.
    ActivationVector encode(std::span<const std::uint8_t> pixels) const {
        if (pixels.size() != dim())
            throw DimensionError("image encode: pixel count does not match width*height");
        std::vector<Scalar> v(pixels.size());
        for (std::size_t i = 0; i < pixels.size(); ++i)
            v[i] = (static_cast<double>(pixels[i]) / 255.0 >= threshold) ? 1.0 : 0.0;
        return ActivationVector(std::move(v));
    }

    /// Byte i is round(v[i]*255), rounding half up.
    std::vector<std::uint8_t> decode(const ActivationVector& v) const {
        if (v.dim() != dim())
            throw DimensionError("image decode: vector dimension does not match width*height");
        std::vector<std::uint8_t> bytes(v.dim());
        for (std::size_t i = 0; i < v.dim(); ++i)
            bytes[i] = static_cast<std::uint8_t>(std::lround(v[i] * 255.0));
        return bytes;
    }

    friend bool operator==(const ImageCodec&, const ImageCodec&) = default;
};

/// Block code for symbol channels: symbol k activates bits
/// [k*block_size, (k+1)*block_size). Distinct symbols are orthogonal.
struct CategoricalCodec {
    std::size_t symbols = 0;
    std::size_t block_size = 1;

    CategoricalCodec() = default;
    CategoricalCodec(std::size_t k, std::size_t s) : symbols(k), block_size(s) {
        if (symbols < 2)
            throw ValidationError("categorical codec: need at least 2 symbols");
        if (block_size < 1)
            throw ValidationError("categorical codec: block size must be positive");
    }

    std::size_t dim() const noexcept { return symbols * block_size; }

    ActivationVector encode(std::size_t symbol) const {
        if (symbol >= symbols)
            throw ArgumentError("categorical encode: symbol out of range");
        std::vector<Scalar> v(dim(), 0.0);
        for (std::size_t i = 0; i < block_size; ++i)
            v[symbol * block_size + i] = 1.0;
        return ActivationVector(std::move(v));
    }

    /// Returns the symbol whose block has the highest mean activation
    /// (ties resolve to the lowest symbol) plus that mean as confidence.
    std::pair<std::size_t, double> decode(const ActivationVector& v) const {
        if (v.dim() != dim())
            throw DimensionError("categorical decode: vector dimension does not match codec");
        std::size_t best = 0;
        double best_mean = -1.0;
        for (std::size_t k = 0; k < symbols; ++k) {
            double sum = 0.0;
            for (std::size_t i = 0; i < block_size; ++i)
                sum += v[k * block_size + i];
            double mean = sum / static_cast<double>(block_size);
            if (mean > best_mean) {
                best_mean = mean;
                best = k;
            }
        }
        return {best, best_mean};
    }

    friend bool operator==(const CategoricalCodec&, const CategoricalCodec&) = default;
};

using Codec = std::variant<ImageCodec, CategoricalCodec>;

inline std::size_t codec_dim(const Codec& c) {
    return std::visit([](const auto& codec) { return codec.dim(); }, c);
}

} // namespace fpe
