#include <gtest/gtest.h>

#include <cstdint>
#include <random>
#include <vector>

#include <fpe/codec.hpp>

using namespace fpe;

TEST(ImageCodec, EncodeThresholdsPixels) {
    ImageCodec codec(2, 2, 0.5);
    std::vector<std::uint8_t> pixels{0, 255, 128, 0};
    // 128/255 ~= 0.502 lands just above the threshold.
    EXPECT_EQ(codec.encode(pixels), ActivationVector({0, 1, 1, 0}));

    std::vector<std::uint8_t> blank(4, 0);
    EXPECT_EQ(codec.encode(blank), ActivationVector::zeros(4));

    EXPECT_THROW(codec.encode(std::vector<std::uint8_t>{1, 2, 3}), DimensionError);
}

TEST(ImageCodec, EncodeMatchesPixelLoopOracle) {
    ImageCodec codec(14, 7, 0.5);
    std::mt19937 rng(99);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int sample = 0; sample < 100; ++sample) {
        std::vector<std::uint8_t> pixels(codec.dim());
        for (auto& p : pixels)
            p = static_cast<std::uint8_t>(byte(rng));
        ActivationVector v = codec.encode(pixels);
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            double expected = (pixels[i] / 255.0 >= 0.5) ? 1.0 : 0.0;
            ASSERT_EQ(v[i], expected) << "pixel " << i;
        }
    }
}

TEST(ImageCodec, DecodeRoundsHalfUp) {
    ImageCodec codec(2, 2);
    std::vector<std::uint8_t> bytes = codec.decode(ActivationVector{0, 1, 0.5, 0.25});
    EXPECT_EQ(bytes, (std::vector<std::uint8_t>{0, 255, 128, 64}));

    EXPECT_EQ(codec.decode(ActivationVector::zeros(4)), std::vector<std::uint8_t>(4, 0));
    EXPECT_THROW(codec.decode(ActivationVector::zeros(3)), DimensionError);
}

TEST(ImageCodec, EncodeDecodeRoundTripOnBinary) {
    ImageCodec codec(8, 8, 0.5);
    std::mt19937 rng(123);
    std::uniform_int_distribution<int> byte(0, 255);
    for (int sample = 0; sample < 100; ++sample) {
        std::vector<std::uint8_t> pixels(codec.dim());
        for (auto& p : pixels)
            p = static_cast<std::uint8_t>(byte(rng));
        ActivationVector v = codec.encode(pixels);
        // Decoding a binary vector gives {0,255}; re-encoding recovers it.
        ActivationVector again = codec.encode(codec.decode(v));
        EXPECT_EQ(again, v);
    }
}

TEST(ImageCodec, ValidatesSpec) {
    EXPECT_THROW(ImageCodec(0, 4), ValidationError);
    EXPECT_THROW(ImageCodec(4, 4, 1.5), ValidationError);
}

TEST(CategoricalCodec, EncodeActivatesOneBlock) {
    CategoricalCodec codec(3, 2);
    EXPECT_EQ(codec.encode(0), ActivationVector({1, 1, 0, 0, 0, 0}));
    EXPECT_EQ(codec.encode(2), ActivationVector({0, 0, 0, 0, 1, 1}));
    EXPECT_THROW(codec.encode(3), ArgumentError);

    // Distinct symbols occupy disjoint blocks.
    EXPECT_DOUBLE_EQ(similarity(codec.encode(0), codec.encode(1), Mask::all(codec.dim())), 0.0);
}

TEST(CategoricalCodec, DecodeRoundTripAndTies) {
    CategoricalCodec codec(5, 3);
    for (std::size_t k = 0; k < codec.symbols; ++k) {
        auto [symbol, confidence] = codec.decode(codec.encode(k));
        EXPECT_EQ(symbol, k);
        EXPECT_DOUBLE_EQ(confidence, 1.0);
    }

    CategoricalCodec small(2, 2);
    auto [symbol, confidence] = small.decode(ActivationVector{0.2, 0.2, 0.9, 0.9});
    EXPECT_EQ(symbol, 1u);
    EXPECT_DOUBLE_EQ(confidence, 0.9);

    // All-zero input ties every block; the lowest symbol wins.
    auto [zsym, zconf] = small.decode(ActivationVector::zeros(4));
    EXPECT_EQ(zsym, 0u);
    EXPECT_DOUBLE_EQ(zconf, 0.0);

    EXPECT_THROW(small.decode(ActivationVector::zeros(3)), DimensionError);
    EXPECT_THROW(CategoricalCodec(1, 2), ValidationError);
    EXPECT_THROW(CategoricalCodec(4, 0), ValidationError);
}

TEST(CategoricalCodec, EveryEncodingHasExactlyBlockSizeActiveBits) {
    CategoricalCodec codec(7, 5);
    for (std::size_t k = 0; k < codec.symbols; ++k) {
        ActivationVector v = codec.encode(k);
        std::size_t active = 0;
        for (std::size_t i = 0; i < v.dim(); ++i)
            active += v[i] == 1.0 ? 1 : 0;
        EXPECT_EQ(active, codec.block_size);
        // Active bits sit exactly in the symbol's block.
        for (std::size_t i = 0; i < v.dim(); ++i)
            EXPECT_EQ(v[i] == 1.0, i >= k * codec.block_size && i < (k + 1) * codec.block_size);
    }
}

TEST(CategoricalCodec, EncoderIsDeterministic) {
    CategoricalCodec codec(4, 2);
    EXPECT_EQ(codec.encode(3), codec.encode(3));
    ImageCodec img(3, 3);
    std::vector<std::uint8_t> pixels{10, 200, 130, 0, 255, 90, 128, 127, 1};
    EXPECT_EQ(img.encode(pixels), img.encode(pixels));
}
