#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include <fpe/activation.hpp>

using namespace fpe;

namespace {

ActivationVector random_vector(std::mt19937& rng, std::size_t dim, bool binary) {
    std::vector<Scalar> v(dim);
    if (binary) {
        std::bernoulli_distribution bit(0.4);
        for (auto& x : v)
            x = bit(rng) ? 1.0 : 0.0;
    } else {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& x : v)
            x = u(rng);
    }
    return ActivationVector(std::move(v));
}

} // namespace

TEST(ActivationVector, ValidatesRangeAndDimension) {
    EXPECT_THROW(ActivationVector(std::vector<Scalar>{}), ArgumentError);
    EXPECT_THROW(ActivationVector({0.5, 1.2}), ArgumentError);
    EXPECT_THROW(ActivationVector({-0.1}), ArgumentError);
    EXPECT_THROW(ActivationVector::zeros(0), ArgumentError);

    ActivationVector v{0.0, 1.0, 0.5};
    EXPECT_EQ(v.dim(), 3u);
    EXPECT_FALSE(v.is_binary());
    EXPECT_TRUE(ActivationVector({1.0, 0.0}).is_binary());
}

TEST(Similarity, IdenticalVectorsGiveOne) {
    ActivationVector a{1, 0, 1, 0};
    EXPECT_DOUBLE_EQ(similarity(a, a, Mask::all(4)), 1.0);
}

TEST(Similarity, DisjointSupportsGiveZero) {
    ActivationVector a{1, 0, 0, 0};
    ActivationVector b{0, 0, 1, 0};
    EXPECT_DOUBLE_EQ(similarity(a, b, Mask::all(4)), 0.0);
}

TEST(Similarity, HalfOverlapIsInverseSqrtTwo) {
    ActivationVector a{1, 1, 0, 0};
    ActivationVector b{1, 0, 0, 0};
    EXPECT_NEAR(similarity(a, b, Mask::all(4)), 1.0 / std::sqrt(2.0), 1e-8);
}

TEST(Similarity, MaskedRestrictionIdentical) {
    ActivationVector a{1, 1, 0, 1};
    ActivationVector b{1, 1, 0, 0};
    Mask m(std::vector<std::uint8_t>{1, 1, 0, 0});
    EXPECT_DOUBLE_EQ(similarity(a, b, m), 1.0);
}

TEST(Similarity, ZeroVectorConventions) {
    ActivationVector z = ActivationVector::zeros(3);
    ActivationVector a{1, 0, 1};
    EXPECT_DOUBLE_EQ(similarity(z, z, Mask::all(3)), 1.0);
    EXPECT_DOUBLE_EQ(similarity(z, a, Mask::all(3)), 0.0);
    EXPECT_DOUBLE_EQ(similarity(a, z, Mask::all(3)), 0.0);
}

TEST(Similarity, SelfSimilarityIsOneUnderEveryMask) {
    std::mt19937 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        ActivationVector a = random_vector(rng, 16, true);
        std::vector<std::uint8_t> bits(16);
        std::bernoulli_distribution present(0.5);
        for (auto& b : bits)
            b = present(rng) ? 1 : 0;
        Mask m(bits);
        EXPECT_DOUBLE_EQ(similarity(a, a, m), 1.0);
    }
    // Degenerate all-absent mask falls into the both-zero convention.
    ActivationVector a{1, 0, 1};
    EXPECT_DOUBLE_EQ(similarity(a, a, Mask::none(3)), 1.0);
}

TEST(Similarity, SymmetricAndInRange) {
    std::mt19937 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        ActivationVector a = random_vector(rng, 24, trial % 2 == 0);
        ActivationVector b = random_vector(rng, 24, trial % 3 == 0);
        double ab = similarity(a, b, Mask::all(24));
        double ba = similarity(b, a, Mask::all(24));
        EXPECT_DOUBLE_EQ(ab, ba);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 1.0);
    }
}

TEST(Similarity, DimensionMismatchThrows) {
    ActivationVector a{1, 0};
    ActivationVector b{1, 0, 0};
    EXPECT_THROW(similarity(a, b, Mask::all(2)), DimensionError);
    EXPECT_THROW(similarity(a, ActivationVector({1.0, 0.0}), Mask::all(3)), DimensionError);
}

TEST(Concat, CopiesValuesInOrder) {
    EXPECT_EQ(concat({ActivationVector{1, 0}, ActivationVector{0, 1}}),
              ActivationVector({1, 0, 0, 1}));
    EXPECT_EQ(concat({ActivationVector{0.5}}), ActivationVector({0.5}));
    EXPECT_EQ(concat({ActivationVector{1}, ActivationVector{0}, ActivationVector{1}}),
              ActivationVector({1, 0, 1}));
    EXPECT_THROW(concat(std::span<const ActivationVector>{}), ArgumentError);
}

TEST(SegmentLayout, LookupAndErrors) {
    auto layout = SegmentLayout::from_sizes({{"a", 2}, {"b", 2}});
    EXPECT_EQ(layout.total(), 4u);
    ActivationVector v{1, 0, 0, 1};
    EXPECT_EQ(segment(v, layout, "b"), ActivationVector({0, 1}));

    auto full = SegmentLayout::from_sizes({{"x", 2}});
    EXPECT_EQ(segment(ActivationVector{0.25, 0.75}, full, "x"), ActivationVector({0.25, 0.75}));

    EXPECT_THROW(segment(v, layout, "c"), LookupError);
    EXPECT_THROW(segment(ActivationVector{1, 0}, layout, "a"), DimensionError);
    EXPECT_THROW(SegmentLayout::from_sizes({{"a", 1}, {"a", 2}}), ArgumentError);
    EXPECT_THROW(SegmentLayout::from_sizes({{"a", 0}}), ArgumentError);
}

TEST(SegmentLayout, ConcatSegmentRoundTrip) {
    std::mt19937 rng(23);
    auto layout = SegmentLayout::from_sizes({{"a", 8}, {"b", 5}});
    for (int trial = 0; trial < 1000; ++trial) {
        ActivationVector p = random_vector(rng, 8, trial % 2 == 0);
        ActivationVector q = random_vector(rng, 5, trial % 2 == 1);
        ActivationVector joined = concat({p, q});
        EXPECT_EQ(segment(joined, layout, "a"), p);
        EXPECT_EQ(segment(joined, layout, "b"), q);
    }
}

TEST(Binarize, ThresholdBoundaryInclusive) {
    EXPECT_EQ(binarize(ActivationVector{0.2, 0.8}, 0.5), ActivationVector({0, 1}));
    EXPECT_EQ(binarize(ActivationVector{0.5}, 0.5), ActivationVector({1}));
    ActivationVector b{1, 0, 1};
    EXPECT_EQ(binarize(b, 0.5), b);
    EXPECT_THROW(binarize(b, 1.5), ArgumentError);
    EXPECT_THROW(binarize(b, -0.1), ArgumentError);
}

TEST(ConcatMasks, JoinsPresenceFlags) {
    Mask m = concat_masks(std::vector<Mask>{Mask::all(2), Mask::none(3)});
    ASSERT_EQ(m.dim(), 5u);
    EXPECT_TRUE(m[0]);
    EXPECT_TRUE(m[1]);
    EXPECT_FALSE(m[2]);
    EXPECT_FALSE(m[4]);
    EXPECT_EQ(m.present_count(), 2u);
    EXPECT_TRUE(m.any());
    EXPECT_FALSE(m.all_present());
}
