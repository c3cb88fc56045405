#include <cmath>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "betatrix/random.hpp"

namespace {

using betatrix::ChiLaw;
using betatrix::RandomStream;
using Block = std::array<std::uint32_t, 4>;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero) {
    EXPECT_EQ(betatrix::detail::philox4x32({0, 0, 0, 0}, {0, 0}),
              (Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
    EXPECT_EQ(betatrix::detail::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                           {0xffffffffu, 0xffffffffu}),
              (Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi) {
    EXPECT_EQ(betatrix::detail::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                           {0xa4093822u, 0x299f31d0u}),
              (Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, SameSeedAndStreamRepeat) {
    RandomStream a(42, 7), b(42, 7);
    for (int i = 0; i < 100; ++i)
        ASSERT_EQ(a.next_u64(), b.next_u64());
}

TEST(RandomStream, StreamsAndSeedsDiffer) {
    std::set<std::uint64_t> firsts;
    for (std::uint64_t seed = 0; seed < 4; ++seed)
        for (std::uint64_t id = 0; id < 64; ++id)
            firsts.insert(RandomStream(seed, id).next_u64());
    EXPECT_EQ(firsts.size(), 4u * 64u);
}

TEST(RandomStream, CountsConsumedWords) {
    RandomStream s(1, 1);
    EXPECT_EQ(s.words_consumed(), 0u);
    s.next_u64();
    EXPECT_EQ(s.words_consumed(), 1u);
    s.next_u64();
    s.next_u64();
    EXPECT_EQ(s.words_consumed(), 3u);
    betatrix::gaussian(s);
    EXPECT_EQ(s.words_consumed(), 5u);
}

TEST(RandomStream, UniformStaysInsideOpenInterval) {
    RandomStream s(3, 0);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
}

struct Moments {
    double mean = 0, var = 0;
};

template <class Draw>
Moments sample_moments(Draw draw, int count) {
    double sum = 0, sum_sq = 0;
    for (int i = 0; i < count; ++i) {
        const double x = draw();
        sum += x;
        sum_sq += x * x;
    }
    const double mean = sum / count;
    return {mean, sum_sq / count - mean * mean};
}

TEST(Gaussian, MeanAndVariance) {
    RandomStream s(11, 0);
    const int n = 200000;
    const auto m = sample_moments([&] { return betatrix::gaussian(s); }, n);
    EXPECT_NEAR(m.mean, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(m.var, 1.0, 5.0 * std::sqrt(2.0 / n));
}

class GammaShape : public ::testing::TestWithParam<double> {};

TEST_P(GammaShape, MeanAndVarianceMatchShape) {
    const double shape = GetParam();
    RandomStream s(12, static_cast<std::uint64_t>(shape * 1000));
    const int n = 200000;
    const auto m = sample_moments([&] { return betatrix::gamma_variate(s, shape, 2.0); }, n);
    const double mean = 2.0 * shape;
    const double var = 4.0 * shape;
    EXPECT_NEAR(m.mean, mean, 5.0 * std::sqrt(var / n));
    // Var of the sample variance: (mu4 - sigma^4) / n with mu4 = 3 var^2 + 6 var^2 / shape.
    EXPECT_NEAR(m.var, var, 5.0 * var * std::sqrt((2.0 + 6.0 / shape) / n));
}

INSTANTIATE_TEST_SUITE_P(Shapes, GammaShape, ::testing::Values(0.05, 0.3, 1.0, 2.5, 40.0));

TEST(Gamma, RejectsNonpositiveShape) {
    RandomStream s(1, 1);
    EXPECT_THROW(betatrix::gamma_variate(s, 0.0), betatrix::ParameterError);
    EXPECT_THROW(betatrix::gamma_variate(s, -1.0), betatrix::ParameterError);
}

TEST(Chi, SquareHasMeanDof) {
    for (double r : {0.1, 1.0, 3.7, 12.0}) {
        RandomStream s(13, static_cast<std::uint64_t>(r * 10));
        const int n = 100000;
        const auto m = sample_moments(
            [&] {
                const double x = betatrix::chi(s, ChiLaw(r));
                return x * x;
            },
            n);
        EXPECT_NEAR(m.mean, r, 5.0 * std::sqrt(2.0 * r / n)) << "r = " << r;
    }
}

TEST(Chi, LawRejectsZeroDof) { EXPECT_THROW(ChiLaw(0.0), betatrix::ParameterError); }

TEST(Chi, EvenMomentIsRisingProduct) {
    EXPECT_DOUBLE_EQ(betatrix::chi_even_moment(3.0, 0), 1.0);
    EXPECT_DOUBLE_EQ(betatrix::chi_even_moment(3.0, 1), 3.0);
    EXPECT_DOUBLE_EQ(betatrix::chi_even_moment(3.0, 3), 3.0 * 5.0 * 7.0);
}

} // namespace
