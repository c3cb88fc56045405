#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "betatrix/closed_forms.hpp"
#include "betatrix/quadrature.hpp"

namespace {

using namespace betatrix;

TEST(Normalization, HermiteSizeOneIsStandardNormal) {
    for (double beta : {0.3, 1.0, 5.0})
        EXPECT_NEAR(log_c_hermite(beta, 1), -0.5 * std::log(2.0 * std::numbers::pi), 1e-15);
}

TEST(Normalization, LaguerreSizeOneIsChiSquare) {
    // lambda ~ chi^2(2a): density lambda^(a-1) e^(-lambda/2) / (2^a Gamma(a))
    for (double a : {0.7, 1.0, 3.2}) {
        const double want = -a * std::numbers::ln2 - std::lgamma(a);
        EXPECT_NEAR(log_c_laguerre(1.0, 1, a), want, 1e-13) << "a = " << a;
        const std::vector<double> lambda{1.9};
        EXPECT_NEAR(log_density_laguerre(lambda, 1.0, a), want + (a - 1.0) * std::log(1.9) - 0.95, 1e-13);
    }
}

TEST(Normalization, JacobiSizeOneIsBeta) {
    const double a1 = 1.7, a2 = 0.6;
    EXPECT_NEAR(log_c_jacobi(2.0, 1, a1, a2), std::lgamma(a1 + a2) - std::lgamma(a1) - std::lgamma(a2), 1e-13);
}

TEST(Normalization, HermiteGoeSizeTwoKnownValue) {
    // int |l1 - l2| exp(-(l1^2 + l2^2)/2) over R^2 equals 4 sqrt(pi)
    EXPECT_NEAR(std::exp(-log_c_hermite(1.0, 2)), 4.0 * std::sqrt(std::numbers::pi), 1e-12);
}

TEST(Normalization, RejectsBadParameters) {
    EXPECT_THROW(log_c_hermite(-1.0, 2), ParameterError);
    EXPECT_THROW(log_c_laguerre(1.0, 3, 1.0), ParameterError);
    EXPECT_THROW(log_c_jacobi(1.0, 3, 2.0, 0.9), ParameterError);
}

TEST(Density, LaguerreRejectsNonpositiveEigenvalue) {
    const std::vector<double> lambda{-0.5, 1.0};
    EXPECT_THROW(log_density_laguerre(lambda, 1.0, 3.0), DomainError);
}

TEST(Density, JacobiRejectsOutsideUnitInterval) {
    const std::vector<double> lambda{0.5, 1.0};
    EXPECT_THROW(log_density_jacobi(lambda, 1.0, 3.0, 3.0), DomainError);
}

TEST(Density, RejectsNonfinite) {
    const std::vector<double> lambda{0.5, std::nan("")};
    EXPECT_THROW(log_density_hermite(lambda, 1.0), InputError);
}

class SelbergHermite : public ::testing::TestWithParam<double> {};

TEST_P(SelbergHermite, QuadratureMatchesClosedForm) {
    const auto r = quadrature_hermite({GetParam(), 2});
    EXPECT_LT(r.relative_error, 1e-6);
}

INSTANTIATE_TEST_SUITE_P(Betas, SelbergHermite, ::testing::Values(1.0, 2.0, 3.5, 0.4));

TEST(Selberg, LaguerreQuadratureMatchesClosedForm) {
    EXPECT_LT(quadrature_laguerre({1.0, 2, 1.5}).relative_error, 1e-5);
    EXPECT_LT(quadrature_laguerre({3.5, 2, 2.0}).relative_error, 1e-5);
    EXPECT_LT(quadrature_laguerre({2.0, 2, 1.1}).relative_error, 1e-5);
}

TEST(Selberg, JacobiQuadratureMatchesClosedForm) {
    EXPECT_LT(quadrature_jacobi({1.0, 2, 1.5, 2.5}).relative_error, 1e-6);
}

TEST(Selberg, QuadratureNeedsSizeTwo) { EXPECT_THROW(quadrature_hermite({1.0, 3}), ParameterError); }

TEST(RisingFactorial, Values) {
    EXPECT_DOUBLE_EQ(rising_factorial(3.0, 0), 1.0);
    EXPECT_DOUBLE_EQ(rising_factorial(3.0, 4), 3.0 * 4.0 * 5.0 * 6.0);
    EXPECT_DOUBLE_EQ(rising_factorial(-2.5, 2), -2.5 * -1.5);
    const LogValue lv = log_rising_factorial(-2.5, 3);
    EXPECT_EQ(lv.sign, -1);
    EXPECT_NEAR(lv.log_abs, std::log(2.5 * 1.5 * 0.5), 1e-15);
}

TEST(RisingFactorial, PoleIsRejected) {
    EXPECT_THROW(rising_factorial(-2.0, 3), ParameterError);
    EXPECT_NO_THROW(rising_factorial(-2.0, 2));
}

TEST(Discriminant, HermiteTwoByTwoBetaTwo) {
    EXPECT_NEAR(discriminant_moment(EnsembleDensity::hermite(2.0, 2), 1), 6.0, 1e-12);
    // (l1 - l2)^2 = (a1 - a2)^2 + 4 b^2 with E[b^2] = beta / 2, so the mean is 2 + 2 beta
    EXPECT_NEAR(discriminant_moment(EnsembleDensity::hermite(1.0, 2), 1), 4.0, 1e-12);
    EXPECT_NEAR(discriminant_moment(EnsembleDensity::hermite(3.5, 2), 1), 9.0, 1e-12);
}

TEST(Discriminant, RoutesAgree) {
    for (std::size_t n = 1; n <= 5; ++n) {
        for (unsigned k = 0; k <= 3; ++k) {
            const HermiteParams h{1.3, n};
            EXPECT_NEAR(log_discriminant_moment_gamma_ratio(h, k), log_discriminant_moment_rising(h, k), 1e-10);
            const LaguerreParams l{0.9, n, 0.45 * static_cast<double>(n) + 0.7};
            EXPECT_NEAR(log_discriminant_moment_gamma_ratio(l, k), log_discriminant_moment_rising(l, k), 1e-10);
            const JacobiParams j{2.2, n, 1.1 * static_cast<double>(n), 1.1 * static_cast<double>(n) + 0.3};
            EXPECT_NEAR(log_discriminant_moment_gamma_ratio(j, k), log_discriminant_moment_rising(j, k), 1e-10);
        }
    }
}

TEST(Discriminant, ZeroPowerIsOne) {
    EXPECT_NEAR(discriminant_moment(EnsembleDensity::laguerre(2.0, 3, 4.0), 0), 1.0, 1e-14);
}

std::vector<Rational> ints(std::initializer_list<long> values) {
    std::vector<Rational> out;
    for (long v : values)
        out.emplace_back(v);
    return out;
}

TEST(ClassicalPolynomials, ProbabilistsHermite) {
    EXPECT_EQ(classical_monic(PolynomialFamily::hermite_probabilists, 4).coefficients, ints({3, 0, -6, 0, 1}));
    EXPECT_EQ(classical_monic(PolynomialFamily::hermite_probabilists, 0).coefficients, ints({1}));
}

TEST(ClassicalPolynomials, PhysicistsHermite) {
    // H_3 = 8x^3 - 12x, monic x^3 - 3/2 x
    const auto p = classical_monic(PolynomialFamily::hermite_physicists, 3);
    EXPECT_EQ(p.coefficients[1], Rational(-3, 2));
    EXPECT_EQ(p.coefficients[3], Rational(1));
}

TEST(ClassicalPolynomials, GeneralizedLaguerre) {
    // monic L_2^alpha: x^2 - 2 (alpha + 2) x + (alpha + 1)(alpha + 2)
    const auto p = classical_monic(PolynomialFamily::generalized_laguerre, 2, 0.5);
    EXPECT_EQ(p.coefficients[0], Rational(15, 4));
    EXPECT_EQ(p.coefficients[1], Rational(-5));
    EXPECT_EQ(p.coefficients[2], Rational(1));
}

TEST(ClassicalPolynomials, RescaleMonic) {
    // He_2(y / 2) * 4 = y^2 - 4
    const auto p = rescale_monic(classical_monic(PolynomialFamily::hermite_probabilists, 2), Rational(2));
    EXPECT_EQ(p.coefficients, ints({-4, 0, 1}));
}

} // namespace
