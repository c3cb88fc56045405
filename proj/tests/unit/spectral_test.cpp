#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "betatrix/ensembles.hpp"
#include "betatrix/oracles.hpp"
#include "betatrix/spectral.hpp"

namespace {

using namespace betatrix;

TridiagonalSym hermite_sample(double beta, std::size_t n, std::uint64_t id) {
    RandomStream s(31, id);
    return sample_hermite({beta, n}, s);
}

double max_rel_diff(std::span<const double> a, std::span<const double> b) {
    double scale = 0.0, worst = 0.0;
    for (double x : a)
        scale = std::max(scale, std::abs(x));
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst / scale;
}

TEST(Eigenvalues, MatchDenseSolver) {
    for (std::size_t n : {1u, 2u, 7u, 40u}) {
        const TridiagonalSym t = hermite_sample(1.0, n, n);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t.dense(), Eigen::EigenvaluesOnly);
        const Eigen::VectorXd want = solver.eigenvalues();
        const std::vector<double> got = eigenvalues(t);
        ASSERT_EQ(got.size(), n);
        EXPECT_LT(max_rel_diff({want.data(), n}, got), 1e-13) << "n = " << n;
        EXPECT_TRUE(std::is_sorted(got.begin(), got.end()));
    }
}

TEST(Eigenvalues, QlAgreesWithBisection) {
    const TridiagonalSym t = hermite_sample(2.0, 25, 1);
    EXPECT_LT(max_rel_diff(eigenvalues(t), eigenvalues(t, kDefaultEigenTol, EigenMethod::ql)), 1e-13);
}

TEST(Eigenvalues, TwoByTwoClosedForm) {
    const TridiagonalSym t({1.0, 3.0}, {2.0});
    const auto ev = eigenvalues(t);
    EXPECT_NEAR(ev[0], 2.0 - std::sqrt(5.0), 1e-14);
    EXPECT_NEAR(ev[1], 2.0 + std::sqrt(5.0), 1e-14);
}

TEST(SturmCount, CountsEigenvaluesBelow) {
    const TridiagonalSym t = hermite_sample(1.0, 12, 2);
    const auto ev = eigenvalues(t);
    for (std::size_t k = 0; k + 1 < ev.size(); ++k) {
        const double mid = 0.5 * (ev[k] + ev[k + 1]);
        EXPECT_EQ(sturm_count(t, mid), k + 1);
    }
    EXPECT_EQ(sturm_count(t, ev.front() - 1.0), 0u);
    EXPECT_EQ(sturm_count(t, ev.back() + 1.0), ev.size());
}

TEST(CharPoly, ValuesMatchDeterminant) {
    const TridiagonalSym t = hermite_sample(1.0, 6, 3);
    const double y = 0.37;
    const Eigen::MatrixXd shifted = y * Eigen::MatrixXd::Identity(6, 6) - t.dense();
    EXPECT_NEAR(char_poly(t, y).value(6), shifted.determinant(), 1e-12 * std::abs(shifted.determinant()));
}

TEST(Paige, MatchesInverseIteration) {
    for (std::uint64_t id = 0; id < 20; ++id) {
        const TridiagonalSym t = hermite_sample(2.0, 15, 100 + id);
        const auto ev = eigenvalues(t);
        const auto q = first_row_eigvec(t, ev);
        const auto oracle = inverse_iteration_first_row(t, ev);
        for (std::size_t i = 0; i < q.size(); ++i)
            EXPECT_NEAR(q[i], oracle[i], 1e-10);
        EXPECT_NEAR(std::inner_product(q.begin(), q.end(), q.begin(), 0.0), 1.0, 1e-13);
    }
}

TEST(Paige, MatchesDenseEigenvectors) {
    const TridiagonalSym t = hermite_sample(0.5, 10, 4);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t.dense());
    const Spectrum sp = spectrum(t);
    for (Eigen::Index i = 0; i < 10; ++i)
        EXPECT_NEAR(sp.q[static_cast<std::size_t>(i)], std::abs(solver.eigenvectors()(0, i)), 1e-10);
}

TEST(Reconstruct, RoundTripsSmallBeta) {
    // beta < 1 produces tiny q components; the round trip must still hold.
    for (double beta : {0.5, 1.0, 4.0}) {
        for (std::uint64_t id = 0; id < 5; ++id) {
            const TridiagonalSym t = hermite_sample(beta, 30, 200 + id);
            const TridiagonalSym back = reconstruct(spectrum(t));
            for (std::size_t i = 0; i < t.size(); ++i)
                EXPECT_NEAR(back.diag[i], t.diag[i], 1e-8 * std::max(1.0, std::abs(t.diag[i])));
            for (std::size_t i = 0; i + 1 < t.size(); ++i)
                EXPECT_NEAR(back.subdiag[i] / t.subdiag[i], 1.0, 1e-8);
        }
    }
}

TEST(Reconstruct, RejectsInvalidSpectra) {
    EXPECT_THROW(reconstruct({{1.0, 0.5}, {0.6, 0.8}}), BijectionError);
    EXPECT_THROW(reconstruct({{1.0, 2.0}, {0.6, 0.9}}), BijectionError);
    EXPECT_THROW(reconstruct({{1.0, 2.0}, {1.0, 0.0}}), BijectionError);
    EXPECT_THROW(reconstruct({{1.0}, {0.6, 0.8}}), BijectionError);
}

TEST(Vandermonde, TridiagonalFormulaMatchesDirect) {
    for (std::size_t n : {2u, 5u, 12u}) {
        const TridiagonalSym t = hermite_sample(2.0, n, 300 + n);
        const Spectrum sp = spectrum(t);
        const LogValue direct = vandermonde_direct(sp.lambda);
        const LogValue via_t = vandermonde_tridiagonal(t, sp.q);
        EXPECT_EQ(direct.sign, 1);
        EXPECT_NEAR(direct.log_abs, via_t.log_abs, 1e-10);
    }
}

TEST(Vandermonde, DirectOnKnownPoints) {
    const std::vector<double> pts{0.0, 1.0, 3.0};
    EXPECT_NEAR(vandermonde_direct(pts).value(), 1.0 * 3.0 * 2.0, 1e-14);
}

TEST(Jacobian, BidiagonalClosedFormMatchesFiniteDifference) {
    for (std::size_t m = 1; m <= 5; ++m) {
        RandomStream s(32, m);
        const BidiagonalPos b = sample_laguerre_factor({1.5, m, 4.0}, s);
        const double fd = finite_difference_b_to_t_determinant(b);
        EXPECT_NEAR(std::exp(jacobian_b_to_t(b).log_abs) * fd, 1.0, 1e-6) << "m = " << m;
    }
}

TEST(Jacobian, RejectsZeroSubdiagonal) {
    const TridiagonalSym t({1.0, 2.0}, {0.0});
    EXPECT_THROW(jacobian_t_to_qlambda(t, std::vector<double>{0.6, 0.8}), DegenerateSpectrumError);
}

} // namespace
