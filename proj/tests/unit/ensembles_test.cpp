#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "betatrix/ensembles.hpp"

namespace {

using namespace betatrix;

TEST(TridiagonalSym, RejectsShapeMismatch) {
    EXPECT_THROW(TridiagonalSym({1.0, 2.0}, {1.0, 2.0}), InputError);
    EXPECT_THROW(TridiagonalSym({}, {}), InputError);
}

TEST(TridiagonalSym, RejectsNonfiniteEntries) {
    const TridiagonalSym t({1.0, std::nan("")}, {1.0});
    EXPECT_THROW(t.validate_finite(), InputError);
}

TEST(TridiagonalSym, DenseIsSymmetricWithStoredEntries) {
    const TridiagonalSym t({1.0, 2.0, 3.0}, {0.5, 0.25});
    const Eigen::MatrixXd d = t.dense();
    EXPECT_EQ(d(0, 1), 0.5);
    EXPECT_EQ(d(1, 0), 0.5);
    EXPECT_EQ(d(2, 1), 0.25);
    EXPECT_EQ(d(0, 2), 0.0);
    EXPECT_DOUBLE_EQ(t.trace(), 6.0);
}

TEST(HermiteParams, Validation) {
    EXPECT_THROW((HermiteParams{0.0, 3}.validate()), ParameterError);
    EXPECT_THROW((HermiteParams{1.0, 0}.validate()), ParameterError);
    EXPECT_NO_THROW((HermiteParams{0.01, 1}.validate()));
}

TEST(LaguerreParams, BoundIsStrict) {
    EXPECT_THROW((LaguerreParams{1.0, 3, 1.0}.validate()), ParameterError);
    EXPECT_NO_THROW((LaguerreParams{1.0, 3, 1.0001}.validate()));
    EXPECT_NO_THROW((LaguerreParams{2.0, 1, 0.01}.validate()));
}

TEST(Hermite, EntryLaws) {
    // diag ~ N(0,1); 2 subdiag[i]^2 ~ chi^2 with (n-1-i) beta dof
    const HermiteParams p{1.7, 5};
    const int count = 40000;
    std::vector<double> sub_sq(p.n - 1, 0.0);
    double diag_sq = 0.0;
    for (int i = 0; i < count; ++i) {
        RandomStream s(21, static_cast<std::uint64_t>(i));
        const TridiagonalSym t = sample_hermite(p, s);
        ASSERT_EQ(t.size(), p.n);
        diag_sq += t.diag[2] * t.diag[2];
        for (std::size_t k = 0; k + 1 < p.n; ++k) {
            ASSERT_GT(t.subdiag[k], 0.0);
            sub_sq[k] += 2.0 * t.subdiag[k] * t.subdiag[k];
        }
    }
    EXPECT_NEAR(diag_sq / count, 1.0, 5.0 * std::sqrt(2.0 / count));
    for (std::size_t k = 0; k + 1 < p.n; ++k) {
        const double dof = p.beta * static_cast<double>(p.n - 1 - k);
        EXPECT_NEAR(sub_sq[k] / count, dof, 5.0 * std::sqrt(2.0 * dof / count)) << "k = " << k;
    }
}

TEST(Laguerre, FactorEntryLaws) {
    const LaguerreParams p{1.3, 4, 2.9};
    const int count = 40000;
    std::vector<double> x_sq(p.m, 0.0), y_sq(p.m - 1, 0.0);
    for (int i = 0; i < count; ++i) {
        RandomStream s(22, static_cast<std::uint64_t>(i));
        const BidiagonalPos b = sample_laguerre_factor(p, s);
        for (std::size_t k = 0; k < p.m; ++k)
            x_sq[k] += b.diag[k] * b.diag[k];
        for (std::size_t k = 0; k + 1 < p.m; ++k)
            y_sq[k] += b.subdiag[k] * b.subdiag[k];
    }
    for (std::size_t k = 0; k < p.m; ++k) {
        const double dof = 2.0 * p.a - p.beta * static_cast<double>(k);
        EXPECT_NEAR(x_sq[k] / count, dof, 5.0 * std::sqrt(2.0 * dof / count)) << "x_" << k;
    }
    for (std::size_t k = 0; k + 1 < p.m; ++k) {
        const double dof = p.beta * static_cast<double>(p.m - 1 - k);
        EXPECT_NEAR(y_sq[k] / count, dof, 5.0 * std::sqrt(2.0 * dof / count)) << "y_" << k;
    }
}

TEST(Laguerre, ProductMatchesDenseBBt) {
    RandomStream s(23, 0);
    const BidiagonalPos b = sample_laguerre_factor({2.0, 6, 7.5}, s);
    const Eigen::MatrixXd dense = b.dense() * b.dense().transpose();
    const Eigen::MatrixXd t = laguerre_from_factor(b).dense();
    EXPECT_LT((dense - t).norm(), 1e-12 * dense.norm());
}

TEST(Laguerre, SampleIsDeterministicPerStream) {
    RandomStream a(5, 9), b(5, 9);
    const auto ta = sample_laguerre({0.8, 3, 4.1}, a);
    const auto tb = sample_laguerre({0.8, 3, 4.1}, b);
    EXPECT_EQ(ta.diag, tb.diag);
    EXPECT_EQ(ta.subdiag, tb.subdiag);
}

Eigen::VectorXd sorted_eigenvalues(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

TEST(Householder, PreservesSpectrumOfGoe) {
    RandomStream s(24, 0);
    const DenseSymmetric a = sample_goe(9, s);
    const TridiagonalSym t = householder_tridiagonalize(a);
    ASSERT_EQ(t.size(), 9u);
    for (double b : t.subdiag)
        EXPECT_GE(b, 0.0);
    const Eigen::VectorXd want = sorted_eigenvalues(a.a);
    const Eigen::VectorXd got = sorted_eigenvalues(t.dense());
    EXPECT_LT((want - got).norm(), 1e-12 * want.norm());
}

TEST(Householder, PreservesSpectrumOfGue) {
    RandomStream s(25, 0);
    const DenseComplexHermitian a = sample_gue(7, s);
    const TridiagonalSym t = householder_tridiagonalize(a);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.a, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd want = solver.eigenvalues();
    const Eigen::VectorXd got = sorted_eigenvalues(t.dense());
    EXPECT_LT((want - got).norm(), 1e-12 * want.norm());
}

TEST(Householder, KeepsFirstDiagonalEntry) {
    RandomStream s(26, 0);
    const DenseSymmetric a = sample_goe(5, s);
    EXPECT_DOUBLE_EQ(householder_tridiagonalize(a).diag[0], a.a(0, 0));
}

TEST(GolubKahan, PreservesSingularValues) {
    RandomStream s(27, 0);
    Eigen::MatrixXd g(4, 7);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            g(i, j) = gaussian(s);
    const BidiagonalPos b = golub_kahan_bidiagonalize(g);
    Eigen::JacobiSVD<Eigen::MatrixXd> want(g), got(b.dense());
    EXPECT_LT((want.singularValues() - got.singularValues()).norm(), 1e-12 * want.singularValues().norm());
}

TEST(GolubKahan, RejectsTallInput) {
    const Eigen::MatrixXd tall = Eigen::MatrixXd::Ones(3, 2);
    EXPECT_THROW(golub_kahan_bidiagonalize(tall), InputError);
}

} // namespace
