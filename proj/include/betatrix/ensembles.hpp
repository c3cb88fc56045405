#pragma once

// Tridiagonal beta-Hermite and bidiagonal beta-Laguerre models, the dense
// classical ensembles used to cross-validate them, and the Householder
// reductions that connect the two.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "betatrix/error.hpp"
#include "betatrix/matrix.hpp"
#include "betatrix/random.hpp"

namespace betatrix {

struct HermiteParams {
    double beta = 2.0;
    std::size_t n = 1;

    void validate() const {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ParameterError("Hermite ensemble needs beta > 0");
        if (n < 1)
            throw ParameterError("Hermite ensemble needs n >= 1");
    }
};

struct LaguerreParams {
    double beta = 2.0;
    std::size_t m = 1;
    double a = 1.0;

    /// p = 1 + (beta/2)(m - 1), the exponent offset in the joint density.
    double p() const { return 1.0 + 0.5 * beta * static_cast<double>(m - 1); }

    void validate() const {
        if (!(beta > 0.0) || !std::isfinite(beta))
            throw ParameterError("Laguerre ensemble needs beta > 0");
        if (m < 1)
            throw ParameterError("Laguerre ensemble needs m >= 1");
        const double bound = 0.5 * beta * static_cast<double>(m - 1);
        if (!(a > bound) || !std::isfinite(a)) {
            std::ostringstream msg;
            msg << "Laguerre parameter a = " << a << " must exceed (beta/2)(m-1) = " << bound
                << " (smallest diagonal chi law would have dof " << 2.0 * a - 2.0 * bound << ")";
            throw ParameterError(msg.str());
        }
    }
};

/// beta-Hermite tridiagonal model: N(0,1) diagonal, subdiag[i] ~
/// chi_{(n-1-i) beta} / sqrt(2), all 2n - 1 entries independent.
inline TridiagonalSym sample_hermite(const HermiteParams& p, RandomStream& stream) {
    p.validate();
    const std::size_t n = p.n;
    std::vector<double> diag(n);
    std::vector<double> sub(n - 1);
    for (auto& d : diag)
        d = gaussian(stream);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dof = p.beta * static_cast<double>(n - 1 - i);
        sub[i] = chi(stream, ChiLaw(dof)) * std::numbers::sqrt2 / 2.0;
    }
    return TridiagonalSym(std::move(diag), std::move(sub));
}

/// beta-Laguerre bidiagonal factor: diag[i] ~ chi_{2a - beta i},
/// subdiag[i] ~ chi_{beta (m-1-i)}; the top-left entry is chi_{2a}.
inline BidiagonalPos sample_laguerre_factor(const LaguerreParams& p, RandomStream& stream) {
    p.validate();
    const std::size_t m = p.m;
    std::vector<double> diag(m);
    std::vector<double> sub(m - 1);
    for (std::size_t i = 0; i < m; ++i)
        diag[i] = chi(stream, ChiLaw(2.0 * p.a - p.beta * static_cast<double>(i)));
    for (std::size_t i = 0; i + 1 < m; ++i)
        sub[i] = chi(stream, ChiLaw(p.beta * static_cast<double>(m - 1 - i)));
    return BidiagonalPos(std::move(diag), std::move(sub));
}

/// T = B B^T from the entry relations, without forming dense products.
inline TridiagonalSym laguerre_from_factor(const BidiagonalPos& b) {
    const std::size_t m = b.size();
    std::vector<double> diag(m);
    std::vector<double> sub(m - 1);
    diag[0] = b.diag[0] * b.diag[0];
    for (std::size_t i = 1; i < m; ++i)
        diag[i] = b.subdiag[i - 1] * b.subdiag[i - 1] + b.diag[i] * b.diag[i];
    for (std::size_t i = 0; i + 1 < m; ++i)
        sub[i] = b.subdiag[i] * b.diag[i];
    return TridiagonalSym(std::move(diag), std::move(sub));
}

/// Tridiagonal beta-Laguerre matrix L = B B^T.
inline TridiagonalSym sample_laguerre(const LaguerreParams& p, RandomStream& stream) {
    return laguerre_from_factor(sample_laguerre_factor(p, stream));
}

enum class DenseKind { goe, gue };

/// GOE: symmetric, N(0,1) diagonal, N(0,1/2) off-diagonal.
inline DenseSymmetric sample_goe(std::size_t n, RandomStream& stream) {
    if (n < 1)
        throw ParameterError("GOE needs n >= 1");
    const auto nn = static_cast<Eigen::Index>(n);
    DenseSymmetric out{Eigen::MatrixXd::Zero(nn, nn)};
    for (Eigen::Index j = 0; j < nn; ++j) {
        out.a(j, j) = gaussian(stream);
        for (Eigen::Index i = j + 1; i < nn; ++i) {
            const double v = gaussian(stream) * std::numbers::sqrt2 / 2.0;
            out.a(i, j) = v;
            out.a(j, i) = v;
        }
    }
    return out;
}

/// m x n matrix of i.i.d. standard Gaussians; complex entries get
/// independent N(0,1) real and imaginary parts.
template <class Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sample_gaussian_matrix(std::size_t m,
                                                                            std::size_t n,
                                                                            RandomStream& stream) {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> g(static_cast<Eigen::Index>(m),
                                                            static_cast<Eigen::Index>(n));
    for (Eigen::Index j = 0; j < g.cols(); ++j) {
        for (Eigen::Index i = 0; i < g.rows(); ++i) {
            if constexpr (std::is_same_v<Scalar, double>) {
                g(i, j) = gaussian(stream);
            } else {
                const double re = gaussian(stream);
                const double im = gaussian(stream);
                g(i, j) = Scalar(re, im);
            }
        }
    }
    return g;
}

/// GUE as (G + G^*) / 2 with G a complex standard Gaussian matrix: real N(0,1)
/// diagonal, off-diagonal real and imaginary parts N(0,1/2).
inline DenseComplexHermitian sample_gue(std::size_t n, RandomStream& stream) {
    if (n < 1)
        throw ParameterError("GUE needs n >= 1");
    const Eigen::MatrixXcd g = sample_gaussian_matrix<std::complex<double>>(n, n, stream);
    DenseComplexHermitian out{(g + g.adjoint()) / 2.0};
    for (Eigen::Index i = 0; i < out.a.rows(); ++i)
        out.a(i, i) = out.a(i, i).real();
    return out;
}

using DenseClassical = std::variant<DenseSymmetric, DenseComplexHermitian>;

inline DenseClassical sample_dense_classical(DenseKind kind, std::size_t n, RandomStream& stream) {
    if (kind == DenseKind::goe)
        return sample_goe(n, stream);
    return sample_gue(n, stream);
}

namespace detail {

template <class Scalar>
double abs_value(const Scalar& v) {
    return std::abs(v);
}

template <class Scalar>
Scalar unit_phase(const Scalar& v) {
    const double m = std::abs(v);
    if (m == 0.0)
        return Scalar(1);
    return v / m;
}

/// Householder vector for x: returns (v, tau, beta) with
/// (I - tau v v^*) x = beta e_1 and beta = -phase(x_0) ||x||.
template <class Vec>
struct Reflector {
    Vec v;
    double tau = 0.0;
    typename Vec::Scalar beta{};
};

template <class Vec>
Reflector<Vec> make_reflector(const Vec& x) {
    using Scalar = typename Vec::Scalar;
    Reflector<Vec> r{x, 0.0, Scalar(0)};
    const double norm = x.norm();
    if (norm == 0.0)
        return r;
    const Scalar phase = unit_phase(x(0));
    r.v(0) += phase * norm;
    r.tau = 1.0 / (norm * (norm + abs_value(x(0))));
    r.beta = -phase * norm;
    return r;
}

} // namespace detail

/// Unitary similarity reduction of a real symmetric or complex Hermitian
/// matrix to real symmetric tridiagonal form with nonnegative subdiagonal.
/// Reflectors are H = I - 2 u u^* / (u^* u); remaining phases are absorbed by
/// a diagonal unitary similarity, which leaves the moduli.
template <class Scalar>
TridiagonalSym householder_tridiagonalize(const DenseHermitian<Scalar>& input) {
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    Mat a = input.a;
    const Eigen::Index n = a.rows();
    if (n < 1 || a.cols() != n)
        throw InputError("householder_tridiagonalize needs a nonempty square matrix");
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index r = n - k - 1;
        const Vec x = a.col(k).segment(k + 1, r);
        if (x.tail(r - 1).norm() == 0.0)
            continue;
        const auto refl = detail::make_reflector(x);
        auto s = a.block(k + 1, k + 1, r, r);
        const Vec p = refl.tau * (s * refl.v);
        const Scalar kk = Scalar(0.5 * refl.tau) * refl.v.dot(p);
        const Vec w = p - kk * refl.v;
        s -= refl.v * w.adjoint() + w * refl.v.adjoint();
        a.col(k).segment(k + 1, r).setZero();
        a.row(k).segment(k + 1, r).setZero();
        a(k + 1, k) = refl.beta;
        using std::conj;
        if constexpr (std::is_same_v<Scalar, double>)
            a(k, k + 1) = refl.beta;
        else
            a(k, k + 1) = conj(refl.beta);
    }
    std::vector<double> diag(static_cast<std::size_t>(n));
    std::vector<double> sub(static_cast<std::size_t>(n - 1));
    for (Eigen::Index i = 0; i < n; ++i)
        diag[static_cast<std::size_t>(i)] = std::real(a(i, i));
    for (Eigen::Index i = 0; i + 1 < n; ++i)
        sub[static_cast<std::size_t>(i)] = detail::abs_value(a(i + 1, i));
    return TridiagonalSym(std::move(diag), std::move(sub));
}

/// Two-sided Householder reduction of an m x n matrix (m <= n) to lower
/// bidiagonal form, alternating a right reflector on each row with a left
/// reflector on the column below the diagonal. Entries are returned as moduli;
/// zero entries signal rank deficiency (see BidiagonalPos::degenerate).
template <class Scalar>
BidiagonalPos golub_kahan_bidiagonalize(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& input) {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    auto g = input;
    const Eigen::Index m = g.rows();
    const Eigen::Index n = g.cols();
    if (m < 1 || m > n)
        throw InputError("golub_kahan_bidiagonalize needs 1 <= rows <= cols");
    for (Eigen::Index i = 0; i < m; ++i) {
        const Eigen::Index cols = n - i;
        if (cols > 1) {
            // Row reflector: acting on the conjugated row makes g(i, i:) a
            // multiple of e_1^T.
            const Vec x = g.row(i).segment(i, cols).adjoint();
            if (x.tail(cols - 1).norm() != 0.0) {
                const auto refl = detail::make_reflector(x);
                auto blk = g.block(i, i, m - i, cols);
                const Vec gv = blk * refl.v;
                blk -= refl.tau * gv * refl.v.adjoint();
                g.row(i).segment(i + 1, cols - 1).setZero();
            }
        }
        const Eigen::Index rows = m - i - 1;
        if (rows > 1) {
            const Vec y = g.col(i).segment(i + 1, rows);
            if (y.tail(rows - 1).norm() != 0.0) {
                const auto refl = detail::make_reflector(y);
                auto blk = g.block(i + 1, i, rows, cols);
                const Eigen::Matrix<Scalar, 1, Eigen::Dynamic> vb = refl.v.adjoint() * blk;
                blk -= refl.tau * refl.v * vb;
                g.col(i).segment(i + 2, rows - 1).setZero();
            }
        }
    }
    std::vector<double> diag(static_cast<std::size_t>(m));
    std::vector<double> sub(static_cast<std::size_t>(m - 1));
    for (Eigen::Index i = 0; i < m; ++i)
        diag[static_cast<std::size_t>(i)] = detail::abs_value(g(i, i));
    for (Eigen::Index i = 0; i + 1 < m; ++i)
        sub[static_cast<std::size_t>(i)] = detail::abs_value(g(i + 1, i));
    return BidiagonalPos(std::move(diag), std::move(sub));
}

} // namespace betatrix
