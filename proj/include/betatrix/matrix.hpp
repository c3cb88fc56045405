#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "betatrix/error.hpp"

namespace betatrix {

// Storage convention for every banded type: index 0 is the top-left entry.
// Where the literature labels a tridiagonal from the bottom (a_n ... a_1 top to
// bottom, b_{n-1} ... b_1), the bottom-counted label k maps to diag[n - k] and
// subdiagonal label k to subdiag[n - 1 - k].

/// Real symmetric tridiagonal matrix; subdiag[i] couples rows i and i + 1.
struct TridiagonalSym {
    std::vector<double> diag;
    std::vector<double> subdiag;

    TridiagonalSym() = default;
    TridiagonalSym(std::vector<double> d, std::vector<double> s)
        : diag(std::move(d)), subdiag(std::move(s)) {
        validate_shape();
    }

    std::size_t size() const noexcept { return diag.size(); }

    void validate_shape() const {
        if (diag.empty())
            throw InputError("tridiagonal matrix must have at least one row");
        if (subdiag.size() + 1 != diag.size())
            throw InputError("tridiagonal subdiagonal must have n - 1 entries");
    }

    void validate_finite() const {
        validate_shape();
        const auto finite = [](double v) { return std::isfinite(v); };
        if (!std::all_of(diag.begin(), diag.end(), finite) ||
            !std::all_of(subdiag.begin(), subdiag.end(), finite))
            throw InputError("tridiagonal matrix has nonfinite entries");
    }

    /// True when some subdiagonal entry is exactly zero (the matrix splits).
    bool degenerate() const {
        return std::any_of(subdiag.begin(), subdiag.end(), [](double b) { return b == 0.0; });
    }

    double trace() const {
        double t = 0.0;
        for (double a : diag)
            t += a;
        return t;
    }

    double frobenius_norm_squared() const {
        double f = 0.0;
        for (double a : diag)
            f += a * a;
        for (double b : subdiag)
            f += 2.0 * b * b;
        return f;
    }

    /// Gershgorin radius: every eigenvalue lies in [-bound, bound].
    double gershgorin_bound() const {
        double bound = 0.0;
        const std::size_t n = size();
        for (std::size_t i = 0; i < n; ++i) {
            double r = std::abs(diag[i]);
            if (i > 0)
                r += std::abs(subdiag[i - 1]);
            if (i + 1 < n)
                r += std::abs(subdiag[i]);
            bound = std::max(bound, r);
        }
        return bound;
    }

    Eigen::MatrixXd dense() const {
        const auto n = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            m(i, i) = diag[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            m(i + 1, i) = subdiag[static_cast<std::size_t>(i)];
            m(i, i + 1) = subdiag[static_cast<std::size_t>(i)];
        }
        return m;
    }
};

/// Lower bidiagonal factor B with positive entries: diag[i] = B(i, i),
/// subdiag[i] = B(i + 1, i).
struct BidiagonalPos {
    std::vector<double> diag;
    std::vector<double> subdiag;

    BidiagonalPos() = default;
    BidiagonalPos(std::vector<double> d, std::vector<double> s)
        : diag(std::move(d)), subdiag(std::move(s)) {
        if (diag.empty())
            throw InputError("bidiagonal matrix must have at least one row");
        if (subdiag.size() + 1 != diag.size())
            throw InputError("bidiagonal subdiagonal must have m - 1 entries");
    }

    std::size_t size() const noexcept { return diag.size(); }

    /// Zero entries mark a rank-deficient reduction.
    bool degenerate() const {
        const auto zero = [](double v) { return v == 0.0; };
        return std::any_of(diag.begin(), diag.end(), zero) ||
               std::any_of(subdiag.begin(), subdiag.end(), zero);
    }

    Eigen::MatrixXd dense() const {
        const auto m = static_cast<Eigen::Index>(size());
        Eigen::MatrixXd b = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            b(i, i) = diag[static_cast<std::size_t>(i)];
        for (Eigen::Index i = 0; i + 1 < m; ++i)
            b(i + 1, i) = subdiag[static_cast<std::size_t>(i)];
        return b;
    }
};

/// Dense real symmetric (Scalar = double) or complex Hermitian matrix.
template <class Scalar>
struct DenseHermitian {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a;

    Eigen::Index size() const noexcept { return a.rows(); }
};

using DenseSymmetric = DenseHermitian<double>;
using DenseComplexHermitian = DenseHermitian<std::complex<double>>;

/// A real number carried as sign and log-magnitude; sign 0 encodes zero.
struct LogValue {
    int sign = 1;
    double log_abs = 0.0;

    static LogValue zero() { return {0, -std::numeric_limits<double>::infinity()}; }
    static LogValue from(double v) {
        if (v == 0.0)
            return zero();
        return {v > 0.0 ? 1 : -1, std::log(std::abs(v))};
    }

    double value() const { return sign == 0 ? 0.0 : sign * std::exp(log_abs); }

    LogValue operator*(const LogValue& o) const { return {sign * o.sign, log_abs + o.log_abs}; }
    LogValue operator/(const LogValue& o) const {
        if (o.sign == 0)
            throw DomainError("LogValue division by zero");
        return {sign * o.sign, log_abs - o.log_abs};
    }
};

} // namespace betatrix
