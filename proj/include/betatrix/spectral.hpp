#pragma once

// Spectral kernels for symmetric tridiagonal matrices: Sturm counts,
// eigenvalues, first eigenvector row via Paige's formula, Lanczos
// reconstruction of T from (lambda, q), and the Vandermonde and Jacobian
// identities tying the two parametrizations together.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <Eigen/Dense>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "betatrix/error.hpp"
#include "betatrix/matrix.hpp"

namespace betatrix {

/// Eigenvalues in increasing order plus the nonnegative first row of the
/// eigenvector matrix.
struct Spectrum {
    std::vector<double> lambda;
    std::vector<double> q;
};

/// Leading-minor characteristic polynomials P_0 .. P_n at one point, where
/// P_k = det(y I - T_k) and T_k is the k x k lower-right block of T:
///
///   P_k(y) = (y - a_k) P_{k-1}(y) - b_{k-1}^2 P_{k-2}(y),   P_0 = 1,
///
/// with a_k = diag[n - k] and b_{k-1} = subdiag[n - k]. Values are stored as
/// mantissa * 2^exponent so that large |y| cannot overflow.
struct CharPolyEval {
    std::vector<double> mantissa;
    std::vector<int> exponent;

    std::size_t degree() const noexcept { return mantissa.size() - 1; }
    double value(std::size_t k) const { return std::ldexp(mantissa[k], exponent[k]); }
    int sign(std::size_t k) const { return mantissa[k] > 0.0 ? 1 : (mantissa[k] < 0.0 ? -1 : 0); }
    double log_abs(std::size_t k) const {
        return std::log(std::abs(mantissa[k])) + exponent[k] * std::numbers::ln2;
    }
};

namespace detail {

constexpr int kRescaleBits = 512;
constexpr double kRescaleThreshold = 0x1.0p512;
constexpr double kRescaleFactor = 0x1.0p-512;

/// Values of P_{n-1}, P_n and their derivatives at y. In double precision
/// all four share one power-of-two scale, so only ratios are meaningful.
template <class Real>
struct CharPolyTail {
    Real p_prev = 1;
    Real p = 1;
    Real dp_prev = 0;
    Real dp = 0;
};

template <class Real>
CharPolyTail<Real> char_poly_tail(const TridiagonalSym& t, const Real& y) {
    using std::abs;
    const std::size_t n = t.size();
    Real p2 = 0, p1 = 1;  // P_{k-2}, P_{k-1}
    Real d2 = 0, d1 = 0;  // derivatives
    for (std::size_t k = 1; k <= n; ++k) {
        const Real ak = t.diag[n - k];
        const Real bb = k >= 2 ? Real(t.subdiag[n - k]) * Real(t.subdiag[n - k]) : Real(0);
        Real p = (y - ak) * p1 - bb * p2;
        Real d = p1 + (y - ak) * d1 - bb * d2;
        p2 = p1;
        d2 = d1;
        p1 = std::move(p);
        d1 = std::move(d);
        if constexpr (std::is_same_v<Real, double>) {
            if (std::max(std::abs(p1), std::abs(d1)) > kRescaleThreshold) {
                p1 *= kRescaleFactor;
                p2 *= kRescaleFactor;
                d1 *= kRescaleFactor;
                d2 *= kRescaleFactor;
            }
        }
    }
    return {p2, p1, d2, d1};
}

inline double pivot_floor(const TridiagonalSym& t) {
    double bmax = 0.0;
    for (double b : t.subdiag)
        bmax = std::max(bmax, b * b);
    return std::max(std::numeric_limits<double>::min(),
                    bmax * std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon());
}

} // namespace detail

inline CharPolyEval char_poly(const TridiagonalSym& t, double y) {
    t.validate_shape();
    const std::size_t n = t.size();
    CharPolyEval out;
    out.mantissa.assign(n + 1, 0.0);
    out.exponent.assign(n + 1, 0);
    out.mantissa[0] = 1.0;
    double p2 = 0.0, p1 = 1.0;
    int exp = 0;
    for (std::size_t k = 1; k <= n; ++k) {
        const double bb = k >= 2 ? t.subdiag[n - k] * t.subdiag[n - k] : 0.0;
        const double p = (y - t.diag[n - k]) * p1 - bb * p2;
        p2 = p1;
        p1 = p;
        if (std::abs(p1) > detail::kRescaleThreshold) {
            p1 *= detail::kRescaleFactor;
            p2 *= detail::kRescaleFactor;
            exp += detail::kRescaleBits;
        }
        out.mantissa[k] = p1;
        out.exponent[k] = exp;
    }
    return out;
}

/// Number of eigenvalues strictly below x, from the signs of the LDL^T pivots
/// of T - x I.
inline std::size_t sturm_count(const TridiagonalSym& t, double x) {
    const double pivmin = detail::pivot_floor(t);
    std::size_t count = 0;
    double d = 1.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double bb = i > 0 ? t.subdiag[i - 1] * t.subdiag[i - 1] : 0.0;
        d = (t.diag[i] - x) - (i > 0 ? bb / d : 0.0);
        if (std::abs(d) < pivmin)
            d = -pivmin;
        if (d < 0.0)
            ++count;
    }
    return count;
}

enum class EigenMethod {
    /// Sturm bisection to isolate each root, then safeguarded Newton on P_n.
    bisection,
    /// Implicit-shift QL; faster, no per-root bracketing.
    ql,
};

inline constexpr double kDefaultEigenTol = 4.0 * std::numeric_limits<double>::epsilon();

namespace detail {

/// Eigenvalue k (0-based, ascending) inside [lo, hi], where
/// sturm_count(lo) <= k < sturm_count(hi).
inline double bisect_newton_root(const TridiagonalSym& t, std::size_t k, double lo, double hi,
                                 double abs_tol) {
    std::size_t count_lo = 0;
    std::size_t count_hi = t.size();
    while (!(count_lo == k && count_hi == k + 1) && hi - lo > abs_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi)
            return mid;
        const std::size_t c = sturm_count(t, mid);
        if (c <= k) {
            lo = mid;
            count_lo = c;
        } else {
            hi = mid;
            count_hi = c;
        }
    }
    // The bracket now isolates one simple root of P_n.
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 100 && hi - lo > abs_tol; ++iter) {
        if (sturm_count(t, x) <= k)
            lo = x;
        else
            hi = x;
        const auto tail = char_poly_tail<double>(t, x);
        double next = tail.dp != 0.0 ? x - tail.p / tail.dp : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        const double step = std::abs(next - x);
        x = next;
        if (step <= abs_tol)
            break;
    }
    return x;
}

inline std::vector<double> ql_eigenvalues(const TridiagonalSym& t) {
    const std::size_t n = t.size();
    std::vector<double> d = t.diag;
    std::vector<double> e(n, 0.0);
    std::copy(t.subdiag.begin(), t.subdiag.end(), e.begin());
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        do {
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd)
                    break;
            }
            if (m != l) {
                if (++iter > 60)
                    throw Error("implicit QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool deflated = false;
                for (std::size_t ii = m; ii-- > l;) {
                    const double f = s * e[ii];
                    const double b = c * e[ii];
                    r = std::hypot(f, g);
                    e[ii + 1] = r;
                    if (r == 0.0) {
                        d[ii + 1] -= p;
                        e[m] = 0.0;
                        deflated = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[ii + 1] - p;
                    r = (d[ii] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[ii + 1] = g + p;
                    g = c * r - b;
                }
                if (deflated)
                    continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

} // namespace detail

/// All eigenvalues in increasing order, each within tol * ||T|| (Gershgorin
/// norm) of exact. tol must lie in (0, 1e-6].
inline std::vector<double> eigenvalues(const TridiagonalSym& t, double tol = kDefaultEigenTol,
                                       EigenMethod method = EigenMethod::bisection) {
    t.validate_finite();
    if (!(tol > 0.0) || tol > 1e-6)
        throw ParameterError("eigenvalue tolerance must lie in (0, 1e-6]");
    const std::size_t n = t.size();
    if (n == 1)
        return {t.diag[0]};
    if (method == EigenMethod::ql)
        return detail::ql_eigenvalues(t);
    const double norm = t.gershgorin_bound();
    if (norm == 0.0)
        return std::vector<double>(n, 0.0);
    const double abs_tol = tol * norm;
    const double bound = norm * (1.0 + 4.0 * std::numeric_limits<double>::epsilon()) +
                         std::numeric_limits<double>::min();
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = detail::bisect_newton_root(t, k, -bound, bound, abs_tol);
    std::sort(out.begin(), out.end());
    return out;
}

/// Degeneracy tolerance for simple-spectrum checks, relative to ||T||.
inline constexpr double kDegenerateGap = 1e-12;

namespace detail {

/// 113-bit binary floating point for the ill-conditioned branch of Paige's formula.
using Extended = boost::multiprecision::cpp_bin_float_quad;

/// Largest tolerated first-order relative error of q_i^2 in double precision.
inline constexpr double kPaigeRelativeError = 1e-13;

/// q_i^2 after polishing lambda_i by Newton steps in extended precision.
/// When q_i is tiny, lambda_i sits within about q_i^2 of a root of P_{n-1},
/// so a double-precision eigenvalue loses most digits of P_{n-1}(lambda_i).
inline double paige_weight_extended(const TridiagonalSym& t, double lambda, double scale) {
    using boost::multiprecision::abs;
    Extended y = lambda;
    const Extended limit = Extended(1e-30) * scale;
    for (int iter = 0; iter < 8; ++iter) {
        const auto tail = char_poly_tail<Extended>(t, y);
        const Extended step = tail.p / tail.dp;
        y -= step;
        if (abs(step) <= limit)
            break;
    }
    if (abs(y - Extended(lambda)) > Extended(1e6 * std::numeric_limits<double>::epsilon() * scale))
        throw DegenerateSpectrumError("first_row_eigvec: Newton refinement left the eigenvalue bracket");
    const auto tail = char_poly_tail<Extended>(t, y);
    return static_cast<double>(abs(tail.p_prev / tail.dp));
}

} // namespace detail

/// First row of the eigenvector matrix by Paige's formula
/// q_i^2 = |P_{n-1}(lambda_i) / P_n'(lambda_i)|, renormalized to unit length.
/// Each weight is evaluated in double precision unless the first-order error
/// estimate eps ||T|| |P_{n-1}' / P_{n-1}| exceeds kPaigeRelativeError, in
/// which case lambda_i is refined and the formula evaluated in extended precision.
inline std::vector<double> first_row_eigvec(const TridiagonalSym& t, std::span<const double> lambda) {
    t.validate_finite();
    const std::size_t n = t.size();
    if (lambda.size() != n)
        throw InputError("first_row_eigvec: need one eigenvalue per row");
    if (n == 1)
        return {1.0};
    const double norm = std::max(t.gershgorin_bound(), std::numeric_limits<double>::min());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(lambda[i + 1] - lambda[i] > kDegenerateGap * norm))
            throw DegenerateSpectrumError("eigenvalues " + std::to_string(i) + " and " +
                                          std::to_string(i + 1) + " collide");
    }
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<double> q(n);
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto tail = detail::char_poly_tail<double>(t, lambda[i]);
        double q2 = std::abs(tail.p_prev / tail.dp);
        const double sensitivity = eps * norm * std::abs(tail.dp_prev / tail.p_prev);
        if (!(sensitivity <= detail::kPaigeRelativeError))
            q2 = detail::paige_weight_extended(t, lambda[i], norm);
        q[i] = std::sqrt(q2);
        total += q2;
    }
    const double scale = 1.0 / std::sqrt(total);
    for (auto& v : q)
        v *= scale;
    return q;
}

inline Spectrum spectrum(const TridiagonalSym& t, EigenMethod method = EigenMethod::bisection) {
    Spectrum s;
    s.lambda = eigenvalues(t, kDefaultEigenTol, method);
    s.q = first_row_eigvec(t, s.lambda);
    return s;
}

/// The unique tridiagonal T with positive subdiagonal whose ordered
/// eigenvalues are lambda and whose eigenvector first row is q: Lanczos on
/// diag(lambda) from start vector q, with full reorthogonalization.
inline TridiagonalSym reconstruct(const Spectrum& input) {
    const std::size_t n = input.lambda.size();
    if (n == 0 || input.q.size() != n)
        throw BijectionError("reconstruct: lambda and q must be nonempty and of equal length");
    double qq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(input.lambda[i]) || !std::isfinite(input.q[i]))
            throw BijectionError("reconstruct: nonfinite input");
        if (!(input.q[i] > 0.0))
            throw BijectionError("reconstruct: q has a nonpositive component at " + std::to_string(i));
        if (i > 0 && !(input.lambda[i] > input.lambda[i - 1]))
            throw BijectionError("reconstruct: eigenvalues must be strictly increasing");
        qq += input.q[i] * input.q[i];
    }
    if (std::abs(qq - 1.0) > 1e-8)
        throw BijectionError("reconstruct: q must have unit norm");

    const auto nn = static_cast<Eigen::Index>(n);
    const Eigen::Map<const Eigen::VectorXd> lam(input.lambda.data(), nn);
    Eigen::MatrixXd v(nn, nn);
    v.col(0) = Eigen::Map<const Eigen::VectorXd>(input.q.data(), nn) / std::sqrt(qq);
    std::vector<double> diag(n);
    std::vector<double> sub(n - 1);
    const double scale = lam.cwiseAbs().maxCoeff();
    for (Eigen::Index j = 0; j < nn; ++j) {
        Eigen::VectorXd w = lam.cwiseProduct(v.col(j));
        const double alpha = v.col(j).dot(w);
        diag[static_cast<std::size_t>(j)] = alpha;
        if (j + 1 == nn)
            break;
        w -= alpha * v.col(j);
        if (j > 0)
            w -= sub[static_cast<std::size_t>(j - 1)] * v.col(j - 1);
        for (int pass = 0; pass < 2; ++pass) {
            const auto basis = v.leftCols(j + 1);
            w -= basis * (basis.transpose() * w);
        }
        const double beta = w.norm();
        if (!(beta > 1e-300 + 1e-15 * std::numeric_limits<double>::epsilon() * scale))
            throw BijectionError("reconstruct: Krylov space collapsed (repeated eigenvalue or zero weight)");
        sub[static_cast<std::size_t>(j)] = beta;
        v.col(j + 1) = w / beta;
    }
    return TridiagonalSym(std::move(diag), std::move(sub));
}

/// prod_{i<j} (lambda_j - lambda_i) as (sign, log|.|); +1 for strictly
/// increasing input, zero on ties.
inline LogValue vandermonde_direct(std::span<const double> lambda) {
    LogValue out{1, 0.0};
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            const double d = lambda[j] - lambda[i];
            if (d == 0.0)
                return LogValue::zero();
            if (d < 0.0)
                out.sign = -out.sign;
            out.log_abs += std::log(std::abs(d));
        }
    }
    return out;
}

namespace detail {

inline void require_positive_pair(const TridiagonalSym& t, std::span<const double> q, const char* who) {
    if (q.size() != t.size())
        throw InputError(std::string(who) + ": q must have one entry per row");
    for (double b : t.subdiag)
        if (!(b > 0.0))
            throw DegenerateSpectrumError(std::string(who) + ": subdiagonal must be positive");
    for (double v : q)
        if (!(v > 0.0))
            throw DegenerateSpectrumError(std::string(who) + ": q has a zero component");
}

} // namespace detail

/// Vandermonde of the ordered eigenvalues from the matrix side:
/// prod_k b_k^k / prod_i q_i with b_k the subdiagonal counted from the bottom
/// (storage subdiag[i] carries exponent n - 1 - i).
inline LogValue vandermonde_tridiagonal(const TridiagonalSym& t, std::span<const double> q) {
    detail::require_positive_pair(t, q, "vandermonde_tridiagonal");
    const std::size_t n = t.size();
    double log_abs = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        log_abs += static_cast<double>(n - 1 - i) * std::log(t.subdiag[i]);
    for (double v : q)
        log_abs -= std::log(v);
    return {1, log_abs};
}

/// Jacobian of T -> (q, lambda): prod b_i / prod q_i (dq the surface element
/// of the unit sphere).
inline LogValue jacobian_t_to_qlambda(const TridiagonalSym& t, std::span<const double> q) {
    detail::require_positive_pair(t, q, "jacobian_t_to_qlambda");
    double log_abs = 0.0;
    for (double b : t.subdiag)
        log_abs += std::log(b);
    for (double v : q)
        log_abs -= std::log(v);
    return {1, log_abs};
}

/// Jacobian dx dy = J da db of B -> T = B B^T:
/// J = (2^m x_bot prod_{others} x^2)^{-1}, x_bot the bottom-right entry.
inline LogValue jacobian_b_to_t(const BidiagonalPos& b) {
    const std::size_t m = b.size();
    for (double x : b.diag)
        if (!(x > 0.0))
            throw ParameterError("jacobian_b_to_t: diagonal must be positive");
    double log_det = static_cast<double>(m) * std::numbers::ln2 + std::log(b.diag[m - 1]);
    for (std::size_t i = 0; i + 1 < m; ++i)
        log_det += 2.0 * std::log(b.diag[i]);
    return {1, -log_det};
}

} // namespace betatrix
