#pragma once

// Normalization constants of the Hermite, Laguerre and Jacobi beta-ensemble
// densities, the joint log-densities, Selberg-type integral values,
// discriminant moments, and classical orthogonal polynomial coefficients.
// Everything is evaluated in log space.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "betatrix/ensembles.hpp"
#include "betatrix/error.hpp"
#include "betatrix/matrix.hpp"
#include "betatrix/rational.hpp"

namespace betatrix {

struct JacobiParams {
    double beta = 2.0;
    std::size_t m = 1;
    double a1 = 1.0;
    double a2 = 1.0;

    double p() const { return 1.0 + 0.5 * beta * static_cast<double>(m - 1); }
};

enum class EnsembleKind { hermite, laguerre, jacobi };

namespace detail {

inline double lgamma_pos(double x, const char* who) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        std::ostringstream msg;
        msg << who << ": Gamma argument " << x << " is not positive";
        throw ParameterError(msg.str());
    }
    return boost::math::lgamma(x);
}

inline void require_beta(double beta, const char* who) {
    if (!(beta >= 0.0) || !std::isfinite(beta))
        throw ParameterError(std::string(who) + ": beta must be nonnegative and finite");
}

inline void require_size(std::size_t n, const char* who) {
    if (n < 1)
        throw ParameterError(std::string(who) + ": size must be at least 1");
}

inline void require_above(double value, double bound, const char* name, const char* who) {
    if (!(value > bound)) {
        std::ostringstream msg;
        msg << who << ": " << name << " = " << value << " must exceed (beta/2)(m-1) = " << bound;
        throw ParameterError(msg.str());
    }
}

} // namespace detail

/// log c_H = -(n/2) log(2 pi) + sum_j [lgamma(1 + beta/2) - lgamma(1 + beta j/2)].
/// beta = 0 is the independent-coordinates limit.
inline double log_c_hermite(double beta, std::size_t n) {
    detail::require_beta(beta, "log_c_hermite");
    detail::require_size(n, "log_c_hermite");
    const double s = 0.5 * beta;
    double out = -0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
    const double num = detail::lgamma_pos(1.0 + s, "log_c_hermite");
    for (std::size_t j = 1; j <= n; ++j)
        out += num - detail::lgamma_pos(1.0 + s * static_cast<double>(j), "log_c_hermite");
    return out;
}

/// log c_L = -m a log 2 + sum_j [lgamma(1 + beta/2) - lgamma(1 + beta j/2)
///           - lgamma(a - (beta/2)(m - j))].
inline double log_c_laguerre(double beta, std::size_t m, double a) {
    detail::require_beta(beta, "log_c_laguerre");
    detail::require_size(m, "log_c_laguerre");
    const double s = 0.5 * beta;
    const double md = static_cast<double>(m);
    detail::require_above(a, s * (md - 1.0), "a", "log_c_laguerre");
    double out = -md * a * std::numbers::ln2;
    const double num = detail::lgamma_pos(1.0 + s, "log_c_laguerre");
    for (std::size_t j = 1; j <= m; ++j) {
        const double jd = static_cast<double>(j);
        out += num - detail::lgamma_pos(1.0 + s * jd, "log_c_laguerre") -
               detail::lgamma_pos(a - s * (md - jd), "log_c_laguerre");
    }
    return out;
}

/// log of prod_j Gamma(1 + beta/2) Gamma(a1 + a2 - (beta/2)(m - j)) /
/// [Gamma(1 + beta j/2) Gamma(a1 - (beta/2)(m - j)) Gamma(a2 - (beta/2)(m - j))].
inline double log_c_jacobi(double beta, std::size_t m, double a1, double a2) {
    detail::require_beta(beta, "log_c_jacobi");
    detail::require_size(m, "log_c_jacobi");
    const double s = 0.5 * beta;
    const double md = static_cast<double>(m);
    detail::require_above(a1, s * (md - 1.0), "a1", "log_c_jacobi");
    detail::require_above(a2, s * (md - 1.0), "a2", "log_c_jacobi");
    double out = 0.0;
    const double num = detail::lgamma_pos(1.0 + s, "log_c_jacobi");
    for (std::size_t j = 1; j <= m; ++j) {
        const double shift = s * (md - static_cast<double>(j));
        out += num + detail::lgamma_pos(a1 + a2 - shift, "log_c_jacobi") -
               detail::lgamma_pos(1.0 + s * static_cast<double>(j), "log_c_jacobi") -
               detail::lgamma_pos(a1 - shift, "log_c_jacobi") -
               detail::lgamma_pos(a2 - shift, "log_c_jacobi");
    }
    return out;
}

inline double log_c_jacobi(const JacobiParams& p) { return log_c_jacobi(p.beta, p.m, p.a1, p.a2); }

/// log c_q = (n - 1) log 2 + lgamma(beta n / 2) - n lgamma(beta / 2): the
/// density constant of the first eigenvector row on the positive orthant.
inline double log_c_q(double beta, std::size_t n) {
    if (!(beta > 0.0) || !std::isfinite(beta))
        throw ParameterError("log_c_q: beta must be positive");
    detail::require_size(n, "log_c_q");
    const double nd = static_cast<double>(n);
    return (nd - 1.0) * std::numbers::ln2 + detail::lgamma_pos(0.5 * beta * nd, "log_c_q") -
           nd * detail::lgamma_pos(0.5 * beta, "log_c_q");
}

namespace detail {

/// beta * log|Delta(lambda)| over unordered pairs; beta = 0 gives 0 even on ties.
inline double log_repulsion(std::span<const double> lambda, double beta) {
    if (beta == 0.0)
        return 0.0;
    double out = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            out += std::log(std::abs(lambda[j] - lambda[i]));
    return beta * out;
}

inline void require_finite(std::span<const double> lambda, const char* who) {
    if (lambda.empty())
        throw ParameterError(std::string(who) + ": need at least one eigenvalue");
    for (double v : lambda)
        if (!std::isfinite(v))
            throw InputError(std::string(who) + ": nonfinite eigenvalue");
}

} // namespace detail

/// Unordered joint log-density of the beta-Hermite eigenvalues.
inline double log_density_hermite(std::span<const double> lambda, double beta) {
    detail::require_finite(lambda, "log_density_hermite");
    double sq = 0.0;
    for (double v : lambda)
        sq += v * v;
    return log_c_hermite(beta, lambda.size()) + detail::log_repulsion(lambda, beta) - 0.5 * sq;
}

/// Unordered joint log-density of the beta-Laguerre eigenvalues (m = size).
inline double log_density_laguerre(std::span<const double> lambda, double beta, double a) {
    detail::require_finite(lambda, "log_density_laguerre");
    const std::size_t m = lambda.size();
    const double p = 1.0 + 0.5 * beta * static_cast<double>(m - 1);
    double logs = 0.0, sum = 0.0;
    for (double v : lambda) {
        if (!(v > 0.0))
            throw DomainError("log_density_laguerre: eigenvalues must be positive");
        logs += std::log(v);
        sum += v;
    }
    return log_c_laguerre(beta, m, a) + detail::log_repulsion(lambda, beta) + (a - p) * logs -
           0.5 * sum;
}

/// Unordered joint log-density of the beta-Jacobi eigenvalues on (0, 1)^m.
inline double log_density_jacobi(std::span<const double> lambda, double beta, double a1, double a2) {
    detail::require_finite(lambda, "log_density_jacobi");
    const std::size_t m = lambda.size();
    const double p = 1.0 + 0.5 * beta * static_cast<double>(m - 1);
    double l1 = 0.0, l2 = 0.0;
    for (double v : lambda) {
        if (!(v > 0.0 && v < 1.0))
            throw DomainError("log_density_jacobi: eigenvalues must lie in (0, 1)");
        l1 += std::log(v);
        l2 += std::log1p(-v);
    }
    return log_c_jacobi(beta, m, a1, a2) + detail::log_repulsion(lambda, beta) + (a1 - p) * l1 +
           (a2 - p) * l2;
}

/// log of the Hermite Selberg integral int |Delta|^beta e^{-sum lambda^2/2}.
inline double selberg_hermite(double beta, std::size_t n) { return -log_c_hermite(beta, n); }

/// log of the Laguerre Selberg integral int |Delta|^beta prod lambda^{a-p} e^{-sum lambda/2}.
inline double selberg_laguerre(double beta, double a, std::size_t m) {
    return -log_c_laguerre(beta, m, a);
}

/// (x)_k = x (x + 1) ... (x + k - 1). A factor x + j == 0 is treated as the
/// Gamma pole and rejected.
inline double rising_factorial(double x, unsigned k) {
    double out = 1.0;
    for (unsigned j = 0; j < k; ++j) {
        const double f = x + j;
        if (f == 0.0)
            throw ParameterError("rising_factorial: pole at x + j = 0");
        out *= f;
    }
    return out;
}

/// log|(x)_k| with the same pole rule, summed factor by factor.
inline LogValue log_rising_factorial(double x, unsigned k) {
    LogValue out{1, 0.0};
    for (unsigned j = 0; j < k; ++j) {
        const double f = x + j;
        if (f == 0.0)
            throw ParameterError("rising_factorial: pole at x + j = 0");
        if (f < 0.0)
            out.sign = -out.sign;
        out.log_abs += std::log(std::abs(f));
    }
    return out;
}

/// Ensemble parameters plus the log normalization constant of its density.
struct EnsembleDensity {
    std::variant<HermiteParams, LaguerreParams, JacobiParams> params;
    double log_norm = 0.0;

    EnsembleKind kind() const { return static_cast<EnsembleKind>(params.index()); }

    static EnsembleDensity hermite(double beta, std::size_t n) {
        return {HermiteParams{beta, n}, log_c_hermite(beta, n)};
    }
    static EnsembleDensity laguerre(double beta, std::size_t m, double a) {
        return {LaguerreParams{beta, m, a}, log_c_laguerre(beta, m, a)};
    }
    static EnsembleDensity jacobi(double beta, std::size_t m, double a1, double a2) {
        return {JacobiParams{beta, m, a1, a2}, log_c_jacobi(beta, m, a1, a2)};
    }
};

// E[D^k] with D = Delta(lambda)^2, by two independent routes.

/// Route 1: ratio of normalization constants c(beta) / c(beta + 2k, shifted).
inline double log_discriminant_moment_gamma_ratio(const HermiteParams& p, unsigned k) {
    return log_c_hermite(p.beta, p.n) - log_c_hermite(p.beta + 2.0 * k, p.n);
}
inline double log_discriminant_moment_gamma_ratio(const LaguerreParams& p, unsigned k) {
    const double shift = static_cast<double>(k) * static_cast<double>(p.m - 1);
    return log_c_laguerre(p.beta, p.m, p.a) - log_c_laguerre(p.beta + 2.0 * k, p.m, p.a + shift);
}
inline double log_discriminant_moment_gamma_ratio(const JacobiParams& p, unsigned k) {
    const double shift = static_cast<double>(k) * static_cast<double>(p.m - 1);
    return log_c_jacobi(p.beta, p.m, p.a1, p.a2) -
           log_c_jacobi(p.beta + 2.0 * k, p.m, p.a1 + shift, p.a2 + shift);
}

/// Route 2: closed rising-factorial products.
inline double log_discriminant_moment_rising(const HermiteParams& p, unsigned k) {
    detail::require_beta(p.beta, "discriminant_moment");
    const double s = 0.5 * p.beta;
    double out = 0.0;
    for (std::size_t j = 1; j <= p.n; ++j) {
        const auto jj = static_cast<unsigned>(j);
        out += log_rising_factorial(1.0 + s * j, k * jj).log_abs -
               log_rising_factorial(1.0 + s, k).log_abs;
    }
    return out;
}
inline double log_discriminant_moment_rising(const LaguerreParams& p, unsigned k) {
    detail::require_beta(p.beta, "discriminant_moment");
    const double s = 0.5 * p.beta;
    const double md = static_cast<double>(p.m);
    detail::require_above(p.a, s * (md - 1.0), "a", "discriminant_moment");
    double out = static_cast<double>(k) * md * (md - 1.0) * std::numbers::ln2;
    for (std::size_t j = 1; j <= p.m; ++j) {
        const auto jj = static_cast<unsigned>(j);
        out += log_rising_factorial(1.0 + s * j, k * jj).log_abs +
               log_rising_factorial(p.a - s * (md - j), k * (jj - 1)).log_abs -
               log_rising_factorial(1.0 + s, k).log_abs;
    }
    return out;
}
inline double log_discriminant_moment_rising(const JacobiParams& p, unsigned k) {
    detail::require_beta(p.beta, "discriminant_moment");
    const double s = 0.5 * p.beta;
    const double md = static_cast<double>(p.m);
    detail::require_above(p.a1, s * (md - 1.0), "a1", "discriminant_moment");
    detail::require_above(p.a2, s * (md - 1.0), "a2", "discriminant_moment");
    const auto mm = static_cast<unsigned>(p.m);
    double out = 0.0;
    for (unsigned j = 1; j <= mm; ++j) {
        const double shift = s * (md - j);
        out += log_rising_factorial(1.0 + s * j, k * j).log_abs +
               log_rising_factorial(p.a1 - shift, k * (j - 1)).log_abs +
               log_rising_factorial(p.a2 - shift, k * (j - 1)).log_abs -
               log_rising_factorial(1.0 + s, k).log_abs -
               log_rising_factorial(p.a1 + p.a2 - shift, k * (mm + j - 2)).log_abs;
    }
    return out;
}

/// Agreement required between the two discriminant routes (absolute, in log).
inline constexpr double kDiscriminantRouteTol = 1e-10;

/// log E[Delta^(2k)]. Both routes are evaluated; a disagreement beyond
/// kDiscriminantRouteTol is an internal error.
inline double log_discriminant_moment(const EnsembleDensity& density, unsigned k) {
    return std::visit(
        [k](const auto& p) {
            const double ratio = log_discriminant_moment_gamma_ratio(p, k);
            const double rising = log_discriminant_moment_rising(p, k);
            if (!(std::abs(ratio - rising) <= kDiscriminantRouteTol * std::max(1.0, std::abs(rising))))
                throw std::logic_error("discriminant_moment: Gamma-ratio and rising-factorial routes disagree");
            return rising;
        },
        density.params);
}

/// E[Delta^(2k)] = E[D^k] for the discriminant D.
inline double discriminant_moment(const EnsembleDensity& density, unsigned k) {
    return std::exp(log_discriminant_moment(density, k));
}

enum class PolynomialFamily { hermite_probabilists, hermite_physicists, generalized_laguerre };

/// Monic classical orthogonal polynomial; coefficients[k] multiplies x^k.
struct ClassicalPolynomial {
    PolynomialFamily family = PolynomialFamily::hermite_probabilists;
    std::size_t degree = 0;
    std::vector<Rational> coefficients;
};

/// Monic He_n, H_n / 2^n, or L_n^alpha * (-1)^n n!. alpha is taken exactly
/// from its double value.
inline ClassicalPolynomial classical_monic(PolynomialFamily family, std::size_t n, double alpha = 0.0) {
    using Poly = std::vector<Rational>;
    const auto shift_x = [](const Poly& p) {  // x * p
        Poly out(p.size() + 1, Rational(0));
        for (std::size_t i = 0; i < p.size(); ++i)
            out[i + 1] = p[i];
        return out;
    };
    const auto axpy = [](Poly y, const Rational& a, const Poly& x) {  // y + a x
        if (y.size() < x.size())
            y.resize(x.size(), Rational(0));
        for (std::size_t i = 0; i < x.size(); ++i)
            y[i] += a * x[i];
        return y;
    };

    Poly prev{Rational(1)};  // degree 0
    Poly cur = prev;
    if (family == PolynomialFamily::generalized_laguerre) {
        const Rational al = exact_rational(alpha);
        // L_1 = 1 + alpha - x;
        // (k + 1) L_{k+1} = (2k + 1 + alpha - x) L_k - (k + alpha) L_{k-1}.
        if (n >= 1)
            cur = Poly{1 + al, Rational(-1)};
        for (std::size_t k = 1; k < n; ++k) {
            Poly next = axpy(Poly{}, Rational(2 * k + 1) + al, cur);
            next = axpy(next, Rational(-1), shift_x(cur));
            next = axpy(next, -(Rational(k) + al), prev);
            for (auto& c : next)
                c /= Rational(k + 1);
            prev = std::move(cur);
            cur = std::move(next);
        }
    } else {
        const bool phys = family == PolynomialFamily::hermite_physicists;
        // He_k = x He_{k-1} - (k-1) He_{k-2};  H_k = 2x H_{k-1} - 2(k-1) H_{k-2}.
        if (n >= 1)
            cur = phys ? Poly{Rational(0), Rational(2)} : Poly{Rational(0), Rational(1)};
        for (std::size_t k = 2; k <= n; ++k) {
            Poly next = shift_x(cur);
            if (phys)
                for (auto& c : next)
                    c *= 2;
            next = axpy(next, -Rational(phys ? 2 * (k - 1) : k - 1), prev);
            prev = std::move(cur);
            cur = std::move(next);
        }
    }
    if (n == 0)
        cur = Poly{Rational(1)};
    const Rational lead = cur.back();
    for (auto& c : cur)
        c /= lead;
    return {family, n, std::move(cur)};
}

/// For monic p(z), the monic polynomial in y with z = y / scale, namely
/// scale^n p(y / scale).
inline ClassicalPolynomial rescale_monic(const ClassicalPolynomial& p, const Rational& scale) {
    ClassicalPolynomial out = p;
    const std::size_t n = p.degree;
    Rational factor(1);
    for (std::size_t k = n + 1; k-- > 0;) {
        out.coefficients[k] = p.coefficients[k] * factor;
        factor *= scale;
    }
    return out;
}

} // namespace betatrix
