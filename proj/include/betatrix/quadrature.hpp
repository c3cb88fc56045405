#pragma once

// Two-dimensional adaptive quadrature of the unnormalized eigenvalue
// integrands at size 2. The integrands are symmetric, so the integral over
// the plane is twice the integral over the ordered region lambda_1 < lambda_2;
// the inner variable runs toward the diagonal, where |lambda_2 - lambda_1|^beta
// has its only nonsmooth point, and double-exponential rules absorb the
// endpoint behaviour.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "betatrix/closed_forms.hpp"
#include "betatrix/ensembles.hpp"
#include "betatrix/error.hpp"

namespace betatrix {

struct QuadratureResult {
    double integral = 0.0;
    double error_estimate = 0.0;
    double closed_form = 0.0;  // 1/c from the normalization constant
    double relative_error = 0.0;
};

inline constexpr double kQuadratureTol = 1e-11;

namespace detail {

inline void check_quadrature(double value, double err, const char* who) {
    if (!std::isfinite(value) || !std::isfinite(err) || err > 1e-7 * std::abs(value))
        throw QuadratureError(std::string(who) + ": adaptive quadrature did not converge (estimate " +
                              std::to_string(value) + ", error " + std::to_string(err) + ")");
}

inline QuadratureResult finish(double integral, double err, double log_c) {
    QuadratureResult r;
    r.integral = integral;
    r.error_estimate = err;
    r.closed_form = std::exp(-log_c);
    r.relative_error = std::abs(integral - r.closed_form) / r.closed_form;
    return r;
}

inline void require_size_two(std::size_t n, const char* who) {
    if (n != 2)
        throw ParameterError(std::string(who) + ": quadrature is implemented for size 2 only");
}

} // namespace detail

/// int_{R^2} |l2 - l1|^beta exp(-(l1^2 + l2^2)/2).
inline QuadratureResult quadrature_hermite(const HermiteParams& p) {
    p.validate();
    detail::require_size_two(p.n, "quadrature_hermite");
    const double beta = p.beta;
    boost::math::quadrature::exp_sinh<double> inner_rule;
    boost::math::quadrature::sinh_sinh<double> outer_rule;
    double inner_err_max = 0.0;

    auto inner = [&](double upper) {
        if (!std::isfinite(upper))
            return 0.0;
        // t = upper - lower > 0
        auto f = [&](double t) {
            const double lower = upper - t;
            if (!std::isfinite(lower) || !(t > 0.0))
                return 0.0;
            return std::exp(beta * std::log(t) - 0.5 * (lower * lower + upper * upper));
        };
        double err = 0.0;
        const double v = inner_rule.integrate(f, 0.0, std::numeric_limits<double>::infinity(),
                                              kQuadratureTol, &err);
        inner_err_max = std::max(inner_err_max, err);
        return v;
    };
    double err = 0.0;
    const double half = outer_rule.integrate(inner, kQuadratureTol, &err);
    detail::check_quadrature(half, err + inner_err_max, "quadrature_hermite");
    return detail::finish(2.0 * half, 2.0 * (err + inner_err_max), log_c_hermite(p.beta, p.n));
}

/// int_{(0,inf)^2} |l2 - l1|^beta (l1 l2)^{a - p} exp(-(l1 + l2)/2).
/// With l1 = l2 w the inner factor becomes
/// l2^{beta + 1 + 2e} int_0^1 (1 - w)^beta w^e exp(-l2 w / 2) dw, e = a - p,
/// which isolates the algebraic singularities at the endpoints.
inline QuadratureResult quadrature_laguerre(const LaguerreParams& p) {
    p.validate();
    detail::require_size_two(p.m, "quadrature_laguerre");
    const double beta = p.beta;
    const double expo = p.a - p.p();
    boost::math::quadrature::tanh_sinh<double> finite_rule;
    boost::math::quadrature::exp_sinh<double> tail_rule;
    double inner_err_max = 0.0;

    auto outer = [&](double upper) {
        if (!(upper > 0.0) || !std::isfinite(upper))
            return 0.0;
        auto f = [&](double w) {
            if (!(w > 0.0) || !(w < 1.0))
                return 0.0;
            return std::exp(beta * std::log1p(-w) + expo * std::log(w) - 0.5 * upper * w);
        };
        double err = 0.0;
        const double v = finite_rule.integrate(f, 0.0, 1.0, kQuadratureTol, &err);
        const double prefactor = std::exp((beta + 1.0 + 2.0 * expo) * std::log(upper) - 0.5 * upper);
        inner_err_max = std::max(inner_err_max, err * prefactor);
        return v * prefactor;
    };
    double err_head = 0.0, err_tail = 0.0;
    const double head = finite_rule.integrate(outer, 0.0, 1.0, kQuadratureTol, &err_head);
    const double tail =
        tail_rule.integrate(outer, 1.0, std::numeric_limits<double>::infinity(), kQuadratureTol, &err_tail);
    const double half = head + tail;
    const double err = err_head + err_tail + inner_err_max;
    detail::check_quadrature(half, err, "quadrature_laguerre");
    return detail::finish(2.0 * half, 2.0 * err, log_c_laguerre(p.beta, p.m, p.a));
}

/// int_{(0,1)^2} |l2 - l1|^beta prod l^{a1 - p} (1 - l)^{a2 - p}, with the
/// same substitution l1 = l2 w as in the Laguerre case.
inline QuadratureResult quadrature_jacobi(const JacobiParams& p) {
    detail::require_size_two(p.m, "quadrature_jacobi");
    const double beta = p.beta;
    const double e1 = p.a1 - p.p();
    const double e2 = p.a2 - p.p();
    const double log_c = log_c_jacobi(p);
    boost::math::quadrature::tanh_sinh<double> rule;
    double inner_err_max = 0.0;

    auto outer = [&](double upper) {
        if (!(upper > 0.0) || !(upper < 1.0))
            return 0.0;
        auto f = [&](double w) {
            if (!(w > 0.0) || !(w < 1.0))
                return 0.0;
            return std::exp(beta * std::log1p(-w) + e1 * std::log(w) + e2 * std::log1p(-upper * w));
        };
        double err = 0.0;
        const double v = rule.integrate(f, 0.0, 1.0, kQuadratureTol, &err);
        const double prefactor = std::exp((beta + 1.0 + 2.0 * e1) * std::log(upper) + e2 * std::log1p(-upper));
        inner_err_max = std::max(inner_err_max, err * prefactor);
        return v * prefactor;
    };
    double err = 0.0;
    const double half = rule.integrate(outer, 0.0, 1.0, kQuadratureTol, &err);
    err += inner_err_max;
    detail::check_quadrature(half, err, "quadrature_jacobi");
    return detail::finish(2.0 * half, 2.0 * err, log_c);
}

} // namespace betatrix
