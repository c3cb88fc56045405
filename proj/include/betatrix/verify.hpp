#pragma once

// Verification suites. Each check reduces to one scalar statistic compared
// against a fixed threshold, so results are reproducible for a given seed.

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "betatrix/closed_forms.hpp"
#include "betatrix/ensembles.hpp"
#include "betatrix/montecarlo.hpp"
#include "betatrix/oracles.hpp"
#include "betatrix/quadrature.hpp"
#include "betatrix/spectral.hpp"
#include "betatrix/stats.hpp"
#include "betatrix/symbolic.hpp"

namespace betatrix {

struct CheckResult {
    std::string name;
    double statistic = 0.0;
    double threshold = 0.0;
    bool pass = false;
    std::size_t sample_count = 0;
    std::uint64_t seed = 0;
    std::string detail;
};

struct Report {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
    }
    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
    }
    void append(const Report& o) { checks.insert(checks.end(), o.checks.begin(), o.checks.end()); }
};

struct VerifyOptions {
    std::uint64_t seed = 0;
    bool quick = false;
    std::size_t workers = 1;
    std::optional<double> beta;
    std::optional<std::size_t> n;
};

enum class Suite {
    jacobians,
    vandermonde,
    reconstruct,
    qdist,
    equivalence,
    density,
    selberg,
    discriminant,
    charpoly,
    semicircle,
    all
};

inline constexpr std::array<std::pair<Suite, std::string_view>, 11> kSuiteNames{{
    {Suite::jacobians, "jacobians"},
    {Suite::vandermonde, "vandermonde"},
    {Suite::reconstruct, "reconstruct"},
    {Suite::qdist, "qdist"},
    {Suite::equivalence, "equivalence"},
    {Suite::density, "density"},
    {Suite::selberg, "selberg"},
    {Suite::discriminant, "discriminant"},
    {Suite::charpoly, "charpoly"},
    {Suite::semicircle, "semicircle"},
    {Suite::all, "all"},
}};

inline Suite parse_suite(std::string_view name) {
    for (const auto& [suite, label] : kSuiteNames)
        if (label == name)
            return suite;
    throw ParameterError("unknown suite '" + std::string(name) + "'");
}

inline std::string_view suite_name(Suite s) {
    for (const auto& [suite, label] : kSuiteNames)
        if (suite == s)
            return label;
    return "unknown";
}

/// Fixed partition count: results are bitwise identical for any worker count.
inline constexpr std::size_t kPartitions = 16;

/// Shared plumbing for one suite run: sample-count scaling, threshold
/// relaxation in quick mode, per-check seeds.
class CheckContext {
public:
    explicit CheckContext(VerifyOptions opt) : opt_(std::move(opt)) {}

    const VerifyOptions& options() const noexcept { return opt_; }

    static constexpr std::size_t kQuickDivisor = 10;

    std::size_t samples(std::size_t full) const {
        return opt_.quick ? std::max<std::size_t>(1, full / kQuickDivisor) : full;
    }
    // Sampling noise in KS and correlation statistics grows like 1/sqrt(N),
    // so thresholds widen by sqrt of the sample reduction.
    double relaxed(double threshold) const {
        return opt_.quick ? std::sqrt(static_cast<double>(kQuickDivisor)) * threshold : threshold;
    }

    /// Seed for a named check, so that checks never share random streams.
    std::uint64_t seed_for(std::string_view name) const {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : name)
            h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ull;
        std::uint64_t z = opt_.seed + h + 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    template <class Fn>
    SampleStats run(std::size_t count, std::uint64_t seed, const SampleStats& layout, Fn fn) const {
        return monte_carlo(count, seed, kPartitions, opt_.workers, layout, fn);
    }

    void record(Report& report, std::string name, double statistic, double threshold, std::size_t count,
                std::uint64_t seed, std::string detail = {}) const {
        const bool pass = std::isfinite(statistic) && statistic < threshold;
        report.checks.push_back({std::move(name), statistic, threshold, pass, count, seed, std::move(detail)});
    }

private:
    VerifyOptions opt_;
};

namespace detail {

inline std::string fmt(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
}

inline std::string label(std::string_view prefix, double beta, std::size_t n) {
    return std::string(prefix) + "/beta=" + fmt(beta) + "/n=" + std::to_string(n);
}

/// log density of chi_r at x > 0
inline double log_chi_density(double x, double r) {
    return (r - 1.0) * std::log(x) - 0.5 * x * x - (0.5 * r - 1.0) * std::numbers::ln2 -
           boost::math::lgamma(0.5 * r);
}

/// log density of N(0,1) entries and chi_{(n-1-i) beta}/sqrt(2) subdiagonal
inline double log_hermite_entry_density(const TridiagonalSym& t, double beta) {
    const std::size_t n = t.size();
    double out = 0.0;
    for (double a : t.diag)
        out += -0.5 * a * a - 0.5 * std::log(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double r = beta * static_cast<double>(n - 1 - i);
        // density of chi_r / sqrt 2 is sqrt(2) f_chi(sqrt(2) b)
        out += 0.5 * std::numbers::ln2 + log_chi_density(std::numbers::sqrt2 * t.subdiag[i], r);
    }
    return out;
}

inline double log_laguerre_entry_density(const BidiagonalPos& b, double beta, double a) {
    const std::size_t m = b.size();
    double out = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        out += log_chi_density(b.diag[i], 2.0 * a - beta * static_cast<double>(i));
    for (std::size_t i = 0; i + 1 < m; ++i)
        out += log_chi_density(b.subdiag[i], beta * static_cast<double>(m - 1 - i));
    return out;
}

inline double log_q_density(std::span<const double> q, double beta) {
    double out = log_c_q(beta, q.size());
    for (double v : q)
        out += (beta - 1.0) * std::log(v);
    return out;
}

inline double log_factorial(std::size_t n) { return boost::math::lgamma(static_cast<double>(n) + 1.0); }

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    const std::size_t n = std::min(xs.size(), ys.size());
    RunningStats sx, sy;
    for (std::size_t i = 0; i < n; ++i) {
        sx.push(xs[i]);
        sy.push(ys[i]);
    }
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        cov += (xs[i] - sx.mean()) * (ys[i] - sy.mean());
    cov /= static_cast<double>(n - 1);
    return cov / std::sqrt(sx.variance() * sy.variance());
}

/// coefficients (ascending in y) of det(y I - T), by the three-term recurrence
inline std::vector<double> charpoly_coefficients(const TridiagonalSym& t) {
    const std::size_t n = t.size();
    std::vector<double> prev, cur{1.0};
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<double> next(k + 1, 0.0);
        const double ak = t.diag[n - k];
        for (std::size_t d = 0; d < cur.size(); ++d) {
            next[d + 1] += cur[d];
            next[d] -= ak * cur[d];
        }
        if (k >= 2) {
            const double bb = t.subdiag[n - k] * t.subdiag[n - k];
            for (std::size_t d = 0; d < prev.size(); ++d)
                next[d] -= bb * prev[d];
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return cur;
}

/// Probability mass of the density sqrt(2 - t^2)/pi below t.
/// det(B B^T) from the tridiagonal entries of B B^T in exact rational
/// arithmetic. Products of doubles are exact rationals, so no rounding enters.
inline Rational laguerre_det_exact(const BidiagonalPos& b) {
    const std::size_t m = b.size();
    Rational p2 = 0, p1 = 1;
    for (std::size_t k = 0; k < m; ++k) {
        const Rational x(b.diag[k]);
        Rational diag = x * x;
        Rational off = 0;
        if (k > 0) {
            const Rational y(b.subdiag[k - 1]);
            diag += y * y;
            off = y * Rational(b.diag[k - 1]);
        }
        Rational p = diag * p1 - off * off * p2;
        p2 = std::move(p1);
        p1 = std::move(p);
    }
    return p1;
}

inline double semicircle_cdf(double t) {
    const double r = std::numbers::sqrt2;
    if (t <= -r)
        return 0.0;
    if (t >= r)
        return 1.0;
    return 0.5 + (t * std::sqrt(2.0 - t * t) + 2.0 * std::asin(t / r)) / (2.0 * std::numbers::pi);
}

} // namespace detail

// ---------------------------------------------------------------------------
// Public verification operations

/// KS of each q_i^2 against Beta(beta/2, beta(n-1)/2), plus the correlation
/// of q_1^2 with lambda_max as a surrogate for independence of q and lambda.
inline Report verify_q_distribution(double beta, std::size_t n, std::size_t count, const CheckContext& ctx) {
    HermiteParams params{beta, n};
    params.validate();
    Report report;
    const std::string base = detail::label("qdist", beta, n);
    const std::uint64_t seed = ctx.seed_for(base);
    if (n == 1) {
        ctx.record(report, base + "/q1", 0.0, ctx.relaxed(0.02), count, seed, "q = [1] for n = 1");
        return report;
    }
    SampleStats layout;
    for (std::size_t i = 0; i < n; ++i)
        layout.declare("q" + std::to_string(i + 1), true);
    layout.declare("lambda_max", true);
    layout.declare("q1_paired", true);
    layout.declare(kSkippedDegenerate);

    const SampleStats stats = ctx.run(count, seed, layout, [&](RandomStream& stream, std::size_t, SampleStats& acc) {
        const TridiagonalSym t = sample_hermite(params, stream);
        const auto lambda = eigenvalues(t);
        std::vector<double> q;
        try {
            q = first_row_eigvec(t, lambda);
        } catch (const DegenerateSpectrumError&) {
            acc.push(kSkippedDegenerate, 1.0);
            return;
        }
        for (std::size_t i = 0; i < n; ++i)
            acc.push("q" + std::to_string(i + 1), q[i] * q[i]);
        acc.push("lambda_max", lambda.back());
        acc.push("q1_paired", q[0] * q[0]);
    });

    const double shape_a = 0.5 * beta;
    const double shape_b = 0.5 * beta * static_cast<double>(n - 1);
    const Cdf cdf = [=](double x) {
        if (x <= 0.0)
            return 0.0;
        if (x >= 1.0)
            return 1.0;
        return boost::math::ibeta(shape_a, shape_b, x);
    };
    const auto skipped = stats.at(kSkippedDegenerate).moments.count();
    const std::string note = skipped ? std::to_string(skipped) + " degenerate samples skipped" : std::string{};
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = stats.at("q" + std::to_string(i + 1));
        ctx.record(report, base + "/q" + std::to_string(i + 1), ks_statistic(s, cdf), ctx.relaxed(0.02),
                   s.moments.count(), seed, note);
    }
    const auto& lmax = stats.at("lambda_max").retained;
    const auto& q1 = stats.at("q1_paired").retained;
    const double corr = std::abs(detail::pearson(lmax, q1));
    ctx.record(report, base + "/corr(q1^2,lambda_max)", corr, ctx.relaxed(5.0 / std::sqrt(static_cast<double>(q1.size()))),
               q1.size(), seed, "independence surrogate: |Pearson correlation|");
    return report;
}

/// Two-sample KS between tridiagonalized dense GOE/GUE samples and the
/// beta = 1/2 tridiagonal sampler: largest eigenvalue, trace, each subdiagonal entry.
inline Report verify_equivalence(DenseKind kind, std::size_t n, std::size_t count, const CheckContext& ctx) {
    if (n < 2 || n > 12)
        throw ParameterError("equivalence check needs 2 <= n <= 12");
    const double beta = kind == DenseKind::goe ? 1.0 : 2.0;
    const std::string base = std::string(kind == DenseKind::goe ? "equivalence/goe" : "equivalence/gue") +
                             "/n=" + std::to_string(n);
    const std::uint64_t dense_seed = ctx.seed_for(base + "/dense");
    const std::uint64_t tri_seed = ctx.seed_for(base + "/tridiagonal");

    SampleStats layout;
    layout.declare("lambda_max", true);
    layout.declare("trace", true);
    for (std::size_t i = 0; i + 1 < n; ++i)
        layout.declare("b" + std::to_string(i), true);
    auto collect = [n](const TridiagonalSym& t, SampleStats& acc) {
        acc.push("lambda_max", eigenvalues(t).back());
        acc.push("trace", t.trace());
        for (std::size_t i = 0; i + 1 < n; ++i)
            acc.push("b" + std::to_string(i), t.subdiag[i]);
    };
    const SampleStats dense = ctx.run(count, dense_seed, layout, [&](RandomStream& stream, std::size_t, SampleStats& acc) {
        const TridiagonalSym t = std::visit([](const auto& m) { return householder_tridiagonalize(m); },
                                            sample_dense_classical(kind, n, stream));
        collect(t, acc);
    });
    const SampleStats tri = ctx.run(count, tri_seed, layout, [&](RandomStream& stream, std::size_t, SampleStats& acc) {
        collect(sample_hermite({beta, n}, stream), acc);
    });

    Report report;
    auto compare = [&](const std::string& stat) {
        const double d = ks_two_sample(dense.at(stat).retained, tri.at(stat).retained);
        ctx.record(report, base + "/" + stat, d, ctx.relaxed(0.02), count, dense_seed);
    };
    compare("lambda_max");
    compare("trace");
    for (std::size_t i = 0; i + 1 < n; ++i)
        compare("b" + std::to_string(i));
    return report;
}

inline Report verify_equivalence_goe(std::size_t n, std::size_t count, const CheckContext& ctx) {
    return verify_equivalence(DenseKind::goe, n, count, ctx);
}

/// Adaptive quadrature of the size-2 unnormalized integrand against 1/c.
inline QuadratureResult verify_density_quadrature(const EnsembleDensity& density) {
    return std::visit(
        [](const auto& p) -> QuadratureResult {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, HermiteParams>)
                return quadrature_hermite(p);
            else if constexpr (std::is_same_v<P, LaguerreParams>)
                return quadrature_laguerre(p);
            else
                return quadrature_jacobi(p);
        },
        density.params);
}

/// L1 distance between the pooled spectrum scaled by 1/sqrt(beta n) and the
/// semicircle sqrt(2 - t^2)/pi, compared as bin masses on a fixed grid.
inline double semicircle_check(double beta, std::size_t n, std::size_t count, std::uint64_t seed,
                               std::size_t workers = 1, std::size_t bins = 40) {
    HermiteParams params{beta, n};
    params.validate();
    if (n < 100)
        throw ParameterError("semicircle check applies only for n >= 100");
    const double edge = 1.1 * std::numbers::sqrt2;
    SampleStats layout;
    layout.declare("scaled", false, Histogram(-edge, edge, bins));
    const double scale = 1.0 / std::sqrt(beta * static_cast<double>(n));
    const SampleStats stats = monte_carlo(count, seed, kPartitions, workers, layout,
                                          [&](RandomStream& stream, std::size_t, SampleStats& acc) {
                                              for (double v : eigenvalues(sample_hermite(params, stream)))
                                                  acc.push("scaled", v * scale);
                                          });
    const Histogram& h = *stats.at("scaled").histogram;
    const double total = static_cast<double>(h.total());
    double l1 = static_cast<double>(h.below() + h.above()) / total;
    for (std::size_t i = 0; i < h.bins(); ++i) {
        const double exact = detail::semicircle_cdf(h.edge(i + 1)) - detail::semicircle_cdf(h.edge(i));
        l1 += std::abs(static_cast<double>(h.counts()[i]) / total - exact);
    }
    return l1;
}

// ---------------------------------------------------------------------------
// Suites

namespace suites {

inline Report jacobians(const CheckContext& ctx) {
    Report report;
    {
        // closed-form J(B -> T) against the finite-difference determinant of (x, y) -> (a, b)
        const std::string name = "jacobians/b_to_t_finite_difference";
        const std::uint64_t seed = ctx.seed_for(name);
        double worst = 0.0;
        std::size_t count = 0;
        for (std::size_t m = 1; m <= 5; ++m) {
            for (std::size_t rep = 0; rep < 20; ++rep) {
                RandomStream stream(seed, m * 1000 + rep);
                const double beta = 0.5 + 0.5 * static_cast<double>(rep % 6);
                const LaguerreParams p{beta, m, 0.5 * beta * static_cast<double>(m - 1) + 0.4 + 0.3 * static_cast<double>(rep % 5)};
                const BidiagonalPos b = sample_laguerre_factor(p, stream);
                const double fd = finite_difference_b_to_t_determinant(b);
                const double closed = std::exp(jacobian_b_to_t(b).log_abs);
                worst = std::max(worst, std::abs(closed * fd - 1.0));
                ++count;
            }
        }
        ctx.record(report, name, worst, 1e-6, count, seed, "max |J_closed * det_fd - 1|, m <= 5");
    }
    {
        // Hermite: entry density * J(T -> q, lambda) equals the product of the
        // q density and the ordered eigenvalue density
        const std::string name = "jacobians/hermite_density_factorization";
        const std::uint64_t seed = ctx.seed_for(name);
        double worst = 0.0;
        std::size_t count = 0;
        for (std::size_t n = 2; n <= 8; ++n) {
            for (double beta : {0.7, 1.0, 2.0, 3.3}) {
                for (std::size_t rep = 0; rep < 5; ++rep, ++count) {
                    RandomStream stream(seed, count);
                    const TridiagonalSym t = sample_hermite({beta, n}, stream);
                    const Spectrum sp = spectrum(t);
                    const double lhs = detail::log_hermite_entry_density(t, beta) + jacobian_t_to_qlambda(t, sp.q).log_abs;
                    const double rhs = detail::log_q_density(sp.q, beta) + detail::log_factorial(n) +
                                       log_density_hermite(sp.lambda, beta);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
        }
        ctx.record(report, name, worst, 1e-8, count, seed, "max |log residual|");
    }
    {
        const std::string name = "jacobians/laguerre_density_factorization";
        const std::uint64_t seed = ctx.seed_for(name);
        double worst = 0.0;
        std::size_t count = 0;
        for (std::size_t m = 2; m <= 6; ++m) {
            for (double beta : {0.7, 1.0, 2.0, 3.3}) {
                for (std::size_t rep = 0; rep < 5; ++rep, ++count) {
                    RandomStream stream(seed, count);
                    const LaguerreParams p{beta, m, 0.5 * beta * static_cast<double>(m - 1) + 0.35 + 0.5 * static_cast<double>(rep)};
                    const BidiagonalPos b = sample_laguerre_factor(p, stream);
                    const TridiagonalSym t = laguerre_from_factor(b);
                    const Spectrum sp = spectrum(t);
                    const double lhs = detail::log_laguerre_entry_density(b, beta, p.a) + jacobian_b_to_t(b).log_abs +
                                       jacobian_t_to_qlambda(t, sp.q).log_abs;
                    const double rhs = detail::log_q_density(sp.q, beta) + detail::log_factorial(m) +
                                       log_density_laguerre(sp.lambda, beta, p.a);
                    worst = std::max(worst, std::abs(lhs - rhs));
                }
            }
        }
        ctx.record(report, name, worst, 1e-8, count, seed, "max |log residual|");
    }
    {
        // trace(B B^T) = sum x^2 + sum y^2 over the whole admissible range of a
        const std::string name = "jacobians/laguerre_trace_identity";
        const std::uint64_t seed = ctx.seed_for(name);
        const std::size_t count = 1000;
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            RandomStream stream(seed, i);
            const std::size_t m = 1 + i % 6;
            const double beta = 0.5 + 0.25 * static_cast<double>(i % 15);
            const double a = 0.5 * beta * static_cast<double>(m - 1) + 0.05 + 0.1 * static_cast<double>(i % 31);
            const BidiagonalPos b = sample_laguerre_factor({beta, m, a}, stream);
            double sum_sq = 0.0;
            for (double x : b.diag)
                sum_sq += x * x;
            for (double y : b.subdiag)
                sum_sq += y * y;
            worst = std::max(worst, std::abs(laguerre_from_factor(b).trace() - sum_sq) / sum_sq);
        }
        ctx.record(report, name, worst, 1e-12, count, seed, "max relative error");
    }
    {
        // det(B B^T) = prod x^2, with det taken from the minor recurrence on the
        // stored tridiagonal entries. Rounding a_i = x_i^2 + y_{i-1}^2 perturbs the
        // determinant by up to eps (1 + y^2 / x^2) relative, so a is kept at least
        // 2 above (beta/2)(m - 1) where the smallest chi law has 4+ degrees of freedom.
        const std::string name = "jacobians/laguerre_det_identity";
        const std::uint64_t seed = ctx.seed_for(name);
        const std::size_t count = 1000;
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            RandomStream stream(seed, i);
            const std::size_t m = 1 + i % 6;
            const double beta = 0.5 + 0.25 * static_cast<double>(i % 15);
            const double a = 0.5 * beta * static_cast<double>(m - 1) + 2.0 + 0.1 * static_cast<double>(i % 31);
            const BidiagonalPos b = sample_laguerre_factor({beta, m, a}, stream);
            double log_prod = 0.0;
            for (double x : b.diag)
                log_prod += 2.0 * std::log(x);
            const CharPolyEval cp = char_poly(laguerre_from_factor(b), 0.0);
            const double det_sign = (m % 2 ? -1.0 : 1.0) * cp.sign(m);
            worst = std::max(worst, det_sign > 0.0 ? std::abs(std::expm1(cp.log_abs(m) - log_prod)) : 1.0);
        }
        ctx.record(report, name, worst, 1e-12, count, seed, "max relative error, a >= (beta/2)(m-1) + 2");
    }
    {
        // Same identity over the whole admissible range, with T formed and the
        // minor recurrence run in exact rational arithmetic.
        const std::string name = "jacobians/laguerre_det_identity_exact";
        const std::uint64_t seed = ctx.seed_for(name);
        const std::size_t count = 1000;
        double worst = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            RandomStream stream(seed, i);
            const std::size_t m = 1 + i % 6;
            const double beta = 0.5 + 0.25 * static_cast<double>(i % 15);
            const double a = 0.5 * beta * static_cast<double>(m - 1) + 0.05 + 0.1 * static_cast<double>(i % 31);
            const BidiagonalPos b = sample_laguerre_factor({beta, m, a}, stream);
            Rational prod = 1;
            for (double x : b.diag)
                prod *= Rational(x) * Rational(x);
            const Rational rel = detail::laguerre_det_exact(b) / prod - 1;
            worst = std::max(worst, std::abs(static_cast<double>(rel)));
        }
        ctx.record(report, name, worst, 1e-12, count, seed, "max relative error, full range of a, exact arithmetic");
    }
    return report;
}

inline Report vandermonde(const CheckContext& ctx) {
    const double beta = ctx.options().beta.value_or(2.0);
    const std::size_t n = ctx.options().n.value_or(12);
    const std::string name = detail::label("vandermonde", beta, n);
    const std::uint64_t seed = ctx.seed_for(name);
    const std::size_t count = 200;
    SampleStats layout;
    layout.declare("residual");
    layout.declare(kSkippedDegenerate);
    const SampleStats stats = ctx.run(count, seed, layout, [&](RandomStream& stream, std::size_t, SampleStats& acc) {
        const TridiagonalSym t = sample_hermite({beta, n}, stream);
        try {
            const Spectrum sp = spectrum(t);
            acc.push("residual",
                     std::abs(vandermonde_direct(sp.lambda).log_abs - vandermonde_tridiagonal(t, sp.q).log_abs));
        } catch (const DegenerateSpectrumError&) {
            acc.push(kSkippedDegenerate, 1.0);
        }
    });
    Report report;
    const auto& r = stats.at("residual").moments;
    ctx.record(report, name, r.count() ? r.max() : 0.0, 1e-8, r.count(), seed,
               "max |log Delta_direct - log(prod b^k / prod q)|");
    return report;
}

inline Report reconstruct(const CheckContext& ctx) {
    Report report;
    std::vector<std::size_t> sizes{5, 30, 50};
    std::vector<double> betas{0.5, 1.0, 2.0, 4.0};
    if (ctx.options().n)
        sizes = {*ctx.options().n};
    if (ctx.options().beta)
        betas = {*ctx.options().beta};
    for (std::size_t n : sizes) {
        for (double beta : betas) {
            const std::string name = detail::label("reconstruct", beta, n);
            const std::uint64_t seed = ctx.seed_for(name);
            SampleStats layout;
            layout.declare("relative_error");
            layout.declare(kSkippedDegenerate);
            const std::size_t count = ctx.samples(200);
            const SampleStats stats =
                ctx.run(count, seed, layout, [&](RandomStream& stream, std::size_t, SampleStats& acc) {
                    const TridiagonalSym t = sample_hermite({beta, n}, stream);
                    try {
                        const TridiagonalSym back = betatrix::reconstruct(spectrum(t));
                        double worst = 0.0;
                        for (std::size_t i = 0; i < n; ++i)
                            worst = std::max(worst, std::abs(back.diag[i] - t.diag[i]) / std::abs(t.diag[i]));
                        for (std::size_t i = 0; i + 1 < n; ++i)
                            worst = std::max(worst, std::abs(back.subdiag[i] - t.subdiag[i]) / t.subdiag[i]);
                        acc.push("relative_error", worst);
                    } catch (const DegenerateSpectrumError&) {
                        acc.push(kSkippedDegenerate, 1.0);
                    }
                });
            const auto& r = stats.at("relative_error").moments;
            const auto skipped = stats.at(kSkippedDegenerate).moments.count();
            ctx.record(report, name, r.count() ? r.max() : 0.0, 1e-8, r.count(), seed,
                       skipped ? std::to_string(skipped) + " degenerate samples skipped" : std::string{});
        }
    }
    {
        // first-row formula against dense inverse iteration
        const std::size_t n = 15;
        const std::string name = "reconstruct/paige_vs_inverse_iteration/beta=2/n=15";
        const std::uint64_t seed = ctx.seed_for(name);
        double worst = 0.0;
        const std::size_t count = 100;
        for (std::size_t i = 0; i < count; ++i) {
            RandomStream stream(seed, i);
            const TridiagonalSym t = sample_hermite({2.0, n}, stream);
            const auto lambda = eigenvalues(t);
            const auto q = first_row_eigvec(t, lambda);
            const auto oracle = inverse_iteration_first_row(t, lambda);
            for (std::size_t k = 0; k < n; ++k)
                worst = std::max(worst, std::abs(q[k] - oracle[k]));
        }
        ctx.record(report, name, worst, 1e-10, count, seed, "max |q_paige - q_inverse_iteration|");
    }
    return report;
}

inline Report qdist(const CheckContext& ctx) {
    Report report;
    std::vector<double> betas{0.5, 1.0, 2.0, 4.0, 7.3};
    std::vector<std::size_t> sizes{2, 5, 8};
    if (ctx.options().beta)
        betas = {*ctx.options().beta};
    if (ctx.options().n)
        sizes = {*ctx.options().n};
    for (double beta : betas)
        for (std::size_t n : sizes)
            report.append(verify_q_distribution(beta, n, ctx.samples(20'000), ctx));
    return report;
}

inline Report equivalence(const CheckContext& ctx) {
    const std::size_t n = ctx.options().n.value_or(8);
    Report report = verify_equivalence(DenseKind::goe, n, ctx.samples(20'000), ctx);
    report.append(verify_equivalence(DenseKind::gue, n, ctx.samples(20'000), ctx));
    return report;
}

inline Report selberg(const CheckContext& ctx) {
    Report report;
    for (double beta : {1.0, 2.0, 3.5}) {
        const auto h = quadrature_hermite({beta, 2});
        ctx.record(report, detail::label("selberg/hermite", beta, 2), h.relative_error, 1e-6, 0, 0,
                   "quadrature " + detail::fmt(h.integral) + " vs 1/c " + detail::fmt(h.closed_form));
        for (double a : {0.5 * beta + 0.25, 0.5 * beta + 1.0, 0.5 * beta + 2.7}) {
            const auto l = quadrature_laguerre({beta, 2, a});
            ctx.record(report, detail::label("selberg/laguerre", beta, 2) + "/a=" + detail::fmt(a), l.relative_error,
                       1e-5, 0, 0, "quadrature " + detail::fmt(l.integral) + " vs 1/c " + detail::fmt(l.closed_form));
        }
        const auto j = quadrature_jacobi({beta, 2, 0.5 * beta + 0.6, 0.5 * beta + 1.9});
        ctx.record(report, detail::label("selberg/jacobi", beta, 2), j.relative_error, 1e-6, 0, 0,
                   "quadrature " + detail::fmt(j.integral) + " vs 1/c " + detail::fmt(j.closed_form));
    }
    {
        const auto l = quadrature_laguerre({1.0, 2, 1.5});
        ctx.record(report, "selberg/laguerre/beta=1/n=2/a=1.5", l.relative_error, 1e-5, 0, 0);
    }
    return report;
}

inline Report density(const CheckContext& ctx) {
    Report report;
    {
        // m = 1: the single eigenvalue is chi^2 with 2a degrees of freedom, for any real a > 0
        for (double a : {0.7, 1.0, 3.2}) {
            const std::string name = "density/laguerre_m1_chisq/a=" + detail::fmt(a);
            const std::uint64_t seed = ctx.seed_for(name);
            MonteCarloConfig cfg;
            cfg.ensemble = LaguerreParams{1.0, 1, a};
            cfg.samples = ctx.samples(20'000);
            cfg.seed = seed;
            cfg.partitions = kPartitions;
            cfg.workers = ctx.options().workers;
            cfg.statistics = {Statistic::lambda_max};
            cfg.retain = true;
            const SampleStats stats = run_monte_carlo(cfg);
            const double ks = ks_statistic(stats.at("lambda_max"), [a](double x) {
                return x <= 0.0 ? 0.0 : boost::math::gamma_p(a, 0.5 * x);
            });
            ctx.record(report, name, ks, ctx.relaxed(0.02), cfg.samples, seed, "KS vs chi-square(2a)");
        }
    }
    {
        // m = 3 trace and determinant against the exact symbolic expectations
        const MomentQuery trace_q{EnsembleKind::laguerre, 3, ElementarySymmetric{1}};
        const MomentQuery det_q{EnsembleKind::laguerre, 3, DeterminantPower{1}};
        const BetaPoly trace_poly = expected_elementary_symmetric(trace_q);
        const BetaPoly det_poly = det_moment(det_q);
        for (double a : {1.35, 2.35}) {
            const double beta = 1.0;
            const std::string name = "density/laguerre_m3/beta=1/a=" + detail::fmt(a);
            const std::uint64_t seed = ctx.seed_for(name);
            MonteCarloConfig cfg;
            cfg.ensemble = LaguerreParams{beta, 3, a};
            cfg.samples = ctx.samples(100'000);
            cfg.seed = seed;
            cfg.partitions = kPartitions;
            cfg.workers = ctx.options().workers;
            cfg.statistics = {Statistic::trace, Statistic::determinant};
            const SampleStats stats = run_monte_carlo(cfg);
            for (const auto& [stat, poly] : {std::pair{"trace", &trace_poly}, std::pair{"det", &det_poly}}) {
                const auto& mom = stats.at(stat).moments;
                const double exact = poly->evaluate(0.5 * beta, a);
                ctx.record(report, name + "/" + stat, std::abs(mom.mean() - exact) / mom.standard_error(),
                           ctx.relaxed(4.0), mom.count(), seed,
                           "SE units; exact " + detail::fmt(exact) + ", MC " + detail::fmt(mom.mean()));
            }
        }
    }
    {
        // Hermite n = 6, beta = 1: trace is a sum of 6 independent N(0,1)
        const std::string name = "density/hermite_trace_variance/beta=1/n=6";
        const std::uint64_t seed = ctx.seed_for(name);
        MonteCarloConfig cfg;
        cfg.ensemble = HermiteParams{1.0, 6};
        cfg.samples = ctx.samples(100'000);
        cfg.seed = seed;
        cfg.partitions = kPartitions;
        cfg.workers = ctx.options().workers;
        cfg.statistics = {Statistic::trace};
        const auto& mom = run_monte_carlo(cfg).at("trace").moments;
        // SE of the sample variance for a Gaussian: sigma^2 sqrt(2/(N-1))
        const double se = 6.0 * std::sqrt(2.0 / static_cast<double>(mom.count() - 1));
        ctx.record(report, name, std::abs(mom.variance() - 6.0) / se, ctx.relaxed(3.0), mom.count(), seed,
                   "SE units; sample variance " + detail::fmt(mom.variance()));
    }
    return report;
}

inline Report discriminant(const CheckContext& ctx) {
    Report report;
    {
        const std::string name = "discriminant/hermite_mc/beta=2/n=2/k=1";
        const std::uint64_t seed = ctx.seed_for(name);
        const double exact = discriminant_moment(EnsembleDensity::hermite(2.0, 2), 1);
        MonteCarloConfig cfg;
        cfg.ensemble = HermiteParams{2.0, 2};
        cfg.samples = ctx.samples(1'000'000);
        cfg.seed = seed;
        cfg.partitions = kPartitions;
        cfg.workers = ctx.options().workers;
        cfg.statistics = {Statistic::discriminant};
        const auto& mom = run_monte_carlo(cfg).at("discriminant").moments;
        ctx.record(report, name, std::abs(mom.mean() - exact) / mom.standard_error(), ctx.relaxed(3.0), mom.count(),
                   seed, "SE units; formula " + detail::fmt(exact) + ", MC " + detail::fmt(mom.mean()));
    }
    {
        // Gamma-ratio and rising-factorial routes
        double worst = 0.0;
        std::size_t count = 0;
        for (std::size_t n = 1; n <= 5; ++n) {
            for (double beta : {0.5, 1.0, 2.0, 2.7, 4.0}) {
                const double s = 0.5 * beta;
                const double edge = s * static_cast<double>(n - 1);
                for (unsigned k = 1; k <= 3; ++k) {
                    const HermiteParams h{beta, n};
                    const LaguerreParams l{beta, n, edge + 0.8};
                    const JacobiParams j{beta, n, edge + 0.6, edge + 1.7};
                    worst = std::max({worst,
                                      std::abs(log_discriminant_moment_gamma_ratio(h, k) - log_discriminant_moment_rising(h, k)),
                                      std::abs(log_discriminant_moment_gamma_ratio(l, k) - log_discriminant_moment_rising(l, k)),
                                      std::abs(log_discriminant_moment_gamma_ratio(j, k) - log_discriminant_moment_rising(j, k))});
                    count += 3;
                }
            }
        }
        ctx.record(report, "discriminant/route_agreement", worst, 1e-10, count, 0,
                   "max |log gamma-ratio - log rising-factorial|, sizes <= 5, k <= 3");
    }
    return report;
}

inline Report charpoly(const CheckContext& ctx) {
    Report report;
    {
        const BetaPoly d1 = det_moment({EnsembleKind::hermite, 2, DeterminantPower{1}});
        const BetaPoly d2 = det_moment({EnsembleKind::hermite, 2, DeterminantPower{2}});
        ctx.record(report, "charpoly/hermite_n2_det", d1.to_string() == "-s" ? 0.0 : 1.0, 0.5, 0, 0, d1.to_string());
        ctx.record(report, "charpoly/hermite_n2_det_squared", d2.to_string() == "s^2+s+1" ? 0.0 : 1.0, 0.5, 0, 0,
                   d2.to_string());
    }
    {
        std::size_t bad = 0, count = 0;
        std::string detail_text;
        for (std::size_t n = 1; n <= 4; ++n) {
            for (unsigned k = 1; k <= 3; ++k, ++count) {
                try {
                    (void)det_moment({EnsembleKind::hermite, n, DeterminantPower{k}});
                } catch (const std::logic_error& e) {
                    ++bad;
                    detail_text += "n=" + std::to_string(n) + ",k=" + std::to_string(k) + " ";
                }
            }
        }
        ctx.record(report, "charpoly/hermite_det_moments_integer", static_cast<double>(bad), 0.5, count, 0, detail_text);
    }
    {
        // at beta = 2 (s = 1) the expected polynomial is the monic probabilists' Hermite polynomial
        std::size_t bad = 0;
        for (std::size_t n = 1; n <= 6; ++n) {
            const ClassicalPolynomial he = classical_monic(PolynomialFamily::hermite_probabilists, n);
            for (const ExpectedCharPoly& e : {expected_charpoly(EnsembleKind::hermite, n),
                                              expected_charpoly_expanded(EnsembleKind::hermite, n)}) {
                for (std::size_t k = 0; k <= n; ++k)
                    if (e.coefficients[k].evaluate_exact(Rational(1)) != he.coefficients[k]) {
                        ++bad;
                        break;
                    }
            }
        }
        ctx.record(report, "charpoly/hermite_beta2_matches_He", static_cast<double>(bad), 0.5, 6, 0);
    }
    {
        // at beta = 2 the Laguerre expectation is 2^m m! (-1)^m L_m^{(a-m)}(y/2)
        std::size_t bad = 0;
        for (std::size_t m = 1; m <= 4; ++m) {
            const ExpectedCharPoly e = expected_charpoly(EnsembleKind::laguerre, m);
            for (const Rational& a : {Rational(5, 2), Rational(37, 8), Rational(7)}) {
                const ClassicalPolynomial lag = rescale_monic(
                    classical_monic(PolynomialFamily::generalized_laguerre, m, to_double(a) - static_cast<double>(m)),
                    Rational(2));
                for (std::size_t k = 0; k <= m; ++k)
                    if (e.coefficients[k].evaluate_exact(Rational(1), a) != lag.coefficients[k]) {
                        ++bad;
                        break;
                    }
            }
        }
        ctx.record(report, "charpoly/laguerre_beta2_matches_generalized_laguerre", static_cast<double>(bad), 0.5, 12, 0);
    }
    {
        // Monte Carlo against every symbolic coefficient and E[det^2]
        std::vector<double> betas{1.0, 2.0, 4.0, 2.7};
        if (ctx.options().beta)
            betas = {*ctx.options().beta};
        const std::size_t size = 3;
        for (EnsembleKind kind : {EnsembleKind::hermite, EnsembleKind::laguerre}) {
            const ExpectedCharPoly expected = expected_charpoly(kind, size);
            const BetaPoly det_sq = det_moment({kind, size, DeterminantPower{2}});
            for (double beta : betas) {
                const double a = kind == EnsembleKind::laguerre ? beta + 1.3 : 0.0;
                const std::string name = std::string(kind == EnsembleKind::hermite ? "charpoly/mc/hermite" : "charpoly/mc/laguerre") +
                                         "/beta=" + detail::fmt(beta) + "/n=3" +
                                         (kind == EnsembleKind::laguerre ? "/a=" + detail::fmt(a) : std::string{});
                const std::uint64_t seed = ctx.seed_for(name);
                SampleStats layout;
                for (std::size_t k = 0; k < size; ++k)
                    layout.declare("y^" + std::to_string(k));
                layout.declare("det^2");
                const TridiagonalParams params = kind == EnsembleKind::hermite
                                                     ? TridiagonalParams{HermiteParams{beta, size}}
                                                     : TridiagonalParams{LaguerreParams{beta, size, a}};
                const SampleStats stats = ctx.run(ctx.samples(100'000), seed, layout,
                                                  [&](RandomStream& stream, std::size_t, SampleStats& acc) {
                                                      const auto c = detail::charpoly_coefficients(sample_tridiagonal(params, stream));
                                                      for (std::size_t k = 0; k < size; ++k)
                                                          acc.push("y^" + std::to_string(k), c[k]);
                                                      acc.push("det^2", c[0] * c[0]);
                                                  });
                auto compare = [&](const std::string& stat, const BetaPoly& poly) {
                    const auto& mom = stats.at(stat).moments;
                    const double exact = poly.evaluate(0.5 * beta, a);
                    ctx.record(report, name + "/" + stat, std::abs(mom.mean() - exact) / mom.standard_error(),
                               ctx.relaxed(4.0), mom.count(), seed,
                               "SE units; exact " + detail::fmt(exact) + ", MC " + detail::fmt(mom.mean()));
                };
                for (std::size_t k = 0; k < size; ++k)
                    compare("y^" + std::to_string(k), expected.coefficients[k]);
                compare("det^2", det_sq);
            }
        }
    }
    return report;
}

inline Report semicircle(const CheckContext& ctx) {
    Report report;
    std::vector<double> betas{1.0, 2.0, 4.0};
    if (ctx.options().beta)
        betas = {*ctx.options().beta};
    const std::size_t n = ctx.options().n.value_or(200);
    if (n < 100)
        throw ParameterError("semicircle check applies only for n >= 100");
    for (double beta : betas) {
        const std::string name = detail::label("semicircle", beta, n);
        const std::uint64_t seed = ctx.seed_for(name);
        const std::size_t count = ctx.samples(200);
        const double l1 = semicircle_check(beta, n, count, seed, ctx.options().workers);
        ctx.record(report, name, l1, ctx.relaxed(0.05), count, seed, "L1 distance of scaled pooled spectrum");
    }
    return report;
}

} // namespace suites

inline Report run_suite(Suite suite, const VerifyOptions& options) {
    const CheckContext ctx(options);
    switch (suite) {
    case Suite::jacobians: return suites::jacobians(ctx);
    case Suite::vandermonde: return suites::vandermonde(ctx);
    case Suite::reconstruct: return suites::reconstruct(ctx);
    case Suite::qdist: return suites::qdist(ctx);
    case Suite::equivalence: return suites::equivalence(ctx);
    case Suite::density: return suites::density(ctx);
    case Suite::selberg: return suites::selberg(ctx);
    case Suite::discriminant: return suites::discriminant(ctx);
    case Suite::charpoly: return suites::charpoly(ctx);
    case Suite::semicircle: return suites::semicircle(ctx);
    case Suite::all: break;
    }
    Report all;
    for (const auto& [s, label] : kSuiteNames)
        if (s != Suite::all)
            all.append(run_suite(s, options));
    return all;
}

} // namespace betatrix
