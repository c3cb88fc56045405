#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "betatrix/ensembles.hpp"
#include "betatrix/error.hpp"
#include "betatrix/spectral.hpp"
#include "betatrix/stats.hpp"

namespace betatrix {

enum class Statistic { trace, determinant, lambda_max, lambda_min, eigenvalue, discriminant, q_first_squared };

inline std::string_view statistic_name(Statistic s) {
    switch (s) {
    case Statistic::trace: return "trace";
    case Statistic::determinant: return "det";
    case Statistic::lambda_max: return "lambda_max";
    case Statistic::lambda_min: return "lambda_min";
    case Statistic::eigenvalue: return "eigenvalue";
    case Statistic::discriminant: return "discriminant";
    case Statistic::q_first_squared: return "q1_squared";
    }
    return "unknown";
}

inline Statistic parse_statistic(std::string_view name) {
    for (auto s : {Statistic::trace, Statistic::determinant, Statistic::lambda_max, Statistic::lambda_min,
                   Statistic::eigenvalue, Statistic::discriminant, Statistic::q_first_squared})
        if (statistic_name(s) == name)
            return s;
    throw ParameterError("unknown statistic '" + std::string(name) + "'");
}

/// Name of the counter incremented when a sample's spectrum is too close to
/// degenerate for the first-row formula.
inline constexpr const char* kSkippedDegenerate = "skipped_degenerate";

using TridiagonalParams = std::variant<HermiteParams, LaguerreParams>;

struct MonteCarloConfig {
    TridiagonalParams ensemble = HermiteParams{};
    std::size_t samples = 1;
    std::uint64_t seed = 0;
    std::size_t partitions = 1;
    std::size_t workers = 1;
    std::vector<Statistic> statistics;
    bool retain = false;

    void validate() const {
        if (samples < 1)
            throw ParameterError("Monte Carlo needs N >= 1");
        if (partitions < 1)
            throw ParameterError("Monte Carlo needs at least one partition");
        std::visit([](const auto& p) { p.validate(); }, ensemble);
    }
};

inline TridiagonalSym sample_tridiagonal(const TridiagonalParams& params, RandomStream& stream) {
    return std::visit(
        [&](const auto& p) -> TridiagonalSym {
            if constexpr (std::is_same_v<std::decay_t<decltype(p)>, HermiteParams>)
                return sample_hermite(p, stream);
            else
                return sample_laguerre(p, stream);
        },
        params);
}

inline SampleStats run_monte_carlo(const MonteCarloConfig& cfg) {
    cfg.validate();
    if (cfg.retain && cfg.samples > kRetainedSampleCap)
        throw ResourceError("retained samples would exceed the cap of " + std::to_string(kRetainedSampleCap),
                            cfg.samples);

    SampleStats layout;
    bool need_spectrum = false, need_q = false;
    for (Statistic s : cfg.statistics) {
        layout.declare(std::string(statistic_name(s)), cfg.retain && s != Statistic::eigenvalue);
        need_spectrum = need_spectrum || (s != Statistic::trace && s != Statistic::determinant);
        need_q = need_q || s == Statistic::q_first_squared;
    }
    layout.declare(kSkippedDegenerate);

    const auto& stats = cfg.statistics;
    return monte_carlo(cfg.samples, cfg.seed, cfg.partitions, cfg.workers, layout,
                       [&](RandomStream& stream, std::size_t, SampleStats& acc) {
                           const TridiagonalSym t = sample_tridiagonal(cfg.ensemble, stream);
                           std::vector<double> lambda;
                           if (need_spectrum)
                               lambda = eigenvalues(t);
                           std::vector<double> q;
                           if (need_q) {
                               try {
                                   q = first_row_eigvec(t, lambda);
                               } catch (const DegenerateSpectrumError&) {
                                   acc.push(kSkippedDegenerate, 1.0);
                               }
                           }
                           for (Statistic s : stats) {
                               const std::string name(statistic_name(s));
                               switch (s) {
                               case Statistic::trace:
                                   acc.push(name, t.trace());
                                   break;
                               case Statistic::determinant:
                                   acc.push(name, char_poly(t, 0.0).value(t.size()) *
                                                      (t.size() % 2 ? -1.0 : 1.0));
                                   break;
                               case Statistic::lambda_max:
                                   acc.push(name, lambda.back());
                                   break;
                               case Statistic::lambda_min:
                                   acc.push(name, lambda.front());
                                   break;
                               case Statistic::eigenvalue:
                                   for (double v : lambda)
                                       acc.push(name, v);
                                   break;
                               case Statistic::discriminant: {
                                   const LogValue v = vandermonde_direct(lambda);
                                   acc.push(name, std::exp(2.0 * v.log_abs));
                                   break;
                               }
                               case Statistic::q_first_squared:
                                   if (!q.empty())
                                       acc.push(name, q[0] * q[0]);
                                   break;
                               }
                           }
                       });
}

} // namespace betatrix
