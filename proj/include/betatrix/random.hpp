#pragma once

// Keyed counter-based random streams and the scalar variates (normal, Gamma,
// chi) every ensemble sampler is built from.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "betatrix/error.hpp"

namespace betatrix {

namespace detail {

/// Philox4x32-10 block function (Salmon et al., SC'11).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t m0 = 0xD2511F53u;
    constexpr std::uint32_t m1 = 0xCD9E8D57u;
    constexpr std::uint32_t w0 = 0x9E3779B9u;
    constexpr std::uint32_t w1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += w0;
            key[1] += w1;
        }
        const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
        const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

} // namespace detail

/// A reproducible stream of 64-bit words keyed by (seed, stream_id).
///
/// The seed is the Philox key; the stream id occupies the upper half of the
/// 128-bit counter and the block index the lower half, so distinct stream ids
/// are disjoint substreams and need no coordination to split. A stream is a
/// plain value: copy it to fork, never share one mutably between threads.
/// Satisfies UniformRandomBitGenerator.
class RandomStream {
public:
    using result_type = std::uint64_t;

    RandomStream(std::uint64_t seed, std::uint64_t stream_id)
        : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }
    /// Number of 64-bit words drawn so far.
    std::uint64_t words_consumed() const noexcept { return 2 * block_ - (buffered_ ? 1 : 0); }

    std::uint64_t next_u64() {
        if (buffered_) {
            buffered_ = false;
            return spare_;
        }
        const std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)};
        const std::array<std::uint32_t, 2> key{static_cast<std::uint32_t>(seed_),
                                               static_cast<std::uint32_t>(seed_ >> 32)};
        const auto out = detail::philox4x32(ctr, key);
        ++block_;
        spare_ = (std::uint64_t{out[3]} << 32) | out[2];
        buffered_ = true;
        return (std::uint64_t{out[1]} << 32) | out[0];
    }

    /// Uniform double on the open interval (0, 1), 53 random bits.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::uint64_t spare_ = 0;
    bool buffered_ = false;
};

/// Standard normal variate by the Box-Muller cosine branch. Always consumes
/// exactly two stream words.
inline double gaussian(RandomStream& stream) {
    const double u1 = stream.uniform();
    const double u2 = stream.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Gamma(shape, scale) variate. Marsaglia-Tsang squeeze for shape >= 1; for
/// shape < 1 draws Gamma(shape + 1) and multiplies by U^(1/shape).
inline double gamma_variate(RandomStream& stream, double shape, double scale = 1.0) {
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw ParameterError("gamma_variate: shape must be positive and finite, got " +
                             std::to_string(shape));
    if (shape < 1.0) {
        const double boosted = gamma_variate(stream, shape + 1.0, scale);
        return boosted * std::pow(stream.uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = gaussian(stream);
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = stream.uniform();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2)
            return d * v * scale;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
            return d * v * scale;
    }
}

/// The chi distribution with real degrees of freedom.
struct ChiLaw {
    double dof;

    explicit ChiLaw(double r) : dof(r) {
        if (!(r > 0.0) || !std::isfinite(r))
            throw ParameterError("chi law needs positive finite degrees of freedom, got " +
                                 std::to_string(r));
    }
};

/// chi_r variate as sqrt(Gamma(r/2, scale 2)); valid for every real r > 0.
inline double chi(RandomStream& stream, ChiLaw law) {
    return std::sqrt(gamma_variate(stream, 0.5 * law.dof, 2.0));
}

/// E[chi_r^(2k)] = r (r+2) ... (r+2k-2).
inline double chi_even_moment(double r, unsigned k) {
    if (!(r > 0.0))
        throw ParameterError("chi_even_moment: r must be positive");
    double m = 1.0;
    for (unsigned j = 0; j < k; ++j)
        m *= r + 2.0 * j;
    return m;
}

} // namespace betatrix
