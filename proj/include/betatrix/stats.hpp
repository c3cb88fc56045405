#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "betatrix/error.hpp"
#include "betatrix/random.hpp"

namespace betatrix {

/// Streaming count, mean, variance and range (Welford, merged with Chan's rule).
class RunningStats {
public:
    void push(double x) {
        ++count_;
        const double delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta * (x - mean_);
        min_ = std::min(min_, x);
        max_ = std::max(max_, x);
    }

    void merge(const RunningStats& o) {
        if (o.count_ == 0)
            return;
        if (count_ == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count_);
        const double nb = static_cast<double>(o.count_);
        const double n = na + nb;
        const double delta = o.mean_ - mean_;
        mean_ += delta * nb / n;
        m2_ += o.m2_ + delta * delta * na * nb / n;
        count_ += o.count_;
        min_ = std::min(min_, o.min_);
        max_ = std::max(max_, o.max_);
    }

    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
    double standard_error() const noexcept {
        return count_ > 0 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
    }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

private:
    std::uint64_t count_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double min_ = std::numeric_limits<double>::infinity();
    double max_ = -std::numeric_limits<double>::infinity();
};

/// Fixed-range histogram; values outside [lo, hi) go to the tail counters.
class Histogram {
public:
    Histogram(double lo, double hi, std::size_t bins) : lo_(lo), hi_(hi), counts_(bins, 0) {
        if (bins == 0)
            throw ParameterError("histogram needs at least one bin");
        if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
            throw ParameterError("histogram range must be finite with hi > lo");
    }

    void add(double x) {
        if (x < lo_) {
            ++below_;
        } else if (x >= hi_) {
            ++above_;
        } else {
            auto bin = static_cast<std::size_t>((x - lo_) / width());
            counts_[std::min(bin, counts_.size() - 1)] += 1;
        }
    }

    void merge(const Histogram& o) {
        if (o.lo_ != lo_ || o.hi_ != hi_ || o.counts_.size() != counts_.size())
            throw ParameterError("cannot merge histograms with different binning");
        for (std::size_t i = 0; i < counts_.size(); ++i)
            counts_[i] += o.counts_[i];
        below_ += o.below_;
        above_ += o.above_;
    }

    double lo() const noexcept { return lo_; }
    double hi() const noexcept { return hi_; }
    std::size_t bins() const noexcept { return counts_.size(); }
    double width() const noexcept { return (hi_ - lo_) / static_cast<double>(counts_.size()); }
    double edge(std::size_t i) const noexcept { return lo_ + width() * static_cast<double>(i); }
    const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    std::uint64_t below() const noexcept { return below_; }
    std::uint64_t above() const noexcept { return above_; }
    std::uint64_t total() const noexcept {
        std::uint64_t t = below_ + above_;
        for (auto c : counts_)
            t += c;
        return t;
    }

private:
    double lo_, hi_;
    std::vector<std::uint64_t> counts_;
    std::uint64_t below_ = 0, above_ = 0;
};

inline constexpr std::size_t kRetainedSampleCap = 100'000;

/// Everything collected for one named statistic.
struct StatisticSummary {
    RunningStats moments;
    std::optional<Histogram> histogram;
    bool retain = false;
    std::size_t retain_cap = kRetainedSampleCap;
    bool retained_truncated = false;
    std::vector<double> retained;

    void push(double x) {
        moments.push(x);
        if (histogram)
            histogram->add(x);
        if (retain && !retained_truncated) {
            if (retained.size() < retain_cap) {
                retained.push_back(x);
            } else {
                retained_truncated = true;
                retained.clear();
                retained.shrink_to_fit();
            }
        }
    }

    /// Appends `o` after this summary; retained samples keep index order.
    void merge(const StatisticSummary& o) {
        moments.merge(o.moments);
        if (histogram && o.histogram)
            histogram->merge(*o.histogram);
        if (retain) {
            retained_truncated = retained_truncated || o.retained_truncated ||
                                 retained.size() + o.retained.size() > retain_cap;
            if (retained_truncated) {
                retained.clear();
                retained.shrink_to_fit();
            } else {
                retained.insert(retained.end(), o.retained.begin(), o.retained.end());
            }
        }
    }
};

/// Named statistics gathered over a Monte Carlo run.
class SampleStats {
public:
    /// Registers a statistic; call before sampling so every partition shares the layout.
    StatisticSummary& declare(const std::string& name, bool retain = false,
                              std::optional<Histogram> histogram = std::nullopt,
                              std::size_t retain_cap = kRetainedSampleCap) {
        StatisticSummary& s = stats_[name];
        s.retain = retain;
        s.retain_cap = retain_cap;
        s.histogram = std::move(histogram);
        return s;
    }

    void push(const std::string& name, double x) {
        auto it = stats_.find(name);
        if (it == stats_.end())
            it = stats_.emplace(name, StatisticSummary{}).first;
        it->second.push(x);
    }

    void merge(const SampleStats& o) {
        for (const auto& [name, summary] : o.stats_) {
            auto it = stats_.find(name);
            if (it == stats_.end())
                stats_.emplace(name, summary);
            else
                it->second.merge(summary);
        }
    }

    /// Copy of this layout with all counts cleared.
    SampleStats empty_like() const {
        SampleStats out;
        for (const auto& [name, s] : stats_) {
            std::optional<Histogram> h;
            if (s.histogram)
                h.emplace(s.histogram->lo(), s.histogram->hi(), s.histogram->bins());
            out.declare(name, s.retain, std::move(h), s.retain_cap);
        }
        return out;
    }

    bool contains(const std::string& name) const { return stats_.count(name) != 0; }
    const StatisticSummary& at(const std::string& name) const {
        auto it = stats_.find(name);
        if (it == stats_.end())
            throw ParameterError("no statistic named '" + name + "'");
        return it->second;
    }
    const std::map<std::string, StatisticSummary>& all() const noexcept { return stats_; }

private:
    std::map<std::string, StatisticSummary> stats_;
};

// ---------------------------------------------------------------------------
// Kolmogorov-Smirnov statistics

using Cdf = std::function<double(double)>;

/// sup |F_N - F| for the empirical CDF of `samples`.
inline double ks_one_sample(std::span<const double> samples, const Cdf& cdf) {
    if (samples.size() < 10)
        throw ParameterError("ks_one_sample needs at least 10 samples");
    std::vector<double> xs(samples.begin(), samples.end());
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    std::size_t i = 0;
    while (i < xs.size()) {
        std::size_t j = i;
        while (j < xs.size() && xs[j] == xs[i])
            ++j;
        const double f = cdf(xs[i]);
        d = std::max({d, std::abs(static_cast<double>(j) / n - f), std::abs(f - static_cast<double>(i) / n)});
        i = j;
    }
    return d;
}

/// sup |F_x - F_y| between two empirical CDFs.
inline double ks_two_sample(std::span<const double> xs_in, std::span<const double> ys_in) {
    if (xs_in.empty() || ys_in.empty())
        throw ParameterError("ks_two_sample needs nonempty samples");
    std::vector<double> xs(xs_in.begin(), xs_in.end());
    std::vector<double> ys(ys_in.begin(), ys_in.end());
    std::sort(xs.begin(), xs.end());
    std::sort(ys.begin(), ys.end());
    const double nx = static_cast<double>(xs.size());
    const double ny = static_cast<double>(ys.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < xs.size() && j < ys.size()) {
        const double v = std::min(xs[i], ys[j]);
        while (i < xs.size() && xs[i] == v)
            ++i;
        while (j < ys.size() && ys[j] == v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
    }
    return d;
}

/// KS distance evaluated only at the bin edges of a histogram. Used once the
/// retained sample has been dropped for exceeding its cap; it never exceeds
/// the exact statistic.
inline double ks_binned(const Histogram& h, const Cdf& cdf) {
    const double n = static_cast<double>(h.total());
    if (n == 0.0)
        throw ParameterError("ks_binned on an empty histogram");
    double cum = static_cast<double>(h.below());
    double d = std::abs(cum / n - cdf(h.lo()));
    for (std::size_t i = 0; i < h.bins(); ++i) {
        cum += static_cast<double>(h.counts()[i]);
        d = std::max(d, std::abs(cum / n - cdf(h.edge(i + 1))));
    }
    return d;
}

/// Exact statistic when the sample was retained, binned approximation otherwise.
inline double ks_statistic(const StatisticSummary& s, const Cdf& cdf) {
    if (s.retain && !s.retained_truncated)
        return ks_one_sample(s.retained, cdf);
    if (s.histogram)
        return ks_binned(*s.histogram, cdf);
    throw ResourceError("KS test needs retained samples or a histogram", s.moments.count());
}

// ---------------------------------------------------------------------------
// Partitioned Monte Carlo

/// Runs `fn(stream, index, acc)` for index in [0, count). Sample i always draws
/// from RandomStream(seed, i), so the pooled result depends only on (seed, count);
/// partitions are contiguous index blocks merged in index order.
template <class SampleFn>
SampleStats monte_carlo(std::size_t count, std::uint64_t seed, std::size_t partitions, std::size_t workers,
                        const SampleStats& layout, SampleFn fn) {
    if (count < 1)
        throw ParameterError("Monte Carlo needs N >= 1");
    if (partitions < 1)
        throw ParameterError("Monte Carlo needs at least one partition");
    partitions = std::min(partitions, count);
    workers = std::clamp<std::size_t>(workers, 1, partitions);

    std::vector<SampleStats> parts(partitions, layout.empty_like());
    std::vector<std::exception_ptr> errors(partitions);
    std::atomic<std::size_t> next{0};

    auto run_partitions = [&] {
        for (std::size_t p = next.fetch_add(1); p < partitions; p = next.fetch_add(1)) {
            const std::size_t begin = count * p / partitions;
            const std::size_t end = count * (p + 1) / partitions;
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    RandomStream stream(seed, i);
                    fn(stream, i, parts[p]);
                }
            } catch (...) {
                errors[p] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        run_partitions();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back(run_partitions);
    }

    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    SampleStats out = layout.empty_like();
    for (const auto& part : parts)
        out.merge(part);
    return out;
}

} // namespace betatrix
