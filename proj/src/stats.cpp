#include "ncrc/stats.hpp"

#include <algorithm>
#include <cmath>

#include "ncrc/error.hpp"

namespace ncrc {

double binomial_cdf(std::int64_t k, std::int64_t n, double p)
{
    if (n < 0) throw InvalidInput("binomial_cdf needs n >= 0");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("binomial_cdf needs p in [0, 1]");
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;

    const long double lp = std::log(static_cast<long double>(p));
    const long double lq = std::log1p(-static_cast<long double>(p));
    const long double lgn = std::lgamma(static_cast<long double>(n) + 1.0L);
    std::vector<long double> terms;
    terms.reserve(static_cast<std::size_t>(k) + 1);
    long double top = -INFINITY;
    for (std::int64_t s = 0; s <= k; ++s) {
        const long double sd = static_cast<long double>(s);
        const long double t = lgn - std::lgamma(sd + 1.0L) - std::lgamma(static_cast<long double>(n - s) + 1.0L)
                              + sd * lp + static_cast<long double>(n - s) * lq;
        terms.push_back(t);
        top = std::max(top, t);
    }
    long double acc = 0.0L;
    for (long double t : terms) acc += std::exp(t - top);
    const long double out = std::exp(top) * acc;
    return static_cast<double>(std::min(out, 1.0L));
}

double nearest_rank_percentile(std::span<const double> values, double q)
{
    if (values.empty()) throw InvalidInput("percentile of an empty sample");
    if (!(q > 0.0 && q <= 100.0)) throw InvalidInput("percentile must lie in (0, 100]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    auto rank = static_cast<std::size_t>(std::ceil(q / 100.0 * static_cast<double>(sorted.size())));
    rank = std::clamp<std::size_t>(rank, 1, sorted.size());
    return sorted[rank - 1];
}

double quantile(std::span<const double> values, double q)
{
    if (values.empty()) throw InvalidInput("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile must lie in [0, 1]");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double mean(std::span<const double> values)
{
    if (values.empty()) throw InvalidInput("mean of an empty sample");
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double standard_error(std::span<const double> values)
{
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    const double mu = mean(values);
    double ss = 0.0;
    for (double v : values) ss += (v - mu) * (v - mu);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

} // namespace ncrc
