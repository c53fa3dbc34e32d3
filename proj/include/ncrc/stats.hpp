#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ncrc {

/// P(Bin(n, p) <= k), summed exactly in log space. k < 0 gives 0, k >= n gives 1.
double binomial_cdf(std::int64_t k, std::int64_t n, double p);

/// Nearest-rank percentile (no interpolation): the ceil(q/100 * N)-th smallest value.
/// q in (0, 100].
double nearest_rank_percentile(std::span<const double> values, double q);

/// Linear-interpolation quantile (type 7), q in [0, 1]. Used for report summaries.
double quantile(std::span<const double> values, double q);

double mean(std::span<const double> values);

/// Standard error of the mean (sample sd with n - 1, divided by sqrt(n)); 0 for n < 2.
double standard_error(std::span<const double> values);

} // namespace ncrc
