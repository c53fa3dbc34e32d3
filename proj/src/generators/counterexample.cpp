#include <cmath>

#include "ncrc/generators.hpp"
#include "ncrc/stats.hpp"

namespace ncrc {

void CounterexampleConfig::validate() const
{
    if (n == 0 || m == 0) throw ConfigError("counterexample needs n >= 1 and m >= 1");
    const double floor_level = 1.0 / (static_cast<double>(n) + 1.0);
    if (!(floor_level < alpha && alpha < p && p < 1.0))
        throw ConfigError("counterexample needs 1/(n+1) < alpha < p < 1");
}

Grid counterexample_grid(std::size_t m)
{
    std::vector<double> values(m + 1);
    for (std::size_t j = 0; j <= m; ++j) values[j] = static_cast<double>(j) / static_cast<double>(m);
    return Grid(std::move(values));
}

ReferenceCurve counterexample_truth(const CounterexampleConfig& config)
{
    config.validate();
    std::vector<double> values(config.m + 1, config.p);
    values.back() = 0.0;
    return {RiskCurve(counterexample_grid(config.m), std::move(values), RiskKind::true_risk), false};
}

LossMatrix gen_counterexample(const CounterexampleConfig& config, std::size_t trial)
{
    config.validate();
    Rng rng = make_rng(config.seed, "counterexample", trial);
    const std::size_t rows = config.n + 1;
    const std::size_t cols = config.m + 1;
    std::vector<double> entries(rows * cols, 0.0);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j + 1 < cols; ++j) entries[i * cols + j] = uniform01(rng) < config.p ? 1.0 : 0.0;
    return LossMatrix(counterexample_grid(config.m), 1.0, rows, std::move(entries));
}

std::int64_t crc_feasible_count(std::size_t n, double alpha)
{
    const double nd = static_cast<double>(n);
    // The condition is monotone in s, so count up until it first fails.
    std::int64_t best = -1;
    for (std::size_t s = 0; s <= n; ++s) {
        if (!crc_condition(static_cast<double>(s) / nd, n, 1.0, alpha)) break;
        best = static_cast<std::int64_t>(s);
    }
    return best;
}

double counterexample_analytic_risk(std::size_t n, std::size_t m, double p, double alpha)
{
    if (n == 0 || m == 0) throw ConfigError("counterexample needs n >= 1 and m >= 1");
    if (!(alpha > 1.0 / (static_cast<double>(n) + 1.0) && alpha < 1.0))
        throw ConfigError("counterexample needs 1/(n+1) < alpha < 1");
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("counterexample needs p in (0, 1)");
    const double q = binomial_cdf(crc_feasible_count(n, alpha), static_cast<std::int64_t>(n), p);
    // 1 - (1 - q)^m without cancellation for tiny q.
    const double escape = -std::expm1(static_cast<double>(m) * std::log1p(-q));
    return p * escape;
}

CounterexampleBounds counterexample_bounds(std::size_t n, std::size_t m, double p, double alpha)
{
    const double nd = static_cast<double>(n);
    const double md = static_cast<double>(m);
    const double t = alpha - 1.0 / (nd + 1.0);
    CounterexampleBounds out;
    out.control_bound = p * md * std::exp(-2.0 * nd * (p - t) * (p - t));
    out.failure_bound = p * -std::expm1(-md * std::pow(1.0 - p, nd));
    return out;
}

} // namespace ncrc
