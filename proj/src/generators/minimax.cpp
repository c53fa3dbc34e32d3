#include <algorithm>
#include <cmath>

#include "ncrc/generators.hpp"

namespace ncrc {

double MinimaxConfig::resolved_delta() const
{
    if (delta) return *delta;
    const double gap = 0.5 * std::sqrt(std::log(static_cast<double>(m)) / static_cast<double>(n));
    return std::min(gap, 0.95 - alpha);
}

void MinimaxConfig::validate() const
{
    if (n == 0) throw ConfigError("minimax instance needs n >= 1");
    if (m < (safe_last_column ? 2u : 1u)) throw ConfigError("minimax instance grid is too small");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    const double d = resolved_delta();
    if (!(d >= 0.0)) throw ConfigError("delta must be non-negative");
    if (!(alpha + d < 1.0)) throw ConfigError("minimax instance needs alpha + delta < 1");
    const std::size_t candidates = safe_last_column ? m - 1 : m;
    if (hidden && *hidden >= candidates) throw ConfigError("hidden column index out of range");
}

MinimaxTrial minimax_rows(const MinimaxConfig& config, std::size_t rows, Rng& rng)
{
    config.validate();
    const std::size_t m = config.m;
    const std::size_t candidates = config.safe_last_column ? m - 1 : m;
    std::size_t hidden = 0;
    if (config.hidden) {
        hidden = *config.hidden;
    }
    else {
        std::uniform_int_distribution<std::size_t> pick(0, candidates - 1);
        hidden = pick(rng);
    }
    const double p = config.alpha + config.resolved_delta();
    std::vector<double> probs(m, p);
    probs[hidden] = config.alpha;
    if (config.safe_last_column) probs[m - 1] = 0.0;

    std::vector<double> entries(rows * m);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < m; ++j) entries[i * m + j] = uniform01(rng) < probs[j] ? 1.0 : 0.0;

    const Grid grid = Grid::uniform(0.0, 1.0, m);
    return {LossMatrix(grid, 1.0, rows, std::move(entries)), hidden,
            ReferenceCurve{RiskCurve(grid, std::move(probs), RiskKind::true_risk), false}};
}

MinimaxTrial gen_minimax_instance(const MinimaxConfig& config, std::size_t trial)
{
    Rng rng = make_rng(config.seed, "minimax", trial);
    return minimax_rows(config, config.n + 1, rng);
}

} // namespace ncrc
