#include <algorithm>
#include <cmath>
#include <numbers>

#include "ncrc/generators.hpp"

namespace ncrc {

// Rows are L_i(lambda) = 2 h_i r(lambda) with h_i ~ U(0, 1), so R = r and every
// row is Lipschitz with constant 2 * slope(r) <= K. The profile r sits at a
// plateau of 0.5 well before lambda*, descends with slope K/2 to alpha - epsilon
// at lambda*, then rises and falls once over (lambda*, 1] (non-monotone tail).

void LipschitzConfig::validate() const
{
    if (!(lipschitz > 0.0)) throw ConfigError("Lipschitz constant must be positive");
    if (!(alpha > 0.0 && alpha < 0.5)) throw ConfigError("Lipschitz generator needs alpha in (0, 0.5)");
    if (!(epsilon > 0.0 && epsilon <= alpha)) throw ConfigError("epsilon must lie in (0, alpha]");
    if (m < 3) throw ConfigError("Lipschitz generator needs m >= 3");
    const std::size_t star = resolved_star();
    if (star == 0 || star + 1 >= m) throw ConfigError("lambda* must be an interior grid point");
}

namespace {

double profile(const LipschitzConfig& c, double lambda, double star)
{
    const double slope = 0.5 * c.lipschitz;
    const double floor_value = c.alpha - c.epsilon;
    if (lambda <= star) return std::min(0.5, floor_value + slope * (star - lambda));
    const double span = 1.0 - star;
    const double height = std::min({0.5 - floor_value, slope * span / std::numbers::pi, 0.15});
    return floor_value + height * std::sin(std::numbers::pi * (lambda - star) / span);
}

} // namespace

ReferenceCurve lipschitz_truth(const LipschitzConfig& config)
{
    config.validate();
    const Grid grid = Grid::uniform(0.0, 1.0, config.m);
    const double star = grid[config.resolved_star()];
    std::vector<double> values(config.m);
    for (std::size_t j = 0; j < config.m; ++j) values[j] = profile(config, grid[j], star);
    return {RiskCurve(grid, std::move(values), RiskKind::true_risk), false};
}

LossMatrix lipschitz_rows(const LipschitzConfig& config, std::size_t rows, Rng& rng)
{
    const ReferenceCurve truth = lipschitz_truth(config);
    const std::size_t m = config.m;
    std::vector<double> entries(rows * m);
    for (std::size_t i = 0; i < rows; ++i) {
        const double h = uniform01(rng);
        for (std::size_t j = 0; j < m; ++j) entries[i * m + j] = std::min(1.0, 2.0 * h * truth.curve[j]);
    }
    return LossMatrix(truth.curve.grid(), 1.0, rows, std::move(entries));
}

LipschitzSample gen_lipschitz(const LipschitzConfig& config)
{
    Rng rng = make_rng(config.seed, "lipschitz");
    return {lipschitz_rows(config, config.n, rng), lipschitz_truth(config)};
}

} // namespace ncrc
