#include <algorithm>
#include <cmath>

#include "ncrc/generators.hpp"

namespace ncrc {

LossMatrix monotone_rows(std::size_t m, std::size_t rows, Rng& rng)
{
    if (m < 2) throw ConfigError("monotone generator needs m >= 2 so the last grid point is lambda = 1");
    const Grid grid = Grid::uniform(0.0, 1.0, m);
    std::vector<double> entries(rows * m);
    for (std::size_t i = 0; i < rows; ++i) {
        const double height = uniform01(rng);
        // u lies strictly inside (0, 1), so lambda = 1 is always past the cutoff.
        const double u = uniform01(rng) + 0x1.0p-54;
        double* out = entries.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) out[j] = height * std::max(0.0, 1.0 - grid[j] / u);
    }
    return LossMatrix(grid, 1.0, rows, std::move(entries));
}

LossMatrix gen_monotone(std::size_t n, std::size_t m, std::uint64_t seed)
{
    Rng rng = make_rng(seed, "monotone");
    return monotone_rows(m, n, rng);
}

ReferenceCurve monotone_truth(std::size_t m)
{
    const Grid grid = Grid::uniform(0.0, 1.0, m);
    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double l = grid[j];
        values[j] = 0.5 * ((1.0 - l) + (l > 0.0 ? l * std::log(l) : 0.0));
    }
    values.back() = 0.0;
    return {RiskCurve(grid, std::move(values), RiskKind::true_risk), false};
}

} // namespace ncrc
