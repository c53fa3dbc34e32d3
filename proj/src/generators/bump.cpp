#include <algorithm>
#include <cmath>

#include "ncrc/generators.hpp"

namespace ncrc {

namespace {

// Per-row parameters, drawn in a fixed order: scale, height, center, width.
struct BumpRow {
    double scale;
    double height;
    double center;
    double width;
};

BumpRow draw_row(const BumpConfig& c, Rng& rng, std::normal_distribution<double>& unit_normal)
{
    BumpRow r{};
    r.scale = uniform(rng, c.scale_lo, c.scale_hi);
    r.height = uniform(rng, c.height_lo, c.height_hi);
    r.center = c.center_mean + c.center_sd * unit_normal(rng);
    r.width = uniform(rng, c.width_lo, c.width_hi);
    return r;
}

} // namespace

LossMatrix bump_rows(const BumpConfig& config, std::size_t rows, Rng& rng)
{
    if (config.m == 0) throw ConfigError("bump generator needs m >= 1");
    const Grid grid = Grid::uniform(0.0, 1.0, config.m);
    const std::size_t m = config.m;
    std::vector<double> baseline(m);
    for (std::size_t j = 0; j < m; ++j) baseline[j] = 0.50 * std::exp(-8.0 * grid[j]);

    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::vector<double> entries(rows * m);
    for (std::size_t i = 0; i < rows; ++i) {
        const BumpRow r = draw_row(config, rng, unit_normal);
        double* out = entries.data() + i * m;
        for (std::size_t j = 0; j < m; ++j) {
            double v = r.scale * baseline[j];
            if (config.include_bump) {
                const double z = grid[j] - r.center;
                v += r.height * std::exp(-(z * z) / (2.0 * r.width * r.width));
            }
            if (config.include_noise) v += config.noise_sd * unit_normal(rng);
            out[j] = std::clamp(v, 0.0, 1.0);
        }
    }
    return LossMatrix(grid, 1.0, rows, std::move(entries));
}

BumpSample gen_bump(const BumpConfig& config)
{
    Rng rng = make_rng(config.seed, "bump");
    BumpSample out{bump_rows(config, config.n, rng), std::nullopt};
    if (config.reference_rows > 0) {
        Rng aux = make_rng(config.seed, "bump-reference");
        // Accumulate the auxiliary sample in chunks to bound memory.
        const std::size_t chunk = 10'000;
        std::vector<double> sums(config.m, 0.0);
        std::size_t done = 0;
        while (done < config.reference_rows) {
            const std::size_t take = std::min(chunk, config.reference_rows - done);
            const LossMatrix part = bump_rows(config, take, aux);
            for (std::size_t i = 0; i < take; ++i) {
                auto r = part.row(i);
                for (std::size_t j = 0; j < config.m; ++j) sums[j] += r[j];
            }
            done += take;
        }
        for (double& s : sums) s /= static_cast<double>(config.reference_rows);
        out.reference = ReferenceCurve{RiskCurve(out.losses.grid(), std::move(sums), RiskKind::true_risk), true};
    }
    return out;
}

} // namespace ncrc
