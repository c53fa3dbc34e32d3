#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ncrc/generators.hpp"

namespace ncrc {

OversizeConfig OversizeConfig::classification_defaults()
{
    OversizeConfig c;
    c.variant = OversizeVariant::classification;
    c.gamma = 0.10;
    c.k0 = 5;
    c.grid_lo = 0.0;
    c.grid_hi = 1.0;
    c.m = 100;
    return c;
}

void OversizeConfig::validate() const
{
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
    if (k0 < 0) throw ConfigError("K0 must be non-negative");
    if (variant == OversizeVariant::detection && !(tau > 0.0)) throw ConfigError("tau must be positive");
    if (candidates == 0) throw ConfigError("oversize surrogate needs at least one candidate");
    if (m == 0) throw ConfigError("oversize surrogate needs m >= 1");
    if (!(mean_extra_gt >= 0.0)) throw ConfigError("mean_extra_gt must be non-negative");
}

double oversize_penalty(double set_size, int k0, double tau)
{
    if (!(tau > 0.0)) throw InvalidInput("tau must be positive");
    const double excess = std::max(0.0, set_size - static_cast<double>(k0));
    return std::min(excess / tau, 1.0);
}

double detection_loss(int n_matched, int n_gt, int set_size, double gamma, int k0, double tau)
{
    if (n_gt < 1) throw InvalidInput("n_gt must be at least 1");
    if (n_matched < 0 || n_matched > n_gt) throw InvalidInput("n_matched must lie in [0, n_gt]");
    if (set_size < 0) throw InvalidInput("set size must be non-negative");
    const double miss = 1.0 - static_cast<double>(n_matched) / static_cast<double>(n_gt);
    const double loss = (1.0 - gamma) * miss + gamma * oversize_penalty(set_size, k0, tau);
    return std::clamp(loss, 0.0, 1.0);
}

double classification_oversize_loss(bool covered, int set_size, double gamma, int k0)
{
    return (1.0 - gamma) * (covered ? 0.0 : 1.0) + gamma * (set_size > k0 ? 1.0 : 0.0);
}

LabeledLosses oversize_rows(const OversizeConfig& config, std::size_t rows, Rng& rng)
{
    config.validate();
    const Grid grid = Grid::uniform(config.grid_lo, config.grid_hi, config.m);
    const std::size_t m = config.m;
    std::poisson_distribution<int> extra_gt(config.mean_extra_gt);

    std::vector<double> losses(rows * m);
    SetSizeMatrix sizes{rows, m, std::vector<int>(rows * m)};
    std::vector<double> true_scores;
    std::vector<double> other_scores;
    for (std::size_t i = 0; i < rows; ++i) {
        // True items are tilted toward high scores (max of two uniforms);
        // the remaining candidates score uniformly.
        const int n_true = config.variant == OversizeVariant::detection ? extra_gt(rng) + 1 : 1;
        true_scores.resize(static_cast<std::size_t>(n_true));
        for (double& s : true_scores) s = std::max(uniform01(rng), uniform01(rng));
        const std::size_t n_other =
            config.variant == OversizeVariant::detection ? config.candidates : config.candidates - 1;
        other_scores.resize(n_other);
        for (double& s : other_scores) s = uniform01(rng);

        for (std::size_t j = 0; j < m; ++j) {
            const double threshold = 1.0 - grid[j];
            int matched = 0;
            for (double s : true_scores) matched += s >= threshold ? 1 : 0;
            int set_size = matched;
            for (double s : other_scores) set_size += s >= threshold ? 1 : 0;
            double loss = 0.0;
            if (config.variant == OversizeVariant::detection)
                loss = detection_loss(matched, n_true, set_size, config.gamma, config.k0, config.tau);
            else
                loss = classification_oversize_loss(matched == 1, set_size, config.gamma, config.k0);
            losses[i * m + j] = loss;
            sizes.sizes[i * m + j] = set_size;
        }
    }
    return {LossMatrix(grid, 1.0, rows, std::move(losses)), std::move(sizes)};
}

LabeledLosses gen_oversize_surrogate(const OversizeConfig& config)
{
    Rng rng = make_rng(config.seed, "oversize");
    return oversize_rows(config, config.n, rng);
}

LabeledLosses detection_loss_from_counts(const std::vector<CountRecord>& records, const Grid& grid, double gamma,
                                         int k0, double tau)
{
    if (records.empty()) throw InvalidInput("no count records");
    const std::size_t m = grid.size();

    std::map<std::size_t, std::size_t> row_of;
    for (const CountRecord& r : records) row_of.emplace(r.sample_id, 0);
    std::size_t next = 0;
    for (auto& [id, row] : row_of) row = next++;
    const std::size_t n = row_of.size();

    std::vector<double> losses(n * m, 0.0);
    std::vector<char> seen(n * m, 0);
    SetSizeMatrix sizes{n, m, std::vector<int>(n * m, 0)};
    for (const CountRecord& r : records) {
        const std::string where = "sample " + std::to_string(r.sample_id) + ", lambda index "
                                  + std::to_string(r.lambda_index);
        if (r.lambda_index >= m) throw InvalidInput(where + ": lambda index outside the grid");
        if (r.n_gt < 1) throw InvalidInput(where + ": n_gt must be at least 1");
        if (r.n_matched < 0 || r.n_matched > r.n_gt) throw InvalidInput(where + ": n_matched must lie in [0, n_gt]");
        if (r.set_size < 0) throw InvalidInput(where + ": negative set size");
        const std::size_t cell = row_of.at(r.sample_id) * m + r.lambda_index;
        if (seen[cell]) throw InvalidInput(where + ": duplicate record");
        seen[cell] = 1;
        losses[cell] = detection_loss(r.n_matched, r.n_gt, r.set_size, gamma, k0, tau);
        sizes.sizes[cell] = r.set_size;
    }
    for (const auto& [id, row] : row_of) {
        for (std::size_t j = 0; j < m; ++j)
            if (!seen[row * m + j])
                throw InvalidInput("sample " + std::to_string(id) + " has no record for lambda index "
                                   + std::to_string(j));
    }
    return {LossMatrix(grid, 1.0, n, std::move(losses)), std::move(sizes)};
}

} // namespace ncrc
