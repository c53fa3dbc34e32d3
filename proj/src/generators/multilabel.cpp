#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "ncrc/generators.hpp"

namespace ncrc {

double precision_loss(double precision, double amplitude)
{
    return 1.0 - precision + amplitude * std::sin(2.0 * std::numbers::pi * precision) * (1.0 - precision);
}

Grid multilabel_grid(std::size_t m)
{
    if (m == 0) throw ConfigError("multilabel grid needs m >= 1");
    std::vector<double> values(m);
    for (std::size_t j = 0; j < m; ++j) values[j] = static_cast<double>(j + 1) / static_cast<double>(m);
    return Grid(std::move(values));
}

MultilabelModel draw_multilabel_model(const MultilabelConfig& config)
{
    Rng rng = make_rng(config.model_seed.value_or(config.seed), "multilabel-model");
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    MultilabelModel model;
    model.weights.resize(config.labels * config.features);
    for (double& w : model.weights) w = config.weight_sd * unit_normal(rng);
    model.biases.resize(config.labels);
    for (double& b : model.biases) b = config.bias_sd * unit_normal(rng);
    return model;
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

} // namespace

LabeledLosses multilabel_rows(const MultilabelConfig& config, const MultilabelModel& model, std::size_t rows,
                              Rng& rng)
{
    const std::size_t d = config.features;
    const std::size_t k_labels = config.labels;
    const std::size_t m = config.m;
    if (d == 0 || k_labels == 0) throw ConfigError("multilabel generator needs features and labels");
    const Grid grid = multilabel_grid(m);

    std::normal_distribution<double> unit_normal(0.0, 1.0);
    std::vector<double> x(d);
    std::vector<double> predicted(k_labels);
    std::vector<char> truth(k_labels);
    std::vector<std::size_t> order(k_labels);

    std::vector<double> losses(rows * m);
    SetSizeMatrix sizes{rows, m, std::vector<int>(rows * m)};
    for (std::size_t i = 0; i < rows; ++i) {
        for (double& v : x) v = unit_normal(rng);
        for (std::size_t k = 0; k < k_labels; ++k) {
            double logit = model.biases[k];
            for (std::size_t f = 0; f < d; ++f) logit += x[f] * model.weights[k * d + f];
            truth[k] = uniform01(rng) < sigmoid(logit) ? 1 : 0;
            predicted[k] = sigmoid(logit + config.logit_noise_sd * unit_normal(rng));
        }
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return predicted[a] > predicted[b]; });

        // Walk the grid upward; the set {k : p_k >= 1 - lambda} only grows.
        std::size_t included = 0;
        int hits = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double threshold = 1.0 - grid[j];
            while (included < k_labels && predicted[order[included]] >= threshold) {
                hits += truth[order[included]];
                ++included;
            }
            const double precision = included == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(included);
            // l exceeds 1 for small positive precisions (below about 0.15); clip to the unit bound.
            losses[i * m + j] = std::clamp(precision_loss(precision, config.amplitude), 0.0, 1.0);
            sizes.sizes[i * m + j] = static_cast<int>(included);
        }
    }
    return {LossMatrix(grid, 1.0, rows, std::move(losses)), std::move(sizes)};
}

MultilabelSample gen_multilabel(const MultilabelConfig& config)
{
    const MultilabelModel model = draw_multilabel_model(config);
    Rng cal_rng = make_rng(config.seed, "multilabel-calibration");
    Rng test_rng = make_rng(config.seed, "multilabel-test");
    return {multilabel_rows(config, model, config.n_cal, cal_rng),
            multilabel_rows(config, model, config.n_test, test_rng)};
}

} // namespace ncrc
