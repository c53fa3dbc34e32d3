#include <algorithm>
#include <cmath>

#include "ncrc/generators.hpp"
#include "ncrc/stats.hpp"

namespace ncrc {

void ShiftConfig::validate() const
{
    auto in_open = [](double v) { return v > 0.0 && v < 1.0; };
    auto in_closed = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in_open(train_p_x1) || !in_open(test_p_x1)) throw ConfigError("covariate probabilities must lie in (0, 1)");
    if (!in_closed(loss_prob_x0) || !in_closed(loss_prob_x1)) throw ConfigError("loss probabilities must lie in [0, 1]");
    if (n_cal == 0) throw ConfigError("shift instance needs n_cal >= 1");
}

double ShiftConfig::weight_cap() const
{
    return std::max(test_p_x1 / train_p_x1, (1.0 - test_p_x1) / (1.0 - train_p_x1));
}

double ShiftConfig::train_risk() const
{
    return train_p_x1 * loss_prob_x1 + (1.0 - train_p_x1) * loss_prob_x0;
}

double ShiftConfig::test_risk() const
{
    return test_p_x1 * loss_prob_x1 + (1.0 - test_p_x1) * loss_prob_x0;
}

namespace {

LossMatrix draw_rows(const ShiftConfig& c, std::size_t rows, double p_x1, Rng& rng, std::vector<double>* weights)
{
    const double w1 = c.test_p_x1 / c.train_p_x1;
    const double w0 = (1.0 - c.test_p_x1) / (1.0 - c.train_p_x1);
    std::vector<double> entries(rows * 2, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        const bool x1 = uniform01(rng) < p_x1;
        const double loss_prob = x1 ? c.loss_prob_x1 : c.loss_prob_x0;
        entries[i * 2] = uniform01(rng) < loss_prob ? 1.0 : 0.0;
        if (weights) weights->push_back(x1 ? w1 : w0);
    }
    return LossMatrix(Grid({0.0, 1.0}), 1.0, rows, std::move(entries));
}

} // namespace

ShiftSample shift_rows(const ShiftConfig& config, std::size_t n_cal, std::size_t n_test, Rng& rng)
{
    config.validate();
    std::vector<double> weights;
    weights.reserve(n_cal);
    LossMatrix cal = draw_rows(config, n_cal, config.train_p_x1, rng, &weights);
    LossMatrix test = draw_rows(config, n_test, config.test_p_x1, rng, nullptr);
    return {std::move(cal), WeightVector(std::move(weights), config.weight_cap()), std::move(test)};
}

ShiftSample gen_shift(const ShiftConfig& config)
{
    Rng rng = make_rng(config.seed, "shift");
    return shift_rows(config, config.n_cal, config.n_test, rng);
}

double shift_unweighted_analytic_risk(const ShiftConfig& config, double alpha)
{
    config.validate();
    // Column 0 is selected iff its loss count passes the CRC condition; otherwise
    // the zero-loss column 1 is selected (feasible or not).
    const std::int64_t k = crc_feasible_count(config.n_cal, alpha);
    const double p_select = binomial_cdf(k, static_cast<std::int64_t>(config.n_cal), config.train_risk());
    return p_select * config.test_risk();
}

double shift_weighted_analytic_risk(const ShiftConfig& config, double alpha)
{
    config.validate();
    const std::size_t n = config.n_cal;
    const double nd = static_cast<double>(n);
    const double w1 = config.test_p_x1 / config.train_p_x1;
    const double w0 = (1.0 - config.test_p_x1) / (1.0 - config.train_p_x1);
    const double cap = config.weight_cap();
    const double p1 = config.train_p_x1 * config.loss_prob_x1;          // weighted-loss row with x = 1
    const double p0 = (1.0 - config.train_p_x1) * config.loss_prob_x0;  // weighted-loss row with x = 0
    const double rest = 1.0 - p1 - p0;

    // Enumerate the multinomial counts (k1, k0) of loss rows by covariate.
    auto log_or_ninf = [](double v) { return v > 0.0 ? std::log(v) : -INFINITY; };
    const double l1 = log_or_ninf(p1), l0 = log_or_ninf(p0), lr = log_or_ninf(rest);
    const double lgn = std::lgamma(nd + 1.0);
    double p_select = 0.0;
    for (std::size_t k1 = 0; k1 <= n; ++k1) {
        if (p1 == 0.0 && k1 > 0) break;
        for (std::size_t k0 = 0; k1 + k0 <= n; ++k0) {
            if (p0 == 0.0 && k0 > 0) break;
            const double risk = (w1 * static_cast<double>(k1) + w0 * static_cast<double>(k0)) / nd;
            if (!crc_condition(risk, n, cap, alpha)) continue;
            const std::size_t kr = n - k1 - k0;
            if (rest == 0.0 && kr > 0) continue;
            const double lp = lgn - std::lgamma(static_cast<double>(k1) + 1.0) - std::lgamma(static_cast<double>(k0) + 1.0)
                              - std::lgamma(static_cast<double>(kr) + 1.0) + (k1 ? static_cast<double>(k1) * l1 : 0.0)
                              + (k0 ? static_cast<double>(k0) * l0 : 0.0) + (kr ? static_cast<double>(kr) * lr : 0.0);
            p_select += std::exp(lp);
        }
    }
    return std::min(p_select, 1.0) * config.test_risk();
}

} // namespace ncrc
