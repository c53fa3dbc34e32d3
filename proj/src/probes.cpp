#include <cmath>
#include <random>

#include "ncrc/harness.hpp"
#include "ncrc/stats.hpp"

namespace ncrc {

DecompositionRecord decomposition_probe(const LossMatrix& matrix, double alpha, double bound)
{
    if (matrix.rows() < 2) throw InvalidInput("decomposition probe needs at least two rows");
    const std::size_t n = matrix.rows() - 1;
    const LossMatrix calibration = matrix.slice_rows(0, n);
    const RiskCurve cal_risk = empirical_risk(calibration);

    DecompositionRecord r;
    r.crc = crc_scan(cal_risk, n, bound, alpha);
    r.oracle = plain_scan(empirical_risk(matrix), alpha);
    r.risk_at_crc = cal_risk[r.crc.index];
    r.risk_at_oracle = cal_risk[r.oracle.index];
    r.term_two = r.risk_at_crc - r.risk_at_oracle;
    r.ordering_holds = r.oracle.index <= r.crc.index;
    const bool strictly_below = r.oracle.index < r.crc.index;
    r.term_two_holds = !(strictly_below && r.crc.feasible) || r.risk_at_crc < r.risk_at_oracle;
    return r;
}

std::vector<DisagreementRow> disagreement_sweep(const LipschitzConfig& config, std::span<const std::size_t> ns,
                                                std::size_t trials)
{
    config.validate();
    if (trials == 0) throw ConfigError("disagreement sweep needs at least one trial");
    std::vector<DisagreementRow> out;
    for (std::size_t n : ns) {
        if (n == 0) throw ConfigError("disagreement sweep needs n >= 1");
        if (config.epsilon < (1.0 - config.alpha) / static_cast<double>(n))
            throw ConfigError("epsilon must be at least (B - alpha) / n for n = " + std::to_string(n));
        const std::uint64_t cell_seed = derive_seed(config.seed, "disagreement", n);
        std::size_t hits = 0;
        for (std::size_t t = 0; t < trials; ++t) {
            Rng rng = make_rng(cell_seed, "trial", t);
            const DecompositionRecord rec = decomposition_probe(lipschitz_rows(config, n + 1, rng), config.alpha, 1.0);
            hits += rec.crc.index != rec.oracle.index ? 1 : 0;
        }
        DisagreementRow row;
        row.n = n;
        row.trials = trials;
        row.disagreements = hits;
        row.frequency = static_cast<double>(hits) / static_cast<double>(trials);
        row.se = std::sqrt(row.frequency * (1.0 - row.frequency) / static_cast<double>(trials));
        row.bound = std::exp(-2.0 * static_cast<double>(n) * config.epsilon * config.epsilon);
        out.push_back(row);
    }
    return out;
}

std::vector<CounterexampleCell> counterexample_sweep(double p, double alpha, std::span<const std::size_t> ns,
                                                     std::span<const std::size_t> ms, std::size_t trials,
                                                     std::uint64_t seed)
{
    std::vector<CounterexampleCell> out;
    std::size_t cell_index = 0;
    for (std::size_t n : ns) {
        const std::int64_t threshold = crc_feasible_count(n, alpha);
        for (std::size_t m : ms) {
            CounterexampleCell cell;
            cell.n = n;
            cell.m = m;
            cell.analytic_risk = counterexample_analytic_risk(n, m, p, alpha);
            const CounterexampleBounds b = counterexample_bounds(n, m, p, alpha);
            cell.control_bound = b.control_bound;
            cell.failure_bound = b.failure_bound;
            cell.controlled = cell.analytic_risk <= alpha;
            if (trials > 0) {
                const double r = cell.analytic_risk;
                cell.analytic_se = std::sqrt(r * (1.0 - r) / static_cast<double>(trials));
                Rng rng = make_rng(seed, "counterexample-cell", cell_index);
                std::binomial_distribution<std::int64_t> column_sum(static_cast<std::int64_t>(n), p);
                std::vector<double> losses(trials, 0.0);
                for (std::size_t t = 0; t < trials; ++t) {
                    // Scan columns in grid order; the first feasible one is selected.
                    for (std::size_t j = 0; j < m; ++j) {
                        if (column_sum(rng) <= threshold) {
                            losses[t] = uniform01(rng) < p ? 1.0 : 0.0;
                            break;
                        }
                    }
                }
                cell.mc_risk = mean(losses);
                cell.mc_se = standard_error(losses);
                cell.agrees = std::abs(*cell.mc_risk - r) <= 3.0 * cell.analytic_se;
            }
            out.push_back(cell);
            ++cell_index;
        }
    }
    return out;
}

MonteCarloEstimate counterexample_full_matrix_risk(const CounterexampleConfig& config)
{
    config.validate();
    std::vector<double> losses(config.trials);
    for (std::size_t t = 0; t < config.trials; ++t) {
        const LossMatrix full = gen_counterexample(config, t);
        const Selection sel = crc_scan(empirical_risk(full.slice_rows(0, config.n)), config.n, 1.0, config.alpha);
        losses[t] = full(config.n, sel.index);
    }
    return {mean(losses), standard_error(losses), config.trials};
}

ConcentrationProbe uniform_concentration_probe(const std::function<LossMatrix(Rng&)>& draw,
                                               const RiskCurve& truth, std::size_t trials,
                                               const CorrectionSpec& correction, std::uint64_t seed)
{
    if (trials == 0) throw ConfigError("concentration probe needs at least one trial");
    if (correction.kind != CorrectionKind::hoeffding && correction.kind != CorrectionKind::bernstein)
        throw ConfigError("concentration probe supports hoeffding and bernstein bounds only");
    correction.validate();

    std::vector<double> sups(trials);
    std::size_t n = 0;
    for (std::size_t t = 0; t < trials; ++t) {
        Rng rng = make_rng(seed, "concentration", t);
        const LossMatrix matrix = draw(rng);
        if (matrix.grid() != truth.grid()) throw InvalidInput("drawn matrix grid differs from the truth grid");
        if (t == 0) n = matrix.rows();
        else if (matrix.rows() != n) throw InvalidInput("drawn matrices must all have the same row count");
        const RiskCurve risk = empirical_risk(matrix);
        double sup = 0.0;
        for (std::size_t j = 0; j < risk.size(); ++j) sup = std::max(sup, std::abs(risk[j] - truth[j]));
        sups[t] = sup;
    }

    ConcentrationProbe out;
    out.mean_sup_deviation = mean(sups);
    out.se = standard_error(sups);
    out.trials = trials;
    const std::size_t m = truth.size();
    out.bound = correction.kind == CorrectionKind::hoeffding
                    ? hoeffding_correction(m, n, correction.bound).amount
                    : bernstein_correction(m, n, correction.bound, *correction.sigma_max).amount;
    return out;
}

} // namespace ncrc
