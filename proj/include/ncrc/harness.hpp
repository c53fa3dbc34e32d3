#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ncrc/generators.hpp"
#include "ncrc/selectors.hpp"

namespace ncrc {

struct MonotoneSpec {
    std::size_t m = 101;
};

/// Generator used for fresh per-repetition draws. Row-count fields inside the
/// configs (n, n_cal, ...) are ignored; the plan's n_cal / n_test apply.
using GeneratorSpec = std::variant<BumpConfig, MultilabelConfig, OversizeConfig, MinimaxConfig, MonotoneSpec,
                                   LipschitzConfig, ShiftConfig, BernoulliColumnsConfig>;

std::string generator_name(const GeneratorSpec& spec);

/// Fixed pool of rows that repetitions split at random into disjoint cal/test parts.
struct PoolSource {
    LossMatrix losses;
    std::optional<SetSizeMatrix> set_sizes;
};

struct DataSplit {
    LossMatrix calibration;
    LossMatrix test;
    std::optional<SetSizeMatrix> calibration_sizes;
    std::optional<SetSizeMatrix> test_sizes;
    std::optional<WeightVector> weights;
};

DataSplit draw_split(const GeneratorSpec& spec, std::size_t n_cal, std::size_t n_test, std::uint64_t seed);
DataSplit split_pool(const PoolSource& pool, std::size_t n_cal, std::size_t n_test, std::uint64_t seed);

struct ExperimentPlan {
    std::optional<GeneratorSpec> generator;
    std::optional<PoolSource> pool;
    std::vector<MethodConfig> methods;
    std::size_t repetitions = 1;
    std::size_t n_cal = 1000;
    std::size_t n_test = 1000;
    std::uint64_t seed = 0;
    /// When set, also run the importance-weighted selector (recorded as
    /// "weighted-crc") at this level; the generator must supply weights.
    std::optional<double> weighted_alpha;
    /// Worker threads for repetitions; results do not depend on it.
    std::size_t threads = 1;

    void validate() const;
};

inline constexpr std::string_view weighted_method_name = "weighted-crc";

struct RepetitionRecord {
    std::string method;
    std::size_t repetition = 0;
    std::size_t selected_index = 0;
    double selected_lambda = 0.0;
    double effective_level = 0.0;
    bool feasible = false;
    double test_risk = 0.0;
    std::optional<double> set_size;

    friend bool operator==(const RepetitionRecord&, const RepetitionRecord&) = default;
};

inline constexpr std::array<double, 5> summary_quantile_levels{0.05, 0.25, 0.5, 0.75, 0.95};

struct MethodSummary {
    std::string method;
    double alpha = 0.0;
    std::size_t repetitions = 0;
    double mean_risk = 0.0;
    double risk_se = 0.0;
    double violation_rate = 0.0;
    std::array<double, 5> risk_quantiles{};
    std::optional<double> mean_set_size;
    double mean_lambda = 0.0;
    double feasible_rate = 0.0;

    friend bool operator==(const MethodSummary&, const MethodSummary&) = default;
};

struct EvalReport {
    std::vector<RepetitionRecord> records;   // method-major, then repetition
    std::vector<MethodSummary> summaries;    // plan order

    const MethodSummary& summary(std::string_view method) const;
};

/// Aggregates per-repetition records; `alphas` gives each method's target level.
/// Violation means test risk > alpha.
std::vector<MethodSummary> summarize(const std::vector<RepetitionRecord>& records,
                                     const std::vector<std::pair<std::string, double>>& alphas);

/// Mean loss over the test rows at grid index j.
double test_risk_at(const LossMatrix& test, std::size_t j);

EvalReport run_experiment(const ExperimentPlan& plan);

// ---------------------------------------------------------------------------
// Probes backing the per-realization and probabilistic guarantees.

struct DecompositionRecord {
    Selection crc;       // CRC rule on the first n rows
    Selection oracle;    // plain scan of the (n+1)-row empirical risk
    double risk_at_crc = 0.0;     // R_n(lambda_hat)
    double risk_at_oracle = 0.0;  // R_n(lambda_hat')
    double term_two = 0.0;        // R_n(lambda_hat) - R_n(lambda_hat')
    bool ordering_holds = false;  // lambda_hat' <= lambda_hat
    /// Whenever lambda_hat' < lambda_hat with lambda_hat feasible: R_n(lambda_hat) < R_n(lambda_hat').
    bool term_two_holds = false;
};

/// `matrix` holds n + 1 rows; the last row plays the test point.
DecompositionRecord decomposition_probe(const LossMatrix& matrix, double alpha, double bound);

struct DisagreementRow {
    std::size_t n = 0;
    std::size_t trials = 0;
    std::size_t disagreements = 0;
    double frequency = 0.0;
    double se = 0.0;
    double bound = 0.0;  // exp(-2 n eps^2 / B^2)
};

/// Empirical P(lambda_hat != lambda_hat') on Lipschitz draws for each n.
std::vector<DisagreementRow> disagreement_sweep(const LipschitzConfig& config, std::span<const std::size_t> ns,
                                                std::size_t trials);

struct CounterexampleCell {
    std::size_t n = 0;
    std::size_t m = 0;
    double analytic_risk = 0.0;
    double analytic_se = 0.0;  // sqrt(r (1 - r) / trials) for the Bernoulli test loss
    std::optional<double> mc_risk;
    std::optional<double> mc_se;
    double control_bound = 0.0;
    double failure_bound = 0.0;
    bool controlled = false;  // analytic risk <= alpha
    std::optional<bool> agrees;  // |mc - analytic| <= 3 * analytic_se
};

/// Phase table over (n, m). The Monte Carlo column draws per-column Binomial(n, p)
/// loss counts (the CRC event depends on nothing else) and a Bernoulli test loss.
std::vector<CounterexampleCell> counterexample_sweep(double p, double alpha, std::span<const std::size_t> ns,
                                                     std::span<const std::size_t> ms, std::size_t trials,
                                                     std::uint64_t seed);

struct MonteCarloEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t trials = 0;
};

/// Mean CRC test loss over full matrices from gen_counterexample.
MonteCarloEstimate counterexample_full_matrix_risk(const CounterexampleConfig& config);

struct ConcentrationProbe {
    double mean_sup_deviation = 0.0;
    double se = 0.0;
    double bound = 0.0;
    std::size_t trials = 0;
};

/// Monte Carlo E[sup_lambda |R_n - R|] against the Hoeffding or Bernstein bound.
ConcentrationProbe uniform_concentration_probe(const std::function<LossMatrix(Rng&)>& draw,
                                               const RiskCurve& truth, std::size_t trials,
                                               const CorrectionSpec& correction, std::uint64_t seed);

} // namespace ncrc
