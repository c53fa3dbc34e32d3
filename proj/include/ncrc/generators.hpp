#pragma once

// Seeded synthetic loss-matrix generators. Each is a pure function of its
// config (seed included): identical configs produce bit-identical matrices.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ncrc/core.hpp"
#include "ncrc/random.hpp"
#include "ncrc/selectors.hpp"

namespace ncrc {

/// Per-cell prediction-set sizes, row-major n x m, for generators that expose them.
struct SetSizeMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<int> sizes;

    int operator()(std::size_t i, std::size_t j) const { return sizes[i * cols + j]; }
};

/// A true (or Monte Carlo estimated) risk curve.
struct ReferenceCurve {
    RiskCurve curve;
    bool estimated = false;
};

// ---------------------------------------------------------------------------
// Independent Bernoulli columns (concentration probes)

struct BernoulliColumnsConfig {
    std::size_t n = 500;
    std::size_t m = 50;
    double p = 0.3;
    std::uint64_t seed = 0;
};

LossMatrix gen_bernoulli_columns(const BernoulliColumnsConfig& config);
LossMatrix bernoulli_columns(std::size_t n, std::size_t m, double p, Rng& rng);
ReferenceCurve bernoulli_columns_truth(std::size_t m, double p);

// ---------------------------------------------------------------------------
// Grid-resolution counterexample: L_i(j/m) ~ Bern(p) for j < m, L_i(1) = 0.

struct CounterexampleConfig {
    std::size_t n = 10;
    std::size_t m = 10;
    double p = 0.4;
    double alpha = 0.2;
    std::size_t trials = 1;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Grid {0, 1/m, ..., 1}.
Grid counterexample_grid(std::size_t m);
ReferenceCurve counterexample_truth(const CounterexampleConfig& config);
/// Trial `trial` of the stream: an (n+1) x (m+1) binary matrix.
LossMatrix gen_counterexample(const CounterexampleConfig& config, std::size_t trial);

/// Largest calibration loss count s in [0, n] for which a column with empirical
/// risk s/n passes the CRC condition at `alpha` with B = 1; -1 when none does.
std::int64_t crc_feasible_count(std::size_t n, double alpha);

/// Exact E[L_{n+1}(lambda_hat)] = p (1 - (1 - q)^m), q = P(Bin(n, p) <= crc_feasible_count).
double counterexample_analytic_risk(std::size_t n, std::size_t m, double p, double alpha);

struct CounterexampleBounds {
    double control_bound = 0.0;   // p m exp(-2 n (p - t)^2)
    double failure_bound = 0.0;   // p (1 - exp(-m (1 - p)^n))
};
CounterexampleBounds counterexample_bounds(std::size_t n, std::size_t m, double p, double alpha);

// ---------------------------------------------------------------------------
// Non-monotone bump loss.

struct BumpConfig {
    std::size_t n = 1000;
    std::size_t m = 100;
    std::uint64_t seed = 0;
    double scale_lo = 0.80, scale_hi = 1.20;
    double height_lo = 0.06, height_hi = 0.20;
    double center_mean = 0.42, center_sd = 0.06;
    double width_lo = 0.04, width_hi = 0.09;
    double noise_sd = 0.01;
    bool include_bump = true;
    bool include_noise = true;
    /// Rows in the auxiliary sample behind the reference curve; 0 skips it.
    std::size_t reference_rows = 1'000'000;
};

struct BumpSample {
    LossMatrix losses;
    std::optional<ReferenceCurve> reference;
};

BumpSample gen_bump(const BumpConfig& config);
/// `rows` bump rows over a uniform grid of config.m points in [0, 1].
LossMatrix bump_rows(const BumpConfig& config, std::size_t rows, Rng& rng);

// ---------------------------------------------------------------------------
// Synthetic multilabel classification with a precision-based loss.

struct MultilabelConfig {
    std::size_t features = 15;
    std::size_t labels = 10;
    double weight_sd = 0.8;
    double bias_sd = 0.2;
    double logit_noise_sd = 0.5;
    double amplitude = 0.22;
    std::size_t n_cal = 2000;
    std::size_t n_test = 500;
    std::size_t m = 100;
    std::uint64_t seed = 0;
    /// Seed of the logistic model (W_k, b_k); defaults to `seed`.
    std::optional<std::uint64_t> model_seed;
};

/// l(x) = 1 - x + a sin(2 pi x) (1 - x).
double precision_loss(double precision, double amplitude = 0.22);

/// Grid lambda_j = j/m, j = 1..m.
Grid multilabel_grid(std::size_t m);

struct LabeledLosses {
    LossMatrix losses;
    SetSizeMatrix set_sizes;
};

struct MultilabelSample {
    LabeledLosses calibration;
    LabeledLosses test;
};

MultilabelSample gen_multilabel(const MultilabelConfig& config);

/// The logistic model: weights (labels x features) and biases.
struct MultilabelModel {
    std::vector<double> weights;
    std::vector<double> biases;
};
MultilabelModel draw_multilabel_model(const MultilabelConfig& config);
LabeledLosses multilabel_rows(const MultilabelConfig& config, const MultilabelModel& model, std::size_t rows,
                              Rng& rng);

// ---------------------------------------------------------------------------
// Miscoverage / oversize-penalty surrogates.

enum class OversizeVariant {
    classification,  // (1 - g) 1{Y not in C} + g 1{|C| > K0}
    detection        // (1 - g) (1 - n_matched / n_gt) + g phi(|C|)
};

struct OversizeConfig {
    OversizeVariant variant = OversizeVariant::detection;
    double gamma = 0.35;
    int k0 = 3;
    double tau = 5.0;
    std::size_t candidates = 20;  // classes, or distractor detections per image
    double mean_extra_gt = 4.0;   // detection: n_gt = Poisson(mean_extra_gt) + 1
    std::size_t n = 1000;
    std::size_t m = 200;
    double grid_lo = 0.02;
    double grid_hi = 0.75;
    std::uint64_t seed = 0;

    /// Defaults for the classification form: gamma = 0.10, K0 = 5, grid [0, 1].
    static OversizeConfig classification_defaults();
    void validate() const;
};

/// phi(s) = min((s - K0)_+ / tau, 1).
double oversize_penalty(double set_size, int k0, double tau);
double detection_loss(int n_matched, int n_gt, int set_size, double gamma, int k0, double tau);
double classification_oversize_loss(bool covered, int set_size, double gamma, int k0);

LabeledLosses gen_oversize_surrogate(const OversizeConfig& config);
LabeledLosses oversize_rows(const OversizeConfig& config, std::size_t rows, Rng& rng);

struct CountRecord {
    std::size_t sample_id = 0;
    std::size_t lambda_index = 0;
    int n_matched = 0;
    int n_gt = 0;
    int set_size = 0;
};

/// Assembles the detection loss matrix from externally supplied count records,
/// one per (sample, lambda) cell. Rows follow ascending sample_id.
LabeledLosses detection_loss_from_counts(const std::vector<CountRecord>& records, const Grid& grid, double gamma,
                                         int k0, double tau);

// ---------------------------------------------------------------------------
// Minimax hard instance: hidden column ~ Bern(alpha), the others ~ Bern(alpha + delta).

struct MinimaxConfig {
    std::size_t n = 200;
    std::size_t m = 256;
    double alpha = 0.2;
    /// Gap; defaults to 0.5 sqrt(log m / n), capped so alpha + delta <= 0.95.
    std::optional<double> delta;
    /// Fixed hidden column; drawn uniformly per trial when absent.
    std::optional<std::size_t> hidden;
    /// Make the last grid point a zero-loss column (a maximally conservative
    /// choice). The hidden column is then drawn among the first m - 1.
    bool safe_last_column = false;
    std::size_t trials = 1;
    std::uint64_t seed = 0;

    double resolved_delta() const;
    void validate() const;
};

struct MinimaxTrial {
    LossMatrix losses;
    std::size_t hidden = 0;
    ReferenceCurve truth;
};

/// Trial `trial`: (n+1) x m binary matrix.
MinimaxTrial gen_minimax_instance(const MinimaxConfig& config, std::size_t trial);
MinimaxTrial minimax_rows(const MinimaxConfig& config, std::size_t rows, Rng& rng);

// ---------------------------------------------------------------------------
// Monotone losses: L_i(lambda) = h_i max(0, 1 - lambda / u_i), last grid point 0.

LossMatrix gen_monotone(std::size_t n, std::size_t m, std::uint64_t seed);
LossMatrix monotone_rows(std::size_t m, std::size_t rows, Rng& rng);
/// R(lambda) = ((1 - lambda) + lambda log lambda) / 2 on the uniform [0, 1] grid.
ReferenceCurve monotone_truth(std::size_t m);

// ---------------------------------------------------------------------------
// Lipschitz losses with a margin point lambda* where R(lambda*) = alpha - epsilon.

struct LipschitzConfig {
    double lipschitz = 8.0;
    double epsilon = 0.05;
    double alpha = 0.3;
    std::size_t n = 500;
    std::size_t m = 21;
    /// Grid index of lambda*; defaults to m / 2.
    std::optional<std::size_t> star_index;
    std::uint64_t seed = 0;

    std::size_t resolved_star() const { return star_index.value_or(m / 2); }
    void validate() const;
};

struct LipschitzSample {
    LossMatrix losses;
    ReferenceCurve truth;
};

LipschitzSample gen_lipschitz(const LipschitzConfig& config);
LossMatrix lipschitz_rows(const LipschitzConfig& config, std::size_t rows, Rng& rng);
ReferenceCurve lipschitz_truth(const LipschitzConfig& config);

// ---------------------------------------------------------------------------
// Two-column covariate-shift instance with a binary covariate X.
// Column 0 loss ~ Bern(loss_prob[X]); column 1 is identically 0.

struct ShiftConfig {
    double train_p_x1 = 0.5;
    double test_p_x1 = 0.8;
    double loss_prob_x0 = 0.0;
    double loss_prob_x1 = 0.32;
    std::size_t n_cal = 1000;
    std::size_t n_test = 1000;
    std::uint64_t seed = 0;

    void validate() const;
    /// Likelihood-ratio cap W = max_x p_test(x) / p_train(x).
    double weight_cap() const;
    double train_risk() const;
    double test_risk() const;
};

struct ShiftSample {
    LossMatrix calibration;
    WeightVector weights;
    LossMatrix test;
};

ShiftSample gen_shift(const ShiftConfig& config);
ShiftSample shift_rows(const ShiftConfig& config, std::size_t n_cal, std::size_t n_test, Rng& rng);

/// Exact test-distribution risk of unweighted CRC on this instance at level alpha.
double shift_unweighted_analytic_risk(const ShiftConfig& config, double alpha);
/// Exact test-distribution risk of the weighted selector at level alpha.
double shift_weighted_analytic_risk(const ShiftConfig& config, double alpha);

} // namespace ncrc
