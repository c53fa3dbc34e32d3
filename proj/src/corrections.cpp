#include "ncrc/corrections.hpp"

#include <cmath>
#include <limits>

#include "ncrc/random.hpp"
#include "ncrc/stats.hpp"

namespace ncrc {

std::string_view correction_kind_name(CorrectionKind kind) noexcept
{
    switch (kind) {
    case CorrectionKind::hoeffding: return "hoeffding";
    case CorrectionKind::bernstein: return "bernstein";
    case CorrectionKind::empirical_bernstein: return "empirical-bernstein";
    case CorrectionKind::min_combined: return "min-combined";
    case CorrectionKind::bootstrap_stability: return "bootstrap-stability";
    }
    return "unknown";
}

CorrectionKind parse_correction_kind(std::string_view name)
{
    for (auto kind : {CorrectionKind::hoeffding, CorrectionKind::bernstein, CorrectionKind::empirical_bernstein,
                      CorrectionKind::min_combined, CorrectionKind::bootstrap_stability}) {
        if (correction_kind_name(kind) == name) return kind;
    }
    throw ConfigError("unknown correction kind '" + std::string(name) + "'");
}

void CorrectionSpec::validate() const
{
    if (!(bound > 0.0)) throw ConfigError("correction bound must be positive");
    switch (kind) {
    case CorrectionKind::bernstein:
        if (!sigma_max) throw ConfigError("bernstein correction needs sigma_max");
        if (!(*sigma_max >= 0.0 && *sigma_max <= bound)) throw ConfigError("sigma_max must lie in [0, bound]");
        break;
    case CorrectionKind::empirical_bernstein:
    case CorrectionKind::min_combined:
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
        break;
    case CorrectionKind::bootstrap_stability:
        if (bootstrap.resamples == 0) throw ConfigError("bootstrap needs at least one resample");
        if (!(bootstrap.percentile > 0.0 && bootstrap.percentile <= 100.0))
            throw ConfigError("bootstrap percentile must lie in (0, 100]");
        break;
    case CorrectionKind::hoeffding: break;
    }
}

namespace {

void check_sizes(std::size_t m, std::size_t n, double bound)
{
    if (m == 0) throw InvalidInput("grid size m must be at least 1");
    if (n == 0) throw InvalidInput("sample size n must be at least 1");
    if (!(bound > 0.0)) throw InvalidInput("loss bound must be positive");
}

CorrectionValue two_terms(std::string source, double first, double second)
{
    return CorrectionValue{first + second, {{"first", first}, {"second", second}}, std::move(source)};
}

} // namespace

CorrectionValue hoeffding_correction(std::size_t m, std::size_t n, double bound)
{
    check_sizes(m, n, bound);
    const double log2m = std::log(2.0 * static_cast<double>(m));
    const double nd = static_cast<double>(n);
    const double first = bound * std::sqrt(log2m / (2.0 * nd));
    const double second = bound / (2.0 * std::sqrt(2.0 * nd * log2m));
    return two_terms("hoeffding", first, second);
}

CorrectionValue bernstein_correction(std::size_t m, std::size_t n, double bound, double sigma_max)
{
    check_sizes(m, n, bound);
    if (!(sigma_max >= 0.0)) throw InvalidInput("sigma_max must be non-negative");
    if (sigma_max > bound) throw InvalidInput("sigma_max cannot exceed the loss bound");
    const double log2m = std::log(2.0 * static_cast<double>(m));
    const double nd = static_cast<double>(n);
    const double first = sigma_max * std::sqrt(2.0 * log2m / nd);
    const double second = bound * log2m / (3.0 * nd);
    return two_terms("bernstein", first, second);
}

CorrectionValue empirical_bernstein_correction(std::size_t m, std::size_t n, double bound, double sigma_hat_max,
                                               double delta)
{
    check_sizes(m, n, bound);
    if (n < 2) throw InvalidInput("empirical Bernstein correction needs n >= 2");
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("delta must lie in (0, 1)");
    if (!(sigma_hat_max >= 0.0)) throw InvalidInput("sigma_hat_max must be non-negative");
    const double log_term = std::log(2.0 * static_cast<double>(m) / delta);
    const double nd = static_cast<double>(n);
    const double first = sigma_hat_max * std::sqrt(2.0 * log_term / nd);
    const double second = 7.0 * bound * log_term / (3.0 * (nd - 1.0));
    return two_terms("empirical-bernstein", first, second);
}

CorrectionValue min_combined_correction(std::size_t m, std::size_t n, double bound, double sigma_hat_max,
                                        double delta)
{
    CorrectionValue h = hoeffding_correction(m, n, bound);
    CorrectionValue eb = empirical_bernstein_correction(m, n, bound, sigma_hat_max, delta);
    return eb.amount < h.amount ? eb : h;
}

double empirical_sigma_max(const LossMatrix& matrix)
{
    const RiskCurve mean = empirical_risk(matrix);
    const std::size_t m = matrix.cols();
    std::vector<double> ss(m, 0.0);
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        auto r = matrix.row(i);
        for (std::size_t j = 0; j < m; ++j) {
            const double d = r[j] - mean[j];
            ss[j] += d * d;
        }
    }
    double best = 0.0;
    const double nd = static_cast<double>(matrix.rows());
    for (double s : ss) best = std::max(best, std::sqrt(s / nd));
    return best;
}

CorrectionValue bootstrap_stability(const LossMatrix& matrix, double level, const CorrectionSpec& spec,
                                    std::uint64_t seed)
{
    if (spec.kind != CorrectionKind::bootstrap_stability)
        throw ConfigError("bootstrap_stability needs a bootstrap-stability spec");
    spec.validate();
    const std::size_t n = matrix.rows();
    const std::size_t m = matrix.cols();
    if (n < 2) throw InvalidInput("bootstrap stability needs at least two rows");

    const RiskCurve original = empirical_risk(matrix);
    const Selection reference = crc_scan(original, n, matrix.bound(), level);
    const double reference_risk = original[reference.index];

    // Deviations at this scale are summation rounding, not resampling variability.
    const double noise_floor = 4.0 * static_cast<double>(n) * std::numeric_limits<double>::epsilon() * matrix.bound();

    std::vector<double> deviations(spec.bootstrap.resamples);
    std::vector<double> sums(m);
    std::vector<std::size_t> counts(n);
    for (std::size_t b = 0; b < spec.bootstrap.resamples; ++b) {
        Rng rng = make_rng(seed, "bootstrap", b);
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t k = 0; k < n; ++k) ++counts[pick(rng)];

        // Accumulate in row order so the sum is a pure function of the counts.
        std::fill(sums.begin(), sums.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (counts[i] == 0) continue;
            const double c = static_cast<double>(counts[i]);
            auto r = matrix.row(i);
            for (std::size_t j = 0; j < m; ++j) sums[j] += c * r[j];
        }
        for (double& s : sums) s /= static_cast<double>(n);
        const RiskCurve resampled(matrix.grid(), sums, RiskKind::empirical);
        const Selection sel = crc_scan(resampled, n, matrix.bound(), level);
        const double dev = std::abs(resampled[sel.index] - reference_risk);
        deviations[b] = dev <= noise_floor ? 0.0 : dev;
    }
    const double beta = nearest_rank_percentile(deviations, spec.bootstrap.percentile);
    return CorrectionValue{beta, {{"beta_hat", beta}}, "bootstrap-stability"};
}

CorrectionValue evaluate_correction(const CorrectionSpec& spec, const LossMatrix& matrix, double level,
                                    std::uint64_t seed)
{
    spec.validate();
    const std::size_t m = matrix.cols();
    const std::size_t n = matrix.rows();
    switch (spec.kind) {
    case CorrectionKind::hoeffding: return hoeffding_correction(m, n, spec.bound);
    case CorrectionKind::bernstein: return bernstein_correction(m, n, spec.bound, *spec.sigma_max);
    case CorrectionKind::empirical_bernstein:
        return empirical_bernstein_correction(m, n, spec.bound, empirical_sigma_max(matrix), spec.delta);
    case CorrectionKind::min_combined:
        return min_combined_correction(m, n, spec.bound, empirical_sigma_max(matrix), spec.delta);
    case CorrectionKind::bootstrap_stability: return bootstrap_stability(matrix, level, spec, seed);
    }
    throw ConfigError("unhandled correction kind");
}

} // namespace ncrc
