#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ncrc/core.hpp"

namespace ncrc {

enum class CorrectionKind { hoeffding, bernstein, empirical_bernstein, min_combined, bootstrap_stability };

std::string_view correction_kind_name(CorrectionKind kind) noexcept;
CorrectionKind parse_correction_kind(std::string_view name);

struct BootstrapOptions {
    std::size_t resamples = 200;
    double percentile = 90.0;
};

struct CorrectionSpec {
    CorrectionKind kind = CorrectionKind::hoeffding;
    double bound = 1.0;
    std::optional<double> sigma_max;  // bernstein only
    double delta = 0.05;              // empirical-bernstein / min-combined
    BootstrapOptions bootstrap;       // bootstrap-stability

    /// Throws ConfigError when the fields required by `kind` are missing or out of range.
    void validate() const;
};

struct CorrectionTerm {
    std::string name;
    double value = 0.0;
};

/// A correction amount and the terms it was summed from. For min-combined the
/// terms are those of the winning bound and `source` names it.
struct CorrectionValue {
    double amount = 0.0;
    std::vector<CorrectionTerm> terms;
    std::string source;
};

/// D(m, n) = B sqrt(log(2m) / (2n)) + B / (2 sqrt(2n log(2m))).
CorrectionValue hoeffding_correction(std::size_t m, std::size_t n, double bound);

/// sigma_max sqrt(2 log(2m) / n) + B log(2m) / (3n).
CorrectionValue bernstein_correction(std::size_t m, std::size_t n, double bound, double sigma_max);

/// sigma_hat sqrt(2 log(2m/delta) / n) + 7 B log(2m/delta) / (3 (n - 1)); needs n >= 2.
CorrectionValue empirical_bernstein_correction(std::size_t m, std::size_t n, double bound, double sigma_hat_max,
                                               double delta);

/// Smaller of the Hoeffding and empirical-Bernstein corrections.
CorrectionValue min_combined_correction(std::size_t m, std::size_t n, double bound, double sigma_hat_max,
                                        double delta);

/// Largest per-column standard deviation, divide-by-n convention.
double empirical_sigma_max(const LossMatrix& matrix);

/// Bootstrap stability estimate beta_hat.
///
/// Takes the CRC selection lambda_hat on `matrix` at `level`, then for each of
/// spec.bootstrap.resamples row resamples (with replacement) the CRC selection
/// lambda_hat*_b on the resample, and returns the configured nearest-rank
/// percentile of |R*_b(lambda_hat*_b) - R_n(lambda_hat)|. Resample b draws from
/// its own substream of `seed`, so the value is fixed by (matrix, level, spec, seed).
CorrectionValue bootstrap_stability(const LossMatrix& matrix, double level, const CorrectionSpec& spec,
                                    std::uint64_t seed);

/// Evaluates `spec` against a calibration matrix. `level` and `seed` are used by
/// the bootstrap kind only; the other kinds read m, n and (if needed) sigma_hat
/// from the matrix.
CorrectionValue evaluate_correction(const CorrectionSpec& spec, const LossMatrix& matrix, double level,
                                    std::uint64_t seed);

} // namespace ncrc
