#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "ncrc/core.hpp"
#include "ncrc/corrections.hpp"

namespace ncrc {

enum class Method { crc, crc_nm, loss_mono, risk_mono, crc_c, crc_nm_bernstein, crc_nm_empbern, crc_nm_min };

/// Frozen method names used in configs and output records.
std::string_view method_name(Method method) noexcept;
Method parse_method(std::string_view name);
std::vector<Method> all_methods();

struct MethodConfig {
    Method method = Method::crc;
    double alpha = 0.1;
    double bound = 1.0;
    /// Required for crc-nm-bernstein (sigma_max). Optional elsewhere; when
    /// absent the method's default correction is used.
    std::optional<CorrectionSpec> correction;

    void validate() const;
    /// The correction this method applies, or nullopt for crc, loss-mono and risk-mono.
    std::optional<CorrectionSpec> resolved_correction() const;
};

class WeightVector {
public:
    WeightVector(std::vector<double> weights, double cap);

    static WeightVector unit(std::size_t n) { return WeightVector(std::vector<double>(n, 1.0), 1.0); }

    std::span<const double> weights() const noexcept { return weights_; }
    double cap() const noexcept { return cap_; }
    std::size_t size() const noexcept { return weights_.size(); }

private:
    std::vector<double> weights_;
    double cap_;
};

struct SelectOutcome {
    Selection selection;
    std::optional<CorrectionValue> correction;
};

/// Runs the configured method on a calibration matrix. `seed` is required for crc-c.
SelectOutcome select_detailed(const LossMatrix& matrix, const MethodConfig& config,
                              std::optional<std::uint64_t> seed = std::nullopt);

inline Selection select(const LossMatrix& matrix, const MethodConfig& config,
                        std::optional<std::uint64_t> seed = std::nullopt)
{
    return select_detailed(matrix, config, seed).selection;
}

/// alpha - correction.amount; may be <= 0.
double crc_nm_adjusted_level(double alpha, const CorrectionValue& correction);

/// Weighted empirical risk (1/n) sum_i w_i L_i(lambda), tagged weighted_empirical.
RiskCurve weighted_empirical_risk(const LossMatrix& matrix, const WeightVector& weights);

/// CRC scan on the weighted risk curve with the bound inflated to W * B.
Selection weighted_select(const LossMatrix& matrix, const WeightVector& weights, double alpha);

} // namespace ncrc
