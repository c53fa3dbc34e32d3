#include "ncrc/selectors.hpp"

#include <cmath>
#include <string>

namespace ncrc {

std::string_view method_name(Method method) noexcept
{
    switch (method) {
    case Method::crc: return "crc";
    case Method::crc_nm: return "crc-nm";
    case Method::loss_mono: return "loss-mono";
    case Method::risk_mono: return "risk-mono";
    case Method::crc_c: return "crc-c";
    case Method::crc_nm_bernstein: return "crc-nm-bernstein";
    case Method::crc_nm_empbern: return "crc-nm-empbern";
    case Method::crc_nm_min: return "crc-nm-min";
    }
    return "unknown";
}

std::vector<Method> all_methods()
{
    return {Method::crc,   Method::crc_nm,           Method::loss_mono,      Method::risk_mono,
            Method::crc_c, Method::crc_nm_bernstein, Method::crc_nm_empbern, Method::crc_nm_min};
}

Method parse_method(std::string_view name)
{
    for (Method m : all_methods())
        if (method_name(m) == name) return m;
    throw ConfigError("unknown method '" + std::string(name) + "'");
}

namespace {

std::optional<CorrectionKind> expected_kind(Method method)
{
    switch (method) {
    case Method::crc_nm: return CorrectionKind::hoeffding;
    case Method::crc_nm_bernstein: return CorrectionKind::bernstein;
    case Method::crc_nm_empbern: return CorrectionKind::empirical_bernstein;
    case Method::crc_nm_min: return CorrectionKind::min_combined;
    case Method::crc_c: return CorrectionKind::bootstrap_stability;
    case Method::crc:
    case Method::loss_mono:
    case Method::risk_mono: return std::nullopt;
    }
    return std::nullopt;
}

} // namespace

void MethodConfig::validate() const
{
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    if (!(bound > 0.0) || !std::isfinite(bound)) throw ConfigError("bound must be positive");
    const auto kind = expected_kind(method);
    if (correction) {
        if (!kind) throw ConfigError(std::string(method_name(method)) + " takes no correction");
        if (correction->kind != *kind)
            throw ConfigError(std::string(method_name(method)) + " needs a "
                              + std::string(correction_kind_name(*kind)) + " correction, got "
                              + std::string(correction_kind_name(correction->kind)));
        if (correction->bound != bound) throw ConfigError("correction bound differs from the method bound");
        correction->validate();
    }
    else if (method == Method::crc_nm_bernstein) {
        throw ConfigError("crc-nm-bernstein needs a correction with sigma_max");
    }
}

std::optional<CorrectionSpec> MethodConfig::resolved_correction() const
{
    if (correction) return correction;
    const auto kind = expected_kind(method);
    if (!kind) return std::nullopt;
    CorrectionSpec spec;
    spec.kind = *kind;
    spec.bound = bound;
    return spec;
}

WeightVector::WeightVector(std::vector<double> weights, double cap) : weights_(std::move(weights)), cap_(cap)
{
    if (!(cap_ > 0.0) || !std::isfinite(cap_)) throw InvalidInput("weight cap must be positive and finite");
    for (std::size_t i = 0; i < weights_.size(); ++i) {
        if (!(weights_[i] >= 0.0 && weights_[i] <= cap_))
            throw InvalidInput("weight " + std::to_string(i) + " is outside [0, cap]");
    }
}

double crc_nm_adjusted_level(double alpha, const CorrectionValue& correction)
{
    if (!(correction.amount >= 0.0)) throw InvalidInput("correction amount must be non-negative");
    return alpha - correction.amount;
}

namespace {

Selection scan_or_infeasible(const RiskCurve& curve, std::size_t n, double bound, double level)
{
    if (!(level > 0.0)) return infeasible_selection(curve.grid(), level);
    return crc_scan(curve, n, bound, level);
}

} // namespace

SelectOutcome select_detailed(const LossMatrix& matrix, const MethodConfig& config,
                              std::optional<std::uint64_t> seed)
{
    config.validate();
    if (matrix.bound() != config.bound)
        throw ConfigError("method bound " + std::to_string(config.bound) + " differs from the matrix bound "
                          + std::to_string(matrix.bound()));
    if (config.method == Method::crc_c && !seed) throw ConfigError("crc-c needs an rng seed");

    const std::size_t n = matrix.rows();
    const double alpha = config.alpha;
    switch (config.method) {
    case Method::crc: return {crc_scan(empirical_risk(matrix), n, config.bound, alpha), std::nullopt};
    case Method::loss_mono: return {crc_scan(loss_monotonized_risk(matrix), n, config.bound, alpha), std::nullopt};
    case Method::risk_mono: return {plain_scan(risk_monotonize(empirical_risk(matrix)), alpha), std::nullopt};
    case Method::crc_nm:
    case Method::crc_nm_bernstein:
    case Method::crc_nm_empbern:
    case Method::crc_nm_min:
    case Method::crc_c: {
        const CorrectionSpec spec = *config.resolved_correction();
        CorrectionValue value = evaluate_correction(spec, matrix, alpha, seed.value_or(0));
        const double level = crc_nm_adjusted_level(alpha, value);
        return {scan_or_infeasible(empirical_risk(matrix), n, config.bound, level), std::move(value)};
    }
    }
    throw ConfigError("unhandled method");
}

RiskCurve weighted_empirical_risk(const LossMatrix& matrix, const WeightVector& weights)
{
    if (weights.size() != matrix.rows())
        throw InvalidInput("weight vector has " + std::to_string(weights.size()) + " entries for "
                           + std::to_string(matrix.rows()) + " rows");
    const std::size_t m = matrix.cols();
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        const double w = weights.weights()[i];
        auto r = matrix.row(i);
        for (std::size_t j = 0; j < m; ++j) sums[j] += w * r[j];
    }
    for (double& s : sums) s /= static_cast<double>(matrix.rows());
    return RiskCurve(matrix.grid(), std::move(sums), RiskKind::weighted_empirical);
}

Selection weighted_select(const LossMatrix& matrix, const WeightVector& weights, double alpha)
{
    const RiskCurve curve = weighted_empirical_risk(matrix, weights);
    return crc_scan(curve, matrix.rows(), weights.cap() * matrix.bound(), alpha);
}

} // namespace ncrc
