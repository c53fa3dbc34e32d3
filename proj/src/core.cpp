#include "ncrc/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ncrc {

Grid::Grid(std::vector<double> values) : values_(std::move(values))
{
    if (values_.empty()) throw InvalidInput("grid must contain at least one value");
    for (std::size_t j = 0; j < values_.size(); ++j) {
        if (!std::isfinite(values_[j]))
            throw InvalidInput("grid value " + std::to_string(j) + " is not finite");
        if (j > 0 && !(values_[j - 1] < values_[j]))
            throw InvalidInput("grid values must be strictly increasing (index " + std::to_string(j) + ")");
    }
}

Grid Grid::uniform(double lo, double hi, std::size_t m)
{
    if (m == 0) throw InvalidInput("grid size must be positive");
    if (m == 1) return Grid({lo});
    if (!(lo < hi)) throw InvalidInput("uniform grid needs lo < hi");
    std::vector<double> values(m);
    const double step = (hi - lo) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j < m; ++j) values[j] = lo + step * static_cast<double>(j);
    values.back() = hi;
    return Grid(std::move(values));
}

LossMatrix::LossMatrix(Grid grid, double bound, std::size_t rows, std::vector<double> entries)
    : grid_(std::move(grid)), bound_(bound), rows_(rows), entries_(std::move(entries))
{
    if (!(bound_ > 0.0) || !std::isfinite(bound_)) throw InvalidInput("loss bound must be a positive finite number");
    if (rows_ == 0) throw InvalidInput("loss matrix has no rows");
    if (entries_.size() != rows_ * grid_.size())
        throw InvalidInput("loss matrix has " + std::to_string(entries_.size()) + " entries, expected "
                           + std::to_string(rows_) + " x " + std::to_string(grid_.size()));
    const std::size_t m = grid_.size();
    for (std::size_t k = 0; k < entries_.size(); ++k) {
        const double v = entries_[k];
        if (!(v >= 0.0 && v <= bound_)) {
            throw InvalidInput("loss at row " + std::to_string(k / m) + ", column " + std::to_string(k % m) + " is "
                               + std::to_string(v) + ", outside [0, " + std::to_string(bound_) + "]");
        }
    }
}

LossMatrix LossMatrix::take_rows(std::span<const std::size_t> indices) const
{
    const std::size_t m = cols();
    std::vector<double> out;
    out.reserve(indices.size() * m);
    for (std::size_t i : indices) {
        if (i >= rows_) throw InvalidInput("row index " + std::to_string(i) + " out of range");
        auto r = row(i);
        out.insert(out.end(), r.begin(), r.end());
    }
    return LossMatrix(grid_, bound_, indices.size(), std::move(out));
}

LossMatrix LossMatrix::slice_rows(std::size_t first, std::size_t count) const
{
    if (first + count > rows_) throw InvalidInput("row slice out of range");
    const std::size_t m = cols();
    std::vector<double> out(entries_.begin() + static_cast<std::ptrdiff_t>(first * m),
                            entries_.begin() + static_cast<std::ptrdiff_t>((first + count) * m));
    return LossMatrix(grid_, bound_, count, std::move(out));
}

std::string_view risk_kind_name(RiskKind kind) noexcept
{
    switch (kind) {
    case RiskKind::empirical: return "empirical";
    case RiskKind::true_risk: return "true";
    case RiskKind::loss_monotonized: return "loss-monotonized";
    case RiskKind::risk_monotonized: return "risk-monotonized";
    case RiskKind::weighted_empirical: return "weighted-empirical";
    }
    return "unknown";
}

RiskCurve::RiskCurve(Grid grid, std::vector<double> values, RiskKind kind)
    : grid_(std::move(grid)), values_(std::move(values)), kind_(kind)
{
    if (values_.size() != grid_.size())
        throw InvalidInput("risk curve has " + std::to_string(values_.size()) + " values for a grid of "
                           + std::to_string(grid_.size()));
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidInput("risk curve contains a non-finite value");
    if (kind_ == RiskKind::loss_monotonized || kind_ == RiskKind::risk_monotonized) {
        for (std::size_t j = 1; j < values_.size(); ++j)
            if (values_[j] > values_[j - 1])
                throw InvalidInput("monotonized risk curve increases at index " + std::to_string(j));
    }
}

Selection infeasible_selection(const Grid& grid, double effective_level)
{
    return Selection{grid.size() - 1, grid.back(), effective_level, false};
}

RiskCurve empirical_risk(const LossMatrix& matrix)
{
    const std::size_t n = matrix.rows();
    const std::size_t m = matrix.cols();
    std::vector<double> sums(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto r = matrix.row(i);
        for (std::size_t j = 0; j < m; ++j) sums[j] += r[j];
    }
    const double nd = static_cast<double>(n);
    for (double& s : sums) s /= nd;
    return RiskCurve(matrix.grid(), std::move(sums), RiskKind::empirical);
}

bool crc_condition(double risk, std::size_t n, double bound, double level) noexcept
{
    const double nd = static_cast<double>(n);
    return (nd / (nd + 1.0)) * risk + bound / (nd + 1.0) <= level;
}

namespace {

void check_level(double level)
{
    if (!(level > 0.0 && level < 1.0)) throw InvalidInput("risk level must lie in (0, 1)");
}

} // namespace

Selection crc_scan(const RiskCurve& curve, std::size_t n, double bound, double level)
{
    check_level(level);
    if (n == 0) throw InvalidInput("crc_scan needs n >= 1");
    if (!(bound >= 0.0)) throw InvalidInput("loss bound must be non-negative");
    for (std::size_t j = 0; j < curve.size(); ++j)
        if (crc_condition(curve[j], n, bound, level)) return Selection{j, curve.grid()[j], level, true};
    return infeasible_selection(curve.grid(), level);
}

Selection plain_scan(const RiskCurve& curve, double level)
{
    check_level(level);
    for (std::size_t j = 0; j < curve.size(); ++j)
        if (curve[j] <= level) return Selection{j, curve.grid()[j], level, true};
    return infeasible_selection(curve.grid(), level);
}

LossMatrix loss_monotonize(const LossMatrix& matrix)
{
    const std::size_t m = matrix.cols();
    std::vector<double> out(matrix.entries().begin(), matrix.entries().end());
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        double* r = out.data() + i * m;
        for (std::size_t j = m - 1; j-- > 0;) r[j] = std::max(r[j], r[j + 1]);
    }
    return LossMatrix(matrix.grid(), matrix.bound(), matrix.rows(), std::move(out));
}

RiskCurve risk_monotonize(const RiskCurve& curve)
{
    std::vector<double> out(curve.values().begin(), curve.values().end());
    for (std::size_t j = out.size() - 1; j-- > 0;) out[j] = std::max(out[j], out[j + 1]);
    return RiskCurve(curve.grid(), std::move(out), RiskKind::risk_monotonized);
}

RiskCurve loss_monotonized_risk(const LossMatrix& matrix)
{
    const RiskCurve mean = empirical_risk(loss_monotonize(matrix));
    return RiskCurve(mean.grid(), {mean.values().begin(), mean.values().end()}, RiskKind::loss_monotonized);
}

Selection grid_oracle(const RiskCurve& true_curve, double level)
{
    if (true_curve.kind() != RiskKind::true_risk) throw InvalidInput("grid_oracle needs a true risk curve");
    return plain_scan(true_curve, level);
}

} // namespace ncrc
