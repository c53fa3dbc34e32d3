#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "ncrc/error.hpp"

namespace ncrc {

/// Ordered candidate parameter values, strictly increasing, at least one point.
class Grid {
public:
    explicit Grid(std::vector<double> values);

    /// `m` evenly spaced points from `lo` to `hi` inclusive (just `lo` when m == 1).
    static Grid uniform(double lo, double hi, std::size_t m);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t j) const { return values_[j]; }
    std::span<const double> values() const noexcept { return values_; }
    double front() const noexcept { return values_.front(); }
    double back() const noexcept { return values_.back(); }
    double diameter() const noexcept { return values_.back() - values_.front(); }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::vector<double> values_;
};

/// n x m array of losses L_i(lambda_j), every entry in [0, bound].
///
/// Entries are validated on construction; an out-of-range or non-finite
/// value raises InvalidInput naming the offending (row, column) cell.
class LossMatrix {
public:
    LossMatrix(Grid grid, double bound, std::size_t rows, std::vector<double> entries);

    const Grid& grid() const noexcept { return grid_; }
    double bound() const noexcept { return bound_; }
    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return grid_.size(); }

    double operator()(std::size_t i, std::size_t j) const { return entries_[i * cols() + j]; }
    std::span<const double> row(std::size_t i) const
    {
        return std::span<const double>(entries_).subspan(i * cols(), cols());
    }
    std::span<const double> entries() const noexcept { return entries_; }

    /// New matrix made of the given rows (repeats allowed), in the given order.
    LossMatrix take_rows(std::span<const std::size_t> indices) const;
    /// Rows [first, first + count).
    LossMatrix slice_rows(std::size_t first, std::size_t count) const;

    friend bool operator==(const LossMatrix&, const LossMatrix&) = default;

private:
    Grid grid_;
    double bound_;
    std::size_t rows_;
    std::vector<double> entries_;
};

enum class RiskKind { empirical, true_risk, loss_monotonized, risk_monotonized, weighted_empirical };

std::string_view risk_kind_name(RiskKind kind) noexcept;

/// Risk values over a grid. Monotonized kinds are checked to be non-increasing.
class RiskCurve {
public:
    RiskCurve(Grid grid, std::vector<double> values, RiskKind kind);

    const Grid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t j) const { return values_[j]; }
    std::size_t size() const noexcept { return values_.size(); }
    RiskKind kind() const noexcept { return kind_; }

    friend bool operator==(const RiskCurve&, const RiskCurve&) = default;

private:
    Grid grid_;
    std::vector<double> values_;
    RiskKind kind_;
};

/// Outcome of a threshold scan. `feasible == false` means no grid point met the
/// condition and the last grid point was returned (inf of the empty set = lambda_m).
struct Selection {
    std::size_t index = 0;
    double lambda = 0.0;
    double effective_level = 0.0;
    bool feasible = false;

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Selection at the last grid point with feasible = false.
Selection infeasible_selection(const Grid& grid, double effective_level);

/// Column means of the loss matrix.
RiskCurve empirical_risk(const LossMatrix& matrix);

/// The CRC calibration condition (n/(n+1)) * risk + bound/(n+1) <= level.
/// Every scan and every analytic oracle that mirrors a scan goes through this.
bool crc_condition(double risk, std::size_t n, double bound, double level) noexcept;

/// Smallest grid index satisfying crc_condition on `curve`.
Selection crc_scan(const RiskCurve& curve, std::size_t n, double bound, double level);

/// Smallest grid index with curve value <= level.
Selection plain_scan(const RiskCurve& curve, double level);

/// Each row replaced by its suffix maximum sup_{t >= lambda} L_i(t).
LossMatrix loss_monotonize(const LossMatrix& matrix);

/// Suffix maximum of the curve; result kind is risk_monotonized.
RiskCurve risk_monotonize(const RiskCurve& curve);

/// Column means of the loss-monotonized matrix, tagged loss_monotonized.
RiskCurve loss_monotonized_risk(const LossMatrix& matrix);

/// Grid-restricted oracle threshold: plain scan of a true risk curve.
Selection grid_oracle(const RiskCurve& true_curve, double level);

} // namespace ncrc
