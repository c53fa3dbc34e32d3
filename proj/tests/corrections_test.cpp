#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "ncrc/corrections.hpp"
#include "ncrc/generators.hpp"
#include "ncrc/random.hpp"

using namespace ncrc;

namespace {

struct TableRow {
    std::size_t n;
    double value;
};

// Variance-ratio table, m = 200, B = 1, delta = 0.05, sigma_hat = sigma.
const std::vector<std::size_t> table2_n{1000, 2000, 5000, 10000, 20000};
const std::vector<double> table2_hoeffding{.059, .042, .027, .019, .013};
const std::vector<std::pair<double, std::vector<double>>> table2_bernstein{
    {0.1, {.013, .009, .005, .004, .003}}, {0.3, {.035, .024, .015, .011, .007}}, {0.5, {.057, .040, .025, .018, .012}}};
const std::vector<std::pair<double, std::vector<double>>> table2_empbern{
    {0.1, {.034, .020, .010, .006, .004}}, {0.3, {.061, .039, .022, .015, .010}}, {0.5, {.088, .058, .034, .023, .016}}};

LossMatrix constant_matrix(std::size_t n, std::size_t m, double v)
{
    return LossMatrix(Grid::uniform(0.0, 1.0, m), 1.0, n, std::vector<double>(n * m, v));
}

} // namespace

TEST(Hoeffding, TableOneHundredColumn)
{
    const std::vector<TableRow> rows{{1000, 0.0563}, {5000, 0.0252}, {10000, 0.0178}, {50000, 0.0080}, {100000, 0.0056}};
    for (const auto& r : rows) EXPECT_NEAR(hoeffding_correction(100, r.n, 1.0).amount, r.value, 5e-4) << r.n;
}

TEST(Hoeffding, VarianceTableColumn)
{
    for (std::size_t k = 0; k < table2_n.size(); ++k)
        EXPECT_NEAR(hoeffding_correction(200, table2_n[k], 1.0).amount, table2_hoeffding[k], 1e-3) << table2_n[k];
}

TEST(Hoeffding, TermsSumToAmountAndScaleWithBound)
{
    const CorrectionValue v = hoeffding_correction(37, 911, 2.5);
    ASSERT_EQ(v.terms.size(), 2u);
    EXPECT_DOUBLE_EQ(v.terms[0].value + v.terms[1].value, v.amount);
    EXPECT_NEAR(v.amount, 2.5 * hoeffding_correction(37, 911, 1.0).amount, 1e-15);
    EXPECT_EQ(v.source, "hoeffding");
}

TEST(Hoeffding, StrictlyMonotoneInNAndM)
{
    for (std::size_t m = 1; m < 300; m += 7)
        for (std::size_t n = 1; n < 5000; n += 97) {
            EXPECT_GT(hoeffding_correction(m, n, 1.0).amount, hoeffding_correction(m, n + 1, 1.0).amount);
            EXPECT_LT(hoeffding_correction(m, n, 1.0).amount, hoeffding_correction(m + 1, n, 1.0).amount);
        }
}

TEST(Hoeffding, RejectsZeroSizes)
{
    EXPECT_THROW(hoeffding_correction(0, 10, 1.0), InvalidInput);
    EXPECT_THROW(hoeffding_correction(10, 0, 1.0), InvalidInput);
}

TEST(Bernstein, VarianceTable)
{
    for (const auto& [sigma, values] : table2_bernstein)
        for (std::size_t k = 0; k < table2_n.size(); ++k)
            EXPECT_NEAR(bernstein_correction(200, table2_n[k], 1.0, sigma).amount, values[k], 1e-3)
                << "sigma " << sigma << " n " << table2_n[k];
}

TEST(Bernstein, ZeroSigmaLeavesSecondTermOnly)
{
    EXPECT_DOUBLE_EQ(bernstein_correction(50, 700, 1.0, 0.0).amount, std::log(100.0) / 2100.0);
    EXPECT_THROW(bernstein_correction(50, 700, 1.0, -0.1), InvalidInput);
}

TEST(Bernstein, BelowHoeffdingForSmallSigma)
{
    for (const auto& [sigma, values] : table2_bernstein) {
        if (sigma > 0.3) continue;
        for (std::size_t n : table2_n)
            EXPECT_LE(bernstein_correction(200, n, 1.0, sigma).amount, hoeffding_correction(200, n, 1.0).amount);
    }
}

TEST(EmpiricalBernstein, VarianceTable)
{
    for (const auto& [sigma, values] : table2_empbern)
        for (std::size_t k = 0; k < table2_n.size(); ++k)
            EXPECT_NEAR(empirical_bernstein_correction(200, table2_n[k], 1.0, sigma, 0.05).amount, values[k], 1e-3)
                << "sigma " << sigma << " n " << table2_n[k];
}

TEST(EmpiricalBernstein, RejectsSingleRow)
{
    EXPECT_THROW(empirical_bernstein_correction(10, 1, 1.0, 0.1, 0.05), InvalidInput);
}

TEST(EmpiricalBernstein, FirstTermRatioApproachesSigmaRatio)
{
    // With delta near 1 the log terms coincide up to log(1/delta) and the ratio of first terms -> 1 at sigma_hat = sigma.
    const double eb = empirical_bernstein_correction(200, 10'000'000, 1.0, 0.3, 0.999999).terms[0].value;
    const double b = bernstein_correction(200, 10'000'000, 1.0, 0.3).terms[0].value;
    EXPECT_NEAR(eb / b, 1.0, 1e-4);
}

TEST(Sensitivity, AcrossGridSizes)
{
    struct Row {
        std::size_t m;
        double h, b, eb;
    };
    const std::vector<Row> rows{{50, .024, .013, .020}, {100, .025, .014, .021}, {200, .027, .015, .022},
                                {500, .028, .016, .024}};
    for (const Row& r : rows) {
        EXPECT_NEAR(hoeffding_correction(r.m, 5000, 1.0).amount, r.h, 1e-3) << r.m;
        EXPECT_NEAR(bernstein_correction(r.m, 5000, 1.0, 0.3).amount, r.b, 1e-3) << r.m;
        EXPECT_NEAR(empirical_bernstein_correction(r.m, 5000, 1.0, 0.3, 0.05).amount, r.eb, 1e-3) << r.m;
    }
}

TEST(MinCombined, PicksSmallerBoundAndNamesIt)
{
    const CorrectionValue a = min_combined_correction(200, 1000, 1.0, 0.5, 0.05);
    EXPECT_NEAR(a.amount, 0.059, 1e-3);
    EXPECT_EQ(a.source, "hoeffding");
    const CorrectionValue b = min_combined_correction(200, 5000, 1.0, 0.1, 0.05);
    EXPECT_NEAR(b.amount, 0.010, 1e-3);
    EXPECT_EQ(b.source, "empirical-bernstein");
    for (std::size_t n : table2_n) EXPECT_EQ(min_combined_correction(200, n, 1.0, 1.0, 0.05).source, "hoeffding");
}

TEST(EmpiricalSigma, SpecExamples)
{
    EXPECT_EQ(empirical_sigma_max(constant_matrix(4, 3, 0.3)), 0.0);
    const Grid g1({0.0});
    EXPECT_DOUBLE_EQ(empirical_sigma_max(LossMatrix(g1, 1.0, 2, {0.0, 1.0})), 0.5);
    const Grid g2({0.0, 1.0});
    EXPECT_DOUBLE_EQ(empirical_sigma_max(LossMatrix(g2, 1.0, 2, {0.0, 0.5, 1.0, 0.5})), 0.5);
}

TEST(Spec, ValidationErrors)
{
    CorrectionSpec s;
    s.kind = CorrectionKind::bernstein;
    EXPECT_THROW(s.validate(), ConfigError);
    s.sigma_max = 1.5;
    EXPECT_THROW(s.validate(), ConfigError);
    s.sigma_max = 0.3;
    EXPECT_NO_THROW(s.validate());
    CorrectionSpec e;
    e.kind = CorrectionKind::empirical_bernstein;
    e.delta = 1.0;
    EXPECT_THROW(e.validate(), ConfigError);
    CorrectionSpec b;
    b.kind = CorrectionKind::bootstrap_stability;
    b.bootstrap.percentile = 0.0;
    EXPECT_THROW(b.validate(), ConfigError);
    EXPECT_THROW(parse_correction_kind("gaussian"), ConfigError);
    EXPECT_EQ(parse_correction_kind("min-combined"), CorrectionKind::min_combined);
}

TEST(Bootstrap, ConstantMatricesGiveZero)
{
    CorrectionSpec spec;
    spec.kind = CorrectionKind::bootstrap_stability;
    EXPECT_EQ(bootstrap_stability(constant_matrix(30, 8, 0.05), 0.2, spec, 1).amount, 0.0);
    EXPECT_EQ(bootstrap_stability(constant_matrix(30, 1, 0.4), 0.2, spec, 1).amount, 0.0);
    EXPECT_THROW(bootstrap_stability(constant_matrix(1, 3, 0.0), 0.2, spec, 1), InvalidInput);
}

TEST(Bootstrap, MatchesExplicitResamplingOracle)
{
    Rng data = make_rng(3, "fixture");
    std::vector<double> e(20 * 5);
    for (double& v : e) v = uniform01(data);
    const LossMatrix mat(Grid::uniform(0.0, 1.0, 5), 1.0, 20, e);
    const double level = 0.6;
    CorrectionSpec spec;
    spec.kind = CorrectionKind::bootstrap_stability;
    spec.bootstrap.resamples = 50;

    // Oracle: materialize every resample, recompute both selections by linear scan.
    auto crc_index = [&](const LossMatrix& m) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            double s = 0;
            for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j);
            if ((s + 1.0) / (m.rows() + 1.0) <= level) return j;
        }
        return m.cols() - 1;
    };
    auto col_mean = [](const LossMatrix& m, std::size_t j) {
        double s = 0;
        for (std::size_t i = 0; i < m.rows(); ++i) s += m(i, j);
        return s / m.rows();
    };
    const double ref = col_mean(mat, crc_index(mat));
    std::vector<double> dev;
    for (std::size_t b = 0; b < 50; ++b) {
        Rng rng = make_rng(77, "bootstrap", b);
        std::uniform_int_distribution<std::size_t> pick(0, 19);
        std::vector<std::size_t> idx(20);
        for (auto& i : idx) i = pick(rng);
        const LossMatrix r = mat.take_rows(idx);
        dev.push_back(std::abs(col_mean(r, crc_index(r)) - ref));
    }
    std::sort(dev.begin(), dev.end());
    const double expect = dev[static_cast<std::size_t>(std::ceil(0.9 * 50)) - 1];
    EXPECT_NEAR(bootstrap_stability(mat, level, spec, 77).amount, expect, 1e-12);
}

TEST(Bootstrap, DeterministicGivenSeedAndBelowHoeffdingOnBump)
{
    BumpConfig c;
    c.n = 1000;
    c.m = 50;
    c.seed = 4;
    c.reference_rows = 0;
    const LossMatrix mat = gen_bump(c).losses;
    CorrectionSpec spec;
    spec.kind = CorrectionKind::bootstrap_stability;
    const double a = bootstrap_stability(mat, 0.1, spec, 9).amount;
    EXPECT_EQ(a, bootstrap_stability(mat, 0.1, spec, 9).amount);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, hoeffding_correction(50, 1000, 1.0).amount);
}

TEST(Evaluate, DispatchesOnKind)
{
    const LossMatrix mat = constant_matrix(100, 10, 0.0);
    CorrectionSpec spec;
    EXPECT_EQ(evaluate_correction(spec, mat, 0.1, 0).amount, hoeffding_correction(10, 100, 1.0).amount);
    spec.kind = CorrectionKind::empirical_bernstein;
    EXPECT_EQ(evaluate_correction(spec, mat, 0.1, 0).amount,
              empirical_bernstein_correction(10, 100, 1.0, 0.0, 0.05).amount);
}
