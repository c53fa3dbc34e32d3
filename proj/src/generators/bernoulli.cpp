#include "ncrc/generators.hpp"

namespace ncrc {

LossMatrix bernoulli_columns(std::size_t n, std::size_t m, double p, Rng& rng)
{
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("Bernoulli probability must lie in [0, 1]");
    std::vector<double> entries(n * m);
    for (double& v : entries) v = uniform01(rng) < p ? 1.0 : 0.0;
    return LossMatrix(Grid::uniform(0.0, 1.0, m), 1.0, n, std::move(entries));
}

LossMatrix gen_bernoulli_columns(const BernoulliColumnsConfig& config)
{
    Rng rng = make_rng(config.seed, "bernoulli-columns");
    return bernoulli_columns(config.n, config.m, config.p, rng);
}

ReferenceCurve bernoulli_columns_truth(std::size_t m, double p)
{
    return {RiskCurve(Grid::uniform(0.0, 1.0, m), std::vector<double>(m, p), RiskKind::true_risk), false};
}

} // namespace ncrc
