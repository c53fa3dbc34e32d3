#include "ncrc/harness.hpp"

#include <algorithm>
#include <future>
#include <numeric>

#include "ncrc/stats.hpp"

namespace ncrc {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

SetSizeMatrix take_size_rows(const SetSizeMatrix& sizes, std::span<const std::size_t> rows)
{
    SetSizeMatrix out{rows.size(), sizes.cols, {}};
    out.sizes.reserve(rows.size() * sizes.cols);
    for (std::size_t i : rows)
        out.sizes.insert(out.sizes.end(), sizes.sizes.begin() + static_cast<std::ptrdiff_t>(i * sizes.cols),
                         sizes.sizes.begin() + static_cast<std::ptrdiff_t>((i + 1) * sizes.cols));
    return out;
}

DataSplit split_labeled(LabeledLosses all, std::size_t n_cal, std::size_t n_test)
{
    std::vector<std::size_t> cal(n_cal), test(n_test);
    std::iota(cal.begin(), cal.end(), 0);
    std::iota(test.begin(), test.end(), n_cal);
    return {all.losses.take_rows(cal), all.losses.take_rows(test), take_size_rows(all.set_sizes, cal),
            take_size_rows(all.set_sizes, test), std::nullopt};
}

DataSplit split_plain(const LossMatrix& all, std::size_t n_cal, std::size_t n_test)
{
    return {all.slice_rows(0, n_cal), all.slice_rows(n_cal, n_test), std::nullopt, std::nullopt, std::nullopt};
}

} // namespace

std::string generator_name(const GeneratorSpec& spec)
{
    return std::visit(overloaded{
                          [](const BumpConfig&) { return std::string("bump"); },
                          [](const MultilabelConfig&) { return std::string("multilabel"); },
                          [](const OversizeConfig& c) {
                              return std::string(c.variant == OversizeVariant::detection ? "oversize-detection"
                                                                                         : "oversize-classification");
                          },
                          [](const MinimaxConfig&) { return std::string("minimax"); },
                          [](const MonotoneSpec&) { return std::string("monotone"); },
                          [](const LipschitzConfig&) { return std::string("lipschitz"); },
                          [](const ShiftConfig&) { return std::string("shift"); },
                          [](const BernoulliColumnsConfig&) { return std::string("bernoulli"); },
                      },
                      spec);
}

DataSplit draw_split(const GeneratorSpec& spec, std::size_t n_cal, std::size_t n_test, std::uint64_t seed)
{
    Rng rng(seed);
    const std::size_t total = n_cal + n_test;
    return std::visit(
        overloaded{
            [&](const BumpConfig& c) { return split_plain(bump_rows(c, total, rng), n_cal, n_test); },
            [&](const MultilabelConfig& c) {
                const MultilabelModel model = draw_multilabel_model(c);
                return split_labeled(multilabel_rows(c, model, total, rng), n_cal, n_test);
            },
            [&](const OversizeConfig& c) { return split_labeled(oversize_rows(c, total, rng), n_cal, n_test); },
            [&](const MinimaxConfig& c) {
                // One hidden column per repetition, shared by calibration and test rows.
                return split_plain(minimax_rows(c, total, rng).losses, n_cal, n_test);
            },
            [&](const MonotoneSpec& c) { return split_plain(monotone_rows(c.m, total, rng), n_cal, n_test); },
            [&](const LipschitzConfig& c) { return split_plain(lipschitz_rows(c, total, rng), n_cal, n_test); },
            [&](const ShiftConfig& c) {
                ShiftSample s = shift_rows(c, n_cal, n_test, rng);
                return DataSplit{std::move(s.calibration), std::move(s.test), std::nullopt, std::nullopt,
                                 std::move(s.weights)};
            },
            [&](const BernoulliColumnsConfig& c) {
                return split_plain(bernoulli_columns(total, c.m, c.p, rng), n_cal, n_test);
            },
        },
        spec);
}

DataSplit split_pool(const PoolSource& pool, std::size_t n_cal, std::size_t n_test, std::uint64_t seed)
{
    const std::size_t n = pool.losses.rows();
    if (n_cal + n_test > n)
        throw ConfigError("pool has " + std::to_string(n) + " rows, fewer than n_cal + n_test");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    // Partial Fisher-Yates: only the first n_cal + n_test positions are needed.
    for (std::size_t i = 0; i < n_cal + n_test; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
    }
    const std::span<const std::size_t> cal(order.data(), n_cal);
    const std::span<const std::size_t> test(order.data() + n_cal, n_test);
    DataSplit out{pool.losses.take_rows(cal), pool.losses.take_rows(test), std::nullopt, std::nullopt, std::nullopt};
    if (pool.set_sizes) {
        out.calibration_sizes = take_size_rows(*pool.set_sizes, cal);
        out.test_sizes = take_size_rows(*pool.set_sizes, test);
    }
    return out;
}

void ExperimentPlan::validate() const
{
    if (generator.has_value() == pool.has_value()) throw ConfigError("plan needs exactly one of generator or pool");
    if (repetitions == 0) throw ConfigError("plan needs at least one repetition");
    if (n_cal == 0 || n_test == 0) throw ConfigError("plan needs n_cal >= 1 and n_test >= 1");
    if (methods.empty() && !weighted_alpha) throw ConfigError("plan lists no methods");
    if (pool && n_cal + n_test > pool->losses.rows()) throw ConfigError("n_cal + n_test exceeds the pool size");
    for (const MethodConfig& mc : methods) mc.validate();
    if (weighted_alpha && !(*weighted_alpha > 0.0 && *weighted_alpha < 1.0))
        throw ConfigError("weighted alpha must lie in (0, 1)");
    if (threads == 0) throw ConfigError("threads must be at least 1");
}

const MethodSummary& EvalReport::summary(std::string_view method) const
{
    for (const MethodSummary& s : summaries)
        if (s.method == method) return s;
    throw InvalidInput("report has no method '" + std::string(method) + "'");
}

double test_risk_at(const LossMatrix& test, std::size_t j)
{
    double s = 0.0;
    for (std::size_t i = 0; i < test.rows(); ++i) s += test(i, j);
    return s / static_cast<double>(test.rows());
}

namespace {

double mean_size_at(const SetSizeMatrix& sizes, std::size_t j)
{
    double s = 0.0;
    for (std::size_t i = 0; i < sizes.rows; ++i) s += sizes(i, j);
    return s / static_cast<double>(sizes.rows);
}

RepetitionRecord make_record(std::string method, std::size_t rep, const Selection& sel, const DataSplit& split)
{
    RepetitionRecord r;
    r.method = std::move(method);
    r.repetition = rep;
    r.selected_index = sel.index;
    r.selected_lambda = sel.lambda;
    r.effective_level = sel.effective_level;
    r.feasible = sel.feasible;
    r.test_risk = test_risk_at(split.test, sel.index);
    if (split.test_sizes) r.set_size = mean_size_at(*split.test_sizes, sel.index);
    return r;
}

// Records for one repetition, in method order (weighted selector last).
std::vector<RepetitionRecord> run_repetition(const ExperimentPlan& plan, std::size_t rep)
{
    const std::uint64_t rep_seed = derive_seed(plan.seed, "repetition", rep);
    const DataSplit split = plan.generator ? draw_split(*plan.generator, plan.n_cal, plan.n_test, rep_seed)
                                           : split_pool(*plan.pool, plan.n_cal, plan.n_test, rep_seed);
    std::vector<RepetitionRecord> out;
    for (std::size_t k = 0; k < plan.methods.size(); ++k) {
        const MethodConfig& mc = plan.methods[k];
        const Selection sel = select(split.calibration, mc, derive_seed(rep_seed, "method", k));
        out.push_back(make_record(std::string(method_name(mc.method)), rep, sel, split));
    }
    if (plan.weighted_alpha) {
        if (!split.weights) throw ConfigError("weighted selector needs a generator that supplies weights");
        const Selection sel = weighted_select(split.calibration, *split.weights, *plan.weighted_alpha);
        out.push_back(make_record(std::string(weighted_method_name), rep, sel, split));
    }
    return out;
}

} // namespace

std::vector<MethodSummary> summarize(const std::vector<RepetitionRecord>& records,
                                     const std::vector<std::pair<std::string, double>>& alphas)
{
    std::vector<MethodSummary> out;
    for (const auto& [method, alpha] : alphas) {
        std::vector<double> risks, sizes;
        double lambda_sum = 0.0;
        std::size_t feasible = 0, violations = 0;
        for (const RepetitionRecord& r : records) {
            if (r.method != method) continue;
            risks.push_back(r.test_risk);
            if (r.set_size) sizes.push_back(*r.set_size);
            lambda_sum += r.selected_lambda;
            feasible += r.feasible ? 1 : 0;
            violations += r.test_risk > alpha ? 1 : 0;
        }
        if (risks.empty()) throw InvalidInput("no records for method '" + method + "'");
        MethodSummary s;
        s.method = method;
        s.alpha = alpha;
        s.repetitions = risks.size();
        const double count = static_cast<double>(risks.size());
        s.mean_risk = mean(risks);
        s.risk_se = standard_error(risks);
        s.violation_rate = static_cast<double>(violations) / count;
        for (std::size_t q = 0; q < summary_quantile_levels.size(); ++q)
            s.risk_quantiles[q] = quantile(risks, summary_quantile_levels[q]);
        if (!sizes.empty()) s.mean_set_size = mean(sizes);
        s.mean_lambda = lambda_sum / count;
        s.feasible_rate = static_cast<double>(feasible) / count;
        out.push_back(std::move(s));
    }
    return out;
}

EvalReport run_experiment(const ExperimentPlan& input)
{
    input.validate();
    ExperimentPlan plan = input;
    // Pin the multilabel model to the experiment, not the repetition.
    if (plan.generator) {
        if (auto* ml = std::get_if<MultilabelConfig>(&*plan.generator); ml && !ml->model_seed)
            ml->model_seed = derive_seed(plan.seed, "model");
    }

    std::vector<std::vector<RepetitionRecord>> per_rep(plan.repetitions);
    auto run_range = [&](std::size_t first, std::size_t stride) {
        for (std::size_t rep = first; rep < plan.repetitions; rep += stride) {
            try {
                per_rep[rep] = run_repetition(plan, rep);
            }
            catch (const ConfigError& e) {
                throw ConfigError("repetition " + std::to_string(rep) + ": " + e.what());
            }
            catch (const InvalidInput& e) {
                throw InvalidInput("repetition " + std::to_string(rep) + ": " + e.what());
            }
        }
    };
    const std::size_t workers = std::min(plan.threads, plan.repetitions);
    if (workers <= 1) {
        run_range(0, 1);
    }
    else {
        std::vector<std::future<void>> jobs;
        for (std::size_t w = 0; w < workers; ++w) jobs.push_back(std::async(std::launch::async, run_range, w, workers));
        for (auto& j : jobs) j.get();
    }

    std::vector<std::pair<std::string, double>> alphas;
    for (const MethodConfig& mc : plan.methods) alphas.emplace_back(std::string(method_name(mc.method)), mc.alpha);
    if (plan.weighted_alpha) alphas.emplace_back(std::string(weighted_method_name), *plan.weighted_alpha);

    EvalReport report;
    const std::size_t per = alphas.size();
    report.records.reserve(per * plan.repetitions);
    for (std::size_t k = 0; k < per; ++k)
        for (std::size_t rep = 0; rep < plan.repetitions; ++rep) report.records.push_back(per_rep[rep][k]);
    report.summaries = summarize(report.records, alphas);
    return report;
}

} // namespace ncrc
