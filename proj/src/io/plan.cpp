#include <cstdio>
#include <fstream>
#include <set>

#include "ncrc/io.hpp"

namespace ncrc::io {

namespace {

template <class... Ts> struct overloaded : Ts... {
    using Ts::operator()...;
};

// Reads typed fields from a JSON object and rejects keys nobody asked for.
class Fields {
public:
    Fields(const json& object, std::string context) : object_(object), context_(std::move(context))
    {
        if (!object_.is_object()) throw ConfigError(context_ + " must be a JSON object");
    }

    template <class T> void get(const char* key, T& target)
    {
        seen_.insert(key);
        const auto it = object_.find(key);
        if (it == object_.end()) return;
        try {
            target = it->template get<T>();
        }
        catch (const json::exception&) {
            throw ConfigError(context_ + "." + key + " has the wrong type");
        }
    }

    template <class T> void get(const char* key, std::optional<T>& target)
    {
        seen_.insert(key);
        const auto it = object_.find(key);
        if (it == object_.end() || it->is_null()) return;
        T value{};
        get(key, value);
        target = value;
    }

    template <class T> T require(const char* key)
    {
        if (!object_.contains(key)) throw ConfigError(context_ + " is missing '" + key + "'");
        T value{};
        get(key, value);
        return value;
    }

    const json* child(const char* key)
    {
        seen_.insert(key);
        const auto it = object_.find(key);
        return it == object_.end() ? nullptr : &*it;
    }

    void finish() const
    {
        for (const auto& [key, value] : object_.items())
            if (!seen_.contains(key)) throw ConfigError(context_ + " has unknown key '" + key + "'");
    }

private:
    const json& object_;
    std::string context_;
    std::set<std::string> seen_;
};

CorrectionSpec parse_correction(const json& value)
{
    Fields f(value, "correction");
    CorrectionSpec spec;
    spec.kind = parse_correction_kind(f.require<std::string>("kind"));
    f.get("bound", spec.bound);
    f.get("sigma_max", spec.sigma_max);
    f.get("delta", spec.delta);
    f.get("resamples", spec.bootstrap.resamples);
    f.get("percentile", spec.bootstrap.percentile);
    f.finish();
    return spec;
}

json correction_spec_to_json(const CorrectionSpec& spec)
{
    json out{{"kind", correction_kind_name(spec.kind)}, {"bound", spec.bound}};
    switch (spec.kind) {
    case CorrectionKind::bernstein: out["sigma_max"] = spec.sigma_max ? json(*spec.sigma_max) : json(); break;
    case CorrectionKind::empirical_bernstein:
    case CorrectionKind::min_combined: out["delta"] = spec.delta; break;
    case CorrectionKind::bootstrap_stability:
        out["resamples"] = spec.bootstrap.resamples;
        out["percentile"] = spec.bootstrap.percentile;
        break;
    case CorrectionKind::hoeffding: break;
    }
    return out;
}

MethodConfig parse_method_config(const json& value, std::optional<double> default_alpha,
                                 std::optional<double> default_bound)
{
    MethodConfig mc;
    mc.bound = default_bound.value_or(1.0);
    if (value.is_string()) {
        mc.method = parse_method(value.get<std::string>());
        if (!default_alpha) throw ConfigError("method '" + value.get<std::string>() + "' needs an alpha");
        mc.alpha = *default_alpha;
        return mc;
    }
    Fields f(value, "method");
    mc.method = parse_method(f.require<std::string>("method"));
    std::optional<double> alpha = default_alpha;
    f.get("alpha", alpha);
    if (!alpha) throw ConfigError("method '" + std::string(method_name(mc.method)) + "' needs an alpha");
    mc.alpha = *alpha;
    f.get("bound", mc.bound);
    if (const json* c = f.child("correction")) {
        mc.correction = parse_correction(*c);
        if (!c->contains("bound")) mc.correction->bound = mc.bound;
    }
    f.finish();
    return mc;
}

} // namespace

GeneratorSpec parse_generator(const json& spec)
{
    Fields f(spec, "generator");
    const std::string name = f.require<std::string>("name");
    GeneratorSpec out;
    if (name == "bump") {
        BumpConfig c;
        c.reference_rows = 0;
        f.get("m", c.m);
        f.get("scale_lo", c.scale_lo);
        f.get("scale_hi", c.scale_hi);
        f.get("height_lo", c.height_lo);
        f.get("height_hi", c.height_hi);
        f.get("center_mean", c.center_mean);
        f.get("center_sd", c.center_sd);
        f.get("width_lo", c.width_lo);
        f.get("width_hi", c.width_hi);
        f.get("noise_sd", c.noise_sd);
        f.get("include_bump", c.include_bump);
        f.get("include_noise", c.include_noise);
        out = c;
    }
    else if (name == "multilabel") {
        MultilabelConfig c;
        f.get("features", c.features);
        f.get("labels", c.labels);
        f.get("weight_sd", c.weight_sd);
        f.get("bias_sd", c.bias_sd);
        f.get("logit_noise_sd", c.logit_noise_sd);
        f.get("amplitude", c.amplitude);
        f.get("m", c.m);
        f.get("model_seed", c.model_seed);
        out = c;
    }
    else if (name == "oversize-detection" || name == "oversize-classification") {
        OversizeConfig c = name == "oversize-detection" ? OversizeConfig{} : OversizeConfig::classification_defaults();
        f.get("gamma", c.gamma);
        f.get("k0", c.k0);
        f.get("tau", c.tau);
        f.get("candidates", c.candidates);
        f.get("mean_extra_gt", c.mean_extra_gt);
        f.get("m", c.m);
        f.get("grid_lo", c.grid_lo);
        f.get("grid_hi", c.grid_hi);
        c.validate();
        out = c;
    }
    else if (name == "minimax") {
        MinimaxConfig c;
        f.get("m", c.m);
        f.get("alpha", c.alpha);
        f.get("delta", c.delta);
        f.get("hidden", c.hidden);
        f.get("safe_last_column", c.safe_last_column);
        out = c;
    }
    else if (name == "monotone") {
        MonotoneSpec c;
        f.get("m", c.m);
        if (c.m < 2) throw ConfigError("monotone generator needs m >= 2");
        out = c;
    }
    else if (name == "lipschitz") {
        LipschitzConfig c;
        f.get("lipschitz", c.lipschitz);
        f.get("epsilon", c.epsilon);
        f.get("alpha", c.alpha);
        f.get("m", c.m);
        f.get("star_index", c.star_index);
        c.validate();
        out = c;
    }
    else if (name == "shift") {
        ShiftConfig c;
        f.get("train_p_x1", c.train_p_x1);
        f.get("test_p_x1", c.test_p_x1);
        f.get("loss_prob_x0", c.loss_prob_x0);
        f.get("loss_prob_x1", c.loss_prob_x1);
        c.validate();
        out = c;
    }
    else if (name == "bernoulli") {
        BernoulliColumnsConfig c;
        f.get("m", c.m);
        f.get("p", c.p);
        if (c.m == 0 || !(c.p >= 0.0 && c.p <= 1.0)) throw ConfigError("bernoulli generator needs m >= 1, p in [0, 1]");
        out = c;
    }
    else {
        throw ConfigError("unknown generator '" + name + "'");
    }
    f.finish();
    return out;
}

json generator_to_json(const GeneratorSpec& spec)
{
    json out = std::visit(
        overloaded{
            [](const BumpConfig& c) {
                return json{{"m", c.m},
                            {"scale_lo", c.scale_lo},
                            {"scale_hi", c.scale_hi},
                            {"height_lo", c.height_lo},
                            {"height_hi", c.height_hi},
                            {"center_mean", c.center_mean},
                            {"center_sd", c.center_sd},
                            {"width_lo", c.width_lo},
                            {"width_hi", c.width_hi},
                            {"noise_sd", c.noise_sd},
                            {"include_bump", c.include_bump},
                            {"include_noise", c.include_noise}};
            },
            [](const MultilabelConfig& c) {
                return json{{"features", c.features},
                            {"labels", c.labels},
                            {"weight_sd", c.weight_sd},
                            {"bias_sd", c.bias_sd},
                            {"logit_noise_sd", c.logit_noise_sd},
                            {"amplitude", c.amplitude},
                            {"m", c.m},
                            {"model_seed", c.model_seed ? json(*c.model_seed) : json()}};
            },
            [](const OversizeConfig& c) {
                return json{{"gamma", c.gamma},         {"k0", c.k0},
                            {"tau", c.tau},             {"candidates", c.candidates},
                            {"mean_extra_gt", c.mean_extra_gt}, {"m", c.m},
                            {"grid_lo", c.grid_lo},     {"grid_hi", c.grid_hi}};
            },
            [](const MinimaxConfig& c) {
                return json{{"m", c.m},
                            {"alpha", c.alpha},
                            {"delta", c.resolved_delta()},
                            {"hidden", c.hidden ? json(*c.hidden) : json()},
                            {"safe_last_column", c.safe_last_column}};
            },
            [](const MonotoneSpec& c) { return json{{"m", c.m}}; },
            [](const LipschitzConfig& c) {
                return json{{"lipschitz", c.lipschitz},
                            {"epsilon", c.epsilon},
                            {"alpha", c.alpha},
                            {"m", c.m},
                            {"star_index", c.resolved_star()}};
            },
            [](const ShiftConfig& c) {
                return json{{"train_p_x1", c.train_p_x1},
                            {"test_p_x1", c.test_p_x1},
                            {"loss_prob_x0", c.loss_prob_x0},
                            {"loss_prob_x1", c.loss_prob_x1}};
            },
            [](const BernoulliColumnsConfig& c) { return json{{"m", c.m}, {"p", c.p}}; },
        },
        spec);
    out["name"] = generator_name(spec);
    return out;
}

ExperimentPlan parse_plan(const json& value, const std::filesystem::path& base_dir)
{
    Fields f(value, "plan");
    ExperimentPlan plan;
    f.get("seed", plan.seed);
    f.get("repetitions", plan.repetitions);
    f.get("n_cal", plan.n_cal);
    f.get("n_test", plan.n_test);
    f.get("threads", plan.threads);
    f.get("weighted_alpha", plan.weighted_alpha);
    std::optional<double> alpha, bound;
    f.get("alpha", alpha);
    f.get("bound", bound);

    if (const json* g = f.child("generator")) plan.generator = parse_generator(*g);
    if (const json* p = f.child("pool")) {
        Fields pf(*p, "pool");
        const std::filesystem::path path = base_dir / pf.require<std::string>("losses");
        double pool_bound = bound.value_or(1.0);
        pf.get("bound", pool_bound);
        pf.finish();
        plan.pool = PoolSource{read_loss_matrix_file(path, pool_bound), std::nullopt};
    }
    if (const json* ms = f.child("methods")) {
        if (!ms->is_array()) throw ConfigError("plan.methods must be an array");
        for (const json& m : *ms) plan.methods.push_back(parse_method_config(m, alpha, bound));
    }
    f.finish();
    plan.validate();
    return plan;
}

ExperimentPlan load_plan(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open plan " + path.string());
    json value;
    try {
        value = json::parse(in);
    }
    catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    return parse_plan(value, path.parent_path());
}

json plan_to_json(const ExperimentPlan& plan)
{
    json out{{"seed", plan.seed},
             {"repetitions", plan.repetitions},
             {"n_cal", plan.n_cal},
             {"n_test", plan.n_test},
             {"threads", plan.threads}};
    if (plan.weighted_alpha) out["weighted_alpha"] = *plan.weighted_alpha;
    if (plan.generator) out["generator"] = generator_to_json(*plan.generator);
    if (plan.pool)
        out["pool"] = json{{"rows", plan.pool->losses.rows()},
                           {"cols", plan.pool->losses.cols()},
                           {"bound", plan.pool->losses.bound()}};
    json methods = json::array();
    for (const MethodConfig& mc : plan.methods) {
        json m{{"method", method_name(mc.method)}, {"alpha", mc.alpha}, {"bound", mc.bound}};
        if (const auto c = mc.resolved_correction()) m["correction"] = correction_spec_to_json(*c);
        methods.push_back(std::move(m));
    }
    out["methods"] = std::move(methods);
    return out;
}

namespace {

std::string quantile_key(double level)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "%g", level);
    return buf;
}

} // namespace

json summaries_to_json(const std::vector<MethodSummary>& summaries)
{
    json out = json::object();
    for (const MethodSummary& s : summaries) {
        json q = json::object();
        for (std::size_t k = 0; k < summary_quantile_levels.size(); ++k)
            q[quantile_key(summary_quantile_levels[k])] = s.risk_quantiles[k];
        out[s.method] = json{{"alpha", s.alpha},
                             {"repetitions", s.repetitions},
                             {"mean_risk", s.mean_risk},
                             {"risk_se", s.risk_se},
                             {"violation_rate", s.violation_rate},
                             {"risk_quantiles", std::move(q)},
                             {"mean_set_size", s.mean_set_size ? json(*s.mean_set_size) : json()},
                             {"mean_lambda", s.mean_lambda},
                             {"feasible_rate", s.feasible_rate}};
    }
    return out;
}

json correction_to_json(const CorrectionValue& value)
{
    json terms = json::array();
    for (const CorrectionTerm& t : value.terms) terms.push_back(json{{"name", t.name}, {"value", t.value}});
    return json{{"amount", value.amount}, {"source", value.source}, {"terms", std::move(terms)}};
}

json selection_to_json(const SelectOutcome& outcome)
{
    const Selection& s = outcome.selection;
    return json{{"index", s.index},
                {"lambda", s.lambda},
                {"effective_level", s.effective_level},
                {"feasible", s.feasible},
                {"correction", outcome.correction ? correction_to_json(*outcome.correction) : json()}};
}

} // namespace ncrc::io
