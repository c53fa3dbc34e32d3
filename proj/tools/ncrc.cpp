// ncrc: command-line front end for threshold calibration experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "ncrc/io.hpp"

namespace fs = std::filesystem;
using namespace ncrc;
using io::json;

namespace {

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw InvalidInput("cannot write " + path.string());
    return out;
}

fs::path sibling(const fs::path& out, const std::string& suffix)
{
    return out.parent_path() / (out.stem().string() + suffix + out.extension().string());
}

fs::path manifest_path_for(const fs::path& out)
{
    return fs::path(out.string() + ".manifest.json");
}

// Outputs are recorded relative to the manifest directory, inputs as absolute paths.
void finish_manifest(io::RunManifest manifest, const fs::path& manifest_path, const std::vector<fs::path>& outputs,
                     const std::vector<fs::path>& inputs, const io::Stopwatch& clock)
{
    const fs::path base = manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
    for (const fs::path& p : inputs) manifest.inputs.push_back(io::digest(fs::absolute(p)));
    for (const fs::path& p : outputs)
        manifest.outputs.push_back({fs::relative(fs::absolute(p), fs::absolute(base)).string(), io::sha256_file(p)});
    manifest.tool_version = io::tool_version;
    manifest.wall_clock_seconds = clock.seconds();
    if (manifest_path.has_parent_path()) fs::create_directories(manifest_path.parent_path());
    io::write_manifest(manifest_path, manifest);
}

// ---------------------------------------------------------------------------

struct CorrectArgs {
    std::string kind = "hoeffding";
    std::vector<std::size_t> ms;
    std::vector<std::size_t> ns;
    double bound = 1.0;
    std::vector<double> sigmas;
    double delta = 0.05;
    std::string out;
};

int cmd_correct(const CorrectArgs& a)
{
    const io::Stopwatch clock;
    const CorrectionKind kind = parse_correction_kind(a.kind);
    if (kind == CorrectionKind::bootstrap_stability)
        throw ConfigError("bootstrap-stability depends on data; use 'select --method crc-c'");
    for (std::size_t m : a.ms)
        if (m == 0) throw ConfigError("--m values must be at least 1");
    for (std::size_t n : a.ns)
        if (n == 0) throw ConfigError("--n values must be at least 1");
    if (!(a.bound > 0.0)) throw ConfigError("--B must be positive");
    const bool needs_sigma = kind != CorrectionKind::hoeffding;
    if (needs_sigma && a.sigmas.empty()) throw ConfigError("--sigma is required for " + a.kind);
    if (!(a.delta > 0.0 && a.delta < 1.0)) throw ConfigError("--delta must lie in (0, 1)");

    std::ostringstream table;
    table << "kind,m,n,bound,sigma,delta,amount,source\n";
    const std::vector<double> sigmas = needs_sigma ? a.sigmas : std::vector<double>{0.0};
    for (double sigma : sigmas) {
        if (needs_sigma && !(sigma >= 0.0)) throw ConfigError("--sigma values must be non-negative");
        for (std::size_t m : a.ms) {
            for (std::size_t n : a.ns) {
                CorrectionValue v;
                switch (kind) {
                case CorrectionKind::hoeffding: v = hoeffding_correction(m, n, a.bound); break;
                case CorrectionKind::bernstein: v = bernstein_correction(m, n, a.bound, sigma); break;
                case CorrectionKind::empirical_bernstein:
                    v = empirical_bernstein_correction(m, n, a.bound, sigma, a.delta);
                    break;
                case CorrectionKind::min_combined: v = min_combined_correction(m, n, a.bound, sigma, a.delta); break;
                case CorrectionKind::bootstrap_stability: break;
                }
                table << a.kind << ',' << m << ',' << n << ',' << io::format_double(a.bound) << ','
                      << (needs_sigma ? io::format_double(sigma) : "") << ','
                      << (kind == CorrectionKind::empirical_bernstein || kind == CorrectionKind::min_combined
                              ? io::format_double(a.delta)
                              : "")
                      << ',' << io::format_double(v.amount) << ',' << v.source << '\n';
            }
        }
    }
    if (a.out.empty()) {
        std::cout << table.str();
        return 0;
    }
    open_out(a.out) << table.str();
    io::RunManifest manifest;
    manifest.command = "correct";
    manifest.config = json{{"kind", a.kind}, {"m", a.ms}, {"n", a.ns}, {"bound", a.bound}, {"sigma", a.sigmas},
                           {"delta", a.delta}};
    finish_manifest(manifest, manifest_path_for(a.out), {a.out}, {}, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct SelectArgs {
    std::string input;
    std::string method;
    double alpha = 0.1;
    double bound = 1.0;
    std::optional<std::uint64_t> seed;
    std::optional<double> sigma;
    double delta = 0.05;
    std::size_t resamples = 200;
    double percentile = 90.0;
    std::string out;
};

int cmd_select(const SelectArgs& a)
{
    const io::Stopwatch clock;
    MethodConfig config;
    config.method = parse_method(a.method);
    config.alpha = a.alpha;
    config.bound = a.bound;
    if (auto spec = config.resolved_correction(); spec || config.method == Method::crc_nm_bernstein) {
        CorrectionSpec c = spec.value_or(CorrectionSpec{CorrectionKind::bernstein});
        c.bound = a.bound;
        c.sigma_max = a.sigma;
        c.delta = a.delta;
        c.bootstrap = {a.resamples, a.percentile};
        if (config.method == Method::crc_nm_bernstein && !a.sigma)
            throw ConfigError("crc-nm-bernstein needs --sigma");
        config.correction = c;
    }
    const LossMatrix matrix = io::read_loss_matrix_file(a.input, a.bound);
    const SelectOutcome outcome = select_detailed(matrix, config, a.seed);
    json result = io::selection_to_json(outcome);
    result["method"] = a.method;
    result["alpha"] = a.alpha;
    const std::string text = result.dump(2) + "\n";
    std::cout << text;
    if (!a.out.empty()) {
        open_out(a.out) << text;
        io::RunManifest manifest;
        manifest.command = "select";
        manifest.config = json{{"method", a.method}, {"alpha", a.alpha}, {"bound", a.bound},
                               {"seed", a.seed ? json(*a.seed) : json()}, {"sigma", a.sigma ? json(*a.sigma) : json()},
                               {"delta", a.delta}, {"resamples", a.resamples}, {"percentile", a.percentile}};
        manifest.seed = a.seed.value_or(0);
        finish_manifest(manifest, manifest_path_for(a.out), {a.out}, {a.input}, clock);
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
    std::string name;
    std::size_t n = 1000;
    std::optional<std::size_t> m;
    std::uint64_t seed = 0;
    std::string out;
    // generator-specific
    double p = 0.4;
    std::optional<double> alpha;
    std::optional<double> delta;
    std::size_t trial = 0;
    bool safe_last_column = false;
    std::size_t n_test = 500;
    std::optional<double> noise;
    std::size_t reference_rows = 1'000'000;
    std::string variant = "detection";
    std::optional<double> gamma;
    std::optional<int> k0;
    std::optional<double> tau;
    double lipschitz = 8.0;
    double epsilon = 0.05;
};

int cmd_generate(const GenerateArgs& a)
{
    const io::Stopwatch clock;
    const fs::path out = a.out;
    std::vector<fs::path> outputs{out};
    json config{{"generator", a.name}, {"n", a.n}, {"seed", a.seed}};

    auto write_matrix = [&](const fs::path& path, const LossMatrix& losses) {
        std::ofstream f = open_out(path);
        io::write_loss_matrix(f, losses);
    };
    auto write_truth = [&](const ReferenceCurve& truth) {
        const fs::path path = sibling(out, "_truth");
        std::ofstream f = open_out(path);
        io::write_truth_curve(f, truth);
        outputs.push_back(path);
    };
    auto write_sizes = [&](const fs::path& path, const LabeledLosses& data) {
        std::ofstream f = open_out(path);
        io::write_set_sizes(f, data.losses.grid(), data.set_sizes);
        outputs.push_back(path);
    };

    if (a.name == "bump") {
        BumpConfig c;
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.seed = a.seed;
        c.reference_rows = a.reference_rows;
        BumpSample s = gen_bump(c);
        write_matrix(out, s.losses);
        if (s.reference) write_truth(*s.reference);
        config["m"] = c.m;
        config["reference_rows"] = c.reference_rows;
    }
    else if (a.name == "counterexample") {
        CounterexampleConfig c;
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.p = a.p;
        c.alpha = a.alpha.value_or(c.alpha);
        c.seed = a.seed;
        write_matrix(out, gen_counterexample(c, a.trial));
        write_truth(counterexample_truth(c));
        config.update(json{{"m", c.m}, {"p", c.p}, {"alpha", c.alpha}, {"trial", a.trial}});
    }
    else if (a.name == "multilabel") {
        MultilabelConfig c;
        c.n_cal = a.n;
        c.n_test = a.n_test;
        c.m = a.m.value_or(c.m);
        c.seed = a.seed;
        c.logit_noise_sd = a.noise.value_or(c.logit_noise_sd);
        const MultilabelSample s = gen_multilabel(c);
        write_matrix(out, s.calibration.losses);
        write_sizes(sibling(out, "_sizes"), s.calibration);
        const fs::path test = sibling(out, "_test");
        write_matrix(test, s.test.losses);
        outputs.push_back(test);
        write_sizes(sibling(out, "_test_sizes"), s.test);
        config.update(json{{"m", c.m}, {"n_test", c.n_test}, {"logit_noise_sd", c.logit_noise_sd}});
    }
    else if (a.name == "oversize") {
        OversizeConfig c;
        if (a.variant == "classification") c = OversizeConfig::classification_defaults();
        else if (a.variant != "detection") throw ConfigError("--variant must be detection or classification");
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.seed = a.seed;
        c.gamma = a.gamma.value_or(c.gamma);
        c.k0 = a.k0.value_or(c.k0);
        c.tau = a.tau.value_or(c.tau);
        c.validate();
        const LabeledLosses s = gen_oversize_surrogate(c);
        write_matrix(out, s.losses);
        write_sizes(sibling(out, "_sizes"), s);
        config.update(json{{"variant", a.variant}, {"m", c.m}, {"gamma", c.gamma}, {"k0", c.k0}, {"tau", c.tau}});
    }
    else if (a.name == "minimax") {
        MinimaxConfig c;
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.alpha = a.alpha.value_or(c.alpha);
        c.delta = a.delta;
        c.safe_last_column = a.safe_last_column;
        c.seed = a.seed;
        const MinimaxTrial t = gen_minimax_instance(c, a.trial);
        write_matrix(out, t.losses);
        write_truth(t.truth);
        config.update(json{{"m", c.m}, {"alpha", c.alpha}, {"delta", c.resolved_delta()}, {"hidden", t.hidden},
                           {"safe_last_column", c.safe_last_column}, {"trial", a.trial}});
    }
    else if (a.name == "monotone") {
        const std::size_t m = a.m.value_or(101);
        write_matrix(out, gen_monotone(a.n, m, a.seed));
        write_truth(monotone_truth(m));
        config["m"] = m;
    }
    else if (a.name == "lipschitz") {
        LipschitzConfig c;
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.alpha = a.alpha.value_or(c.alpha);
        c.lipschitz = a.lipschitz;
        c.epsilon = a.epsilon;
        c.seed = a.seed;
        const LipschitzSample s = gen_lipschitz(c);
        write_matrix(out, s.losses);
        write_truth(s.truth);
        config.update(json{{"m", c.m}, {"alpha", c.alpha}, {"lipschitz", c.lipschitz}, {"epsilon", c.epsilon}});
    }
    else if (a.name == "bernoulli") {
        BernoulliColumnsConfig c;
        c.n = a.n;
        c.m = a.m.value_or(c.m);
        c.p = a.p;
        c.seed = a.seed;
        write_matrix(out, gen_bernoulli_columns(c));
        write_truth(bernoulli_columns_truth(c.m, c.p));
        config.update(json{{"m", c.m}, {"p", c.p}});
    }
    else {
        throw ConfigError("unknown generator '" + a.name + "'");
    }

    io::RunManifest manifest;
    manifest.command = "generate";
    manifest.config = std::move(config);
    manifest.seed = a.seed;
    finish_manifest(manifest, manifest_path_for(out), outputs, {}, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct CountsArgs {
    std::string records;
    std::string grid;
    double gamma = 0.35;
    int k0 = 3;
    double tau = 5.0;
    std::string out;
};

int cmd_counts(const CountsArgs& a)
{
    const io::Stopwatch clock;
    std::ifstream records_in(a.records);
    if (!records_in) throw InvalidInput("cannot open " + a.records);
    std::ifstream grid_in(a.grid);
    if (!grid_in) throw InvalidInput("cannot open " + a.grid);
    const auto records = io::read_count_records(records_in, a.records);
    const Grid grid = io::read_grid(grid_in, a.grid);
    const LabeledLosses data = detection_loss_from_counts(records, grid, a.gamma, a.k0, a.tau);

    const fs::path out = a.out;
    {
        std::ofstream f = open_out(out);
        io::write_loss_matrix(f, data.losses);
    }
    const fs::path sizes = sibling(out, "_sizes");
    {
        std::ofstream f = open_out(sizes);
        io::write_set_sizes(f, grid, data.set_sizes);
    }
    io::RunManifest manifest;
    manifest.command = "counts";
    manifest.config = json{{"gamma", a.gamma}, {"k0", a.k0}, {"tau", a.tau}};
    finish_manifest(manifest, manifest_path_for(out), {out, sizes}, {a.records, a.grid}, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    double p = 0.4;
    double alpha = 0.2;
    std::vector<std::size_t> ns;
    std::vector<std::size_t> ms;
    std::size_t trials = 10'000;
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a)
{
    const io::Stopwatch clock;
    const auto cells = counterexample_sweep(a.p, a.alpha, a.ns, a.ms, a.trials, a.seed);
    std::ostringstream table;
    io::write_phase_table(table, cells);
    if (a.out.empty()) {
        std::cout << table.str();
        return 0;
    }
    open_out(a.out) << table.str();
    io::RunManifest manifest;
    manifest.command = "simulate-counterexample";
    manifest.config = json{{"p", a.p}, {"alpha", a.alpha}, {"n", a.ns}, {"m", a.ms}, {"trials", a.trials}};
    manifest.seed = a.seed;
    finish_manifest(manifest, manifest_path_for(a.out), {a.out}, {}, clock);
    return 0;
}

// ---------------------------------------------------------------------------

struct RunArgs {
    std::string plan;
    std::string out;
    std::optional<std::size_t> threads;
};

int cmd_run(const RunArgs& a)
{
    const io::Stopwatch clock;
    ExperimentPlan plan = io::load_plan(a.plan);
    if (a.threads) plan.threads = *a.threads;
    const EvalReport report = run_experiment(plan);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    const fs::path results = dir / "results.csv";
    const fs::path summary = dir / "summary.json";
    {
        std::ofstream f = open_out(results);
        io::write_results(f, report.records);
    }
    open_out(summary) << io::summaries_to_json(report.summaries).dump(2) << '\n';

    io::RunManifest manifest;
    manifest.command = "run";
    manifest.config = io::plan_to_json(plan);
    manifest.seed = plan.seed;
    finish_manifest(manifest, dir / "manifest.json", {results, summary}, {a.plan}, clock);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Risk-controlling threshold selection on loss matrices"};
    app.require_subcommand(1);

    CorrectArgs correct;
    auto* c = app.add_subcommand("correct", "Tabulate finite-sample corrections over (m, n, sigma)");
    c->add_option("--kind", correct.kind, "hoeffding | bernstein | empirical-bernstein | min-combined")
        ->capture_default_str();
    c->add_option("--m", correct.ms, "Grid sizes (comma separated)")->required()->delimiter(',');
    c->add_option("--n", correct.ns, "Calibration sizes (comma separated)")->required()->delimiter(',');
    c->add_option("--B", correct.bound, "Loss bound")->capture_default_str();
    c->add_option("--sigma", correct.sigmas, "sigma_max or sigma_hat values (comma separated)")->delimiter(',');
    c->add_option("--delta", correct.delta, "Failure probability for empirical Bernstein")->capture_default_str();
    c->add_option("--out", correct.out, "Write the table here instead of stdout");

    SelectArgs sel;
    auto* s = app.add_subcommand("select", "Select a threshold from a loss-matrix CSV");
    s->add_option("--input", sel.input, "Loss-matrix CSV")->required();
    s->add_option("--method", sel.method, "crc | crc-nm | loss-mono | risk-mono | crc-c | crc-nm-bernstein | "
                                          "crc-nm-empbern | crc-nm-min")
        ->required();
    s->add_option("--alpha", sel.alpha, "Target risk level")->required();
    s->add_option("--B", sel.bound, "Loss bound")->capture_default_str();
    s->add_option("--seed", sel.seed, "Master seed (crc-c bootstrap)");
    s->add_option("--sigma", sel.sigma, "sigma_max for crc-nm-bernstein");
    s->add_option("--delta", sel.delta, "Failure probability for empirical Bernstein")->capture_default_str();
    s->add_option("--resamples", sel.resamples, "Bootstrap resamples for crc-c")->capture_default_str();
    s->add_option("--percentile", sel.percentile, "Bootstrap percentile for crc-c")->capture_default_str();
    s->add_option("--out", sel.out, "Also write the JSON result (and a manifest) here");

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Write a seeded synthetic loss matrix");
    g->add_option("generator", gen.name,
                  "bump | counterexample | multilabel | oversize | minimax | monotone | lipschitz | bernoulli")
        ->required();
    g->add_option("--n", gen.n, "Rows (calibration rows for multilabel)")->capture_default_str();
    g->add_option("--m", gen.m, "Grid size");
    g->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
    g->add_option("--out", gen.out, "Output loss-matrix CSV")->required();
    g->add_option("--p", gen.p, "Loss probability (counterexample, bernoulli)")->capture_default_str();
    g->add_option("--alpha", gen.alpha, "Target level (counterexample, minimax, lipschitz)");
    g->add_option("--delta", gen.delta, "Minimax gap");
    g->add_option("--trial", gen.trial, "Trial index within the seeded stream")->capture_default_str();
    g->add_flag("--safe-last-column", gen.safe_last_column, "Minimax: zero-loss last column");
    g->add_option("--n-test", gen.n_test, "Multilabel test rows")->capture_default_str();
    g->add_option("--noise", gen.noise, "Multilabel logit noise sd");
    g->add_option("--reference-rows", gen.reference_rows, "Bump: rows behind the estimated true curve (0 skips)")
        ->capture_default_str();
    g->add_option("--variant", gen.variant, "Oversize: detection | classification")->capture_default_str();
    g->add_option("--gamma", gen.gamma, "Oversize penalty weight");
    g->add_option("--k0", gen.k0, "Oversize size threshold");
    g->add_option("--tau", gen.tau, "Oversize ramp width");
    g->add_option("--lipschitz", gen.lipschitz, "Lipschitz constant")->capture_default_str();
    g->add_option("--epsilon", gen.epsilon, "Lipschitz margin")->capture_default_str();

    CountsArgs counts;
    auto* k = app.add_subcommand("counts", "Build a detection loss matrix from count records");
    k->add_option("--records", counts.records, "CSV sample_id,lambda_index,n_matched,n_gt,set_size")->required();
    k->add_option("--grid", counts.grid, "CSV with header 'lambda'")->required();
    k->add_option("--gamma", counts.gamma)->capture_default_str();
    k->add_option("--k0", counts.k0)->capture_default_str();
    k->add_option("--tau", counts.tau)->capture_default_str();
    k->add_option("--out", counts.out, "Output loss-matrix CSV")->required();

    SimulateArgs sim;
    auto* x = app.add_subcommand("simulate-counterexample", "Phase table of the grid-resolution counterexample");
    x->add_option("--p", sim.p)->capture_default_str();
    x->add_option("--alpha", sim.alpha)->capture_default_str();
    x->add_option("--n", sim.ns, "Calibration sizes (comma separated)")->required()->delimiter(',');
    x->add_option("--m", sim.ms, "Grid sizes (comma separated)")->required()->delimiter(',');
    x->add_option("--trials", sim.trials, "Monte Carlo trials per cell (0: analytic only)")->capture_default_str();
    x->add_option("--seed", sim.seed)->capture_default_str();
    x->add_option("--out", sim.out, "Write the table here instead of stdout");

    RunArgs run;
    auto* r = app.add_subcommand("run", "Execute an experiment plan");
    r->add_option("--plan", run.plan, "Plan JSON")->required();
    r->add_option("--out", run.out, "Output directory")->required();
    r->add_option("--threads", run.threads, "Override the plan's worker threads");

    try {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (c->parsed()) return cmd_correct(correct);
        if (s->parsed()) return cmd_select(sel);
        if (g->parsed()) return cmd_generate(gen);
        if (k->parsed()) return cmd_counts(counts);
        if (x->parsed()) return cmd_simulate(sim);
        if (r->parsed()) return cmd_run(run);
    }
    catch (const std::exception& e) {
        std::cerr << "ncrc: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
