#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "ncrc/io.hpp"

using namespace ncrc;
using namespace ncrc::io;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int status = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const fs::path& cwd)
{
    const std::string cmd = "cd '" + cwd.string() + "' && '" NCRC_CLI_PATH "' " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path fresh_dir(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("ncrc_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void expect_manifest_valid(const fs::path& manifest_path)
{
    ASSERT_TRUE(fs::exists(manifest_path)) << manifest_path;
    std::ifstream in(manifest_path);
    const RunManifest m = manifest_from_json(json::parse(in));
    EXPECT_EQ(m.tool_version, tool_version);
    EXPECT_FALSE(m.outputs.empty());
    const auto problems = verify_manifest(m, manifest_path.parent_path());
    EXPECT_TRUE(problems.empty()) << problems.front();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream s(text);
    for (std::string l; std::getline(s, l);) out.push_back(l);
    return out;
}

} // namespace

TEST(Correct, TableOneColumn)
{
    const RunResult r = run_cli("correct --kind hoeffding --m 100 --n 1000,5000,10000,50000,100000 --B 1", ".");
    ASSERT_EQ(r.status, 0);
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0], "kind,m,n,bound,sigma,delta,amount,source");
    const double expect[] = {0.0563, 0.0252, 0.0178, 0.0080, 0.0056};
    for (std::size_t k = 0; k < 5; ++k) {
        const std::string amount = rows[k + 1].substr(0, rows[k + 1].rfind(','));
        EXPECT_NEAR(std::stod(amount.substr(amount.rfind(',') + 1)), expect[k], 5e-4) << rows[k + 1];
    }
}

TEST(Correct, BernsteinCellAndUsageErrors)
{
    const RunResult r = run_cli("correct --kind bernstein --m 200 --n 5000 --sigma 0.3", ".");
    ASSERT_EQ(r.status, 0);
    const std::string row = lines(r.out).at(1);
    const std::string head = row.substr(0, row.rfind(','));
    EXPECT_NEAR(std::stod(head.substr(head.rfind(',') + 1)), 0.015, 1e-3);
    EXPECT_NE(run_cli("correct --kind hoeffding --m 0 --n 10", ".").status, 0);
    EXPECT_NE(run_cli("correct --kind bernstein --m 10 --n 10", ".").status, 0);
    EXPECT_NE(run_cli("correct --kind nope --m 10 --n 10", ".").status, 0);
}

TEST(Generate, ByteIdenticalReruns)
{
    const fs::path dir = fresh_dir("determinism");
    ASSERT_EQ(run_cli("generate bump --n 100 --m 20 --seed 7 --reference-rows 5000 --out a.csv", dir).status, 0);
    ASSERT_EQ(run_cli("generate bump --n 100 --m 20 --seed 7 --reference-rows 5000 --out b.csv", dir).status, 0);
    EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
    EXPECT_EQ(slurp(dir / "a_truth.csv"), slurp(dir / "b_truth.csv"));
    expect_manifest_valid(dir / "a.csv.manifest.json");
}

TEST(Generate, CounterexampleShape)
{
    const fs::path dir = fresh_dir("counterexample");
    ASSERT_EQ(run_cli("generate counterexample --n 50 --m 10 --p 0.6 --alpha 0.3 --seed 1 --out c.csv", dir).status, 0);
    const LossMatrix mat = read_loss_matrix_file(dir / "c.csv", 1.0);
    EXPECT_EQ(mat.rows(), 51u);
    EXPECT_EQ(mat.cols(), 11u);
    for (double v : mat.entries()) ASSERT_TRUE(v == 0.0 || v == 1.0);
    expect_manifest_valid(dir / "c.csv.manifest.json");
}

TEST(Generate, MultilabelEntriesInUnitInterval)
{
    const fs::path dir = fresh_dir("multilabel");
    ASSERT_EQ(run_cli("generate multilabel --n 200 --n-test 50 --m 25 --seed 3 --out ml.csv", dir).status, 0);
    const LossMatrix mat = read_loss_matrix_file(dir / "ml.csv", 1.0);
    EXPECT_EQ(mat.rows(), 200u);
    for (double v : mat.entries()) ASSERT_TRUE(v >= 0.0 && v <= 1.0);
    EXPECT_TRUE(fs::exists(dir / "ml_sizes.csv"));
    EXPECT_TRUE(fs::exists(dir / "ml_test.csv"));
    expect_manifest_valid(dir / "ml.csv.manifest.json");
}

TEST(Generate, EveryGeneratorRuns)
{
    const fs::path dir = fresh_dir("all");
    for (const std::string g : {"oversize", "minimax --alpha 0.2", "monotone", "lipschitz", "bernoulli"}) {
        EXPECT_EQ(run_cli("generate " + g + " --n 30 --m 12 --seed 2 --out g.csv", dir).status, 0) << g;
        expect_manifest_valid(dir / "g.csv.manifest.json");
    }
    EXPECT_NE(run_cli("generate nope --n 30 --out g.csv", dir).status, 0);
}

TEST(Select, RoundTripMatchesInProcessBitExactly)
{
    const fs::path dir = fresh_dir("roundtrip");
    ASSERT_EQ(run_cli("generate bump --n 400 --m 30 --seed 11 --reference-rows 0 --out m.csv", dir).status, 0);
    BumpConfig c;
    c.n = 400;
    c.m = 30;
    c.seed = 11;
    c.reference_rows = 0;
    const LossMatrix in_process = gen_bump(c).losses;
    EXPECT_EQ(read_loss_matrix_file(dir / "m.csv", 1.0), in_process);

    for (const std::string method : {"crc", "crc-nm", "loss-mono", "risk-mono", "crc-c", "crc-nm-empbern"}) {
        const RunResult r = run_cli("select --input m.csv --method " + method + " --alpha 0.2 --seed 5", dir);
        ASSERT_EQ(r.status, 0) << method;
        const json j = json::parse(r.out);
        MethodConfig mc;
        mc.method = parse_method(method);
        mc.alpha = 0.2;
        const SelectOutcome expect = select_detailed(in_process, mc, 5);
        EXPECT_EQ(j.at("index").get<std::size_t>(), expect.selection.index) << method;
        EXPECT_EQ(j.at("lambda").get<double>(), expect.selection.lambda) << method;
        EXPECT_EQ(j.at("effective_level").get<double>(), expect.selection.effective_level) << method;
        EXPECT_EQ(j.at("feasible").get<bool>(), expect.selection.feasible) << method;
    }
}

TEST(Select, AllZeroMatrixAndOutOfRangeLoss)
{
    const fs::path dir = fresh_dir("select");
    {
        std::ofstream zero(dir / "zero.csv");
        zero << "lambda,0,0.5,1\n";
        for (int i = 0; i < 10; ++i) zero << i << ",0,0,0\n";
        std::ofstream(dir / "bad.csv") << "lambda,0,1\n0,0.5,0\n1,1.5,0\n";
    }
    const RunResult r = run_cli("select --input zero.csv --method crc --alpha 0.1 --out sel.json", dir);
    ASSERT_EQ(r.status, 0);
    std::ifstream in(dir / "sel.json");
    EXPECT_EQ(json::parse(in).at("index"), 0);
    expect_manifest_valid(dir / "sel.json.manifest.json");

    const std::string cmd = "cd '" + dir.string() + "' && '" NCRC_CLI_PATH
                            "' select --input bad.csv --method crc --alpha 0.1 2>&1 >/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    ASSERT_NE(pipe, nullptr);
    std::array<char, 1024> buf{};
    const std::size_t got = fread(buf.data(), 1, buf.size(), pipe);
    const int status = pclose(pipe);
    const std::string err(buf.data(), got);
    EXPECT_NE(WEXITSTATUS(status), 0);
    EXPECT_NE(err.find("line 3, column 2"), std::string::npos) << err;
}

TEST(Select, BumpFixtureEffectiveLevel)
{
    const fs::path dir = fresh_dir("bump_fixture");
    ASSERT_EQ(run_cli("generate bump --n 10000 --m 100 --seed 2024 --reference-rows 0 --out bump.csv", dir).status, 0);
    const RunResult r = run_cli("select --input bump.csv --method crc-nm --alpha 0.1", dir);
    ASSERT_EQ(r.status, 0);
    const json j = json::parse(r.out);
    EXPECT_DOUBLE_EQ(j.at("effective_level").get<double>(), 0.1 - hoeffding_correction(100, 10000, 1.0).amount);
    EXPECT_NEAR(j.at("effective_level").get<double>(), 0.082, 1e-3);
    EXPECT_EQ(j.at("correction").at("source"), "hoeffding");
}

TEST(SimulateCounterexample, PhaseTable)
{
    const fs::path dir = fresh_dir("simulate");
    const RunResult r =
        run_cli("simulate-counterexample --p 0.4 --alpha 0.2 --n 10,2000 --m 1000 --trials 2000 --seed 3 --out phase.csv",
                dir);
    ASSERT_EQ(r.status, 0);
    const auto rows = lines(slurp(dir / "phase.csv"));
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_NE(rows[1].find(",false,true"), std::string::npos) << rows[1];
    EXPECT_NE(rows[2].find(",true,true"), std::string::npos) << rows[2];
    expect_manifest_valid(dir / "phase.csv.manifest.json");

    const RunResult a = run_cli("simulate-counterexample --p 0.4 --alpha 0.2 --n 10 --m 1000 --trials 0 --seed 1", dir);
    const RunResult b = run_cli("simulate-counterexample --p 0.4 --alpha 0.2 --n 10 --m 1000 --trials 0 --seed 9", dir);
    ASSERT_EQ(a.status, 0);
    EXPECT_EQ(a.out, b.out);
    EXPECT_NE(lines(a.out).at(1).find(",,,"), std::string::npos);
}

TEST(Run, ShippedPlanIsDeterministicAndManifested)
{
    const fs::path dir = fresh_dir("run");
    {
        std::ofstream(dir / "plan.json") << R"({"seed": 5, "repetitions": 6, "n_cal": 100, "n_test": 40,
            "alpha": 0.2, "generator": {"name": "monotone", "m": 21}, "methods": ["crc", "crc-nm", "risk-mono"]})";
    }
    ASSERT_EQ(run_cli("run --plan plan.json --out a", dir).status, 0);
    ASSERT_EQ(run_cli("run --plan plan.json --out b --threads 3", dir).status, 0);
    EXPECT_EQ(slurp(dir / "a" / "results.csv"), slurp(dir / "b" / "results.csv"));
    expect_manifest_valid(dir / "a" / "manifest.json");
    std::ifstream in(dir / "a" / "summary.json");
    const json summary = json::parse(in);
    EXPECT_TRUE(summary.contains("crc"));
    EXPECT_TRUE(summary.at("crc-nm").contains("violation_rate"));
    std::istringstream results(slurp(dir / "a" / "results.csv"));
    EXPECT_EQ(read_results(results).size(), 18u);

    EXPECT_NE(run_cli("run --plan missing.json --out c", dir).status, 0);
}

TEST(Run, RepositoryPlansParse)
{
    const fs::path plans = fs::path(NCRC_SOURCE_DIR) / "plans";
    std::size_t count = 0;
    for (const auto& entry : fs::directory_iterator(plans)) {
        if (entry.path().extension() != ".json") continue;
        EXPECT_NO_THROW(load_plan(entry.path())) << entry.path();
        ++count;
    }
    EXPECT_GE(count, 1u);
}
