#pragma once

// File formats shared by the command-line tool and downstream plotting.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncrc/generators.hpp"
#include "ncrc/harness.hpp"

namespace ncrc::io {

using nlohmann::json;

/// Shortest text that round-trips the double (17 significant digits).
std::string format_double(double value);

// Loss matrix CSV: header `lambda,<l_1>,...,<l_m>`, then `<sample_id>,<L_i(l_1)>,...`.
void write_loss_matrix(std::ostream& out, const LossMatrix& matrix);
/// Parses a loss-matrix CSV. Errors name the line and column of the offending
/// cell; `source` prefixes messages (usually the file path).
LossMatrix read_loss_matrix(std::istream& in, double bound, const std::string& source = "input");
LossMatrix read_loss_matrix_file(const std::filesystem::path& path, double bound);

/// `lambda,risk,estimated`.
void write_truth_curve(std::ostream& out, const ReferenceCurve& truth);

/// Prediction-set sizes in loss-matrix layout.
void write_set_sizes(std::ostream& out, const Grid& grid, const SetSizeMatrix& sizes);

inline constexpr const char* results_header =
    "method,repetition,selected_index,selected_lambda,effective_level,feasible,test_risk,set_size";
void write_results(std::ostream& out, const std::vector<RepetitionRecord>& records);
std::vector<RepetitionRecord> read_results(std::istream& in, const std::string& source = "input");

/// Count records: `sample_id,lambda_index,n_matched,n_gt,set_size`.
std::vector<CountRecord> read_count_records(std::istream& in, const std::string& source = "input");
/// Grid file: header `lambda`, one value per line.
Grid read_grid(std::istream& in, const std::string& source = "input");

void write_phase_table(std::ostream& out, const std::vector<CounterexampleCell>& cells);

// ---------------------------------------------------------------------------
// Experiment plans and summaries

/// Builds an ExperimentPlan from its JSON form. Relative pool paths resolve
/// against `base_dir`. Unknown keys are rejected.
ExperimentPlan parse_plan(const json& plan, const std::filesystem::path& base_dir);
ExperimentPlan load_plan(const std::filesystem::path& path);

/// Generator parameters by name, as accepted inside a plan's "generator" object.
GeneratorSpec parse_generator(const json& spec);
json generator_to_json(const GeneratorSpec& spec);

/// Resolved plan (generator parameters, method corrections) for manifests.
json plan_to_json(const ExperimentPlan& plan);

/// `{ "<method>": {mean_risk, violation_rate, risk_quantiles, mean_set_size, ...} }`.
json summaries_to_json(const std::vector<MethodSummary>& summaries);

json selection_to_json(const SelectOutcome& outcome);
json correction_to_json(const CorrectionValue& value);

// ---------------------------------------------------------------------------
// Run manifest

struct FileDigest {
    std::string path;
    std::string sha256;
};

struct RunManifest {
    std::string tool_version;
    std::string command;
    json config;
    std::uint64_t seed = 0;
    std::vector<FileDigest> inputs;
    std::vector<FileDigest> outputs;
    double wall_clock_seconds = 0.0;
};

inline constexpr const char* tool_version = "0.1.0";

std::string sha256_file(const std::filesystem::path& path);
FileDigest digest(const std::filesystem::path& path);

json manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const json& value);
void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

/// Recomputes every listed digest; returns one message per mismatch or missing file.
/// Relative paths resolve against `base_dir`.
std::vector<std::string> verify_manifest(const RunManifest& manifest, const std::filesystem::path& base_dir);

/// Starts timing at construction.
class Stopwatch {
public:
    Stopwatch() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const
    {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

} // namespace ncrc::io
