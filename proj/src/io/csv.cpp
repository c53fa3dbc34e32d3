#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ncrc/io.hpp"

namespace ncrc::io {

std::string format_double(double value)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

namespace {

std::vector<std::string> split_fields(const std::string& line)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(line.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

// Reads the next non-empty line with any trailing CR removed.
bool next_line(std::istream& in, std::string& line, std::size_t& line_no)
{
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) return true;
    }
    return false;
}

class Located {
public:
    Located(const std::string& source, std::size_t line) : source_(source), line_(line) {}

    [[noreturn]] void fail(std::size_t column, const std::string& what) const
    {
        throw InvalidInput(source_ + ": line " + std::to_string(line_) + ", column " + std::to_string(column) + ": "
                           + what);
    }

    double number(const std::string& field, std::size_t column) const
    {
        double v = 0.0;
        const char* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, v);
        if (ec != std::errc() || ptr != end || field.empty()) fail(column, "'" + field + "' is not a number");
        if (!std::isfinite(v)) fail(column, "value is not finite");
        return v;
    }

    long long integer(const std::string& field, std::size_t column) const
    {
        long long v = 0;
        const char* end = field.data() + field.size();
        const auto [ptr, ec] = std::from_chars(field.data(), end, v);
        if (ec != std::errc() || ptr != end || field.empty()) fail(column, "'" + field + "' is not an integer");
        return v;
    }

private:
    const std::string& source_;
    std::size_t line_;
};

void expect_header(const std::string& line, std::size_t line_no, const std::string& expected,
                   const std::string& source)
{
    if (line != expected)
        throw InvalidInput(source + ": line " + std::to_string(line_no) + ": expected header '" + expected + "'");
}

} // namespace

void write_loss_matrix(std::ostream& out, const LossMatrix& matrix)
{
    out << "lambda";
    for (double l : matrix.grid().values()) out << ',' << format_double(l);
    out << '\n';
    for (std::size_t i = 0; i < matrix.rows(); ++i) {
        out << i;
        for (double v : matrix.row(i)) out << ',' << format_double(v);
        out << '\n';
    }
}

LossMatrix read_loss_matrix(std::istream& in, double bound, const std::string& source)
{
    if (!(bound > 0.0) || !std::isfinite(bound)) throw ConfigError("bound must be positive");
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw InvalidInput(source + ": empty loss matrix file");
    const auto header = split_fields(line);
    const Located head(source, line_no);
    if (header.front() != "lambda") head.fail(1, "header must start with 'lambda'");
    if (header.size() < 2) head.fail(1, "header lists no lambda values");
    std::vector<double> grid;
    for (std::size_t c = 1; c < header.size(); ++c) grid.push_back(head.number(header[c], c + 1));
    for (std::size_t c = 1; c < grid.size(); ++c)
        if (!(grid[c] > grid[c - 1])) head.fail(c + 2, "lambda values must be strictly increasing");

    const std::size_t m = grid.size();
    std::vector<double> entries;
    std::size_t rows = 0;
    while (next_line(in, line, line_no)) {
        const auto fields = split_fields(line);
        const Located at(source, line_no);
        if (fields.size() != m + 1)
            at.fail(fields.size() > m + 1 ? m + 2 : fields.size() + 1,
                    "expected " + std::to_string(m + 1) + " fields, found " + std::to_string(fields.size()));
        if (fields.front().empty()) at.fail(1, "empty sample id");
        for (std::size_t c = 1; c <= m; ++c) {
            const double v = at.number(fields[c], c + 1);
            if (v < 0.0 || v > bound)
                at.fail(c + 1, "loss " + fields[c] + " (sample " + fields.front() + ", lambda " + header[c]
                                   + ") is outside [0, " + format_double(bound) + "]");
            entries.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw InvalidInput(source + ": loss matrix has no rows");
    return LossMatrix(Grid(std::move(grid)), bound, rows, std::move(entries));
}

LossMatrix read_loss_matrix_file(const std::filesystem::path& path, double bound)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path.string());
    return read_loss_matrix(in, bound, path.string());
}

void write_truth_curve(std::ostream& out, const ReferenceCurve& truth)
{
    out << "lambda,risk,estimated\n";
    const char* flag = truth.estimated ? "true" : "false";
    for (std::size_t j = 0; j < truth.curve.size(); ++j)
        out << format_double(truth.curve.grid()[j]) << ',' << format_double(truth.curve[j]) << ',' << flag << '\n';
}

void write_set_sizes(std::ostream& out, const Grid& grid, const SetSizeMatrix& sizes)
{
    out << "lambda";
    for (double l : grid.values()) out << ',' << format_double(l);
    out << '\n';
    for (std::size_t i = 0; i < sizes.rows; ++i) {
        out << i;
        for (std::size_t j = 0; j < sizes.cols; ++j) out << ',' << sizes(i, j);
        out << '\n';
    }
}

void write_results(std::ostream& out, const std::vector<RepetitionRecord>& records)
{
    out << results_header << '\n';
    for (const RepetitionRecord& r : records) {
        out << r.method << ',' << r.repetition << ',' << r.selected_index << ',' << format_double(r.selected_lambda)
            << ',' << format_double(r.effective_level) << ',' << (r.feasible ? "true" : "false") << ','
            << format_double(r.test_risk) << ',';
        if (r.set_size) out << format_double(*r.set_size);
        out << '\n';
    }
}

std::vector<RepetitionRecord> read_results(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw InvalidInput(source + ": empty results file");
    expect_header(line, line_no, results_header, source);
    std::vector<RepetitionRecord> out;
    while (next_line(in, line, line_no)) {
        const auto f = split_fields(line);
        const Located at(source, line_no);
        if (f.size() != 8) at.fail(1, "expected 8 fields, found " + std::to_string(f.size()));
        RepetitionRecord r;
        r.method = f[0];
        r.repetition = static_cast<std::size_t>(at.integer(f[1], 2));
        r.selected_index = static_cast<std::size_t>(at.integer(f[2], 3));
        r.selected_lambda = at.number(f[3], 4);
        r.effective_level = at.number(f[4], 5);
        if (f[5] != "true" && f[5] != "false") at.fail(6, "feasible must be true or false");
        r.feasible = f[5] == "true";
        r.test_risk = at.number(f[6], 7);
        if (!f[7].empty()) r.set_size = at.number(f[7], 8);
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<CountRecord> read_count_records(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw InvalidInput(source + ": empty count-record file");
    expect_header(line, line_no, "sample_id,lambda_index,n_matched,n_gt,set_size", source);
    std::vector<CountRecord> out;
    while (next_line(in, line, line_no)) {
        const auto f = split_fields(line);
        const Located at(source, line_no);
        if (f.size() != 5) at.fail(1, "expected 5 fields, found " + std::to_string(f.size()));
        long long v[5];
        for (std::size_t c = 0; c < 5; ++c) {
            v[c] = at.integer(f[c], c + 1);
            if (v[c] < 0) at.fail(c + 1, "value must be non-negative");
        }
        out.push_back({static_cast<std::size_t>(v[0]), static_cast<std::size_t>(v[1]), static_cast<int>(v[2]),
                       static_cast<int>(v[3]), static_cast<int>(v[4])});
    }
    return out;
}

Grid read_grid(std::istream& in, const std::string& source)
{
    std::string line;
    std::size_t line_no = 0;
    if (!next_line(in, line, line_no)) throw InvalidInput(source + ": empty grid file");
    expect_header(line, line_no, "lambda", source);
    std::vector<double> values;
    while (next_line(in, line, line_no)) values.push_back(Located(source, line_no).number(line, 1));
    if (values.empty()) throw InvalidInput(source + ": grid file lists no values");
    try {
        return Grid(std::move(values));
    }
    catch (const InvalidInput& e) {
        throw InvalidInput(source + ": " + e.what());
    }
}

void write_phase_table(std::ostream& out, const std::vector<CounterexampleCell>& cells)
{
    out << "n,m,analytic_risk,analytic_se,mc_risk,mc_se,control_bound,failure_bound,controlled,agrees\n";
    for (const CounterexampleCell& c : cells) {
        out << c.n << ',' << c.m << ',' << format_double(c.analytic_risk) << ',' << format_double(c.analytic_se)
            << ',';
        if (c.mc_risk) out << format_double(*c.mc_risk);
        out << ',';
        if (c.mc_se) out << format_double(*c.mc_se);
        out << ',' << format_double(c.control_bound) << ',' << format_double(c.failure_bound) << ','
            << (c.controlled ? "true" : "false") << ',';
        if (c.agrees) out << (*c.agrees ? "true" : "false");
        out << '\n';
    }
}

} // namespace ncrc::io
