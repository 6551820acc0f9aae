#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "atsh/integrator.hpp"
#include "atsh/problems.hpp"
#include "atsh/tableau.hpp"

namespace atsh {

// One efficiency-curve point. Failed cells (blow-up, singular coefficients)
// keep their row with max_global_error = nan and the cause in reason; all
// other rows have an empty reason.
struct EfficiencyRecord {
    std::string method;
    std::string problem;
    double h = 0.0;
    long long steps = 0;
    long long g_evals = 0;
    double max_global_error = 0.0;
    double wall_time_s = 0.0;
    std::string reason;
};

// Stepsizes h = base * 2^-j for j in [j_lo, j_hi].
struct StepRange {
    double base = 1.0;
    int j_lo = 0;
    int j_hi = 0;
};

struct SweepConfig {
    std::vector<MethodId> methods;     // empty list runs nothing
    std::vector<BenchmarkId> problems; // empty list runs nothing
    // Global override; unset keeps the per-(method, problem) defaults.
    std::optional<StepRange> range;
    // Unset picks per problem: Oracle where only a reference trajectory
    // exists (problem3, cubic), Exact elsewhere.
    std::optional<StarterMode> starter;
    bool count_starter = false; // add the starter's g evaluations to the column
    bool timing = false;        // off writes wall_time_s = 0 so output is reproducible
    int workers = 0;            // concurrent cells, 0 = library default
    std::string output;         // CSV path for the CLI, empty = stdout
};

// The benchmark stepsize list each method class runs by default.
StepRange default_range(MethodId method, BenchmarkId problem);

// A config with every method, the four benchmark problems and defaults
// everywhere else.
SweepConfig default_config();

StarterMode starter_for(const SweepConfig& config, BenchmarkId problem);

// Key = value text, one pair per line, # comments. Keys: methods, problems,
// j_range (a..b), base, starter, count_starter, timing, workers, output.
// Throws ConfigError on anything unrecognized.
SweepConfig parse_sweep_config(std::istream& in);

// One key = value assignment (shared by the file parser and flag overrides).
void apply_config_kv(SweepConfig& config, std::string_view key, std::string_view value);

// Runs every (method, problem, h) cell, concurrently up to config.workers,
// and returns records sorted by method name, problem name, then h falling,
// independent of execution order. Cell failures become reason rows, not
// exceptions. Deterministic for fixed config when timing is off.
std::vector<EfficiencyRecord> run_sweep(const SweepConfig& config);

// Header method,problem,h,steps,g_evals,max_global_error,wall_time_s, one
// row per record with 17 significant digits, and after each failed row a
// comment line `# reason: <code>`.
void write_records_csv(const std::vector<EfficiencyRecord>& records, std::ostream& out);

// Inverse of write_records_csv including the reason comments.
std::vector<EfficiencyRecord> parse_records_csv(std::istream& in);

// Standalone python script drawing log10(max_global_error) against g_evals,
// one panel per problem, one curve per method, reading csv_path (kept
// relative) at plot time. Requires at least one record.
void write_plot_script(const std::vector<EfficiencyRecord>& records,
                       const std::string& csv_path, std::ostream& out);

} // namespace atsh
