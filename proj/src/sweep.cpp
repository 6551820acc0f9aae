#include "atsh/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <string>

#include "atsh/errors.hpp"

namespace atsh {

namespace {

constexpr double kPi = 3.14159265358979323846;

constexpr const char* kCsvHeader =
    "method,problem,h,steps,g_evals,max_global_error,wall_time_s";

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    while (true) {
        const size_t pos = s.find(sep);
        if (pos == std::string_view::npos) {
            parts.push_back(s);
            return parts;
        }
        parts.push_back(s.substr(0, pos));
        s.remove_prefix(pos + 1);
    }
}

bool parse_bool(std::string_view v) {
    if (v == "true" || v == "yes" || v == "on" || v == "1")
        return true;
    if (v == "false" || v == "no" || v == "off" || v == "0")
        return false;
    throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

int parse_int(std::string_view v) {
    int out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError("expected an integer, got '" + std::string(v) + "'");
    return out;
}

double parse_double(std::string_view v, const char* what) {
    const std::string tmp(v);
    char* end = nullptr;
    const double out = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty())
        throw ConfigError(std::string(what) + ": expected a number, got '" + tmp + "'");
    return out;
}

StepRange& ensure_range(SweepConfig& cfg) {
    if (!cfg.range)
        cfg.range = StepRange{1.0, 0, 4};
    return *cfg.range;
}

std::string reason_code(const std::exception& e) {
    if (dynamic_cast<const NonFiniteState*>(&e))
        return "blow-up";
    if (dynamic_cast<const SingularCoefficient*>(&e))
        return "singular-coefficient";
    if (dynamic_cast<const OracleNotConverged*>(&e))
        return "oracle-not-converged";
    if (dynamic_cast<const OutsideDomain*>(&e))
        return "outside-domain";
    if (dynamic_cast<const InvalidParams*>(&e))
        return "invalid-params";
    return "error";
}

} // namespace

StepRange default_range(MethodId method, BenchmarkId problem) {
    const bool classical = is_classical(method);
    switch (problem) {
    case BenchmarkId::Inhomogeneous:
        return classical ? StepRange{1.0, 3, 7} : StepRange{1.0, 1, 5};
    case BenchmarkId::StiefelBettis:
        if (classical)
            return {1.0, 0, 4};
        return method == MethodId::Atsh5Phase8 ? StepRange{1.0, -1, 3}
                                               : StepRange{1.0, -2, 2};
    case BenchmarkId::Satellite: {
        const double base = 1.0 - kPi / 100.0;
        return classical ? StepRange{base, 0, 4} : StepRange{base, -2, 2};
    }
    case BenchmarkId::FrancoSystem:
        return {1.0, 2, 6};
    case BenchmarkId::CubicOscillator:
    case BenchmarkId::HarmonicPure:
        return {0.1, 0, 4};
    }
    throw InvalidParams("unknown benchmark id");
}

SweepConfig default_config() {
    SweepConfig cfg;
    cfg.methods = all_methods();
    cfg.problems = {BenchmarkId::Inhomogeneous, BenchmarkId::StiefelBettis,
                    BenchmarkId::Satellite, BenchmarkId::FrancoSystem};
    return cfg;
}

StarterMode starter_for(const SweepConfig& config, BenchmarkId problem) {
    if (config.starter)
        return *config.starter;
    return (problem == BenchmarkId::Satellite || problem == BenchmarkId::CubicOscillator)
               ? StarterMode::Oracle
               : StarterMode::Exact;
}

void apply_config_kv(SweepConfig& config, std::string_view key, std::string_view value) {
    const std::string k{trim(key)};
    const std::string v{trim(value)};
    try {
        if (k == "methods") {
            config.methods.clear();
            if (v == "all" || v == "adapted" || v == "classical") {
                for (const MethodId m : all_methods())
                    if (v == "all" || is_classical(m) == (v == "classical"))
                        config.methods.push_back(m);
            } else {
                for (const std::string_view item : split(v, ',')) {
                    const MethodId m = method_from_name(trim(item));
                    if (std::find(config.methods.begin(), config.methods.end(), m) ==
                        config.methods.end())
                        config.methods.push_back(m);
                }
            }
        } else if (k == "problems") {
            config.problems.clear();
            if (v == "all") {
                config.problems = all_benchmarks();
            } else {
                for (const std::string_view item : split(v, ',')) {
                    const BenchmarkId p = benchmark_from_name(trim(item));
                    if (std::find(config.problems.begin(), config.problems.end(), p) ==
                        config.problems.end())
                        config.problems.push_back(p);
                }
            }
        } else if (k == "j_range") {
            const size_t dots = v.find("..");
            if (dots == std::string::npos)
                throw ConfigError("j_range must look like a..b");
            StepRange& r = ensure_range(config);
            r.j_lo = parse_int(trim(std::string_view(v).substr(0, dots)));
            r.j_hi = parse_int(trim(std::string_view(v).substr(dots + 2)));
            if (r.j_lo > r.j_hi)
                throw ConfigError("j_range is empty");
        } else if (k == "base") {
            const double b = parse_double(v, "base");
            if (!(b > 0.0) || !std::isfinite(b))
                throw ConfigError("base must be positive and finite");
            ensure_range(config).base = b;
        } else if (k == "starter") {
            if (v == "auto")
                config.starter.reset();
            else if (v == "exact")
                config.starter = StarterMode::Exact;
            else if (v == "series")
                config.starter = StarterMode::Series;
            else if (v == "oracle")
                config.starter = StarterMode::Oracle;
            else
                throw ConfigError("starter must be exact, series, oracle or auto");
        } else if (k == "count_starter") {
            config.count_starter = parse_bool(v);
        } else if (k == "timing") {
            config.timing = parse_bool(v);
        } else if (k == "workers") {
            const int w = parse_int(v);
            if (w < 0)
                throw ConfigError("workers must be nonnegative");
            config.workers = w;
        } else if (k == "output") {
            config.output = v;
        } else {
            throw ConfigError("unknown config key: " + k);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(k + ": " + e.what());
    }
}

SweepConfig parse_sweep_config(std::istream& in) {
    SweepConfig cfg = default_config();
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        const std::string_view body = trim(line);
        if (body.empty())
            continue;
        const size_t eq = body.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        try {
            apply_config_kv(cfg, body.substr(0, eq), body.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return cfg;
}

std::vector<EfficiencyRecord> run_sweep(const SweepConfig& config) {
    if (config.range) {
        const StepRange& r = *config.range;
        if (!(r.base > 0.0) || !std::isfinite(r.base) || r.j_lo > r.j_hi)
            throw ConfigError("stepsize range must have base > 0 and j_lo <= j_hi");
    }
    if (config.workers < 0)
        throw ConfigError("workers must be nonnegative");

    struct Cell {
        MethodId m;
        BenchmarkId p;
        double h;
    };
    std::vector<Cell> cells;
    for (const MethodId m : config.methods)
        for (const BenchmarkId p : config.problems) {
            const StepRange r = config.range.value_or(default_range(m, p));
            for (int j = r.j_lo; j <= r.j_hi; ++j)
                cells.push_back({m, p, std::ldexp(r.base, -j)});
        }

    std::vector<EfficiencyRecord> records(cells.size());
    const auto run_cell = [&](size_t i) {
        const Cell& cell = cells[i];
        EfficiencyRecord& out = records[i];
        out.method = method_info(cell.m).name;
        out.problem = std::string(benchmark_name(cell.p));
        out.h = cell.h;
        const Problem prob = make_problem(cell.p);
        try {
            const auto t0 = std::chrono::steady_clock::now();
            const IntegrationResult res =
                integrate(cell.m, prob, cell.h, starter_for(config, cell.p));
            if (config.timing)
                out.wall_time_s =
                    std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                        .count();
            out.steps = static_cast<long long>(res.xs.size()) - 1;
            out.g_evals = res.g_evals + (config.count_starter ? res.starter_g_evals : 0);
            if (res.max_global_error) {
                out.max_global_error = *res.max_global_error;
            } else {
                out.max_global_error = std::nan("");
                out.reason = "no-reference";
            }
        } catch (const std::exception& e) {
            out.steps = std::llround((prob.x_end - prob.x0) / cell.h);
            out.g_evals = 0;
            out.wall_time_s = 0.0;
            out.max_global_error = std::nan("");
            out.reason = reason_code(e);
        }
    };

    const long long n = static_cast<long long>(cells.size());
    if (config.workers > 0) {
#pragma omp parallel for schedule(dynamic) num_threads(config.workers)
        for (long long i = 0; i < n; ++i)
            run_cell(static_cast<size_t>(i));
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long long i = 0; i < n; ++i)
            run_cell(static_cast<size_t>(i));
    }

    std::sort(records.begin(), records.end(),
              [](const EfficiencyRecord& a, const EfficiencyRecord& b) {
                  if (a.method != b.method)
                      return a.method < b.method;
                  if (a.problem != b.problem)
                      return a.problem < b.problem;
                  return a.h > b.h;
              });
    return records;
}

void write_records_csv(const std::vector<EfficiencyRecord>& records, std::ostream& out) {
    out << kCsvHeader << '\n';
    char buf[416];
    for (const EfficiencyRecord& r : records) {
        std::snprintf(buf, sizeof buf, "%s,%s,%.17g,%lld,%lld,%.17g,%.17g\n",
                      r.method.c_str(), r.problem.c_str(), r.h, r.steps, r.g_evals,
                      r.max_global_error, r.wall_time_s);
        out << buf;
        if (!r.reason.empty())
            out << "# reason: " << r.reason << '\n';
    }
    if (!out)
        throw IoError("failed writing efficiency csv");
}

std::vector<EfficiencyRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != kCsvHeader)
        throw IoError("efficiency csv: missing or unexpected header");
    std::vector<EfficiencyRecord> records;
    size_t lineno = 1;
    const auto bad = [&lineno](const std::string& why) {
        return IoError("efficiency csv line " + std::to_string(lineno) + ": " + why);
    };
    const auto number = [&bad](std::string_view f, const char* what) {
        const std::string tmp(f);
        char* end = nullptr;
        const double v = std::strtod(tmp.c_str(), &end);
        if (tmp.empty() || end != tmp.c_str() + tmp.size())
            throw bad(std::string(what) + " is not a number");
        return v;
    };
    const auto count = [&bad](std::string_view f, const char* what) {
        long long v = 0;
        const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
        if (ec != std::errc() || ptr != f.data() + f.size())
            throw bad(std::string(what) + " is not an integer");
        return v;
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        if (line[0] == '#') {
            constexpr std::string_view tag = "# reason: ";
            if (line.size() > tag.size() && std::string_view(line).substr(0, tag.size()) == tag &&
                !records.empty())
                records.back().reason = line.substr(tag.size());
            continue;
        }
        const std::vector<std::string_view> f = split(line, ',');
        if (f.size() != 7)
            throw bad("expected 7 fields");
        EfficiencyRecord r;
        r.method = std::string(f[0]);
        r.problem = std::string(f[1]);
        r.h = number(f[2], "h");
        r.steps = count(f[3], "steps");
        r.g_evals = count(f[4], "g_evals");
        r.max_global_error = number(f[5], "max_global_error");
        r.wall_time_s = number(f[6], "wall_time_s");
        records.push_back(std::move(r));
    }
    return records;
}

void write_plot_script(const std::vector<EfficiencyRecord>& records,
                       const std::string& csv_path, std::ostream& out) {
    if (records.empty())
        throw InvalidParams("write_plot_script: no records to draw");
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Efficiency curves: log10(max global error) against the number of\n"
           "g evaluations, one panel per problem, one curve per method.\"\"\"\n"
           "import csv\n"
           "import math\n"
           "\n"
           "CSV = \""
        << csv_path << "\"\n";
    out << R"PY(
rows = []
with open(CSV, newline="") as f:
    for row in csv.reader(line for line in f if not line.startswith("#")):
        if not row or row[0] == "method":
            continue
        err = float(row[5])
        if math.isnan(err) or err <= 0.0:
            continue
        rows.append((row[1], row[0], int(row[4]), err))

problems = sorted({r[0] for r in rows})
methods = sorted({r[1] for r in rows})

import matplotlib.pyplot as plt

fig, axes = plt.subplots(1, max(len(problems), 1),
                         figsize=(5.0 * max(len(problems), 1), 4.0), squeeze=False)
for ax, prob in zip(axes[0], problems):
    for m in methods:
        pts = sorted((g, e) for p, mm, g, e in rows if p == prob and mm == m)
        if not pts:
            continue
        ax.plot([g for g, _ in pts], [math.log10(e) for _, e in pts],
                marker="o", markersize=3, label=m)
    ax.set_title(prob)
    ax.set_xlabel("g evaluations")
    ax.set_ylabel("log10(max global error)")
    ax.legend(fontsize=7)
fig.tight_layout()
png = CSV.rsplit(".", 1)[0] + ".png"
fig.savefig(png, dpi=150)
print(png)
)PY";
    if (!out)
        throw IoError("failed writing plot script");
}

} // namespace atsh
