#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atsh/errors.hpp"
#include "atsh/integrator.hpp"
#include "atsh/order_conditions.hpp"
#include "atsh/phase.hpp"
#include "atsh/problems.hpp"
#include "atsh/stability.hpp"
#include "atsh/sweep.hpp"
#include "atsh/tableau.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;

// exit codes: 0 success, 1 failed computation or error rows, 2 bad configuration
constexpr int kOk = 0;
constexpr int kRunError = 1;
constexpr int kConfigError = 2;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw atsh::IoError("cannot open for writing: " + path);
    return out;
}

// The plot script lives next to the data it draws whenever both share a
// directory, so it can reference the CSV by bare name.
std::string csv_ref_for(const std::string& csv_path, const std::string& script_path) {
    const std::filesystem::path c(csv_path), s(script_path);
    if (c.parent_path() == s.parent_path())
        return c.filename().string();
    return csv_path;
}

struct IntegrateArgs {
    std::string method;
    std::string problem;
    double h = 0.0;
    std::string starter = "auto";
    double x_end = 0.0;
    bool has_x_end = false;
    double omega = 0.0;
    bool has_omega = false;
    double epsilon = 0.0;
    bool has_epsilon = false;
    std::string output;
};

int run_integrate(const IntegrateArgs& a) {
    atsh::MethodId id;
    atsh::Problem prob;
    atsh::StarterMode starter;
    try {
        id = atsh::method_from_name(a.method);
        const atsh::BenchmarkId pid = atsh::benchmark_from_name(a.problem);
        atsh::ProblemParams params;
        if (a.has_x_end)
            params.x_end = a.x_end;
        if (a.has_omega)
            params.omega = a.omega;
        if (a.has_epsilon)
            params.epsilon = a.epsilon;
        prob = atsh::make_problem(pid, params);
        if (a.starter == "auto") {
            atsh::SweepConfig defaults;
            starter = atsh::starter_for(defaults, pid);
        } else if (a.starter == "exact") {
            starter = atsh::StarterMode::Exact;
        } else if (a.starter == "series") {
            starter = atsh::StarterMode::Series;
        } else if (a.starter == "oracle") {
            starter = atsh::StarterMode::Oracle;
        } else {
            throw atsh::ConfigError("starter must be exact, series, oracle or auto");
        }
        if (!(a.h > 0.0))
            throw atsh::ConfigError("--stepsize must be positive");
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        const atsh::IntegrationResult res = atsh::integrate(id, prob, a.h, starter);
        if (!a.output.empty()) {
            std::ofstream out = open_out(a.output);
            out << "x";
            for (int c = 0; c < res.dim; ++c)
                out << ",y" << c;
            out << "\n";
            char buf[64];
            for (size_t i = 0; i < res.xs.size(); ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", res.xs[i]);
                out << buf;
                for (int c = 0; c < res.dim; ++c) {
                    std::snprintf(buf, sizeof buf, ",%.17g",
                                  res.ys[i * static_cast<size_t>(res.dim) + c]);
                    out << buf;
                }
                out << "\n";
            }
        }
        std::printf("method=%s problem=%s h=%.17g steps=%zu g_evals=%lld "
                    "starter_g_evals=%lld",
                    a.method.c_str(), prob.name.c_str(), a.h, res.xs.size() - 1,
                    res.g_evals, res.starter_g_evals);
        if (res.max_global_error)
            std::printf(" max_global_error=%.17g\n", *res.max_global_error);
        else
            std::printf(" max_global_error=unknown\n");
        return kOk;
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
}

struct BenchArgs {
    std::string config_path;
    std::string methods, problems, j_range, base, starter;
    bool count_starter = false;
    bool timing = false;
    int workers = -1;
    std::string output;
    bool has_output = false;
    std::string plot;
};

int run_bench(const BenchArgs& a) {
    atsh::SweepConfig cfg;
    try {
        if (!a.config_path.empty()) {
            std::ifstream in(a.config_path);
            if (!in)
                throw atsh::IoError("cannot read config: " + a.config_path);
            cfg = atsh::parse_sweep_config(in);
        } else {
            cfg = atsh::default_config();
        }
        if (!a.methods.empty())
            atsh::apply_config_kv(cfg, "methods", a.methods);
        if (!a.problems.empty())
            atsh::apply_config_kv(cfg, "problems", a.problems);
        if (!a.j_range.empty())
            atsh::apply_config_kv(cfg, "j_range", a.j_range);
        if (!a.base.empty())
            atsh::apply_config_kv(cfg, "base", a.base);
        if (!a.starter.empty())
            atsh::apply_config_kv(cfg, "starter", a.starter);
        if (a.count_starter)
            cfg.count_starter = true;
        if (a.timing)
            cfg.timing = true;
        if (a.workers >= 0)
            cfg.workers = a.workers;
        if (a.has_output)
            cfg.output = a.output;
        if (!a.plot.empty() && cfg.output.empty())
            throw atsh::ConfigError("--plot needs an --output csv path to reference");
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        const std::vector<atsh::EfficiencyRecord> records = atsh::run_sweep(cfg);
        if (cfg.output.empty()) {
            atsh::write_records_csv(records, std::cout);
        } else {
            std::ofstream out = open_out(cfg.output);
            atsh::write_records_csv(records, out);
        }
        if (!a.plot.empty()) {
            std::ofstream out = open_out(a.plot);
            atsh::write_plot_script(records, csv_ref_for(cfg.output, a.plot), out);
        }
        for (const atsh::EfficiencyRecord& r : records)
            if (!r.reason.empty()) {
                std::cerr << "error rows present (first: " << r.method << " "
                          << r.problem << " h=" << r.h << " " << r.reason << ")\n";
                return kRunError;
            }
        return kOk;
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
}

struct StabilityArgs {
    std::string method;
    double nu_max = 3.0 * kPi;
    double z_min = -5.0;
    double z_max = 5.0;
    int grid = 600;
    std::string output;
    std::string plot;
};

void write_stability_plot(const std::string& csv_ref, std::ostream& out) {
    out << "#!/usr/bin/env python3\n"
           "\"\"\"Stability classification over the (nu, z) window: periodicity\n"
           "region, absolute stability and instability as a colored grid.\"\"\"\n"
           "import csv\n"
           "\n"
           "CSV = \""
        << csv_ref << "\"\n";
    out << R"PY(
CLASSES = ["periodic", "absolutely-stable", "unstable"]

nus, zs, cells = [], [], {}
with open(CSV, newline="") as f:
    for row in csv.DictReader(f):
        nu, z = float(row["nu"]), float(row["z"])
        if not nus or nu != nus[-1]:
            nus.append(nu)
        if not zs or z != zs[-1]:
            zs.append(z)
        cells[(nu, z)] = CLASSES.index(row["class"])

nus = sorted(set(nus))
zs = sorted(set(zs))
grid = [[cells[(nu, z)] for nu in nus] for z in zs]

import matplotlib.pyplot as plt
from matplotlib.colors import ListedColormap

cmap = ListedColormap(["#2a6f4e", "#86c5a2", "#f2f2f2"])
fig, ax = plt.subplots(figsize=(8, 5))
mesh = ax.pcolormesh(nus, zs, grid, cmap=cmap, vmin=-0.5, vmax=2.5)
bar = fig.colorbar(mesh, ticks=[0, 1, 2])
bar.ax.set_yticklabels(CLASSES)
ax.set_xlabel("nu")
ax.set_ylabel("z")
fig.tight_layout()
png = CSV.rsplit(".", 1)[0] + ".png"
fig.savefig(png, dpi=150)
print(png)
)PY";
}

int run_stability(const StabilityArgs& a) {
    atsh::MethodId id;
    try {
        id = atsh::method_from_name(a.method);
        if (a.grid < 1)
            throw atsh::ConfigError("--grid must be at least 1");
        if (!(a.nu_max > 0.0))
            throw atsh::ConfigError("--nu-max must be positive");
        if (!(a.z_min <= a.z_max))
            throw atsh::ConfigError("--z-min must not exceed --z-max");
        if (!a.plot.empty() && a.output.empty())
            throw atsh::ConfigError("--plot needs an --output csv path to reference");
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        const double nu_min = a.nu_max / a.grid;
        const atsh::StabilityGrid grid =
            atsh::scan_region(id, nu_min, a.nu_max, a.z_min, a.z_max, a.grid, a.grid);
        if (a.output.empty()) {
            atsh::write_grid_csv(grid, std::cout);
        } else {
            std::ofstream out = open_out(a.output);
            atsh::write_grid_csv(grid, out);
        }
        if (!a.plot.empty()) {
            std::ofstream out = open_out(a.plot);
            write_stability_plot(csv_ref_for(a.output, a.plot), out);
        }
        for (int i = 0; i < static_cast<int>(grid.nus.size()); ++i)
            if (grid.is_singular(i, 0)) {
                std::cerr << "singular coefficient columns present (first at nu="
                          << grid.nus[i] << ")\n";
                return kRunError;
            }
        return kOk;
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
}

struct PhaseArgs {
    std::string method;
    double omega = 0.0;
    double epsilon = 0.0;
    double H = 0.0;
    bool has_H = false;
};

int run_phase(const PhaseArgs& a) {
    atsh::MethodId id;
    try {
        id = atsh::method_from_name(a.method);
        if (!a.has_H && a.epsilon == 0.0)
            throw atsh::ConfigError("leading terms need a nonzero --epsilon");
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (a.has_H) {
            const atsh::PhasePoint p = atsh::phase_point(id, a.H, a.omega, a.epsilon);
            std::printf("method=%s omega=%.17g epsilon=%.17g H=%.17g "
                        "phase_lag=%.17g dissipation=%.17g\n",
                        a.method.c_str(), p.omega, p.epsilon, p.H, p.phase_lag,
                        p.dissipation);
        } else {
            const atsh::LeadingTerms lt = atsh::estimate_leading(id, a.omega, a.epsilon);
            std::printf("method=%s omega=%.17g epsilon=%.17g q=%d c_phi=%.17g ",
                        a.method.c_str(), a.omega, a.epsilon, lt.q, lt.c_phi);
            if (lt.r == atsh::kOrderInf)
                std::printf("r=inf c_d=0\n");
            else
                std::printf("r=%d c_d=%.17g\n", lt.r, lt.c_d);
        }
        return kOk;
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
}

struct CheckOrderArgs {
    std::string method;
    double nu = 1.0;
};

int run_check_order(const CheckOrderArgs& a) {
    atsh::MethodId id;
    try {
        id = atsh::method_from_name(a.method);
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        const atsh::Tableau t = atsh::build(id, a.nu);
        const std::vector<atsh::ConditionResidual> rows = atsh::residuals(t);
        std::printf("%-8s %3s %24s %24s %14s\n", "tree_id", "rho", "lhs", "rhs",
                    "residual");
        for (const atsh::ConditionResidual& r : rows)
            std::printf("%-8s %3d % .16e % .16e % .6e\n", r.tree_id.c_str(), r.rho,
                        r.lhs, r.rhs, r.residual);
        std::printf("verified order: %d (declared %d), row-sum defect %.3e\n",
                    atsh::verify_order(t), t.p, atsh::simplifying_check(t));
        return kOk;
    } catch (const atsh::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRunError;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"adapted two-step hybrid methods for perturbed oscillators"};
    app.require_subcommand(1);

    IntegrateArgs ia;
    CLI::App* integrate = app.add_subcommand(
        "integrate", "march one method over one problem at a fixed stepsize");
    integrate->add_option("method", ia.method, "method name, e.g. atsh5-minerr")
        ->required();
    integrate->add_option("problem", ia.problem, "problem name, e.g. problem1")
        ->required();
    integrate->add_option("--stepsize", ia.h, "grid spacing h")->required();
    integrate->add_option("--starter", ia.starter,
                          "first-step source: exact, series, oracle or auto");
    CLI::Option* oxe = integrate->add_option("--x-end", ia.x_end, "integration end");
    CLI::Option* oom = integrate->add_option("--omega", ia.omega,
                                             "frequency override (harmonic, cubic)");
    CLI::Option* oep = integrate->add_option("--epsilon", ia.epsilon,
                                             "perturbation override (problem4, cubic)");
    integrate->add_option("--output", ia.output, "trajectory CSV path");

    BenchArgs ba;
    CLI::App* bench = app.add_subcommand(
        "bench", "run method x problem x stepsize sweeps and emit efficiency curves");
    bench->add_option("--config", ba.config_path, "key = value config file");
    bench->add_option("--methods", ba.methods,
                      "comma list of method names, or all/adapted/classical");
    bench->add_option("--problems", ba.problems, "comma list of problem names, or all");
    bench->add_option("--j-range", ba.j_range, "stepsize exponents a..b, h = base*2^-j");
    bench->add_option("--base", ba.base, "stepsize base");
    bench->add_option("--starter", ba.starter,
                      "first-step source: exact, series, oracle or auto");
    bench->add_flag("--count-starter", ba.count_starter,
                    "include starter evaluations in g_evals");
    bench->add_flag("--timing", ba.timing, "measure wall time per cell");
    bench->add_option("--workers", ba.workers, "concurrent cells");
    CLI::Option* obo = bench->add_option("--output", ba.output, "CSV path (default stdout)");
    bench->add_option("--plot", ba.plot, "also write a python plot script here");

    StabilityArgs sa;
    CLI::App* stability = app.add_subcommand(
        "stability", "classify the (nu, z) window on a grid");
    stability->add_option("method", sa.method, "method name")->required();
    stability->add_option("--nu-max", sa.nu_max, "window is nu in (0, nu-max]");
    stability->add_option("--z-min", sa.z_min, "lower z edge");
    stability->add_option("--z-max", sa.z_max, "upper z edge");
    stability->add_option("--grid", sa.grid, "cells per axis");
    stability->add_option("--output", sa.output, "CSV path (default stdout)");
    stability->add_option("--plot", sa.plot, "also write a python plot script here");

    PhaseArgs pa;
    CLI::App* phase = app.add_subcommand(
        "phase", "phase lag and dissipation analysis at (omega, epsilon)");
    phase->add_option("method", pa.method, "method name")->required();
    phase->add_option("--omega", pa.omega, "oscillator frequency")->required();
    phase->add_option("--epsilon", pa.epsilon, "perturbation strength")->required();
    CLI::Option* oH = phase->add_option(
        "--H", pa.H, "evaluate one point at this scaled step instead of fitting");

    CheckOrderArgs ca;
    CLI::App* check = app.add_subcommand(
        "check-order", "print the algebraic condition residuals of one method");
    check->add_option("method", ca.method, "method name")->required();
    check->add_option("--nu", ca.nu, "frequency-step product to evaluate at");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfigError;
    }

    ia.has_x_end = oxe->count() > 0;
    ia.has_omega = oom->count() > 0;
    ia.has_epsilon = oep->count() > 0;
    ba.has_output = obo->count() > 0;
    pa.has_H = oH->count() > 0;

    if (app.got_subcommand(integrate))
        return run_integrate(ia);
    if (app.got_subcommand(bench))
        return run_bench(ba);
    if (app.got_subcommand(stability))
        return run_stability(sa);
    if (app.got_subcommand(phase))
        return run_phase(pa);
    if (app.got_subcommand(check))
        return run_check_order(ca);
    return kConfigError;
}
