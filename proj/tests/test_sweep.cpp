#include "atsh/sweep.hpp"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "atsh/errors.hpp"
#include "atsh/integrator.hpp"
#include "doctest.h"

using namespace atsh;

namespace {

constexpr double kPi = 3.14159265358979323846;

bool same_value(double a, double b) {
    if (std::isnan(a) || std::isnan(b))
        return std::isnan(a) && std::isnan(b);
    return a == b;
}

bool same_record(const EfficiencyRecord& x, const EfficiencyRecord& y) {
    return x.method == y.method && x.problem == y.problem && same_value(x.h, y.h) &&
           x.steps == y.steps && x.g_evals == y.g_evals &&
           same_value(x.max_global_error, y.max_global_error) &&
           same_value(x.wall_time_s, y.wall_time_s) && x.reason == y.reason;
}

} // namespace

TEST_SUITE("sweep") {

TEST_CASE("default stepsize lists per method class") {
    StepRange r = default_range(MethodId::Atsh5MinErr, BenchmarkId::Inhomogeneous);
    CHECK(r.base == 1.0);
    CHECK(r.j_lo == 1);
    CHECK(r.j_hi == 5);
    r = default_range(MethodId::ClassicalMinErr5, BenchmarkId::Inhomogeneous);
    CHECK(r.j_lo == 3);
    CHECK(r.j_hi == 7);

    r = default_range(MethodId::Atsh5Phase8, BenchmarkId::StiefelBettis);
    CHECK(r.j_lo == -1);
    CHECK(r.j_hi == 3);
    r = default_range(MethodId::AdaptedNumerov4, BenchmarkId::StiefelBettis);
    CHECK(r.j_lo == -2);
    CHECK(r.j_hi == 2);
    r = default_range(MethodId::ClassicalPhase8, BenchmarkId::StiefelBettis);
    CHECK(r.j_lo == 0);
    CHECK(r.j_hi == 4);

    r = default_range(MethodId::Atsh4ZeroDiss, BenchmarkId::Satellite);
    CHECK(r.base == 1.0 - kPi / 100.0);
    CHECK(r.j_lo == -2);
    CHECK(r.j_hi == 2);
    r = default_range(MethodId::ClassicalZeroDiss4, BenchmarkId::Satellite);
    CHECK(r.base == 1.0 - kPi / 100.0);
    CHECK(r.j_lo == 0);
    CHECK(r.j_hi == 4);

    for (const MethodId m : all_methods()) {
        r = default_range(m, BenchmarkId::FrancoSystem);
        CHECK(r.base == 1.0);
        CHECK(r.j_lo == 2);
        CHECK(r.j_hi == 6);
        r = default_range(m, BenchmarkId::CubicOscillator);
        CHECK(r.base == 0.1);
        CHECK(r.j_lo == 0);
        CHECK(r.j_hi == 4);
    }
}

TEST_CASE("default config covers the four benchmark problems") {
    const SweepConfig cfg = default_config();
    CHECK(cfg.methods.size() == 8);
    REQUIRE(cfg.problems.size() == 4);
    CHECK(cfg.problems[0] == BenchmarkId::Inhomogeneous);
    CHECK(cfg.problems[3] == BenchmarkId::FrancoSystem);
    CHECK(!cfg.range.has_value());
    CHECK(!cfg.starter.has_value());
    CHECK(!cfg.count_starter);
    CHECK(!cfg.timing);
    CHECK(cfg.workers == 0);
    CHECK(cfg.output.empty());
}

TEST_CASE("a single method sweep produces falling errors in canonical order") {
    SweepConfig cfg;
    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.problems = {BenchmarkId::Inhomogeneous};
    const std::vector<EfficiencyRecord> rec = run_sweep(cfg);
    REQUIRE(rec.size() == 5);
    for (size_t i = 0; i < rec.size(); ++i) {
        const EfficiencyRecord& r = rec[i];
        CHECK(r.method == "atsh5-minerr");
        CHECK(r.problem == "problem1");
        CHECK(r.h == std::ldexp(1.0, -static_cast<int>(i) - 1));
        CHECK(r.steps == 100LL << (i + 1));
        // the starter covers the first grid interval, leaving steps - 1
        // updates; each pays three fresh g values once the stage handoff is
        // running, plus one extra on the very first update
        CHECK(r.g_evals == 3 * (r.steps - 1) + 1);
        CHECK(r.reason.empty());
        CHECK(r.wall_time_s == 0.0);
        CHECK(std::isfinite(r.max_global_error));
        if (i > 0)
            CHECK(rec[i].max_global_error < rec[i - 1].max_global_error);
    }
}

TEST_CASE("canonical ordering is lexical in method then problem then h falling") {
    SweepConfig cfg;
    cfg.methods = {MethodId::AdaptedNumerov4, MethodId::Atsh5MinErr};
    cfg.problems = {BenchmarkId::FrancoSystem, BenchmarkId::Inhomogeneous};
    cfg.range = StepRange{1.0, 3, 4};
    const std::vector<EfficiencyRecord> rec = run_sweep(cfg);
    REQUIRE(rec.size() == 8);
    const char* want[8][2] = {
        {"atsh5-minerr", "problem1"}, {"atsh5-minerr", "problem1"},
        {"atsh5-minerr", "problem4"}, {"atsh5-minerr", "problem4"},
        {"numerov4", "problem1"},     {"numerov4", "problem1"},
        {"numerov4", "problem4"},     {"numerov4", "problem4"},
    };
    for (int i = 0; i < 8; ++i) {
        CHECK(rec[i].method == want[i][0]);
        CHECK(rec[i].problem == want[i][1]);
        CHECK(rec[i].h == (i % 2 == 0 ? 0.125 : 0.0625));
    }
}

TEST_CASE("empty method or problem lists run nothing") {
    SweepConfig cfg;
    cfg.problems = {BenchmarkId::Inhomogeneous};
    CHECK(run_sweep(cfg).empty());
    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.problems.clear();
    CHECK(run_sweep(cfg).empty());
}

TEST_CASE("failed cells become reason rows") {
    SweepConfig cfg;
    cfg.methods = {MethodId::ClassicalPhase8};
    cfg.problems = {BenchmarkId::StiefelBettis};
    cfg.range = StepRange{8.0, 0, 0};
    std::vector<EfficiencyRecord> rec = run_sweep(cfg);
    REQUIRE(rec.size() == 1);
    CHECK(std::isnan(rec[0].max_global_error));
    CHECK(rec[0].reason == "blow-up");
    CHECK(rec[0].g_evals == 0);
    CHECK(rec[0].steps == 125);

    // a stepsize that lands exactly on a vanishing coefficient denominator
    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.range = StepRange{5.5791990521026395, 0, 0};
    rec = run_sweep(cfg);
    REQUIRE(rec.size() == 1);
    CHECK(std::isnan(rec[0].max_global_error));
    CHECK(rec[0].reason == "singular-coefficient");
    CHECK(rec[0].steps == 179);
}

TEST_CASE("determinism across reruns and worker counts") {
    SweepConfig cfg;
    cfg.methods = {MethodId::Atsh5MinErr, MethodId::ClassicalMinErr5};
    cfg.problems = {BenchmarkId::Inhomogeneous};
    cfg.range = StepRange{1.0, 3, 4};
    cfg.workers = 1;
    const std::vector<EfficiencyRecord> r1 = run_sweep(cfg);
    cfg.workers = 2;
    const std::vector<EfficiencyRecord> r2 = run_sweep(cfg);
    const std::vector<EfficiencyRecord> r3 = run_sweep(cfg);
    REQUIRE(r1.size() == 4);
    REQUIRE(r2.size() == r1.size());
    REQUIRE(r3.size() == r1.size());
    for (size_t i = 0; i < r1.size(); ++i) {
        CHECK(same_record(r1[i], r2[i]));
        CHECK(same_record(r2[i], r3[i]));
    }
}

TEST_CASE("adapted methods beat their companions at the benchmark stepsizes") {
    SweepConfig cfg;
    cfg.methods = {MethodId::Atsh5MinErr, MethodId::ClassicalMinErr5};

    cfg.problems = {BenchmarkId::Inhomogeneous};
    cfg.range = StepRange{1.0, 3, 3};
    std::vector<EfficiencyRecord> rec = run_sweep(cfg);
    REQUIRE(rec.size() == 2);
    CHECK(rec[0].method == "atsh5-minerr");
    CHECK(rec[0].max_global_error < rec[1].max_global_error);

    cfg.problems = {BenchmarkId::StiefelBettis};
    cfg.range = StepRange{1.0, 0, 0};
    rec = run_sweep(cfg);
    REQUIRE(rec.size() == 2);
    CHECK(rec[0].method == "atsh5-minerr");
    CHECK(rec[0].max_global_error < rec[1].max_global_error);
}

TEST_CASE("starter selection and evaluation counting") {
    SweepConfig cfg;
    CHECK(starter_for(cfg, BenchmarkId::Inhomogeneous) == StarterMode::Exact);
    CHECK(starter_for(cfg, BenchmarkId::StiefelBettis) == StarterMode::Exact);
    CHECK(starter_for(cfg, BenchmarkId::FrancoSystem) == StarterMode::Exact);
    CHECK(starter_for(cfg, BenchmarkId::HarmonicPure) == StarterMode::Exact);
    CHECK(starter_for(cfg, BenchmarkId::Satellite) == StarterMode::Oracle);
    CHECK(starter_for(cfg, BenchmarkId::CubicOscillator) == StarterMode::Oracle);
    cfg.starter = StarterMode::Series;
    CHECK(starter_for(cfg, BenchmarkId::Satellite) == StarterMode::Series);

    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.problems = {BenchmarkId::Inhomogeneous};
    cfg.range = StepRange{1.0, 3, 3};
    cfg.starter = StarterMode::Oracle;
    const long long base_evals = run_sweep(cfg)[0].g_evals;
    cfg.count_starter = true;
    const long long with_starter = run_sweep(cfg)[0].g_evals;

    const IntegrationResult direct =
        integrate(MethodId::Atsh5MinErr, make_problem(BenchmarkId::Inhomogeneous), 0.125,
                  StarterMode::Oracle);
    CHECK(direct.starter_g_evals > 0);
    CHECK(base_evals == direct.g_evals);
    CHECK(with_starter - base_evals == direct.starter_g_evals);
}

TEST_CASE("satellite sweep measures against the stored reference") {
    SweepConfig cfg;
    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.problems = {BenchmarkId::Satellite};
    const std::vector<EfficiencyRecord> rec = run_sweep(cfg);
    REQUIRE(rec.size() == 5);
    for (size_t i = 0; i < rec.size(); ++i) {
        CHECK(rec[i].reason.empty());
        CHECK(std::isfinite(rec[i].max_global_error));
        CHECK(rec[i].steps == 25LL << i);
    }
    CHECK(rec[1].max_global_error < rec[0].max_global_error);
    CHECK(rec[2].max_global_error < rec[1].max_global_error);
}

TEST_CASE("csv writes the pinned layout and round trips") {
    std::vector<EfficiencyRecord> rec(3);
    rec[0].method = "atsh5-minerr";
    rec[0].problem = "problem1";
    rec[0].h = 0.125;
    rec[0].steps = 800;
    rec[0].g_evals = 2401;
    rec[0].max_global_error = 3.5e-9;
    rec[0].wall_time_s = 0.0;
    rec[1].method = "classical:atsh5-pl8";
    rec[1].problem = "problem2";
    rec[1].h = 8.0;
    rec[1].steps = 125;
    rec[1].g_evals = 0;
    rec[1].max_global_error = std::nan("");
    rec[1].reason = "blow-up";
    rec[2].method = "numerov4";
    rec[2].problem = "cubic";
    rec[2].h = 0.05;
    rec[2].steps = 200;
    rec[2].g_evals = 401;
    rec[2].max_global_error = 1.25e-7;
    rec[2].wall_time_s = 0.0078125;

    std::ostringstream os;
    write_records_csv(rec, os);
    const std::string text = os.str();
    CHECK(text.rfind("method,problem,h,steps,g_evals,max_global_error,wall_time_s\n", 0) == 0);
    CHECK(text.find("atsh5-minerr,problem1,0.125,800,2401,") != std::string::npos);
    CHECK(text.find(",nan,") != std::string::npos);
    CHECK(text.find("# reason: blow-up\n") != std::string::npos);

    std::istringstream is(text);
    const std::vector<EfficiencyRecord> back = parse_records_csv(is);
    REQUIRE(back.size() == rec.size());
    for (size_t i = 0; i < rec.size(); ++i)
        CHECK(same_record(rec[i], back[i]));

    std::istringstream bad_header("x,y\n");
    CHECK_THROWS_AS((void)parse_records_csv(bad_header), IoError);
    std::istringstream bad_row(
        "method,problem,h,steps,g_evals,max_global_error,wall_time_s\n"
        "m,p,0.1,12\n");
    CHECK_THROWS_AS((void)parse_records_csv(bad_row), IoError);
    std::istringstream bad_number(
        "method,problem,h,steps,g_evals,max_global_error,wall_time_s\n"
        "m,p,0.1,twelve,1,0.5,0\n");
    CHECK_THROWS_AS((void)parse_records_csv(bad_number), IoError);
}

TEST_CASE("plot script is standalone and names the csv") {
    std::vector<EfficiencyRecord> rec(1);
    rec[0].method = "atsh5-minerr";
    rec[0].problem = "problem1";
    rec[0].h = 0.125;
    rec[0].steps = 800;
    rec[0].g_evals = 2401;
    rec[0].max_global_error = 3.5e-9;

    std::ostringstream os;
    write_plot_script(rec, "efficiency.csv", os);
    const std::string text = os.str();
    CHECK(text.rfind("#!/usr/bin/env python3", 0) == 0);
    CHECK(text.find("CSV = \"efficiency.csv\"") != std::string::npos);
    CHECK(text.find("matplotlib") != std::string::npos);
    CHECK(text.find("log10") != std::string::npos);

    std::ostringstream empty_os;
    CHECK_THROWS_AS(write_plot_script({}, "x.csv", empty_os), InvalidParams);
}

TEST_CASE("config text parses and rejects junk") {
    std::istringstream good(
        "# benchmark setup\n"
        "methods = atsh5-minerr, classical:atsh5-minerr, atsh5-minerr\n"
        "problems = problem1,problem2\n"
        "j_range = 1..3\n"
        "base = 0.5\n"
        "starter = series\n"
        "count_starter = yes\n"
        "timing = off\n"
        "workers = 2   # worker count\n"
        "output = out/efficiency.csv\n");
    const SweepConfig cfg = parse_sweep_config(good);
    REQUIRE(cfg.methods.size() == 2);
    CHECK(cfg.methods[0] == MethodId::Atsh5MinErr);
    CHECK(cfg.methods[1] == MethodId::ClassicalMinErr5);
    REQUIRE(cfg.problems.size() == 2);
    REQUIRE(cfg.range.has_value());
    CHECK(cfg.range->base == 0.5);
    CHECK(cfg.range->j_lo == 1);
    CHECK(cfg.range->j_hi == 3);
    CHECK(cfg.starter == StarterMode::Series);
    CHECK(cfg.count_starter);
    CHECK(!cfg.timing);
    CHECK(cfg.workers == 2);
    CHECK(cfg.output == "out/efficiency.csv");

    SweepConfig groups;
    apply_config_kv(groups, "methods", "adapted");
    CHECK(groups.methods.size() == 4);
    apply_config_kv(groups, "methods", "classical");
    CHECK(groups.methods.size() == 4);
    CHECK(is_classical(groups.methods[0]));
    apply_config_kv(groups, "methods", "all");
    CHECK(groups.methods.size() == 8);
    apply_config_kv(groups, "problems", "all");
    CHECK(groups.problems.size() == 6);
    apply_config_kv(groups, "starter", "auto");
    CHECK(!groups.starter.has_value());

    const auto reject = [](const std::string& text) {
        std::istringstream is(text);
        CHECK_THROWS_AS((void)parse_sweep_config(is), ConfigError);
    };
    reject("spam = 1\n");
    reject("methods = bogus\n");
    reject("timing\n");
    reject("j_range = 5..1\n");
    reject("j_range = 1..x\n");
    reject("base = -2\n");
    reject("base = nonsense\n");
    reject("starter = magic\n");
    reject("workers = -3\n");
    reject("count_starter = maybe\n");

    std::istringstream second_line("timing = on\nspam = 1\n");
    try {
        (void)parse_sweep_config(second_line);
        CHECK(false);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    SweepConfig invalid;
    invalid.methods = {MethodId::Atsh5MinErr};
    invalid.problems = {BenchmarkId::Inhomogeneous};
    invalid.range = StepRange{1.0, 4, 2};
    CHECK_THROWS_AS((void)run_sweep(invalid), ConfigError);
    invalid.range = StepRange{-1.0, 1, 2};
    CHECK_THROWS_AS((void)run_sweep(invalid), ConfigError);
    invalid.range.reset();
    invalid.workers = -1;
    CHECK_THROWS_AS((void)run_sweep(invalid), ConfigError);
}

TEST_CASE("timing flag controls the wall time column") {
    SweepConfig cfg;
    cfg.methods = {MethodId::Atsh5MinErr};
    cfg.problems = {BenchmarkId::Inhomogeneous};
    cfg.range = StepRange{1.0, 3, 3};
    CHECK(run_sweep(cfg)[0].wall_time_s == 0.0);
    cfg.timing = true;
    CHECK(run_sweep(cfg)[0].wall_time_s >= 0.0);
}

} // TEST_SUITE
