#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atsh {

// Perturbed oscillator y'' = -omega^2 y + g(x, y) on [x0, x_end].
struct Problem {
    std::string name;
    int dim = 1;
    double omega = 0.0;
    double x0 = 0.0;
    double x_end = 0.0;
    std::vector<double> y0;
    std::vector<double> dy0;
    // Writes g(x, y) into out (dim entries).
    std::function<void(double, const double*, double*)> g;
    // Writes the exact solution at x into out, or empty when unknown.
    std::function<void(double, double*)> exact;
};

enum class BenchmarkId {
    Inhomogeneous,
    StiefelBettis,
    Satellite,
    FrancoSystem,
    CubicOscillator,
    HarmonicPure,
};

// Optional overrides; fields left unset keep each problem's defaults.
struct ProblemParams {
    std::optional<double> epsilon;
    std::optional<double> omega;
    std::optional<double> x_end;
    std::optional<double> eccentricity;
    std::optional<double> oblateness; // satellite J2/c^2 term
    std::optional<std::vector<double>> y0;
    std::optional<std::vector<double>> dy0;
};

Problem make_problem(BenchmarkId id, const ProblemParams& params = {});

const std::vector<BenchmarkId>& all_benchmarks();
std::string_view benchmark_name(BenchmarkId id);
BenchmarkId benchmark_from_name(std::string_view name);

// Reference values at the given grid points, row-major xs.size() x dim.
// Problems with a closed-form solution evaluate it; the satellite and cubic
// problems run a fine-step fifth-order integration validated by comparing
// against a half-step rerun (tolerance 1e-12). Grid points must be exact
// multiples of the fine stepsize for those two problems.
std::vector<double> reference_solution(BenchmarkId id, const std::vector<double>& xs,
                                       const ProblemParams& params = {});

} // namespace atsh
