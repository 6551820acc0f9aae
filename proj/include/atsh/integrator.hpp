#pragma once

#include <optional>
#include <vector>

#include "atsh/problems.hpp"
#include "atsh/tableau.hpp"

namespace atsh {

enum class StarterMode {
    Exact,  // evaluate the stored closed-form solution at x0 + h
    Series, // phi-weighted series with differenced perturbation derivatives
    Oracle, // sixth-order one-step integration with 100 substeps
};

struct TwoStepState {
    double x_n = 0.0;
    std::vector<double> y_prev;
    std::vector<double> y_curr;
    // g(x_n - h, y_prev): the producing step's c = 0 stage value, consumed
    // by the next step's c = -1 stage. Leave empty for hand-built states.
    std::optional<std::vector<double>> g_at_prev;
    long long g_evals = 0;
};

struct IntegrationResult {
    std::vector<double> xs;
    std::vector<double> ys; // row-major, xs.size() x dim
    int dim = 1;
    long long g_evals = 0;         // stepping cost only
    long long starter_g_evals = 0; // cost of producing y_1
    std::optional<double> max_global_error;
};

// First off-grid value y_1 ~ y(x0 + h).
std::vector<double> start_value(const Problem& problem, double h, StarterMode mode);

// One two-step update; requires tableau.nu == problem.omega * h for adapted
// tableaus. The returned state is advanced by h.
TwoStepState step(const Tableau& tableau, const Problem& problem, const TwoStepState& state,
                  double h);

// Marches the whole interval. The stepsize must divide the interval to within
// 0.5 ulp of an integer count; otherwise the final step is shortened and the
// method rebuilt at nu' = omega * h_final for that step.
IntegrationResult integrate(MethodId id, const Problem& problem, double h,
                            StarterMode starter = StarterMode::Exact);

// Least-squares slope of log(max_global_error) against log(h).
double convergence_order(MethodId id, const Problem& problem, const std::vector<double>& h_list,
                         StarterMode starter = StarterMode::Exact);

} // namespace atsh
