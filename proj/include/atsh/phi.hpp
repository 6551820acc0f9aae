#pragma once

#include <vector>

namespace atsh {

// The phi-function family underlying the adapted coefficients:
//   phi_0(nu) = cos(nu), phi_1(nu) = sin(nu)/nu,
//   phi_{j+2}(nu) = integral_0^1 sin(nu (1 - z))/nu * z^j / j! dz,
// with phi_j(0) = 1/j!. Evaluated to ~1e-15 relative error for |nu| <= 50.
double phi(int j, double nu);

// Extended-precision variant used by the phase-lag analysis.
long double phi_ld(int j, long double nu);

// All phi_j(nu) for j = 0..j_max, satisfying
// values[j] + nu^2 * values[j+2] = 1/j! to a few ulp.
struct PhiTable {
    double nu;
    std::vector<double> values;
};

PhiTable phi_table(double nu, int j_max = 10);

// Scheifele weight G_j(h) = h^j * phi_j(omega h). Requires h > 0.
double g_function(int j, double h, double omega);

namespace detail {

// The two evaluation branches, exposed for consistency checks.
// phi_series sums the Taylor expansion; it is accurate for nu^2 < (j+1)(j+2).
// phi_recurrence runs phi_{k+2} = (1/k! - phi_k)/nu^2 upward from cos/sin
// and needs nu != 0.
double phi_series(int j, double nu);
double phi_recurrence(int j, double nu);

// 1/j! with an exactly represented factorial for j <= 18.
double inv_factorial(int j);

} // namespace detail

} // namespace atsh
