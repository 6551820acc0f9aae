#pragma once

#include "atsh/tableau.hpp"

namespace atsh {

// Phase lag and dissipation of one method at one scaled step size
// H = lambda h, lambda = sqrt(omega^2 + epsilon):
//   phase_lag   = H - arccos(S / (2 sqrt(P)))
//   dissipation = 1 - sqrt(P)
// with S, P evaluated at nu = omega H / lambda, z = epsilon H^2 / lambda^2.
struct PhasePoint {
    double H;
    double omega;
    double epsilon;
    double phase_lag;
    double dissipation;
};

// Evaluated in extended precision with S - 2 cos(H) and P - 1 assembled
// from products, so leading terms far below double roundoff stay
// meaningful. Requires H > 0 and omega^2 + epsilon > 0. Throws
// OutsideDomain when P <= 0 or |S| > 2 sqrt(P) beyond a four-ulp clip:
// the step size has left the stability region and no phase is defined.
PhasePoint phase_point(MethodId id, double H, double omega, double epsilon);

// Leading error terms phase_lag(H) ~ c_phi H^(q+1) and
// dissipation(H) ~ c_d H^(r+1). r = kOrderInf and c_d = 0 for zero
// dissipative methods, detected algebraically from the indicators
// C_k = b^T A^{k-1} c rather than fitted from roundoff noise.
struct LeadingTerms {
    int q;
    double c_phi;
    int r;
    double c_d;
};

// Samples H = 2^-2..2^-8, forms log2 slopes of consecutive values, picks
// the longest run of slopes agreeing within 0.025 (ties resolved toward
// the larger step sizes, which sit farthest above the roundoff floor) and
// snaps its mean to an integer. The constant is read off the smallest step
// size of the accepted run. Throws FitFailed when no run snaps within 0.1
// of an integer, and InvalidParams when epsilon is zero.
LeadingTerms estimate_leading(MethodId id, double omega, double epsilon);

} // namespace atsh
