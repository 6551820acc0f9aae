#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "atsh/tableau.hpp"

namespace atsh {

enum class StabilityClass { Periodic, AbsolutelyStable, Unstable };

// "periodic", "absolutely-stable" or "unstable"; stable CSV labels.
const char* stability_class_name(StabilityClass cls);

// One evaluated point of the nu-z plane.
struct StabilityPoint {
    double nu;
    double z;
    double S;
    double P;
    StabilityClass cls;
};

// Growth factors of the two-term recurrence y_{n+1} = S y_n - P y_{n-1}
// produced by the method on y'' = -(omega^2 + epsilon) y with nu = omega h
// and z = epsilon h^2. With N = I + (nu^2 + z) A,
//   S = two_phi0 - zz b^T N^{-1}(e + c),   P = 1 - zz b^T N^{-1} c,
// where zz = z for an adapted tableau (the omega^2 part lives in the
// phi-coefficients) and zz = nu^2 + z for a classical one. N is unit lower
// triangular, so both solves are plain forward substitutions.
//
// For adapted tableaus nu must match t.nu; classical tableaus are built at 0
// and accept any test frequency. Throws InvalidParams on a mismatch or a
// non-finite argument.
std::pair<double, double> s_and_p(const Tableau& t, double nu, double z);

// Classification with tol_eq = 1e-12:
//   Periodic          |P - 1| <= tol_eq and |S| < 2
//   AbsolutelyStable  P < 1 - tol_eq and |S| < 1 + P
//   Unstable          otherwise
StabilityPoint classify(const Tableau& t, double nu, double z);

// Rectangular classification grid over [nu_min, nu_max] x [z_min, z_max].
// Cells are stored by z-row: cell (i_nu, i_z) at index i_z * nus.size() + i_nu.
// Frequencies where the tableau denominators vanish are kept in the grid,
// flagged singular, classified Unstable and carry NaN growth factors.
struct StabilityGrid {
    std::vector<double> nus;
    std::vector<double> zs;
    std::vector<StabilityPoint> cells;
    std::vector<unsigned char> singular;

    const StabilityPoint& at(int i_nu, int i_z) const {
        return cells[static_cast<size_t>(i_z) * nus.size() + static_cast<size_t>(i_nu)];
    }
    bool is_singular(int i_nu, int i_z) const {
        return singular[static_cast<size_t>(i_z) * nus.size() + static_cast<size_t>(i_nu)] != 0;
    }
};

// Classifies an n_nu x n_z grid of points, rebuilding the tableau once per
// frequency column. Columns are scanned in parallel; scan_region_serial is
// the plain loop kept as the reference implementation and produces bitwise
// identical grids. Requires 0 < nu_min <= nu_max, z_min <= z_max and
// positive grid sizes.
StabilityGrid scan_region(MethodId id, double nu_min, double nu_max,
                          double z_min, double z_max, int n_nu, int n_z);
StabilityGrid scan_region_serial(MethodId id, double nu_min, double nu_max,
                                 double z_min, double z_max, int n_nu, int n_z);

// Emits "nu,z,S,P,class" rows in cell storage order.
void write_grid_csv(const StabilityGrid& g, std::ostream& os);

// The dissipation indicators C_k = b^T A^{k-1} c and U_k = b^T A^{k-1} e
// for k = 1..k_max, returned as ({C_1..C_k}, {U_1..U_k}). All C_k vanish
// exactly when the method is zero dissipative. Requires k_max >= 1.
std::pair<std::vector<double>, std::vector<double>> ck_uk(const Tableau& t, int k_max);

} // namespace atsh
