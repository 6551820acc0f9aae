#pragma once

#include <string_view>
#include <vector>

namespace atsh {

// The four adapted methods plus their constant-coefficient companions
// (the nu -> 0 limits, used with the classical update).
enum class MethodId {
    AdaptedNumerov4,
    Atsh5MinErr,
    Atsh5Phase8,
    Atsh4ZeroDiss,
    ClassicalNumerov4,
    ClassicalMinErr5,
    ClassicalPhase8,
    ClassicalZeroDiss4,
};

// Marks an unbounded dissipation order (zero-dissipative method).
inline constexpr int kOrderInf = -1;

struct MethodInfo {
    MethodId id;
    const char* name;      // stable CLI name, "classical:" prefix for companions
    int stages;
    int order;             // algebraic order p
    int phase_lag_order;   // q
    int dissipation_order; // r, kOrderInf when zero-dissipative
    bool adapted;
};

const MethodInfo& method_info(MethodId id);
const std::vector<MethodId>& all_methods();

bool is_classical(MethodId id);
MethodId base_method(MethodId id);         // companion -> adapted original
MethodId classical_companion(MethodId id); // adapted -> companion

// Resolves a CLI name ("atsh5-minerr", "classical:numerov4", ...).
MethodId method_from_name(std::string_view name);

// Coefficient set of one method evaluated at one nu. Rows 1-2 of A are zero
// and c1 = -1, c2 = 0 for every method here; A is strictly lower triangular.
struct Tableau {
    MethodId id;
    int s;
    double nu;             // nu the coefficients were evaluated at (0 for classical)
    std::vector<double> c;
    std::vector<double> a; // row-major s x s
    std::vector<double> b;
    int p;
    int q;
    int r;                 // kOrderInf when zero-dissipative
    bool adapted;
    double two_phi0;       // update weight: 2 phi_0(nu), exactly 2 when classical

    double A(int i, int j) const { return a[static_cast<size_t>(i) * s + j]; }
};

// Evaluates the coefficients at nu (cached per (id, nu), thread-safe).
// Classical ids ignore nu and built at 0. Throws SingularCoefficient when a
// denominator factor of the 4-stage families vanishes at this nu.
Tableau build(MethodId id, double nu);

namespace detail {

// Extended-precision coefficients for the phase-lag analysis.
struct CoeffsLd {
    int s;
    long double nu;
    std::vector<long double> c;
    std::vector<long double> a;
    std::vector<long double> b;
    bool adapted;
    long double two_phi0;
};

CoeffsLd build_coeffs_ld(MethodId id, long double nu);

} // namespace detail

} // namespace atsh
