#include "atsh/phi.hpp"

#include <cmath>
#include <limits>

#include "atsh/errors.hpp"

namespace atsh {

namespace {

template <typename Real>
Real inv_fact_impl(int j) {
    Real f = 1;
    for (int k = 2; k <= j; ++k)
        f *= static_cast<Real>(k);
    return Real(1) / f;
}

// Taylor sum phi_j(nu) = sum_k (-1)^k nu^{2k} / (2k+j)!. With nu^2 below
// (j+1)(j+2) the terms decrease from the first one on, so the alternating sum
// never cancels below ~(j/nu) of its leading term and the relative error stays
// at a few ulp.
template <typename Real>
Real series_impl(int j, Real nu) {
    Real term = inv_fact_impl<Real>(j);
    Real sum = term;
    const Real nu2 = nu * nu;
    const Real cutoff = term * std::numeric_limits<Real>::epsilon() * Real(0.01);
    for (int k = 1; k <= 120; ++k) {
        term *= -nu2 / (Real(2 * k + j - 1) * Real(2 * k + j));
        sum += term;
        if (std::fabs(term) < cutoff)
            break;
    }
    return sum;
}

// Upward walk phi_{k+2} = (1/k! - phi_k) / nu^2 from phi_0 = cos(nu) and
// phi_1 = sin(nu)/nu. Each division by nu^2 damps inherited error, so on the
// branch where nu^2 >= (j+1)(j+2) this stays accurate to a few ulp; it is the
// explicit cos/sin form of phi_j rearranged for stability.
template <typename Real>
Real recurrence_impl(int j, Real nu) {
    const Real nu2 = nu * nu;
    Real ring[2] = {std::cos(nu), std::sin(nu) / nu};
    for (int k = 0; k <= j - 2; ++k)
        ring[k % 2] = (inv_fact_impl<Real>(k) - ring[k % 2]) / nu2;
    return ring[j % 2];
}

template <typename Real>
Real phi_impl(int j, Real nu_in) {
    if (j < 0)
        throw InvalidParams("phi: order j must be nonnegative");
    if (!std::isfinite(static_cast<double>(nu_in)))
        throw InvalidParams("phi: nu must be finite");
    const Real nu = std::fabs(nu_in);
    if (j == 0)
        return std::cos(nu);
    if (j == 1)
        return nu == Real(0) ? Real(1) : std::sin(nu) / nu;
    if (nu * nu < Real((j + 1) * (j + 2)))
        return series_impl(j, nu);
    return recurrence_impl(j, nu);
}

} // namespace

double phi(int j, double nu) {
    return phi_impl<double>(j, nu);
}

long double phi_ld(int j, long double nu) {
    return phi_impl<long double>(j, nu);
}

PhiTable phi_table(double nu, int j_max) {
    if (j_max < 2)
        throw InvalidParams("phi_table: j_max must be at least 2");
    PhiTable table;
    table.nu = nu;
    table.values.resize(j_max + 1);
    for (int j = 0; j <= j_max; ++j)
        table.values[j] = phi(j, nu);
    return table;
}

double g_function(int j, double h, double omega) {
    if (!(h > 0.0))
        throw InvalidParams("g_function: h must be positive");
    double p = 1.0;
    for (int k = 0; k < j; ++k)
        p *= h;
    return p * phi(j, omega * h);
}

namespace detail {

double phi_series(int j, double nu) {
    if (j < 0)
        throw InvalidParams("phi_series: order j must be nonnegative");
    return series_impl<double>(j, std::fabs(nu));
}

double phi_recurrence(int j, double nu) {
    if (j < 0 || nu == 0.0)
        throw InvalidParams("phi_recurrence: needs j >= 0 and nu != 0");
    return recurrence_impl<double>(j, std::fabs(nu));
}

double inv_factorial(int j) {
    return inv_fact_impl<double>(j);
}

} // namespace detail

} // namespace atsh
