#include "atsh/stability.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "atsh/errors.hpp"

namespace atsh {

namespace {

constexpr int kMaxStages = 8;

// v1 = N^{-1}(e + c), v2 = N^{-1} c with N = I + w A; two forward
// substitutions sharing the row sweep.
void solve_pair(const Tableau& t, double w, double* v1, double* v2) {
    for (int i = 0; i < t.s; ++i) {
        double a1 = 1.0 + t.c[static_cast<size_t>(i)];
        double a2 = t.c[static_cast<size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const double wa = w * t.A(i, j);
            a1 -= wa * v1[j];
            a2 -= wa * v2[j];
        }
        v1[i] = a1;
        v2[i] = a2;
    }
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    const double span = hi - lo;
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = lo + span * (static_cast<double>(i) / (n - 1));
    v[static_cast<size_t>(n - 1)] = hi;
    return v;
}

void require_window(double nu_min, double nu_max, double z_min, double z_max,
                    int n_nu, int n_z) {
    if (!std::isfinite(nu_min) || !std::isfinite(nu_max) ||
        !std::isfinite(z_min) || !std::isfinite(z_max))
        throw InvalidParams("scan_region: window bounds must be finite");
    if (!(nu_min > 0.0) || !(nu_max >= nu_min))
        throw InvalidParams("scan_region: need 0 < nu_min <= nu_max");
    if (!(z_max >= z_min))
        throw InvalidParams("scan_region: need z_min <= z_max");
    if (n_nu < 1 || n_z < 1)
        throw InvalidParams("scan_region: grid sizes must be positive");
}

// Classifies one frequency column. Building the tableau can throw
// SingularCoefficient at isolated frequencies; those columns stay in the
// grid flagged singular with NaN growth factors.
void scan_column(MethodId id, double nu, const std::vector<double>& zs, size_t n_nu,
                 size_t i_nu, StabilityPoint* cells, unsigned char* singular) {
    try {
        const Tableau t = build(id, nu);
        for (size_t iz = 0; iz < zs.size(); ++iz)
            cells[iz * n_nu + i_nu] = classify(t, nu, zs[iz]);
    } catch (const SingularCoefficient&) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        for (size_t iz = 0; iz < zs.size(); ++iz) {
            cells[iz * n_nu + i_nu] = {nu, zs[iz], nan, nan, StabilityClass::Unstable};
            singular[iz * n_nu + i_nu] = 1;
        }
    }
}

} // namespace

const char* stability_class_name(StabilityClass cls) {
    switch (cls) {
        case StabilityClass::Periodic: return "periodic";
        case StabilityClass::AbsolutelyStable: return "absolutely-stable";
        case StabilityClass::Unstable: return "unstable";
    }
    return "unstable";
}

std::pair<double, double> s_and_p(const Tableau& t, double nu, double z) {
    if (!std::isfinite(nu) || !std::isfinite(z))
        throw InvalidParams("s_and_p: nu and z must be finite");
    if (t.adapted && std::abs(nu - t.nu) > 1e-12 * (1.0 + std::abs(nu)))
        throw InvalidParams("s_and_p: adapted tableau was built at a different nu");
    if (t.s > kMaxStages)
        throw InvalidParams("s_and_p: too many stages");

    const double w = nu * nu + z;
    double v1[kMaxStages];
    double v2[kMaxStages];
    solve_pair(t, w, v1, v2);

    double bv1 = 0.0;
    double bv2 = 0.0;
    for (int i = 0; i < t.s; ++i) {
        bv1 += t.b[static_cast<size_t>(i)] * v1[i];
        bv2 += t.b[static_cast<size_t>(i)] * v2[i];
    }
    const double zz = t.adapted ? z : w;
    return {t.two_phi0 - zz * bv1, 1.0 - zz * bv2};
}

StabilityPoint classify(const Tableau& t, double nu, double z) {
    const auto [S, P] = s_and_p(t, nu, z);
    constexpr double tol_eq = 1e-12;
    StabilityClass cls = StabilityClass::Unstable;
    if (std::abs(P - 1.0) <= tol_eq && std::abs(S) < 2.0)
        cls = StabilityClass::Periodic;
    else if (P < 1.0 - tol_eq && std::abs(S) < 1.0 + P)
        cls = StabilityClass::AbsolutelyStable;
    return {nu, z, S, P, cls};
}

StabilityGrid scan_region(MethodId id, double nu_min, double nu_max,
                          double z_min, double z_max, int n_nu, int n_z) {
    require_window(nu_min, nu_max, z_min, z_max, n_nu, n_z);
    StabilityGrid g;
    g.nus = linspace(nu_min, nu_max, n_nu);
    g.zs = linspace(z_min, z_max, n_z);
    g.cells.resize(g.nus.size() * g.zs.size());
    g.singular.assign(g.cells.size(), 0);

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n_nu; ++i)
        scan_column(id, g.nus[static_cast<size_t>(i)], g.zs, g.nus.size(),
                    static_cast<size_t>(i), g.cells.data(), g.singular.data());
    return g;
}

StabilityGrid scan_region_serial(MethodId id, double nu_min, double nu_max,
                                 double z_min, double z_max, int n_nu, int n_z) {
    require_window(nu_min, nu_max, z_min, z_max, n_nu, n_z);
    StabilityGrid g;
    g.nus = linspace(nu_min, nu_max, n_nu);
    g.zs = linspace(z_min, z_max, n_z);
    g.cells.resize(g.nus.size() * g.zs.size());
    g.singular.assign(g.cells.size(), 0);

    for (size_t i = 0; i < g.nus.size(); ++i)
        scan_column(id, g.nus[i], g.zs, g.nus.size(), i, g.cells.data(),
                    g.singular.data());
    return g;
}

void write_grid_csv(const StabilityGrid& g, std::ostream& os) {
    os << "nu,z,S,P,class\n";
    char buf[160];
    for (const StabilityPoint& p : g.cells) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s\n", p.nu, p.z,
                      p.S, p.P, stability_class_name(p.cls));
        os << buf;
    }
}

std::pair<std::vector<double>, std::vector<double>> ck_uk(const Tableau& t, int k_max) {
    if (k_max < 1)
        throw InvalidParams("ck_uk: k_max must be >= 1");

    const size_t s = static_cast<size_t>(t.s);
    std::vector<double> vc(t.c);
    std::vector<double> ve(s, 1.0);
    std::vector<double> tmp(s);
    std::vector<double> C, U;
    C.reserve(static_cast<size_t>(k_max));
    U.reserve(static_cast<size_t>(k_max));

    for (int k = 0; k < k_max; ++k) {
        double ck = 0.0;
        double uk = 0.0;
        for (size_t i = 0; i < s; ++i) {
            ck += t.b[i] * vc[i];
            uk += t.b[i] * ve[i];
        }
        C.push_back(ck);
        U.push_back(uk);
        if (k + 1 == k_max) break;
        for (size_t i = 0; i < s; ++i) {
            double av = 0.0;
            for (size_t j = 0; j < i; ++j) av += t.A(static_cast<int>(i), static_cast<int>(j)) * vc[j];
            tmp[i] = av;
        }
        vc.swap(tmp);
        for (size_t i = 0; i < s; ++i) {
            double av = 0.0;
            for (size_t j = 0; j < i; ++j) av += t.A(static_cast<int>(i), static_cast<int>(j)) * ve[j];
            tmp[i] = av;
        }
        ve.swap(tmp);
    }
    return {C, U};
}

} // namespace atsh
