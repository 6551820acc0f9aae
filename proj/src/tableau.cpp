#include "atsh/tableau.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <type_traits>
#include <utility>

#include "atsh/errors.hpp"
#include "atsh/phi.hpp"

namespace atsh {

namespace {

const std::array<MethodInfo, 8> kMethods = {{
    {MethodId::AdaptedNumerov4, "numerov4", 3, 4, 4, kOrderInf, true},
    {MethodId::Atsh5MinErr, "atsh5-minerr", 4, 5, 6, 5, true},
    {MethodId::Atsh5Phase8, "atsh5-pl8", 4, 5, 8, 5, true},
    {MethodId::Atsh4ZeroDiss, "atsh4-zd", 4, 4, 6, kOrderInf, true},
    {MethodId::ClassicalNumerov4, "classical:numerov4", 3, 4, 4, kOrderInf, false},
    {MethodId::ClassicalMinErr5, "classical:atsh5-minerr", 4, 5, 6, 5, false},
    {MethodId::ClassicalPhase8, "classical:atsh5-pl8", 4, 5, 8, 5, false},
    {MethodId::ClassicalZeroDiss4, "classical:atsh4-zd", 4, 4, 6, kOrderInf, false},
}};

template <typename Real>
Real phi_as(int j, Real nu) {
    if constexpr (std::is_same_v<Real, long double>)
        return phi_ld(j, nu);
    else
        return phi(j, nu);
}

template <typename Real>
struct Coeffs {
    int s = 0;
    Real nu = 0;
    std::vector<Real> c;
    std::vector<Real> a;
    std::vector<Real> b;
    bool adapted = false;
    Real two_phi0 = 2;
};

// Denominator guard: a factor is unusable when it is 1e-10 of its nu = 0
// magnitude or smaller.
template <typename Real>
void check_factor(Real value, double at_zero, const char* label, double nu) {
    if (std::fabs(static_cast<double>(value)) < 1e-10 * std::fabs(at_zero))
        throw SingularCoefficient(std::string("coefficient factor ") + label +
                                  " vanishes near nu = " + std::to_string(nu));
}

template <typename Real>
Coeffs<Real> build_impl(MethodId id, Real nu_arg) {
    const MethodInfo& info = method_info(id);
    const bool adapted = info.adapted;
    // Classical companions are the constant nu = 0 coefficients.
    const Real nu = adapted ? std::fabs(nu_arg) : Real(0);
    if (!std::isfinite(static_cast<double>(nu_arg)) || static_cast<double>(nu_arg) < 0.0)
        throw InvalidParams("build: nu must be finite and nonnegative");

    const Real p2 = phi_as(2, nu);
    const Real p4 = phi_as(4, nu);
    const Real p6 = phi_as(6, nu);
    const double nu_d = static_cast<double>(nu);

    Coeffs<Real> t;
    t.s = info.stages;
    t.nu = nu;
    t.adapted = adapted;
    t.two_phi0 = adapted ? 2 * phi_as(0, nu) : Real(2);
    t.c.assign(t.s, Real(0));
    t.a.assign(static_cast<size_t>(t.s) * t.s, Real(0));
    t.b.assign(t.s, Real(0));
    t.c[0] = -1;
    t.c[1] = 0;
    auto A = [&](int i, int j) -> Real& { return t.a[static_cast<size_t>(i) * t.s + j]; };

    switch (base_method(id)) {
    case MethodId::AdaptedNumerov4: {
        t.c[2] = 1;
        A(2, 0) = 0;
        A(2, 1) = 1;
        t.b[0] = 2 * p4;
        t.b[1] = 2 * p2 - 4 * p4;
        t.b[2] = 2 * p4;
        break;
    }
    case MethodId::Atsh5MinErr: {
        const Real S1 = 600 * p6 - 13 * p4;
        const Real S2 = 400 * p6 - 21 * p4;
        const Real S3 = 40000 * p6 - 2877 * p4;
        check_factor(p4, 1.0 / 24.0, "phi_4", nu_d);
        check_factor(S1, 7.0 / 24.0, "S1", nu_d);
        check_factor(S2, -23.0 / 72.0, "S2", nu_d);
        check_factor(S3, -4631.0 / 72.0, "S3", nu_d);
        const Real p4_4 = p4 * p4 * p4 * p4;
        t.c[2] = Real(63) / 100;
        t.c[3] = 3 * S2 / (37 * p4);
        A(2, 0) = Real(126651) / 2000000;
        A(2, 1) = Real(900249) / 2000000;
        A(3, 0) = 100 * S1 * S2 * (720000 * p6 * p6 - 124158 * p6 * p4 + 6031 * p4 * p4) /
                  (305488243 * p4_4);
        A(3, 1) = S1 * S2 * (-8000000 * p6 * p6 + 886200 * p6 * p4 + 2849 * p4 * p4) /
                  (13119127 * p4_4);
        A(3, 2) = 20000 * S1 * S2 * S3 * p6 / (2138417701 * p4_4);
        t.b[0] = 6 * (40000 * p6 - 1323 * p4) * p4 / (163 * S1);
        t.b[1] = 2 * (15338 * p4 * p4 - 240000 * p6 * p4 - 3969 * p4 * p2 + 75600 * p2 * p6) /
                 (189 * S2);
        t.b[2] = 400000000 * (12 * p6 - p4) * p4 / (30807 * S3);
        t.b[3] = 3748322 * p4_4 / (9 * S1 * S2 * S3);
        break;
    }
    case MethodId::Atsh5Phase8: {
        const Real S1 = 336 * p6 - 25 * p4;
        const Real S2 = 168 * p6 - 11 * p4;
        const Real S3 = 9408 * p6 - 775 * p4;
        check_factor(p4, 1.0 / 24.0, "phi_4", nu_d);
        check_factor(S1, -23.0 / 40.0, "S1", nu_d);
        check_factor(S2, -9.0 / 40.0, "S2", nu_d);
        check_factor(S3, -769.0 / 40.0, "S3", nu_d);
        const Real p4_4 = p4 * p4 * p4 * p4;
        t.c[2] = Real(25) / 28;
        t.c[3] = S1 / (3 * p4);
        A(2, 0) = Real(1325) / 43904;
        A(2, 1) = Real(35775) / 43904;
        A(3, 0) = 28 * S1 * S2 * (18816 * p6 * p6 - 2186 * p6 * p4 + 53 * p4 * p4) /
                  (4293 * p4_4);
        A(3, 1) = -S1 * S2 * (526848 * p6 * p6 - 51800 * p6 * p4 + 475 * p4 * p4) /
                  (2025 * p4_4);
        A(3, 2) = 1568 * S1 * S2 * S3 * p6 / (107325 * p4_4);
        t.b[0] = 2 * (9408 * p6 - 625 * p4) * p4 / (53 * S2);
        t.b[1] = 2 * (1418 * p4 * p4 - 625 * p4 * p2 - 18816 * p6 * p4 + 8400 * p2 * p6) /
                 (25 * S1);
        t.b[2] = 2458624 * (12 * p6 - p4) * p4 / (1325 * S3);
        t.b[3] = 162 * p4_4 / (S1 * S2 * S3);
        break;
    }
    case MethodId::Atsh4ZeroDiss: {
        check_factor(p4, 1.0 / 24.0, "phi_4", nu_d);
        t.c[2] = Real(13) / 20;
        t.c[3] = Real(-5) / 7;
        A(2, 0) = 0;
        A(2, 1) = Real(429) / 800;
        A(3, 0) = 38200 * p6 / (79233 * p4);
        A(3, 1) = -5 * (7640 * p6 + 637 * p4) / (31213 * p4);
        A(3, 2) = 764000 * p6 / (1030029 * p4);
        t.b[0] = -6 * p4 / 11;
        t.b[1] = -596 * p4 / 65 + 2 * p2;
        t.b[2] = 128000 * p4 / 27313;
        t.b[3] = 4802 * p4 / 955;
        break;
    }
    default:
        throw InvalidParams("build: unknown method id");
    }
    return t;
}

std::mutex cache_mutex;
std::map<std::pair<int, double>, Tableau> cache;

} // namespace

const MethodInfo& method_info(MethodId id) {
    for (const auto& m : kMethods)
        if (m.id == id)
            return m;
    throw InvalidParams("unknown method id");
}

const std::vector<MethodId>& all_methods() {
    static const std::vector<MethodId> ids = [] {
        std::vector<MethodId> v;
        for (const auto& m : kMethods)
            v.push_back(m.id);
        return v;
    }();
    return ids;
}

bool is_classical(MethodId id) {
    return !method_info(id).adapted;
}

MethodId base_method(MethodId id) {
    switch (id) {
    case MethodId::ClassicalNumerov4: return MethodId::AdaptedNumerov4;
    case MethodId::ClassicalMinErr5: return MethodId::Atsh5MinErr;
    case MethodId::ClassicalPhase8: return MethodId::Atsh5Phase8;
    case MethodId::ClassicalZeroDiss4: return MethodId::Atsh4ZeroDiss;
    default: return id;
    }
}

MethodId classical_companion(MethodId id) {
    switch (id) {
    case MethodId::AdaptedNumerov4: return MethodId::ClassicalNumerov4;
    case MethodId::Atsh5MinErr: return MethodId::ClassicalMinErr5;
    case MethodId::Atsh5Phase8: return MethodId::ClassicalPhase8;
    case MethodId::Atsh4ZeroDiss: return MethodId::ClassicalZeroDiss4;
    default: return id;
    }
}

MethodId method_from_name(std::string_view name) {
    for (const auto& m : kMethods)
        if (name == m.name)
            return m.id;
    throw InvalidParams("unknown method name: " + std::string(name));
}

Tableau build(MethodId id, double nu) {
    const MethodInfo& info = method_info(id);
    if (!std::isfinite(nu) || nu < 0.0)
        throw InvalidParams("build: nu must be finite and nonnegative");
    const double key_nu = info.adapted ? nu : 0.0;
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = cache.find({static_cast<int>(id), key_nu});
        if (it != cache.end())
            return it->second;
    }

    Coeffs<double> co = build_impl<double>(id, nu);
    Tableau t;
    t.id = id;
    t.s = co.s;
    t.nu = co.nu;
    t.c = std::move(co.c);
    t.a = std::move(co.a);
    t.b = std::move(co.b);
    t.p = info.order;
    t.q = info.phase_lag_order;
    t.r = info.dissipation_order;
    t.adapted = co.adapted;
    t.two_phi0 = co.two_phi0;

    std::lock_guard<std::mutex> lock(cache_mutex);
    if (cache.size() > 4096)
        cache.clear();
    cache.emplace(std::make_pair(static_cast<int>(id), key_nu), t);
    return t;
}

namespace detail {

CoeffsLd build_coeffs_ld(MethodId id, long double nu) {
    Coeffs<long double> co = build_impl<long double>(id, nu);
    CoeffsLd out;
    out.s = co.s;
    out.nu = co.nu;
    out.c = std::move(co.c);
    out.a = std::move(co.a);
    out.b = std::move(co.b);
    out.adapted = co.adapted;
    out.two_phi0 = co.two_phi0;
    return out;
}

} // namespace detail

} // namespace atsh
