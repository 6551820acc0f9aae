#include "atsh/order_conditions.hpp"

#include <cmath>

#include "atsh/errors.hpp"
#include "atsh/phi.hpp"

namespace atsh {

namespace {

std::vector<double> mat_vec(const Tableau& t, const std::vector<double>& v) {
    std::vector<double> out(t.s, 0.0);
    for (int i = 0; i < t.s; ++i)
        for (int j = 0; j < t.s; ++j)
            out[i] += t.A(i, j) * v[j];
    return out;
}

std::vector<double> had(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> out(x.size());
    for (size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] * y[i];
    return out;
}

double dot(const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i)
        s += x[i] * y[i];
    return s;
}

} // namespace

std::vector<ConditionResidual> residuals(const Tableau& t, int up_to_order) {
    if (up_to_order < 2 || up_to_order > 7)
        throw InvalidParams("residuals: up_to_order must be in 2..7");

    const double p2 = phi(2, t.nu);
    const double p4 = phi(4, t.nu);
    const double p6 = phi(6, t.nu);

    const std::vector<double> e(t.s, 1.0);
    const std::vector<double>& c = t.c;
    const std::vector<double> c2 = had(c, c);
    const std::vector<double> c3 = had(c2, c);
    const std::vector<double> c4 = had(c2, c2);
    const std::vector<double> c5 = had(c4, c);
    const std::vector<double> Ae = mat_vec(t, e);
    const std::vector<double> Ac = mat_vec(t, c);
    const std::vector<double> Ac2 = mat_vec(t, c2);
    const std::vector<double> Ac3 = mat_vec(t, c3);
    const std::vector<double> AAe = mat_vec(t, Ae);
    const std::vector<double> AAc = mat_vec(t, Ac);
    const std::vector<double> AcAe = mat_vec(t, had(c, Ae));
    const std::vector<double>& b = t.b;

    struct Row {
        const char* tree_id;
        int rho;
        double lhs;
        double rhs;
    };

    const Row rows[] = {
        {"t21", 2, dot(b, e), 2.0 * p2},
        {"t31", 3, dot(b, c), 0.0},
        {"t41", 4, dot(b, c2), 4.0 * p4},
        {"t42", 4, dot(b, Ae), 2.0 * p4},
        {"t51", 5, dot(b, c3), 0.0},
        {"t52", 5, dot(b, had(c, Ae)), 2.0 * p4},
        {"t53", 5, dot(b, Ac), 0.0},
        {"t61", 6, dot(b, c4), 48.0 * p6},
        {"t62", 6, dot(b, had(c2, Ae)), 24.0 * p6},
        {"t63", 6, dot(b, had(c, Ac)), -2.0 / 3.0 * p4 + 8.0 * p6},
        {"t64", 6, dot(b, had(Ae, Ae)), p4 + 12.0 * p6},
        {"t65", 6, dot(b, Ac2), 4.0 * p6},
        {"t66", 6, dot(b, AAe), 2.0 * p6},
        {"t71", 7, dot(b, c5), 0.0},
        {"t72", 7, dot(b, had(c3, Ae)), 24.0 * p6},
        {"t73", 7, dot(b, had(c2, Ac)), 0.0},
        {"t74", 7, dot(b, had(c, had(Ae, Ae))), 24.0 * p6},
        {"t75", 7, dot(b, had(c, AAe)), -1.0 / 6.0 * p4 + 4.0 * p6},
        {"t76", 7, dot(b, had(c, Ac2)), 1.0 / 3.0 * p4},
        {"t77", 7, dot(b, had(Ae, Ac)), -1.0 / 3.0 * p4 + 4.0 * p6},
        {"t78", 7, dot(b, Ac3), 0.0},
        {"t79", 7, dot(b, AcAe), 2.0 * p6},
        {"t7,10", 7, dot(b, AAc), 0.0},
    };

    std::vector<ConditionResidual> out;
    for (const Row& r : rows) {
        if (r.rho > up_to_order)
            continue;
        out.push_back({r.tree_id, r.rho, r.lhs, r.rhs, r.lhs - r.rhs});
    }
    return out;
}

int verify_order(const Tableau& t) {
    const auto all = residuals(t, 7);
    int worst_rho = 8; // smallest rho whose condition set fails
    for (int rho = 2; rho <= 7; ++rho) {
        bool ok = true;
        for (const auto& r : all)
            if (r.rho == rho && std::fabs(r.residual) > 1e-11)
                ok = false;
        if (!ok) {
            worst_rho = rho;
            break;
        }
    }
    int p = worst_rho - 2;
    if (p > 6)
        p = 6;
    return p;
}

double simplifying_check(const Tableau& t) {
    double worst = 0.0;
    for (int i = 0; i < t.s; ++i) {
        double row = 0.0;
        for (int j = 0; j < t.s; ++j)
            row += t.A(i, j);
        double want = 0.5 * (t.c[i] * t.c[i] + t.c[i]);
        worst = std::max(worst, std::fabs(row - want));
    }
    return worst;
}

} // namespace atsh
