#include "atsh/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "atsh/errors.hpp"
#include "atsh/phi.hpp"

namespace atsh {

namespace {

void validate_problem(const Problem& p) {
    if (p.dim < 1)
        throw InvalidParams("problem: dim must be at least 1");
    if (!(p.x_end > p.x0))
        throw InvalidParams("problem: x_end must exceed x0");
    if (p.y0.size() != size_t(p.dim) || p.dy0.size() != size_t(p.dim))
        throw InvalidParams("problem: initial data size does not match dim");
    if (!p.g)
        throw InvalidParams("problem: missing perturbation function");
    if (!(p.omega >= 0.0) || !std::isfinite(p.omega))
        throw InvalidParams("problem: omega must be finite and nonnegative");
}

// Weights of a finite-difference rule on the nodes z for the derivatives
// 0..max_order at the point 0 (Fornberg's recursion). w[j][k] multiplies the
// sample at z[k] in the j-th derivative.
std::vector<std::vector<double>> fd_weights(const std::vector<double>& z, int max_order) {
    int n = static_cast<int>(z.size());
    int m = max_order;
    std::vector<std::vector<double>> w(m + 1, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> prev(m + 1, std::vector<double>(n, 0.0));
    w[0][0] = 1.0;
    double c1 = 1.0;
    for (int i = 1; i < n; ++i) {
        prev = w;
        double c2 = 1.0;
        for (int j = 0; j < i; ++j)
            c2 *= z[i] - z[j];
        for (int k = 0; k <= std::min(i, m); ++k) {
            for (int kk = 0; kk < i; ++kk)
                w[k][kk] = (z[i] * prev[k][kk] - (k > 0 ? k * prev[k - 1][kk] : 0.0)) /
                           (z[i] - z[kk]);
            w[k][i] = c1 * ((k > 0 ? k * prev[k - 1][i - 1] : 0.0) - z[i - 1] * prev[k][i - 1]) / c2;
        }
        c1 = c2;
    }
    return w;
}

struct Rk6 {
    static constexpr int stages = 7;
    // Butcher's classic seven-stage sixth-order scheme
    static constexpr double c[7] = {0.0,       1.0 / 3.0, 2.0 / 3.0, 1.0 / 3.0,
                                    1.0 / 2.0, 1.0 / 2.0, 1.0};
    static constexpr double b[7] = {11.0 / 120.0, 0.0,        27.0 / 40.0, 27.0 / 40.0,
                                    -4.0 / 15.0,  -4.0 / 15.0, 11.0 / 120.0};
    static constexpr double a[7][6] = {
        {},
        {1.0 / 3.0},
        {0.0, 2.0 / 3.0},
        {1.0 / 12.0, 1.0 / 3.0, -1.0 / 12.0},
        {-1.0 / 16.0, 9.0 / 8.0, -3.0 / 16.0, -3.0 / 8.0},
        {0.0, 9.0 / 8.0, -3.0 / 8.0, -3.0 / 4.0, 1.0 / 2.0},
        {9.0 / 44.0, -9.0 / 11.0, 63.0 / 44.0, 18.0 / 11.0, 0.0, -16.0 / 11.0},
    };
};

constexpr double Rk6::c[7];
constexpr double Rk6::b[7];
constexpr double Rk6::a[7][6];

// One-step march of the first-order system (y, v)' = (v, -omega^2 y + g).
// Advances n_steps of size dt in place; counts one g call per stage.
void rk6_march(const Problem& p, double x_start, double dt, long n_steps, std::vector<double>& y,
               std::vector<double>& v, long long& g_evals) {
    int d = p.dim;
    double w2 = p.omega * p.omega;
    std::vector<double> ky(Rk6::stages * d), kv(Rk6::stages * d), yt(d), gt(d);
    for (long n = 0; n < n_steps; ++n) {
        double x = x_start + n * dt;
        for (int s = 0; s < Rk6::stages; ++s) {
            for (int i = 0; i < d; ++i) {
                double ay = y[i], av = v[i];
                for (int j = 0; j < s; ++j) {
                    ay += dt * Rk6::a[s][j] * ky[j * d + i];
                    av += dt * Rk6::a[s][j] * kv[j * d + i];
                }
                yt[i] = ay;
                kv[s * d + i] = av; // stash the stage velocity
            }
            p.g(x + Rk6::c[s] * dt, yt.data(), gt.data());
            ++g_evals;
            for (int i = 0; i < d; ++i) {
                ky[s * d + i] = kv[s * d + i];
                kv[s * d + i] = -w2 * yt[i] + gt[i];
            }
        }
        for (int i = 0; i < d; ++i) {
            double sy = 0.0, sv = 0.0;
            for (int s = 0; s < Rk6::stages; ++s) {
                sy += Rk6::b[s] * ky[s * d + i];
                sv += Rk6::b[s] * kv[s * d + i];
            }
            y[i] += dt * sy;
            v[i] += dt * sv;
        }
    }
}

std::vector<double> start_value_counted(const Problem& p, double h, StarterMode mode,
                                        long long& g_evals) {
    validate_problem(p);
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidParams("start_value: h must be positive and finite");
    int d = p.dim;
    std::vector<double> y1(d);
    switch (mode) {
    case StarterMode::Exact: {
        if (!p.exact)
            throw ExactUnavailable("start_value: no stored solution for mode Exact");
        p.exact(p.x0 + h, y1.data());
        return y1;
    }
    case StarterMode::Oracle: {
        std::vector<double> y = p.y0, v = p.dy0;
        rk6_march(p, p.x0, h / 100.0, 100, y, v, g_evals);
        return y;
    }
    case StarterMode::Series: {
        // Sample g along a short sixth-order march, difference it for the
        // x-derivatives of g(x, y(x)), then sum the phi-weighted series.
        const int samples = 7;
        const int max_der = 4;
        double delta = h / 8.0;
        std::vector<double> y = p.y0, v = p.dy0;
        std::vector<double> gs(samples * d), nodes(samples);
        for (int k = 0; k < samples; ++k) {
            nodes[k] = k * delta;
            if (k > 0)
                rk6_march(p, p.x0 + (k - 1) * delta, delta, 1, y, v, g_evals);
            p.g(p.x0 + k * delta, y.data(), gs.data() + size_t(k) * d);
            ++g_evals;
        }
        auto w = fd_weights(nodes, max_der);
        double nu = p.omega * h;
        for (int i = 0; i < d; ++i)
            y1[i] = phi(0, nu) * p.y0[i] + h * phi(1, nu) * p.dy0[i];
        double hp = h * h;
        for (int j = 0; j <= max_der; ++j) {
            double coeff = hp * phi(j + 2, nu);
            for (int i = 0; i < d; ++i) {
                double dj = 0.0;
                for (int k = 0; k < samples; ++k)
                    dj += w[j][k] * gs[size_t(k) * d + i];
                y1[i] += coeff * dj;
            }
            hp *= h;
        }
        return y1;
    }
    }
    throw InvalidParams("start_value: unknown starter mode");
}

// Shared stage-and-update kernel. g_prev, when non-null, is g at
// (x_n - h, y_prev) and is consumed by the c = -1 stage. Writes the advanced
// value into y_next and g(x_n, y_curr) into g_curr.
void step_kernel(const Tableau& t, const Problem& p, double x_n, double h, const double* y_prev,
                 const double* y_curr, const double* g_prev, double* y_next, double* g_curr,
                 std::vector<double>& stage_y, std::vector<double>& stage_g, long long& g_evals) {
    int s = t.s;
    int d = p.dim;
    double w2 = p.omega * p.omega;
    double h2 = h * h;
    stage_y.assign(size_t(s) * d, 0.0);
    stage_g.assign(size_t(s) * d, 0.0);
    for (int i = 0; i < s; ++i) {
        double* Yi = stage_y.data() + size_t(i) * d;
        for (int k = 0; k < d; ++k) {
            double acc = (1.0 + t.c[i]) * y_curr[k] - t.c[i] * y_prev[k];
            for (int j = 0; j < i; ++j) {
                double aij = t.A(i, j);
                if (aij != 0.0)
                    acc += h2 * aij *
                           (stage_g[size_t(j) * d + k] - w2 * stage_y[size_t(j) * d + k]);
            }
            Yi[k] = acc;
        }
        double* Gi = stage_g.data() + size_t(i) * d;
        if (i == 0 && g_prev) {
            std::copy(g_prev, g_prev + d, Gi);
        } else {
            p.g(x_n + t.c[i] * h, Yi, Gi);
            ++g_evals;
        }
    }
    std::copy(stage_g.begin() + d, stage_g.begin() + 2 * d, g_curr);
    for (int k = 0; k < d; ++k) {
        double acc = t.two_phi0 * y_curr[k] - y_prev[k];
        for (int i = 0; i < s; ++i) {
            double gi = stage_g[size_t(i) * d + k];
            if (!t.adapted)
                gi -= w2 * stage_y[size_t(i) * d + k];
            acc += h2 * t.b[i] * gi;
        }
        if (!std::isfinite(acc))
            throw NonFiniteState("step: solution value is no longer finite");
        y_next[k] = acc;
    }
}

// x-derivatives of g along the discrete solution at x_M, from a backward
// finite difference over the last grid values. Returns derivatives 0..3 (or
// fewer when the grid is short), row-major (der x dim).
std::vector<double> tail_g_derivatives(const Problem& p, const std::vector<double>& xs,
                                       const std::vector<double>& ys, long M, int& max_der,
                                       long long& g_evals) {
    int d = p.dim;
    int pts = static_cast<int>(std::min<long>(5, M + 1));
    max_der = std::min(3, pts - 1);
    std::vector<double> nodes(pts), gs(size_t(pts) * d);
    for (int k = 0; k < pts; ++k) {
        nodes[k] = xs[M - k] - xs[M];
        p.g(xs[M - k], ys.data() + size_t(M - k) * d, gs.data() + size_t(k) * d);
        ++g_evals;
    }
    auto w = fd_weights(nodes, max_der);
    std::vector<double> ders(size_t(max_der + 1) * d, 0.0);
    for (int j = 0; j <= max_der; ++j)
        for (int i = 0; i < d; ++i) {
            double acc = 0.0;
            for (int k = 0; k < pts; ++k)
                acc += w[j][k] * gs[size_t(k) * d + i];
            ders[size_t(j) * d + i] = acc;
        }
    return ders;
}

} // namespace

std::vector<double> start_value(const Problem& problem, double h, StarterMode mode) {
    long long scratch = 0;
    return start_value_counted(problem, h, mode, scratch);
}

TwoStepState step(const Tableau& tableau, const Problem& problem, const TwoStepState& state,
                  double h) {
    validate_problem(problem);
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidParams("step: h must be positive and finite");
    size_t d = size_t(problem.dim);
    if (state.y_prev.size() != d || state.y_curr.size() != d)
        throw InvalidParams("step: state size does not match problem dim");
    if (tableau.adapted && std::fabs(tableau.nu - problem.omega * h) > 1e-12 * (1.0 + tableau.nu))
        throw InvalidParams("step: tableau.nu does not equal omega*h");
    if (state.g_at_prev && state.g_at_prev->size() != d)
        throw InvalidParams("step: stored g size does not match problem dim");

    TwoStepState next;
    next.x_n = state.x_n + h;
    next.y_prev = state.y_curr;
    next.y_curr.resize(d);
    next.g_at_prev = std::vector<double>(d);
    next.g_evals = state.g_evals;
    std::vector<double> stage_y, stage_g;
    step_kernel(tableau, problem, state.x_n, h, state.y_prev.data(), state.y_curr.data(),
                state.g_at_prev ? state.g_at_prev->data() : nullptr, next.y_curr.data(),
                next.g_at_prev->data(), stage_y, stage_g, next.g_evals);
    return next;
}

IntegrationResult integrate(MethodId id, const Problem& problem, double h, StarterMode starter) {
    validate_problem(problem);
    if (!(h > 0.0) || !std::isfinite(h))
        throw InvalidParams("integrate: h must be positive and finite");

    const int d = problem.dim;
    const double span = problem.x_end - problem.x0;
    const double q = span / h;
    long long n_whole = std::llround(q);
    bool exact_grid =
        n_whole >= 1 && std::fabs(q - double(n_whole)) <= 4.0 * std::ldexp(1.0, -52) *
                                                              std::max(1.0, double(n_whole));
    if (!exact_grid)
        n_whole = static_cast<long long>(std::floor(q));
    const bool tail = !exact_grid;
    const double h_tail = tail ? span - double(n_whole) * h : 0.0;
    const long long n_points = n_whole + 1 + (tail ? 1 : 0);

    IntegrationResult res;
    res.dim = d;
    res.xs.resize(n_points);
    res.ys.resize(size_t(n_points) * d);
    for (long long n = 0; n <= n_whole; ++n)
        res.xs[n] = problem.x0 + double(n) * h;
    res.xs[n_points - 1] = problem.x_end;
    std::copy(problem.y0.begin(), problem.y0.end(), res.ys.begin());

    if (n_whole >= 1) {
        auto y1 = start_value_counted(problem, h, starter, res.starter_g_evals);
        std::copy(y1.begin(), y1.end(), res.ys.begin() + d);

        Tableau t = build(id, problem.omega * h);
        std::vector<double> stage_y, stage_g, g_store(d);
        const double* g_prev = nullptr;
        for (long long n = 1; n < n_whole; ++n) {
            step_kernel(t, problem, res.xs[n], h, res.ys.data() + size_t(n - 1) * d,
                        res.ys.data() + size_t(n) * d, g_prev, res.ys.data() + size_t(n + 1) * d,
                        g_store.data(), stage_y, stage_g, res.g_evals);
            g_prev = g_store.data();
        }

        if (tail) {
            // Close the interval: recover the derivative at the last whole
            // grid point from the series run backward over one bulk step,
            // synthesize a ghost value a tail-step back, then take one
            // two-step update of length h_tail.
            long long M = n_whole;
            int max_der = 0;
            auto ders = tail_g_derivatives(problem, res.xs, res.ys, M, max_der, res.g_evals);
            double nu = problem.omega * h;
            double nu_f = problem.omega * h_tail;
            const double* yM = res.ys.data() + size_t(M) * d;
            const double* yM1 = res.ys.data() + size_t(M - 1) * d;
            std::vector<double> ghost(d);
            double p1 = phi(1, nu);
            if (std::fabs(p1) >= 0.05) {
                double p0 = phi(0, nu);
                for (int i = 0; i < d; ++i) {
                    double series = p0 * yM[i] - yM1[i];
                    double hp = h * h;
                    for (int j = 0; j <= max_der; ++j) {
                        double sign = (j % 2 == 0) ? 1.0 : -1.0;
                        series += sign * hp * phi(j + 2, nu) * ders[size_t(j) * d + i];
                        hp *= h;
                    }
                    double dyM = series / (h * p1);
                    double g_ser = phi(0, nu_f) * yM[i] - h_tail * phi(1, nu_f) * dyM;
                    double hq = h_tail * h_tail;
                    for (int j = 0; j <= max_der; ++j) {
                        double sign = (j % 2 == 0) ? 1.0 : -1.0;
                        g_ser += sign * hq * phi(j + 2, nu_f) * ders[size_t(j) * d + i];
                        hq *= h_tail;
                    }
                    ghost[i] = g_ser;
                }
            } else {
                // sin(nu) ~ 0: the series division is ill-conditioned, fall
                // back to a one-sided difference for the derivative
                int pts = static_cast<int>(std::min<long long>(5, M + 1));
                std::vector<double> nodes(pts);
                for (int k = 0; k < pts; ++k)
                    nodes[k] = res.xs[M - k] - res.xs[M];
                auto w = fd_weights(nodes, 1);
                for (int i = 0; i < d; ++i) {
                    double dyM = 0.0;
                    for (int k = 0; k < pts; ++k)
                        dyM += w[1][k] * res.ys[size_t(M - k) * d + i];
                    double g_ser = phi(0, nu_f) * yM[i] - h_tail * phi(1, nu_f) * dyM;
                    double hq = h_tail * h_tail;
                    for (int j = 0; j <= max_der; ++j) {
                        double sign = (j % 2 == 0) ? 1.0 : -1.0;
                        g_ser += sign * hq * phi(j + 2, nu_f) * ders[size_t(j) * d + i];
                        hq *= h_tail;
                    }
                    ghost[i] = g_ser;
                }
            }
            Tableau tf = build(id, nu_f);
            std::vector<double> g_store2(d);
            step_kernel(tf, problem, res.xs[M], h_tail, ghost.data(), yM, nullptr,
                        res.ys.data() + size_t(M + 1) * d, g_store2.data(), stage_y, stage_g,
                        res.g_evals);
        }
    } else {
        // the whole interval fits inside one starting step
        auto y1 = start_value_counted(problem, tail ? h_tail : span, starter, res.starter_g_evals);
        std::copy(y1.begin(), y1.end(), res.ys.begin() + d);
    }

    if (problem.exact) {
        std::vector<double> ex(d);
        double worst = 0.0;
        bool ok = true;
        for (long long n = 0; n < n_points && ok; ++n) {
            try {
                problem.exact(res.xs[n], ex.data());
            } catch (const InvalidParams&) {
                // reference defined only on its own grid; skip error reporting
                ok = false;
                break;
            }
            double s2 = 0.0;
            for (int i = 0; i < d; ++i) {
                double diff = res.ys[size_t(n) * d + i] - ex[i];
                s2 += diff * diff;
            }
            worst = std::max(worst, std::sqrt(s2));
        }
        if (ok)
            res.max_global_error = worst;
    }
    return res;
}

double convergence_order(MethodId id, const Problem& problem, const std::vector<double>& h_list,
                         StarterMode starter) {
    if (h_list.size() < 3)
        throw InvalidParams("convergence_order: need at least 3 stepsizes");
    for (size_t i = 0; i < h_list.size(); ++i) {
        if (!(h_list[i] > 0.0))
            throw InvalidParams("convergence_order: stepsizes must be positive");
        if (i > 0 && !(h_list[i] < h_list[i - 1]))
            throw InvalidParams("convergence_order: stepsizes must decrease");
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    double n = double(h_list.size());
    for (double h : h_list) {
        auto res = integrate(id, problem, h, starter);
        if (!res.max_global_error)
            throw ExactUnavailable("convergence_order: no reference to measure errors against");
        double lx = std::log(h);
        double ly = std::log(std::max(*res.max_global_error, 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace atsh
