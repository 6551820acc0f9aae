#include "atsh/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "atsh/errors.hpp"
#include "atsh/stability.hpp"

namespace atsh {

namespace {

constexpr int kMaxStages = 8;

// b^T (I + w A)^{-1} (e + c) and b^T (I + w A)^{-1} c by forward
// substitution, all in long double.
struct GrowthParts {
    long double bv1;
    long double bv2;
};

GrowthParts solve_pair(const detail::CoeffsLd& t, long double w) {
    long double v1[kMaxStages];
    long double v2[kMaxStages];
    for (int i = 0; i < t.s; ++i) {
        long double r1 = 1.0L + t.c[static_cast<size_t>(i)];
        long double r2 = t.c[static_cast<size_t>(i)];
        for (int j = 0; j < i; ++j) {
            const long double aij = t.a[static_cast<size_t>(i) * t.s + j];
            r1 -= w * aij * v1[j];
            r2 -= w * aij * v2[j];
        }
        v1[i] = r1;
        v2[i] = r2;
    }
    long double bv1 = 0.0L;
    long double bv2 = 0.0L;
    for (int i = 0; i < t.s; ++i) {
        bv1 += t.b[static_cast<size_t>(i)] * v1[i];
        bv2 += t.b[static_cast<size_t>(i)] * v2[i];
    }
    return {bv1, bv2};
}

// One (phase_lag, dissipation) pair in long double. The key quantities are
// assembled as differences-of-nothing: dS = S - 2 cos(H) from a product of
// sines plus the residual weight sum, dP = P - 1 directly from the weight
// sum, so both survive far below 1e-16 where the leading terms live.
struct LagDiss {
    long double lag;
    long double diss;
};

LagDiss eval_point(MethodId id, long double H, long double om, long double ep) {
    const long double lam2 = om * om + ep;
    const long double lam = std::sqrt(lam2);
    const long double nu = om * H / lam;
    const long double z = ep * H * H / lam2;
    const long double w = H * H;

    const detail::CoeffsLd t = detail::build_coeffs_ld(id, nu);
    const GrowthParts g = solve_pair(t, w);
    const long double zz = t.adapted ? z : w;

    const long double dP = -zz * g.bv2;
    if (dP <= -1.0L)
        throw OutsideDomain("phase_point: P <= 0, no growth angle exists");
    const long double dsq = std::expm1(0.5L * std::log1p(dP)); // sqrt(P) - 1

    long double dS; // S - 2 cos(H)
    if (t.adapted) {
        // 2 cos(nu) - 2 cos(H) as a product; nu - H has the closed form
        // -eps H / (lam (omega + lam)), free of cancellation.
        const long double dnuH = -(ep * H) / (lam * (om + lam));
        dS = -4.0L * std::sin(0.5L * (nu + H)) * std::sin(0.5L * dnuH) - z * g.bv1;
    } else {
        const long double sh = std::sin(0.5L * H);
        dS = 4.0L * sh * sh - w * g.bv1;
    }

    const long double cosH = std::cos(H);
    const long double sinH = std::sin(H);
    // R = S / (2 sqrt(P)) - cos(H)
    const long double R = (dS - 2.0L * cosH * dsq) / (2.0L * (1.0L + dsq));

    long double lag;
    if (std::abs(R) <= 1e-4L * sinH * sinH && std::abs(sinH) > 1e-8L) {
        // Tiny lag: solve R = 2 sigma (sin(H) sqrt(1 - sigma^2) - cos(H) sigma)
        // for sigma = sin(lag / 2) by fixed point from sigma = 0. Four sweeps
        // leave a relative error below (|R| / sin^2 H)^5.
        long double sg = 0.0L;
        for (int it = 0; it < 4; ++it)
            sg = (R + 2.0L * cosH * sg * sg) /
                 (2.0L * sinH * std::sqrt(1.0L - sg * sg));
        lag = 2.0L * std::asin(sg);
    } else {
        const long double clip = 4.0L * 2.220446049250313e-16L;
        long double u = cosH + R;
        if (std::abs(u) > 1.0L + clip)
            throw OutsideDomain("phase_point: |S| > 2 sqrt(P), no growth angle exists");
        u = std::clamp(u, -1.0L, 1.0L);
        lag = H - std::acos(u);
    }
    return {lag, -dsq};
}

struct Fit {
    int power;       // exponent of H in the leading term
    double constant;
};

// vals[k] sampled at H = 2^-(k+2). Consecutive log2 ratios give local
// slopes; the longest run agreeing within 0.025 is trusted, ties going to
// the run at the largest step sizes since roundoff eats the small ones. The
// constant comes from the smallest step size inside the accepted run.
Fit fit_leading(const std::vector<double>& vals, const std::string& what) {
    const int n = static_cast<int>(vals.size());
    std::vector<double> slope(static_cast<size_t>(n) - 1, 0.0);
    std::vector<char> ok(static_cast<size_t>(n) - 1, 0);
    for (int i = 0; i + 1 < n; ++i) {
        const double a = vals[static_cast<size_t>(i)];
        const double b = vals[static_cast<size_t>(i) + 1];
        if (!std::isfinite(a) || !std::isfinite(b) || a == 0.0 || b == 0.0 ||
            std::signbit(a) != std::signbit(b))
            continue;
        ok[static_cast<size_t>(i)] = 1;
        slope[static_cast<size_t>(i)] = std::log2(std::abs(a / b));
    }

    int best_start = -1;
    int best_len = 0;
    for (int len = n - 1; len >= 2 && best_len == 0; --len) {
        for (int start = 0; start + len <= n - 1; ++start) {
            bool valid = true;
            double lo = slope[static_cast<size_t>(start)];
            double hi = lo;
            for (int i = start; i < start + len; ++i) {
                if (!ok[static_cast<size_t>(i)]) {
                    valid = false;
                    break;
                }
                lo = std::min(lo, slope[static_cast<size_t>(i)]);
                hi = std::max(hi, slope[static_cast<size_t>(i)]);
            }
            if (valid && hi - lo <= 0.025) {
                best_start = start;
                best_len = len;
                break;
            }
        }
    }
    if (best_len == 0)
        throw FitFailed("estimate_leading: no stable slope window in the " +
                        what + " samples");

    double mean = 0.0;
    for (int i = best_start; i < best_start + best_len; ++i)
        mean += slope[static_cast<size_t>(i)];
    mean /= best_len;
    const int snapped = static_cast<int>(std::llround(mean));
    if (snapped < 1 || std::abs(mean - snapped) > 0.1)
        throw FitFailed("estimate_leading: " + what + " slope " +
                        std::to_string(mean) + " does not snap to an integer");

    const int end = best_start + best_len; // index of the smallest H in the run
    const double c =
        vals[static_cast<size_t>(end)] * std::ldexp(1.0, (end + 2) * snapped);
    return {snapped, c};
}

} // namespace

PhasePoint phase_point(MethodId id, double H, double omega, double epsilon) {
    if (!std::isfinite(H) || H <= 0.0)
        throw InvalidParams("phase_point: H must be finite and positive");
    if (!std::isfinite(omega) || !std::isfinite(epsilon) ||
        !(omega * omega + epsilon > 0.0))
        throw InvalidParams("phase_point: omega^2 + epsilon must be positive");

    const LagDiss r = eval_point(id, H, omega, epsilon);
    return {H, omega, epsilon, static_cast<double>(r.lag),
            static_cast<double>(r.diss)};
}

LeadingTerms estimate_leading(MethodId id, double omega, double epsilon) {
    if (!std::isfinite(omega) || !std::isfinite(epsilon) || epsilon == 0.0)
        throw InvalidParams("estimate_leading: epsilon must be finite and nonzero");
    if (!(omega * omega + epsilon > 0.0))
        throw InvalidParams("estimate_leading: omega^2 + epsilon must be positive");

    std::vector<double> lags;
    std::vector<double> diss;
    for (int k = 2; k <= 8; ++k) {
        const PhasePoint p = phase_point(id, std::ldexp(1.0, -k), omega, epsilon);
        lags.push_back(p.phase_lag);
        diss.push_back(p.dissipation);
    }
    const Fit fq = fit_leading(lags, "phase lag");

    // Zero-dissipative methods have every indicator C_k = b^T A^{k-1} c equal
    // to zero, making d(H) pure roundoff; detect that algebraically instead
    // of fitting noise.
    const double lam = std::sqrt(omega * omega + epsilon);
    bool zero_diss = true;
    for (const double H : {0.25, 0.03125}) {
        const Tableau t = build(id, omega * H / lam);
        const std::vector<double> ck = ck_uk(t, t.s).first;
        for (const double v : ck)
            if (std::abs(v) > 1e-13)
                zero_diss = false;
    }
    if (zero_diss)
        return {fq.power - 1, fq.constant, kOrderInf, 0.0};

    const Fit fr = fit_leading(diss, "dissipation");
    return {fq.power - 1, fq.constant, fr.power - 1, fr.constant};
}

} // namespace atsh
