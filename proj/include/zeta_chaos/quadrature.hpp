#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>

namespace zeta_chaos {

namespace detail {

// 15-point Kronrod / 7-point Gauss pair on [-1,1] (QUADPACK dqk15 abscissae).
inline constexpr double kGK15_X[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
inline constexpr double kGK15_WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kGK15_WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double resk = 0.0, resg = 0.0;
    const double f0 = f(c);
    resk = kGK15_WK[7] * f0;
    resg = kGK15_WG[3] * f0;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * kGK15_X[i];
        const double fv = f(c - dx) + f(c + dx);
        resk += kGK15_WK[i] * fv;
        if (i % 2 == 1) resg += kGK15_WG[i / 2] * fv;
    }
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

template <typename F>
double gk_adaptive_impl(F& f, double a, double b, double tol, int depth) {
    double r, e;
    gk15(f, a, b, r, e);
    if (e <= tol || depth >= 52) return r;
    const double m = 0.5 * (a + b);
    return gk_adaptive_impl(f, a, m, 0.5 * tol, depth + 1) +
           gk_adaptive_impl(f, m, b, 0.5 * tol, depth + 1);
}

} // namespace detail

// Adaptive Gauss-Kronrod on [a,b]; abs_tol is the error budget for the whole
// interval.
template <typename F>
double integrate(F&& f, double a, double b, double abs_tol = 1e-10) {
    if (a == b) return 0.0;
    return detail::gk_adaptive_impl(f, a, b, abs_tol, 0);
}

// tanh-sinh quadrature on (a,b).  Handles integrable endpoint singularities;
// doubles the node density per level until two levels agree.
template <typename F>
double integrate_tanh_sinh(F&& f, double a, double b, double rel_tol = 1e-10,
                           int max_level = 12) {
    const double c = 0.5 * (a + b), h0 = 0.5 * (b - a);
    const double t_max = 6.1;
    auto eval = [&](double t) -> double {
        const double u = 1.5707963267948966 * std::sinh(t);
        const double x = std::tanh(u);          // node in (-1,1)
        const double ch = std::cosh(u);
        const double w = 1.5707963267948966 * std::cosh(t) / (ch * ch);
        if (1.0 - std::abs(x) <= 0.0) return 0.0;
        const double v = f(c + h0 * x);
        return std::isfinite(v) ? v * w : 0.0;
    };
    double h = 1.0;
    double sum = eval(0.0);
    for (double t = h; t <= t_max; t += h) sum += eval(t) + eval(-t);
    double prev = sum * h;
    for (int level = 1; level <= max_level; ++level) {
        h *= 0.5;
        double add = 0.0;
        for (double t = h; t <= t_max; t += 2.0 * h) add += eval(t) + eval(-t);
        sum += add;
        const double cur = sum * h;
        if (level >= 3 &&
            std::abs(cur - prev) <= rel_tol * std::max(std::abs(cur), 1e-300))
            return cur * h0;
        prev = cur;
    }
    return prev * h0;
}

} // namespace zeta_chaos
