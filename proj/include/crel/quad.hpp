#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>

namespace crel::quad {

namespace detail {

template <class F>
double simpson(F&& f, double a, double fa, double b, double fb, double fm) {
    return (b - a) * (fa + 4.0 * fm + fb) / 6.0;
}

template <class F>
double adapt(F&& f, double a, double fa, double b, double fb, double fm,
             double whole, double eps, int depth) {
    const double m  = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left  = (m - a) * (fa + 4.0 * flm + fm) / 6.0;
    const double right = (b - m) * (fm + 4.0 * frm + fb) / 6.0;
    const double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) < 15.0 * eps)
        return left + right + diff / 15.0;
    return adapt(f, a, fa, m, fm, flm, left, 0.5 * eps, depth - 1) +
           adapt(f, m, fm, b, fb, frm, right, 0.5 * eps, depth - 1);
}

} // namespace detail

// Adaptive Simpson on [a,b]; eps is an absolute tolerance target. A coarse
// pre-split keeps localized integrands from being skipped entirely.
template <class F>
double integrate(F&& f, double a, double b, double eps = 1e-12, int max_depth = 44, int panels = 32) {
    if (!(b > a)) return 0.0;
    double acc = 0.0;
    for (int k = 0; k < panels; ++k) {
        const double x0 = a + (b - a) * k / panels;
        const double x1 = a + (b - a) * (k + 1) / panels;
        const double fa = f(x0), fb = f(x1), fm = f(0.5 * (x0 + x1));
        const double whole = (x1 - x0) * (fa + 4.0 * fm + fb) / 6.0;
        acc += detail::adapt(f, x0, fa, x1, fb, fm, whole, eps / panels, max_depth);
    }
    return acc;
}

// Semi-infinite [a, inf): map t in (0,1] via r = a + t/(1-t), stop once the
// integrand underflows. Integrand must decay at least polynomially > 1/r^2.
template <class F>
double integrate_to_inf(F&& f, double a, double eps = 1e-12) {
    auto g = [&](double t) {
        const double om = 1.0 - t;
        if (om <= 1e-300) return 0.0;
        const double r = a + t / om;
        const double jac = 1.0 / (om * om);
        const double v = f(r);
        return std::isfinite(v * jac) ? v * jac : 0.0;
    };
    return integrate(g, 0.0, 1.0, eps);
}

} // namespace crel::quad
