#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

#include "crel/problem.hpp"

namespace crel {

struct EnergyReport {
    double value = 0.0;     // I(u)
    double kinetic = 0.0;   // ||grad u||_2^2
    double potential = 0.0; // int V u^2
    double fpart = 0.0;     // int F(u)
    double gpart = 0.0;     // int b G(u)
    double nehari = 0.0;    // I'(u) . u
    std::optional<double> residual_norm;
    std::optional<double> pohozaev;
};

// Exact gradient of the discrete energy plus its representations.
struct WeakForm {
    std::vector<double> gradient; // dI[e_i], interior unknowns i = 0..M-1
    RadialFn strong_form;         // gradient divided by node masses: -Lap u + Vu - f - bg
    double dual_norm = 0.0;       // H_V' norm via one stiffness solve
};

namespace energy {

namespace detail {

struct Assembled {
    std::vector<double> mass;  // node masses (half-cell volume at r=0)
    std::vector<double> cond;  // conductances of the kinetic form
    std::vector<double> Vn;    // V at nodes
    std::vector<double> bn;    // b at nodes
};

inline Assembled assemble(const Functional& J) {
    const RadialGrid& g = J.grid();
    Assembled a;
    a.mass = radial::node_masses(g);
    a.cond = radial::conductances(g);
    a.Vn.resize(g.nodes + 1);
    a.bn.resize(g.nodes + 1);
    for (int i = 0; i <= g.nodes; ++i) {
        a.Vn[i] = J.V(g.r(i));
        a.bn[i] = J.b(g.r(i));
        if (!std::isfinite(a.Vn[i])) throw std::domain_error("potential not finite at node");
    }
    return a;
}

} // namespace detail

// The discrete functional: I(u) = Q(u)/2 + P(u)/2 - sum m F(u) - sum m b G(u),
// with Q the conservative kinetic form and the trapezoid-type node masses.
inline EnergyReport eval(const Functional& J, const RadialFn& u) {
    const RadialGrid& g = J.grid();
    if (!(u.grid() == g)) throw std::invalid_argument("energy: grid mismatch");
    const auto a = detail::assemble(J);
    const NonlinearitySpec& f = J.subcritical();
    const NonlinearitySpec& gc = J.critical();
    const bool with_f = J.has_subcritical();

    EnergyReport rep;
    rep.kinetic = radial::grad_seminorm_sq(u);
    double pot = 0.0, fp = 0.0, gp = 0.0, neh_nl = 0.0;
    for (int i = 0; i <= g.nodes; ++i) {
        const double m = a.mass[i];
        if (m == 0.0) continue;
        const double s = u[i];
        pot += m * a.Vn[i] * s * s;
        double fs = 0.0, gs = 0.0;
        if (with_f) {
            fp += m * f.primitive(s);
            fs = f.value(s);
        }
        if (!gc.is_none()) {
            gp += m * a.bn[i] * gc.primitive(s);
            gs = a.bn[i] * gc.value(s);
        }
        neh_nl += m * (fs + gs) * s;
    }
    rep.potential = pot;
    rep.fpart = fp;
    rep.gpart = gp;
    rep.value = 0.5 * rep.kinetic + 0.5 * rep.potential - rep.fpart - rep.gpart;
    rep.nehari = rep.kinetic + rep.potential - neh_nl;
    return rep;
}

inline double value(const Functional& J, const RadialFn& u) { return eval(J, u).value; }

// dI[phi] for the discrete functional; exact up to roundoff.
inline double pair(std::span<const double> gradient, const RadialFn& phi) {
    double acc = 0.0;
    const int n = static_cast<int>(gradient.size());
    for (int i = 0; i < n; ++i) acc += gradient[i] * phi[i];
    return acc;
}

inline WeakForm weak_residual(const Functional& J, const RadialFn& u) {
    const RadialGrid& g = J.grid();
    if (!(u.grid() == g)) throw std::invalid_argument("weak_residual: grid mismatch");
    if (!u.finite()) throw std::domain_error("weak_residual: non-finite input");
    const auto a = detail::assemble(J);
    const NonlinearitySpec& f = J.subcritical();
    const NonlinearitySpec& gc = J.critical();
    const bool with_f = J.has_subcritical();

    WeakForm w;
    w.gradient.resize(g.nodes);
    for (int i = 0; i < g.nodes; ++i) {
        // d(Q/2)/du_i from the conservative form
        double acc = 0.0;
        if (i > 0) acc += a.cond[i - 1] * (u[i] - u[i - 1]);
        acc += a.cond[i] * (u[i] - u[i + 1]);
        const double s = u[i];
        double nl = a.Vn[i] * s;
        if (with_f) nl -= f.value(s);
        if (!gc.is_none()) nl -= a.bn[i] * gc.value(s);
        w.gradient[i] = acc + a.mass[i] * nl;
    }

    w.strong_form = RadialFn(g);
    // the r = 0 node has no quadrature mass; display its residual against the
    // physical half-cell volume instead
    const double m0 = g.unit_sphere_area() * std::pow(0.5 * g.step, g.dim) / g.dim;
    w.strong_form[0] = w.gradient[0] / m0;
    for (int i = 1; i < g.nodes; ++i) w.strong_form[i] = w.gradient[i] / a.mass[i];

    radial::Tridiag K = radial::stiffness(g, std::span<const double>(a.Vn.data(), g.nodes));
    const auto z = K.solve(w.gradient);
    double nrm = 0.0;
    for (int i = 0; i < g.nodes; ++i) nrm += w.gradient[i] * z[i];
    w.dual_norm = std::sqrt(std::max(nrm, 0.0));
    return w;
}

inline double residual_norm(const Functional& J, const RadialFn& u) {
    return weak_residual(J, u).dual_norm;
}

enum class PohozaevMode { autonomous_JP, autonomous_full };

// LHS - RHS of the respective identity, normalized by ||grad u||_2^2.
inline double pohozaev_residual(const Functional& J, const RadialFn& u, PohozaevMode mode) {
    const RadialGrid& g = J.grid();
    const int N = g.dim;
    const double kin = radial::grad_seminorm_sq(u);
    if (kin == 0.0) return 0.0;
    const auto a = detail::assemble(J);

    double lhs = 0.0;
    if (mode == PohozaevMode::autonomous_JP) {
        // int b G(u) = (N-2)/(2N) ||grad u||^2 for critical points of J_nu
        for (int i = 0; i <= g.nodes; ++i)
            lhs += a.mass[i] * a.bn[i] * J.critical().primitive(u[i]);
    } else {
        if (J.has_potential()) {
            const PotentialSpec& VP = J.problem().V_P;
            if (VP.family() != PotentialSpec::Family::constant)
                throw std::invalid_argument("Pohozaev mode requires autonomous problem");
        }
        const CoefficientSpec& bspec =
            J.kind() == Functional::Kind::periodic ? J.problem().b_P : J.problem().b;
        if (J.kind() != Functional::Kind::jnu && !bspec.is_constant())
            throw std::invalid_argument("Pohozaev mode requires autonomous problem");
        for (int i = 0; i <= g.nodes; ++i) {
            const double s = u[i];
            double h = a.bn[i] * J.critical().primitive(s);
            if (J.has_subcritical()) h += J.subcritical().primitive(s);
            lhs += a.mass[i] * (h - 0.5 * a.Vn[i] * s * s);
        }
    }
    const double rhs = (N - 2.0) / (2.0 * N) * kin;
    return (lhs - rhs) / kin;
}

// min over t-samples of I(u) - I(tu) - ((1-t^2)/2) I'(u).u
inline double tang_theta_margin(const Functional& J, const RadialFn& u,
                                std::span<const double> t_samples) {
    const EnergyReport base = eval(J, u);
    double worst = std::numeric_limits<double>::infinity();
    RadialFn tu(J.grid());
    for (double t : t_samples) {
        for (int i = 0; i < u.size(); ++i) tu[i] = t * u[i];
        const double It = value(J, tu);
        const double margin = base.value - It - 0.5 * (1.0 - t * t) * base.nehari;
        worst = std::min(worst, margin);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// comparison paths (scaling xi(t) = t u, dilation zeta(t) = u(./t))
// ---------------------------------------------------------------------------
enum class PathMode { scaling_tu, dilation_u_of_x_over_t };

struct PathCurve {
    std::vector<double> t;
    std::vector<double> I_orig;
    std::vector<double> I_per;
    double max_I = 0.0, argmax_I = 0.0;
    double max_IP = 0.0, argmax_IP = 0.0;
    bool strict_below = false; // max_I < max_IP
    bool truncated = false;    // dilation path left the grid support
};

namespace detail {

inline RadialFn path_point(const ProblemSpec& p, const RadialFn& u, PathMode mode, double t) {
    RadialFn w(p.grid);
    if (mode == PathMode::scaling_tu) {
        for (int i = 0; i < w.size(); ++i) w[i] = t * u[i];
    } else {
        if (t <= 0.0) return w;
        for (int i = 0; i < p.grid.nodes; ++i) w[i] = u.at(p.grid.r(i) / t);
    }
    w.enforce_boundary();
    return w;
}

template <class EvalFn>
std::pair<double, double> golden_max(EvalFn&& fn, double a, double b, int iters = 60) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = fn(c), fd = fn(d);
    for (int k = 0; k < iters; ++k) {
        if (fc > fd) {
            b = d; d = c; fd = fc;
            c = b - gr * (b - a);
            fc = fn(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + gr * (b - a);
            fd = fn(d);
        }
    }
    return fc > fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

} // namespace detail

inline PathCurve comparison_path_report(const ProblemSpec& p, const RadialFn& u_P, PathMode mode,
                                        int npoints = 400, double t_lo = 1e-3, double t_hi = 1e3) {
    const Functional I = Functional::original(p);
    const Functional IP = Functional::periodic(p);
    PathCurve out;
    out.t.resize(npoints);
    out.I_orig.resize(npoints);
    out.I_per.resize(npoints);
    const double lf = std::log(t_lo), rf = std::log(t_hi);
    int best_i = 0, best_ip = 0;
    for (int k = 0; k < npoints; ++k) {
        const double t = std::exp(lf + (rf - lf) * k / (npoints - 1));
        const RadialFn w = detail::path_point(p, u_P, mode, t);
        out.t[k] = t;
        out.I_orig[k] = value(I, w);
        out.I_per[k] = value(IP, w);
        if (out.I_orig[k] > out.I_orig[best_i]) best_i = k;
        if (out.I_per[k] > out.I_per[best_ip]) best_ip = k;
    }
    if (mode == PathMode::dilation_u_of_x_over_t) {
        // flag support truncation: mass pushed past rmax for large t
        const RadialFn w = detail::path_point(p, u_P, mode, t_hi);
        const double expect = std::pow(t_hi, p.dim / p.grid.critical_exponent());
        if (radial::norm_Lp(w, p.grid.critical_exponent()) <
            0.9 * expect * radial::norm_Lp(u_P, p.grid.critical_exponent()))
            out.truncated = true;
    }
    auto refine = [&](const Functional& J, int k0) {
        const double a = out.t[std::max(k0 - 1, 0)];
        const double b = out.t[std::min(k0 + 1, npoints - 1)];
        return detail::golden_max(
            [&](double t) { return value(J, detail::path_point(p, u_P, mode, t)); }, a, b);
    };
    std::tie(out.argmax_I, out.max_I) = refine(I, best_i);
    std::tie(out.argmax_IP, out.max_IP) = refine(IP, best_ip);
    out.strict_below = out.max_I < out.max_IP;
    return out;
}

} // namespace energy

// spec-facing wrappers
inline EnergyReport eval_I(const ProblemSpec& p, const RadialFn& u) {
    return energy::eval(Functional::original(p), u);
}
inline EnergyReport eval_IP(const ProblemSpec& p, const RadialFn& u) {
    return energy::eval(Functional::periodic(p), u);
}
inline EnergyReport eval_Jnu(const ProblemSpec& p, const RadialFn& u, double b_const) {
    return energy::eval(Functional::jnu(p, b_const), u);
}

} // namespace crel
