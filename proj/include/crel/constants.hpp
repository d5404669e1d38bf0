#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crel/grid.hpp"
#include "crel/nonlinearity.hpp"

namespace crel {

struct ConstantsReport {
    double S = 0.0;
    double S_Gbar = 0.0;
    double S_Gbar_b = 0.0; // ||b||_inf^{-2/2*} S_Gbar
    double K_Gbar = 0.0;
    double kappa_star = 0.0;
    double mu_star = 0.0;
    double lambda_star = 0.0;
    bool kappa_ok = false; // kappa* < N/2
    bool mu_ok = false;    // mu* >= 2N/(N - 2 kappa*)
    RadialFn minimizer;    // argument of the S_Gbar infimum
    double duality_residual = 0.0; // |S_Gbar K_Gbar^{2/2*} - 1|
    double restart_spread = 0.0;
    bool spread_warning = false;
    int grid_nodes = 0;
    double rmax = 0.0;
};

namespace constants {

// C(N) = (N(N-2))^{(N-2)/4}; U_eps attains the Sobolev infimum
inline double talenti_prefactor(int N) { return std::pow(double(N) * (N - 2), 0.25 * (N - 2)); }

// U_eps projected to the Dirichlet truncation: the constant offset keeps the
// sample continuous at r = rmax instead of paying a jump in the kinetic form.
inline RadialFn talenti_bubble(const RadialGrid& g, double eps) {
    const double C = talenti_prefactor(g.dim);
    const double p = 0.5 * (g.dim - 2);
    const double R = g.rmax();
    const double off = std::pow(eps + R * R, -p);
    return RadialFn::sample(g, [&](double r) {
        return C * std::pow(eps, 0.5 * p) * std::max(std::pow(eps + r * r, -p) - off, 0.0);
    });
}

inline double rayleigh_quotient(const RadialFn& u) {
    const double n = radial::norm_Lp(u, u.grid().critical_exponent());
    if (n == 0.0) return std::numeric_limits<double>::infinity();
    return radial::grad_seminorm_sq(u) / (n * n);
}

// S = inf ||grad u||^2 / ||u||_{2*}^2 on the truncated grid: scan the Talenti
// family over eps, then refine with a preconditioned extremal-equation sweep.
inline double compute_S(const RadialGrid& g) {
    const double h = g.step;
    const double eps_min = std::max(36.0 * h * h, 1e-8);
    const double eps_max = 4.0;
    double best = std::numeric_limits<double>::infinity();
    RadialFn best_u(g);
    const int n_scan = 48;
    for (int k = 0; k < n_scan; ++k) {
        const double eps = eps_min * std::pow(eps_max / eps_min, double(k) / (n_scan - 1));
        RadialFn u = talenti_bubble(g, eps);
        const double q = rayleigh_quotient(u);
        if (q < best) {
            best = q;
            best_u = u;
        }
    }
    // normalized-gradient-descent refinement: fixed point of K u = mass |u|^{2*-2} u
    const auto K = radial::stiffness(g);
    const auto mass = radial::node_masses(g);
    const double crit = g.critical_exponent();
    RadialFn u = best_u;
    {
        const double n = radial::norm_Lp(u, crit);
        u *= 1.0 / n;
    }
    std::vector<double> rhs(g.nodes);
    for (int it = 0; it < 200; ++it) {
        for (int i = 0; i < g.nodes; ++i)
            rhs[i] = mass[i] * std::pow(std::fabs(u[i]), crit - 2.0) * u[i];
        const auto z = K.solve(rhs);
        RadialFn v(g);
        for (int i = 0; i < g.nodes; ++i) v[i] = z[i];
        const double nv = radial::norm_Lp(v, crit);
        if (nv == 0.0) break;
        v *= 1.0 / nv;
        RadialFn w(g);
        for (int i = 0; i < g.nodes; ++i) w[i] = 0.5 * u[i] + 0.5 * v[i];
        const double nw = radial::norm_Lp(w, crit);
        w *= 1.0 / nw;
        const double q = rayleigh_quotient(w);
        if (q < best) best = q;
        if (std::fabs(rayleigh_quotient(u) - q) < 1e-12 * q) { u = w; break; }
        u = w;
    }
    return best;
}

struct GbarMin {
    double value = 0.0;
    RadialFn minimizer;
    double spread = 0.0;
};

namespace detail {

inline double gbar(const NonlinearitySpec& g, double s) { return g.value(s) * s; }

inline double gbar_deriv(const NonlinearitySpec& g, double s) {
    const double d = 1e-6 * std::max(std::fabs(s), 1e-3);
    return (gbar(g, s + d) - gbar(g, s - d)) / (2.0 * d);
}

// smallest positive c with int Gbar(c u) = 1; bracket by doubling, then bisect
inline double constraint_rescale(const NonlinearitySpec& g, const RadialGrid& grid,
                                 const RadialFn& u, const std::vector<double>& mass) {
    auto phi = [&](double c) {
        double acc = 0.0;
        for (int i = 0; i <= grid.nodes; ++i) acc += mass[i] * gbar(g, c * u[i]);
        return acc;
    };
    double hi = 1e-6;
    double v = phi(hi);
    int guard = 0;
    while (v < 1.0) {
        hi *= 2.0;
        v = phi(hi);
        if (++guard > 400 || !std::isfinite(v))
            throw std::runtime_error("constraint not attainable on grid");
    }
    double lo = hi * 0.5;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) < 1.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace detail

// S_Gbar = inf{ ||grad u||^2 : int Gbar(u) = 1 } by multi-start projected
// Sobolev-gradient descent; restarts seed the discrete dilation orbit.
inline GbarMin compute_S_Gbar(const NonlinearitySpec& g, const RadialGrid& grid, int restarts = 5) {
    if (g.is_none()) throw std::invalid_argument("critical family required");
    // precondition (g2): Gbar positive away from 0 on a coarse sample
    for (int k = 1; k <= 32; ++k) {
        const double s = std::pow(10.0, -3.0 + 6.0 * k / 32.0);
        if (!(detail::gbar(g, s) > 0.0) || !(detail::gbar(g, -s) > 0.0))
            throw std::invalid_argument("compute_S_Gbar requires g(s)s > 0 (hypothesis (g2))");
    }
    const auto K = radial::stiffness(grid);
    const auto mass = radial::node_masses(grid);
    double gamma = g.self_similar_gamma();
    if (!(gamma > 1.0)) gamma = 2.0;

    double best = std::numeric_limits<double>::infinity();
    double worst = 0.0;
    RadialFn best_u(grid);

    // smooth boundary taper: restart seeds stretched by negative dilations
    // must still vanish continuously at the truncation radius
    auto taper = [&grid](RadialFn& u) {
        const double R = grid.rmax();
        for (int i = 0; i < grid.nodes; ++i) {
            const double r = grid.r(i);
            if (r <= 0.7 * R) continue;
            const double t = std::min((r - 0.7 * R) / (0.25 * R), 1.0);
            const double s5 = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
            u[i] *= 1.0 - s5;
        }
        u.enforce_boundary();
    };

    const int jlo = -(restarts - 1) / 2;
    for (int rs = 0; rs < std::max(restarts, 1); ++rs) {
        const int j = jlo + rs;
        RadialFn seed = talenti_bubble(grid, 0.25);
        RadialFn u = (j == 0) ? seed : radial::apply_dilation(seed, gamma, j);
        taper(u);
        double c = detail::constraint_rescale(g, grid, u, mass);
        u *= c;
        double q = radial::grad_seminorm_sq(u);

        std::vector<double> gl(grid.nodes);
        double step = 0.25;
        int stale = 0;
        for (int it = 0; it < 4000 && stale < 3; ++it) {
            // constraint-gradient Riesz representative q = K^{-1}(m Gbar'(u))
            for (int i = 0; i < grid.nodes; ++i) gl[i] = mass[i] * detail::gbar_deriv(g, u[i]);
            const auto z = K.solve(gl);
            // energy gradient in D^{1,2} is 2u; project onto the constraint tangent
            double num = 0.0, den = 0.0;
            for (int i = 0; i < grid.nodes; ++i) {
                num += gl[i] * u[i]; // <2u, q>_D / 2
                den += gl[i] * z[i]; // <q, q>_D
            }
            if (den <= 0.0) break;
            const double beta = 2.0 * num / den;
            bool improved = false;
            double try_step = std::min(2.0 * step, 0.5);
            for (int ls = 0; ls < 16; ++ls) {
                RadialFn trial(grid);
                for (int i = 0; i < grid.nodes; ++i)
                    trial[i] = u[i] - try_step * (2.0 * u[i] - beta * z[i]);
                trial.enforce_boundary();
                double ctrial;
                try {
                    ctrial = detail::constraint_rescale(g, grid, trial, mass);
                } catch (const std::runtime_error&) {
                    try_step *= 0.5;
                    continue;
                }
                trial *= ctrial;
                const double qt = radial::grad_seminorm_sq(trial);
                if (qt < q * (1.0 - 1e-14)) {
                    u = trial;
                    stale = (q - qt < 1e-11 * q) ? stale + 1 : 0;
                    q = qt;
                    step = try_step;
                    improved = true;
                    break;
                }
                try_step *= 0.5;
            }
            if (!improved) break;
        }
        worst = std::max(worst, q);
        if (q < best) {
            best = q;
            best_u = u;
        }
    }
    GbarMin out;
    out.value = best;
    out.minimizer = best_u;
    out.spread = (worst - best) / best;
    return out;
}

// K_Gbar = sup{ int Gbar(u) : ||grad u||_2 = 1 } by projected ascent.
inline double compute_K_Gbar(const NonlinearitySpec& g, const RadialGrid& grid) {
    const auto K = radial::stiffness(grid);
    const auto mass = radial::node_masses(grid);
    auto objective = [&](const RadialFn& u) {
        double acc = 0.0;
        for (int i = 0; i <= grid.nodes; ++i) acc += mass[i] * detail::gbar(g, u[i]);
        return acc;
    };
    double best = 0.0;
    for (double eps : {0.05, 0.15, 0.4}) {
        RadialFn u = talenti_bubble(grid, eps);
        double qn = radial::grad_seminorm_sq(u);
        u *= 1.0 / std::sqrt(qn);
        double val = objective(u);
        std::vector<double> gl(grid.nodes);
        double step = 0.5;
        int stale = 0;
        for (int it = 0; it < 4000 && stale < 3; ++it) {
            for (int i = 0; i < grid.nodes; ++i) gl[i] = mass[i] * detail::gbar_deriv(g, u[i]);
            const auto z = K.solve(gl);
            double zu = 0.0;
            for (int i = 0; i < grid.nodes; ++i) zu += gl[i] * u[i]; // <q,u>_D
            bool improved = false;
            double try_step = std::min(2.0 * step, 1.0);
            for (int ls = 0; ls < 16; ++ls) {
                RadialFn trial(grid);
                for (int i = 0; i < grid.nodes; ++i)
                    trial[i] = u[i] + try_step * (z[i] - zu * u[i]);
                trial.enforce_boundary();
                const double qt = radial::grad_seminorm_sq(trial);
                if (qt > 0.0) {
                    RadialFn scaled = trial;
                    scaled *= 1.0 / std::sqrt(qt);
                    const double vt = objective(scaled);
                    if (vt > val * (1.0 + 1e-14)) {
                        u = scaled;
                        stale = (vt - val < 1e-11 * val) ? stale + 1 : 0;
                        val = vt;
                        step = try_step;
                        improved = true;
                        break;
                    }
                }
                try_step *= 0.5;
            }
            if (!improved) break;
        }
        best = std::max(best, val);
    }
    return best;
}

struct KappaMuLambda {
    double kappa_star = 0.0, mu_star = 0.0, lambda_star = 0.0;
    bool kappa_ok = false, mu_ok = false;
};

// one-period infimum scan of g(s)s / G(s); self-similarity makes one period
// plus margin sufficient
inline double mu_star_scan(const NonlinearitySpec& g) {
    double gamma = g.self_similar_gamma();
    if (!(gamma > 1.0)) gamma = 2.0;
    const int N = g.dim();
    const double period = 0.5 * (N - 2) * std::log(gamma);
    double mu = std::numeric_limits<double>::infinity();
    const int n = 20000;
    for (int k = 0; k <= n; ++k) {
        const double s = std::exp(std::log(0.5) + period * 1.1 * k / n);
        const double G = g.primitive(s);
        if (G <= 0.0) continue;
        mu = std::min(mu, g.value(s) * s / G);
    }
    return mu;
}

inline double lambda_star_scan(const NonlinearitySpec& g) {
    double gamma = g.self_similar_gamma();
    if (!(gamma > 1.0)) gamma = 2.0;
    const int N = g.dim();
    const double crit = critical_exponent(N);
    const double period = 0.5 * (N - 2) * std::log(gamma);
    double lam = std::numeric_limits<double>::infinity();
    const int n = 20000;
    for (int k = 0; k <= n; ++k) {
        const double s = std::exp(std::log(0.5) + period * 1.1 * k / n);
        lam = std::min(lam, g.primitive(s) / std::pow(s, crit));
    }
    return lam;
}

inline KappaMuLambda derive_kappa_mu_lambda(const NonlinearitySpec& g, double b0, double bsup,
                                            double S, double S_Gbar) {
    const int N = g.dim();
    const double crit = critical_exponent(N);
    KappaMuLambda out;
    double ratio_pow; // (S / S_Gbar)^{N/(N-2)}
    if (auto* pp = g.pure_power_params(); pp && pp->exponent == crit) {
        // classical case: S_Gbar = a^{-2/2*} S exactly, mu* = 2*
        out.lambda_star = pp->amplitude / crit;
        out.mu_star = crit;
        ratio_pow = pp->amplitude;
    } else if (auto* oc = g.osc_crit_params()) {
        out.lambda_star = oc->lambda_star(N);
        out.mu_star = mu_star_scan(g);
        ratio_pow = std::pow(S / S_Gbar, double(N) / (N - 2));
    } else {
        out.lambda_star = lambda_star_scan(g);
        out.mu_star = mu_star_scan(g);
        ratio_pow = std::pow(S / S_Gbar, double(N) / (N - 2));
    }
    out.kappa_star = std::pow(ratio_pow / (crit * out.lambda_star) * bsup / b0, 0.5 * (N - 2));
    out.kappa_ok = out.kappa_star < 0.5 * N;
    out.mu_ok = out.kappa_ok && out.mu_star >= 2.0 * N / (N - 2.0 * out.kappa_star);
    return out;
}

inline ConstantsReport compute_constants(const NonlinearitySpec& g, double b0, double bsup,
                                         const RadialGrid& grid, int restarts = 5) {
    ConstantsReport rep;
    rep.grid_nodes = grid.nodes;
    rep.rmax = grid.rmax();
    rep.S = compute_S(grid);
    const auto gb = compute_S_Gbar(g, grid, restarts);
    rep.S_Gbar = gb.value;
    rep.minimizer = gb.minimizer;
    rep.restart_spread = gb.spread;
    rep.spread_warning = gb.spread > 0.02;
    rep.S_Gbar_b = std::pow(bsup, -2.0 / grid.critical_exponent()) * rep.S_Gbar;
    rep.K_Gbar = compute_K_Gbar(g, grid);
    rep.duality_residual =
        std::fabs(rep.S_Gbar * std::pow(rep.K_Gbar, 2.0 / grid.critical_exponent()) - 1.0);
    const auto kml = derive_kappa_mu_lambda(g, b0, bsup, rep.S, rep.S_Gbar);
    rep.kappa_star = kml.kappa_star;
    rep.mu_star = kml.mu_star;
    rep.lambda_star = kml.lambda_star;
    rep.kappa_ok = kml.kappa_ok;
    rep.mu_ok = kml.mu_ok;
    return rep;
}

} // namespace constants
} // namespace crel
