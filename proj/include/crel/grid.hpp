#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace crel {

// Uniform radial grid on [0, rmax] with Dirichlet truncation: nodes r_i = i*h,
// i = 0..M, and every RadialFn carries u(r_M) = 0.
struct RadialGrid {
    int dim = 3;      // N >= 3
    int nodes = 4096; // M
    double step = 40.0 / 4096.0;

    double rmax() const { return nodes * step; }
    double r(int i) const { return i * step; }

    // area of the unit (N-1)-sphere: 2 pi^{N/2} / Gamma(N/2)
    double unit_sphere_area() const {
        return 2.0 * std::pow(std::numbers::pi, 0.5 * dim) / std::tgamma(0.5 * dim);
    }

    double critical_exponent() const { return 2.0 * dim / (dim - 2.0); }

    bool operator==(const RadialGrid&) const = default;

    static RadialGrid make(int N, int M, double rmax) {
        if (N < 3) throw std::invalid_argument("RadialGrid: dimension must be >= 3");
        if (M < 8) throw std::invalid_argument("RadialGrid: too few nodes");
        if (!(rmax > 0)) throw std::invalid_argument("RadialGrid: rmax must be positive");
        return RadialGrid{N, M, rmax / M};
    }
};

class RadialFn {
public:
    RadialFn() = default;
    explicit RadialFn(const RadialGrid& g) : grid_(g), v_(g.nodes + 1, 0.0) {}

    template <class F>
    static RadialFn sample(const RadialGrid& g, F&& f) {
        RadialFn u(g);
        for (int i = 0; i < g.nodes; ++i) u.v_[i] = f(g.r(i));
        u.v_[g.nodes] = 0.0;
        return u;
    }

    const RadialGrid& grid() const { return grid_; }
    int size() const { return static_cast<int>(v_.size()); }
    double operator[](int i) const { return v_[i]; }
    double& operator[](int i) { return v_[i]; }
    std::span<const double> values() const { return v_; }
    std::span<double> values() { return v_; }

    void enforce_boundary() { if (!v_.empty()) v_.back() = 0.0; }

    bool finite() const {
        return std::all_of(v_.begin(), v_.end(), [](double x) { return std::isfinite(x); });
    }

    // linear interpolation, zero outside [0, rmax]
    double at(double r) const {
        if (r < 0.0 || v_.empty()) return 0.0;
        const double t = r / grid_.step;
        const int i = static_cast<int>(t);
        if (i >= grid_.nodes) return 0.0;
        const double w = t - i;
        return (1.0 - w) * v_[i] + w * v_[i + 1];
    }

    RadialFn& operator*=(double c) {
        for (double& x : v_) x *= c;
        return *this;
    }
    RadialFn& operator+=(const RadialFn& o) {
        for (int i = 0; i < size(); ++i) v_[i] += o.v_[i];
        return *this;
    }
    RadialFn& axpy(double a, const RadialFn& o) {
        for (int i = 0; i < size(); ++i) v_[i] += a * o.v_[i];
        return *this;
    }

private:
    RadialGrid grid_;
    std::vector<double> v_;
};

namespace radial {

// composite trapezoid with weight sigma_N r^{N-1}
inline double integrate(const RadialGrid& g, std::span<const double> density) {
    if (density.size() != static_cast<std::size_t>(g.nodes + 1))
        throw std::invalid_argument("integrate: size mismatch");
    const double sigma = g.unit_sphere_area();
    double acc = 0.0;
    for (int i = 1; i < g.nodes; ++i) {
        const double d = density[i];
        if (!std::isfinite(d)) throw std::domain_error("non-finite density");
        acc += d * std::pow(g.r(i), g.dim - 1);
    }
    // endpoint weights h/2; r=0 contributes nothing for N >= 3
    const double dM = density[g.nodes];
    if (!std::isfinite(dM) || !std::isfinite(density[0]))
        throw std::domain_error("non-finite density");
    acc += 0.5 * dM * std::pow(g.rmax(), g.dim - 1);
    return sigma * g.step * acc;
}

template <class F>
double integrate_fn(const RadialGrid& g, F&& f) {
    std::vector<double> d(g.nodes + 1);
    for (int i = 0; i <= g.nodes; ++i) d[i] = f(g.r(i));
    return integrate(g, d);
}

inline double integrate(const RadialFn& u) { return integrate(u.grid(), u.values()); }

// trapezoid node masses m_i = sigma h r_i^{N-1} (endpoints halved). The r = 0
// node carries zero mass: giving it the half-cell volume would let the critical
// quadratures concentrate on a single sub-grid node and undercut the Sobolev
// quotient. The origin value couples through the kinetic form only.
inline std::vector<double> node_masses(const RadialGrid& g) {
    const double sigma = g.unit_sphere_area();
    std::vector<double> m(g.nodes + 1);
    m[0] = 0.0;
    for (int i = 1; i < g.nodes; ++i) m[i] = sigma * g.step * std::pow(g.r(i), g.dim - 1);
    m[g.nodes] = 0.5 * sigma * g.step * std::pow(g.rmax(), g.dim - 1);
    return m;
}

// conductances of the conservative kinetic form:
//   Q(u) = sum_i c_i (u_{i+1} - u_i)^2,  c_i = sigma r_{i+1/2}^{N-1} / h.
// Q is the discrete realization of ||grad u||_2^2 and, unlike a collocated
// central-difference form, has a tridiagonal exact gradient (see energy module).
inline std::vector<double> conductances(const RadialGrid& g) {
    const double sigma = g.unit_sphere_area();
    std::vector<double> c(g.nodes);
    for (int i = 0; i < g.nodes; ++i) {
        const double rm = (i + 0.5) * g.step;
        c[i] = sigma * std::pow(rm, g.dim - 1) / g.step;
    }
    return c;
}

inline double grad_seminorm_sq(const RadialFn& u) {
    const RadialGrid& g = u.grid();
    const double sigma = g.unit_sphere_area();
    double acc = 0.0;
    for (int i = 0; i < g.nodes; ++i) {
        const double rm = (i + 0.5) * g.step;
        const double du = (u[i + 1] - u[i]) / g.step;
        acc += du * du * std::pow(rm, g.dim - 1);
    }
    return sigma * g.step * acc;
}

inline double norm_Lp(const RadialFn& u, double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("norm_Lp: p must be finite and >= 1");
    const RadialGrid& g = u.grid();
    std::vector<double> d(g.nodes + 1);
    for (int i = 0; i <= g.nodes; ++i) d[i] = std::pow(std::fabs(u[i]), p);
    return std::pow(integrate(g, d), 1.0 / p);
}

inline double norm_L2_sq(const RadialFn& u) {
    const RadialGrid& g = u.grid();
    std::vector<double> d(g.nodes + 1);
    for (int i = 0; i <= g.nodes; ++i) d[i] = u[i] * u[i];
    return integrate(g, d);
}

template <class VFun>
double norm_HV_sq(const RadialFn& u, VFun&& V) {
    const RadialGrid& g = u.grid();
    std::vector<double> d(g.nodes + 1);
    for (int i = 0; i <= g.nodes; ++i) {
        const double v = V(g.r(i));
        if (!std::isfinite(v)) throw std::domain_error("norm_HV_sq: potential not finite at node");
        d[i] = v * u[i] * u[i];
    }
    return grad_seminorm_sq(u) + integrate(g, d);
}

// x -> gamma^{(N-2)/2 j} u(gamma^j x), resampled with linear interpolation
inline RadialFn apply_dilation(const RadialFn& u, double gamma, int j) {
    if (!(gamma > 1.0)) throw std::invalid_argument("apply_dilation: gamma must exceed 1");
    const RadialGrid& g = u.grid();
    const double scale = std::pow(gamma, 0.5 * (g.dim - 2) * j);
    const double rate = std::pow(gamma, j);
    RadialFn w(g);
    for (int i = 0; i < g.nodes; ++i) w[i] = scale * u.at(rate * g.r(i));
    return w;
}

// Symmetric tridiagonal operator  (K u)_i = a_i u_i + b_{i-1} u_{i-1} + b_i u_{i+1}
// on the interior unknowns i = 0..M-1 (u_M = 0 eliminated).
struct Tridiag {
    std::vector<double> diag; // size M
    std::vector<double> off;  // size M-1, coupling i <-> i+1

    int n() const { return static_cast<int>(diag.size()); }

    void apply(std::span<const double> x, std::span<double> y) const {
        const int m = n();
        for (int i = 0; i < m; ++i) {
            double acc = diag[i] * x[i];
            if (i > 0) acc += off[i - 1] * x[i - 1];
            if (i + 1 < m) acc += off[i] * x[i + 1];
            y[i] = acc;
        }
    }

    // LDL^T solve; valid for SPD matrices (the stiffness forms used here).
    std::vector<double> solve(std::span<const double> rhs) const {
        const int m = n();
        std::vector<double> d(m), l(std::max(m - 1, 0)), x(rhs.begin(), rhs.end());
        d[0] = diag[0];
        for (int i = 1; i < m; ++i) {
            l[i - 1] = off[i - 1] / d[i - 1];
            d[i] = diag[i] - l[i - 1] * off[i - 1];
        }
        for (int i = 1; i < m; ++i) x[i] -= l[i - 1] * x[i - 1];
        for (int i = 0; i < m; ++i) x[i] /= d[i];
        for (int i = m - 2; i >= 0; --i) x[i] -= l[i] * x[i + 1];
        return x;
    }
};

// Matrix A with u^T A u = Q(u) + sum_i m_i coeff_i u_i^2 over the interior
// unknowns u_0..u_{M-1}; coeff is typically the potential V at the nodes.
inline Tridiag stiffness(const RadialGrid& g, std::span<const double> mass_coeff = {}) {
    const auto c = conductances(g);
    const auto m = node_masses(g);
    Tridiag A;
    A.diag.resize(g.nodes);
    A.off.resize(g.nodes - 1);
    for (int i = 0; i < g.nodes; ++i) {
        double d = c[i] + (i > 0 ? c[i - 1] : 0.0);
        if (!mass_coeff.empty()) d += m[i] * mass_coeff[i];
        A.diag[i] = d;
    }
    for (int i = 0; i + 1 < g.nodes; ++i) A.off[i] = -c[i];
    return A;
}

} // namespace radial
} // namespace crel
