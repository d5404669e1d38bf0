#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "crel/quad.hpp"

namespace crel {

inline double critical_exponent(int N) { return 2.0 * N / (N - 2.0); }

// ---------------------------------------------------------------------------
// Oscillatory subcritical family: F(s) = lambda (1 + |s|^{rho(s)-p0}) |s|^{p0}
// with a C^1 exponent profile rho built from a quintic smoothstep transition
// and the slow oscillation L(s) = C0 ln(ln(|s|+1)+1).
// ---------------------------------------------------------------------------
struct OscSubcriticalParams {
    double lambda = 1.0;
    double p0 = 4.0;
    double q0 = 0.0;
    double alpha = 0.0;
    double beta = 0.0;

    static double C0() {
        return 0.5 * std::numbers::pi / std::log(std::log(2.0) + 1.0);
    }

    void validate(int N) const {
        const double crit = critical_exponent(N);
        auto fail = [](const std::string& m) { throw std::invalid_argument("OscSubcriticalParams: " + m); };
        if (!(lambda > 0)) fail("lambda must be positive");
        if (!(p0 > 2 && p0 < crit)) fail("p0 must lie in (2, 2*)");
        if (!(q0 > 0 && alpha > 0 && beta > 0)) fail("q0, alpha, beta must be positive");
        if (!(p0 <= beta - alpha && beta - alpha <= beta + alpha && beta + alpha <= q0 && q0 < crit))
            fail("chain p0 <= beta-alpha <= beta+alpha <= q0 < 2* violated");
        if (!(4.0 * (q0 - (beta + alpha)) < std::numbers::e * ((beta - alpha) - p0)))
            fail("4[q0-(beta+alpha)] < e[(beta-alpha)-p0] violated");
        const double mu = beta - (C0() + 1.0) * alpha;
        if (!(2.0 < mu && mu < p0)) fail("2 < beta-(C0+1)alpha < p0 violated");
    }
};

// C^1 exponent profile rho and its derivative.
class RhoProfile {
public:
    explicit RhoProfile(const OscSubcriticalParams& p) : p_(p) {
        // smoothstep descent q0 -> beta+alpha on [1/4, 1/2]; sup |S5'| = 15/8
        sup_eta_deriv_ = 4.0 * (15.0 / 8.0) * (p_.q0 - (p_.beta + p_.alpha));
        const double budget = std::numbers::e * ((p_.beta - p_.alpha) - p_.p0);
        if (sup_eta_deriv_ > budget) throw std::domain_error("eta derivative bound");
    }

    double sup_eta_deriv() const { return sup_eta_deriv_; }

    double operator()(double s) const {
        const double a = std::fabs(s);
        if (a <= 1.0) return eta(a);
        return p_.beta + p_.alpha * std::sin(L(a));
    }

    double deriv(double s) const {
        const double a = std::fabs(s);
        const double sg = (s >= 0) ? 1.0 : -1.0;
        if (a <= 1.0) return sg * eta_deriv(a);
        const double lp = OscSubcriticalParams::C0() / ((std::log(a + 1.0) + 1.0) * (a + 1.0));
        return sg * p_.alpha * std::cos(L(a)) * lp;
    }

private:
    static double L(double a) {
        return OscSubcriticalParams::C0() * std::log(std::log(a + 1.0) + 1.0);
    }
    double eta(double a) const {
        const double hi = p_.q0, lo = p_.beta + p_.alpha;
        if (a <= 0.25) return hi;
        if (a >= 0.5) return lo;
        const double t = (a - 0.25) * 4.0;
        const double s5 = t * t * t * (10.0 + t * (-15.0 + 6.0 * t));
        return hi - (hi - lo) * s5;
    }
    double eta_deriv(double a) const {
        if (a <= 0.25 || a >= 0.5) return 0.0;
        const double t = (a - 0.25) * 4.0;
        const double ds5 = 30.0 * t * t * (1.0 - t) * (1.0 - t);
        return -(p_.q0 - (p_.beta + p_.alpha)) * ds5 * 4.0;
    }
    OscSubcriticalParams p_;
    double sup_eta_deriv_ = 0.0;
};

// ---------------------------------------------------------------------------
// Oscillatory critical family: g(s) = (A + B sin(omega ln|s|) + E)|s|^{2*-2}s,
// gamma = exp(4 pi / (omega (N-2))).
// ---------------------------------------------------------------------------
struct OscCriticalParams {
    double A = 0.2, B = 0.02, E = 0.1, omega = 4.0 * std::numbers::pi;

    double gamma(int N) const { return std::exp(4.0 * std::numbers::pi / (omega * (N - 2))); }

    void validate(int N) const {
        auto fail = [](const std::string& m) { throw std::invalid_argument("OscCriticalParams: " + m); };
        if (!(A > 0 && B > 0 && E > 0 && omega > 0)) fail("A, B, E, omega must be positive");
        if (!(B / (A + E) < 0.5)) fail("B/(A+E) < 1/2 violated (lambda* would not be positive)");
        if (!(A > B)) fail("A > B required by the E-level surrogate");
        if (!(1.0 + E / (A - B) <= std::pow(2.0, double(N) / (N - 2))))
            fail("1 + E/(A-B) <= 2^{N/(N-2)} violated");
    }

    double lambda_star(int N) const { return (A - B + E) / critical_exponent(N); }
    double mu_star_lower(int N) const {
        return critical_exponent(N) * (A - B + E) / (A + B + E);
    }
};

// ---------------------------------------------------------------------------
// Family variants
// ---------------------------------------------------------------------------
struct PurePowerParams {
    double exponent = 4.0;  // p; critical family uses p = 2*
    double amplitude = 1.0; // lambda in eq. -Du + u = lambda|u|^{p-2}u + ...
};

// base samples of G* on I0 = [1, gamma^{(N-2)/2}]; extended self-similarly
struct FractalParams {
    double gamma = 2.0;
    std::vector<double> s;  // ascending, s.front() == 1, s.back() == gamma^{(N-2)/2}
    std::vector<double> G;  // G* samples, G*(s.back()) must match gamma^N G*(1)
};

// piecewise-linear samples of the function itself (f or g); testing family
struct TabulatedParams {
    std::vector<double> s;   // ascending
    std::vector<double> val; // f(s) or g(s)
};

class NonlinearitySpec {
public:
    using Params = std::variant<std::monostate, PurePowerParams, OscSubcriticalParams,
                                OscCriticalParams, FractalParams, TabulatedParams>;

    NonlinearitySpec() = default;

    static NonlinearitySpec none(int N) { return NonlinearitySpec(N, std::monostate{}); }
    static NonlinearitySpec pure_power(int N, double exponent, double amplitude = 1.0) {
        return NonlinearitySpec(N, PurePowerParams{exponent, amplitude});
    }
    static NonlinearitySpec osc_subcritical(int N, OscSubcriticalParams p) {
        p.validate(N);
        return NonlinearitySpec(N, p);
    }
    static NonlinearitySpec osc_critical(int N, OscCriticalParams p) {
        p.validate(N);
        return NonlinearitySpec(N, p);
    }
    static NonlinearitySpec fractal(int N, FractalParams p);
    static NonlinearitySpec tabulated(int N, TabulatedParams p);

    int dim() const { return dim_; }
    const Params& params() const { return par_; }

    bool is_none() const { return std::holds_alternative<std::monostate>(par_); }
    bool is_pure_power() const { return std::holds_alternative<PurePowerParams>(par_); }
    bool is_osc_subcritical() const { return std::holds_alternative<OscSubcriticalParams>(par_); }
    bool is_osc_critical() const { return std::holds_alternative<OscCriticalParams>(par_); }
    bool is_fractal() const { return std::holds_alternative<FractalParams>(par_); }
    bool is_tabulated() const { return std::holds_alternative<TabulatedParams>(par_); }

    const PurePowerParams* pure_power_params() const { return std::get_if<PurePowerParams>(&par_); }
    const OscSubcriticalParams* osc_sub_params() const { return std::get_if<OscSubcriticalParams>(&par_); }
    const OscCriticalParams* osc_crit_params() const { return std::get_if<OscCriticalParams>(&par_); }
    const FractalParams* fractal_params() const { return std::get_if<FractalParams>(&par_); }
    const TabulatedParams* tabulated_params() const { return std::get_if<TabulatedParams>(&par_); }

    // the nonlinearity itself (f or g depending on role) and its primitive
    double value(double s) const;
    double primitive(double s) const;

    // discrete self-similarity base for critical families; 0 when not self-similar
    double self_similar_gamma() const {
        if (auto* oc = osc_crit_params()) return oc->gamma(dim_);
        if (auto* fr = fractal_params()) return fr->gamma;
        if (is_pure_power() && pure_power_params()->exponent == critical_exponent(dim_))
            return 2.0; // pure critical powers are self-similar for every gamma
        return 0.0;
    }

    std::string family_name() const {
        if (is_none()) return "none";
        if (is_pure_power()) return "pure_power";
        if (is_osc_subcritical()) return "osc_subcritical";
        if (is_osc_critical()) return "osc_critical";
        if (is_fractal()) return "fractal_self_similar";
        return "tabulated";
    }

private:
    NonlinearitySpec(int N, Params p) : dim_(N), par_(std::move(p)) {
        if (auto* os = std::get_if<OscSubcriticalParams>(&par_)) rho_.emplace(*os);
    }

    double fractal_value(const FractalParams& fp, double s) const;
    double fractal_primitive(const FractalParams& fp, double s) const;

    int dim_ = 3;
    Params par_;
    std::optional<RhoProfile> rho_;
    // tabulated family: cumulative integral of the piecewise-linear samples
    std::vector<double> tab_cum_;
    // fractal family: Catmull-Rom slopes of the base samples
    std::vector<double> frac_slope_;

    friend struct NonlinearityAccess;
};

// ---------- pure power ----------
namespace detail {
inline double pow_value(double p, double amp, double s) {
    if (s == 0.0) return 0.0;
    return amp * std::pow(std::fabs(s), p - 2.0) * s;
}
inline double pow_primitive(double p, double amp, double s) {
    return amp * std::pow(std::fabs(s), p) / p;
}
} // namespace detail

// ---------- osc subcritical ----------
namespace detail {
inline double osc_sub_primitive(const OscSubcriticalParams& p, const RhoProfile& rho, double s) {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    return p.lambda * (1.0 + std::pow(a, rho(s) - p.p0)) * std::pow(a, p.p0);
}
inline double osc_sub_value(const OscSubcriticalParams& p, const RhoProfile& rho, double s) {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    if (a == 1.0) return (s > 0 ? 1.0 : -1.0) * p.lambda * (p.p0 + rho(s));
    const double r = rho(s), dr = rho.deriv(s);
    const double term1 = p.lambda * p.p0 * std::pow(a, p.p0 - 2.0) * s;
    const double term2 = p.lambda * (dr * s * std::log(a) + r) * std::pow(a, r - 2.0) * s;
    return term1 + term2;
}
} // namespace detail

// ---------- osc critical ----------
namespace detail {
// exact antiderivative of (A+E+B sin(w ln t)) t^{q-1} on t > 0
inline double osc_crit_primitive(const OscCriticalParams& p, double q, double s) {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    const double aq = std::pow(a, q);
    const double la = std::log(a);
    const double den = q * q + p.omega * p.omega;
    const double oscillant = (q * std::sin(p.omega * la) - p.omega * std::cos(p.omega * la)) / den;
    // lim_{t->0+} t^q (q sin - w cos)/den = 0, so the constant of integration
    // is fixed by G(0) = 0.
    return (p.A + p.E) * aq / q + p.B * aq * oscillant;
}
inline double osc_crit_value(const OscCriticalParams& p, double q, double s) {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    const double theta = p.A + p.B * std::sin(p.omega * std::log(a));
    return (theta + p.E) * std::pow(a, q - 2.0) * s;
}
} // namespace detail

inline double NonlinearitySpec::value(double s) const {
    if (!std::isfinite(s)) throw std::domain_error("nonlinearity: non-finite argument");
    if (is_none()) return 0.0;
    if (auto* pp = pure_power_params()) return detail::pow_value(pp->exponent, pp->amplitude, s);
    if (auto* os = osc_sub_params()) return detail::osc_sub_value(*os, *rho_, s);
    if (auto* oc = osc_crit_params()) return detail::osc_crit_value(*oc, critical_exponent(dim_), s);
    if (auto* fr = fractal_params()) return fractal_value(*fr, s);
    const auto& tp = std::get<TabulatedParams>(par_);
    // piecewise-linear with linear extrapolation from the outermost segments
    const auto& xs = tp.s;
    const auto& ys = tp.val;
    if (s <= xs.front()) {
        const double sl = (ys[1] - ys[0]) / (xs[1] - xs[0]);
        return ys[0] + sl * (s - xs[0]);
    }
    if (s >= xs.back()) {
        const std::size_t n = xs.size();
        const double sl = (ys[n - 1] - ys[n - 2]) / (xs[n - 1] - xs[n - 2]);
        return ys[n - 1] + sl * (s - xs[n - 1]);
    }
    const auto it = std::upper_bound(xs.begin(), xs.end(), s);
    const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (s - xs[k]) / (xs[k + 1] - xs[k]);
    return (1.0 - t) * ys[k] + t * ys[k + 1];
}

inline double NonlinearitySpec::primitive(double s) const {
    if (!std::isfinite(s)) throw std::domain_error("nonlinearity: non-finite argument");
    if (is_none()) return 0.0;
    if (auto* pp = pure_power_params()) return detail::pow_primitive(pp->exponent, pp->amplitude, s);
    if (auto* os = osc_sub_params()) return detail::osc_sub_primitive(*os, *rho_, s);
    if (auto* oc = osc_crit_params()) return detail::osc_crit_primitive(*oc, critical_exponent(dim_), s);
    if (auto* fr = fractal_params()) return fractal_primitive(*fr, s);
    // exact integral of the piecewise-linear table from 0 to s
    const auto& tp = std::get<TabulatedParams>(par_);
    const auto& xs = tp.s;
    auto segment_integral = [&](double a, double b) {
        // integral of the interpolant between arbitrary a < b
        const double fa = value(a), fb = value(b);
        return 0.5 * (fa + fb) * (b - a);
    };
    // accumulate over table breakpoints between 0 and s (the interpolant is
    // linear between breakpoints, so trapezoid on each piece is exact)
    double lo = 0.0, hi = s, sign = 1.0;
    if (s < 0.0) { lo = s; hi = 0.0; sign = -1.0; }
    double acc = 0.0, prev = lo;
    for (double x : xs) {
        if (x <= prev) continue;
        if (x >= hi) break;
        acc += segment_integral(prev, x);
        prev = x;
    }
    acc += segment_integral(prev, hi);
    return sign * acc;
}

// ---------- fractal ----------
inline NonlinearitySpec NonlinearitySpec::fractal(int N, FractalParams p) {
    auto fail = [](const std::string& m) { throw std::invalid_argument("FractalParams: " + m); };
    if (!(p.gamma > 1.0)) fail("gamma must exceed 1");
    if (p.s.size() < 4 || p.s.size() != p.G.size()) fail("need matching sample arrays, >= 4 points");
    const double right = std::pow(p.gamma, 0.5 * (N - 2));
    if (std::fabs(p.s.front() - 1.0) > 1e-12 || std::fabs(p.s.back() - right) > 1e-9 * right)
        fail("base interval must be [1, gamma^{(N-2)/2}]");
    for (std::size_t i = 1; i < p.s.size(); ++i)
        if (!(p.s[i] > p.s[i - 1])) fail("sample abscissae must be ascending");
    const double match = std::pow(p.gamma, N) * p.G.front();
    if (std::fabs(p.G.back() - match) > 1e-8 * std::max(std::fabs(match), 1e-300))
        fail("endpoint matching G*(gamma^{(N-2)/2}) = gamma^N G*(1) violated");
    NonlinearitySpec spec(N, p);
    // Catmull-Rom slopes with self-similar ghost points so the periodic
    // extension stays C^1 across fold boundaries
    const auto& fp = *spec.fractal_params();
    const std::size_t n = fp.s.size();
    spec.frac_slope_.resize(n);
    auto sample = [&](std::ptrdiff_t i) -> std::pair<double, double> {
        if (i < 0)
            return {fp.s[n - 2] / right, fp.G[n - 2] / std::pow(fp.gamma, N)};
        if (i >= static_cast<std::ptrdiff_t>(n))
            return {fp.s[1] * right, fp.G[1] * std::pow(fp.gamma, N)};
        return {fp.s[i], fp.G[i]};
    };
    for (std::size_t i = 0; i < n; ++i) {
        auto [xm, ym] = sample(static_cast<std::ptrdiff_t>(i) - 1);
        auto [xp, yp] = sample(static_cast<std::ptrdiff_t>(i) + 1);
        spec.frac_slope_[i] = (yp - ym) / (xp - xm);
    }
    return spec;
}

inline double NonlinearitySpec::fractal_primitive(const FractalParams& fp, double s) const {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    const double step = 0.5 * (dim_ - 2) * std::log(fp.gamma);
    const double jr = std::log(a) / step;
    if (std::fabs(jr) > 4000.0) throw std::domain_error("fractal fold depth exceeded");
    const int j = static_cast<int>(std::floor(jr));
    const double base = a * std::pow(fp.gamma, -0.5 * (dim_ - 2) * j); // in [1, gamma^{(N-2)/2})
    // cubic Hermite on the containing segment
    const auto& xs = fp.s;
    auto it = std::upper_bound(xs.begin(), xs.end(), base);
    std::size_t k = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (k >= xs.size() - 1) k = xs.size() - 2;
    const double hseg = xs[k + 1] - xs[k];
    const double t = std::clamp((base - xs[k]) / hseg, 0.0, 1.0);
    const double y0 = fp.G[k], y1 = fp.G[k + 1];
    const double m0 = frac_slope_[k] * hseg, m1 = frac_slope_[k + 1] * hseg;
    const double t2 = t * t, t3 = t2 * t;
    const double val = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 +
                       (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
    return std::pow(fp.gamma, double(dim_) * j) * val;
}

inline double NonlinearitySpec::fractal_value(const FractalParams& fp, double s) const {
    if (s == 0.0) return 0.0;
    const double a = std::fabs(s);
    const double step = 0.5 * (dim_ - 2) * std::log(fp.gamma);
    const double jr = std::log(a) / step;
    if (std::fabs(jr) > 4000.0) throw std::domain_error("fractal fold depth exceeded");
    const int j = static_cast<int>(std::floor(jr));
    const double fold = std::pow(fp.gamma, -0.5 * (dim_ - 2) * j);
    const double base = a * fold;
    const auto& xs = fp.s;
    auto it = std::upper_bound(xs.begin(), xs.end(), base);
    std::size_t k = (it == xs.begin()) ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (k >= xs.size() - 1) k = xs.size() - 2;
    const double hseg = xs[k + 1] - xs[k];
    const double t = std::clamp((base - xs[k]) / hseg, 0.0, 1.0);
    const double y0 = fp.G[k], y1 = fp.G[k + 1];
    const double m0 = frac_slope_[k] * hseg, m1 = frac_slope_[k + 1] * hseg;
    const double t2 = t * t;
    const double dval = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 +
                         (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / hseg;
    // d/ds G(s) with G(s) = gamma^{Nj} G*(gamma^{-(N-2)/2 j} s), odd extension
    const double sg = (s > 0) ? 1.0 : -1.0;
    return sg * std::pow(fp.gamma, double(dim_) * j) * dval * fold;
}

inline NonlinearitySpec NonlinearitySpec::tabulated(int N, TabulatedParams p) {
    if (p.s.size() < 2 || p.s.size() != p.val.size())
        throw std::invalid_argument("TabulatedParams: need matching arrays, >= 2 points");
    for (std::size_t i = 1; i < p.s.size(); ++i)
        if (!(p.s[i] > p.s[i - 1]))
            throw std::invalid_argument("TabulatedParams: abscissae must be ascending");
    return NonlinearitySpec(N, std::move(p));
}

// spec-facing names
inline double eval_f(const NonlinearitySpec& f, double s) { return f.value(s); }
inline double eval_F(const NonlinearitySpec& f, double s) { return f.primitive(s); }
inline double eval_g(const NonlinearitySpec& g, double s) { return g.value(s); }
inline double eval_G(const NonlinearitySpec& g, double s) { return g.primitive(s); }
inline double eval_Gbar(const NonlinearitySpec& g, double s) { return g.value(s) * s; }

// ---------------------------------------------------------------------------
// Potentials
// ---------------------------------------------------------------------------
class PotentialSpec {
public:
    enum class Family { constant, gaussian_well, tabulated_radial };

    static PotentialSpec constant(double c) {
        if (!(c >= 0)) throw std::invalid_argument("PotentialSpec: V must be >= 0");
        PotentialSpec p;
        p.family_ = Family::constant;
        p.c_ = c;
        return p;
    }
    // V(x) = 1 - exp(-|x|^2); periodic limit V_P == 1
    static PotentialSpec gaussian_well() {
        PotentialSpec p;
        p.family_ = Family::gaussian_well;
        return p;
    }
    static PotentialSpec tabulated(std::vector<double> r, std::vector<double> v) {
        if (r.size() < 2 || r.size() != v.size())
            throw std::invalid_argument("PotentialSpec: bad table");
        for (double x : v)
            if (!(x >= 0) || !std::isfinite(x))
                throw std::invalid_argument("PotentialSpec: V must be >= 0 and bounded");
        PotentialSpec p;
        p.family_ = Family::tabulated_radial;
        p.r_ = std::move(r);
        p.v_ = std::move(v);
        return p;
    }

    Family family() const { return family_; }
    double constant_value() const { return c_; }

    double operator()(double r) const {
        switch (family_) {
        case Family::constant: return c_;
        case Family::gaussian_well: return 1.0 - std::exp(-r * r);
        case Family::tabulated_radial: {
            if (r <= r_.front()) return v_.front();
            if (r >= r_.back()) return v_.back();
            auto it = std::upper_bound(r_.begin(), r_.end(), r);
            const std::size_t k = static_cast<std::size_t>(it - r_.begin()) - 1;
            const double t = (r - r_[k]) / (r_[k + 1] - r_[k]);
            return (1.0 - t) * v_[k] + t * v_[k + 1];
        }
        }
        return 0.0;
    }

    double sup() const {
        switch (family_) {
        case Family::constant: return c_;
        case Family::gaussian_well: return 1.0;
        case Family::tabulated_radial: return *std::max_element(v_.begin(), v_.end());
        }
        return 0.0;
    }

    // canonical periodic limit of this family
    PotentialSpec periodic_limit() const {
        if (family_ == Family::gaussian_well) return constant(1.0);
        return *this;
    }

    std::string family_name() const {
        switch (family_) {
        case Family::constant: return "constant";
        case Family::gaussian_well: return "gaussian_well";
        default: return "tabulated";
        }
    }

private:
    Family family_ = Family::constant;
    double c_ = 1.0;
    std::vector<double> r_, v_;
};

inline double eval_V(const PotentialSpec& p, double r) { return p(r); }

// ---------------------------------------------------------------------------
// Bounded positive coefficients b(x) (radial families)
// ---------------------------------------------------------------------------
class CoefficientSpec {
public:
    enum class Family { constant, gaussian_bump };

    static CoefficientSpec constant(double c) {
        if (!(c > 0)) throw std::invalid_argument("CoefficientSpec: b must be positive");
        CoefficientSpec b;
        b.family_ = Family::constant;
        b.base_ = c;
        return b;
    }
    // b(r) = base + amp exp(-(r/width)^2), amp >= 0
    static CoefficientSpec gaussian_bump(double base, double amp, double width) {
        if (!(base > 0) || !(amp >= 0) || !(width > 0))
            throw std::invalid_argument("CoefficientSpec: need base > 0, amp >= 0, width > 0");
        CoefficientSpec b;
        b.family_ = Family::gaussian_bump;
        b.base_ = base;
        b.amp_ = amp;
        b.width_ = width;
        return b;
    }

    double operator()(double r) const {
        if (family_ == Family::constant) return base_;
        const double t = r / width_;
        return base_ + amp_ * std::exp(-t * t);
    }

    double inf() const { return base_; }
    double sup() const { return family_ == Family::constant ? base_ : base_ + amp_; }
    bool is_constant() const { return family_ == Family::constant || amp_ == 0.0; }

    CoefficientSpec periodic_limit() const { return constant(base_); }

    Family family() const { return family_; }
    double base() const { return base_; }
    double amp() const { return amp_; }
    double width() const { return width_; }

    std::string family_name() const {
        return family_ == Family::constant ? "constant" : "gaussian_bump";
    }

private:
    Family family_ = Family::constant;
    double base_ = 1.0, amp_ = 0.0, width_ = 1.0;
};

} // namespace crel
