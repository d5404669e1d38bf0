#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "crel/grid.hpp"
#include "crel/nonlinearity.hpp"

namespace crel {

// Everything the energy/solver operations consume:
//   -Delta u + V(x) u = f(x,u) + b(x) g(u)   and its periodic counterpart.
struct ProblemSpec {
    int dim = 3;
    RadialGrid grid = RadialGrid::make(3, 4096, 40.0);
    PotentialSpec V = PotentialSpec::constant(1.0);
    PotentialSpec V_P = PotentialSpec::constant(1.0);
    NonlinearitySpec f = NonlinearitySpec::none(3);
    NonlinearitySpec f_P = NonlinearitySpec::none(3);
    NonlinearitySpec g = NonlinearitySpec::none(3); // critical term, shared with the periodic problem
    CoefficientSpec b = CoefficientSpec::constant(1.0);
    CoefficientSpec b_P = CoefficientSpec::constant(1.0);
    double b_limit_tol = 1e-6; // |b - b_P| over the outermost decade of nodes

    void validate() const {
        if (dim != grid.dim) throw std::invalid_argument("ProblemSpec: dimension mismatch with grid");
        if (f.dim() != dim || f_P.dim() != dim || g.dim() != dim)
            throw std::invalid_argument("ProblemSpec: nonlinearity dimension mismatch");
        if (!(b.inf() > 0) || !(b_P.inf() > 0))
            throw std::invalid_argument("ProblemSpec: coefficient b must have positive infimum");
        // asymptotic matching of b and b_P over the outermost decade
        double worst = 0.0;
        for (int i = 0; i <= 64; ++i) {
            const double r = grid.rmax() * (0.9 + 0.1 * i / 64.0);
            worst = std::max(worst, std::fabs(b(r) - b_P(r)));
        }
        if (worst > b_limit_tol)
            throw std::invalid_argument("ProblemSpec: b does not approach b_P at the truncation radius (worst " +
                                        std::to_string(worst) + ")");
    }
};

// A single assembled view of I, I_P or J_nu over the problem's grid.
class Functional {
public:
    enum class Kind { original, periodic, jnu };

    static Functional original(const ProblemSpec& p) { return Functional(p, Kind::original, 0.0); }
    static Functional periodic(const ProblemSpec& p) { return Functional(p, Kind::periodic, 0.0); }
    // J_nu: no potential, no subcritical term, constant coefficient in front of G
    static Functional jnu(const ProblemSpec& p, double b_const) { return Functional(p, Kind::jnu, b_const); }

    Kind kind() const { return kind_; }
    const ProblemSpec& problem() const { return *p_; }
    const RadialGrid& grid() const { return p_->grid; }

    bool has_potential() const { return kind_ != Kind::jnu; }
    bool has_subcritical() const { return kind_ != Kind::jnu && !subcritical().is_none(); }

    double V(double r) const {
        switch (kind_) {
        case Kind::original: return p_->V(r);
        case Kind::periodic: return p_->V_P(r);
        case Kind::jnu: return 0.0;
        }
        return 0.0;
    }
    double b(double r) const {
        switch (kind_) {
        case Kind::original: return p_->b(r);
        case Kind::periodic: return p_->b_P(r);
        case Kind::jnu: return b_const_;
        }
        return 0.0;
    }
    const NonlinearitySpec& subcritical() const {
        return kind_ == Kind::periodic ? p_->f_P : p_->f;
    }
    const NonlinearitySpec& critical() const { return p_->g; }

    double b_const() const { return b_const_; }

private:
    Functional(const ProblemSpec& p, Kind k, double bc) : p_(&p), kind_(k), b_const_(bc) {}
    const ProblemSpec* p_;
    Kind kind_;
    double b_const_;
};

} // namespace crel
