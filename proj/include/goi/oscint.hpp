#ifndef GOI_OSCINT_HPP
#define GOI_OSCINT_HPP

#include <span>

#include "goi/phase.hpp"

namespace goi {

// I(eps) = int e^{i phi_eps(y,xi)} L_phi^k(a_eps u)(y,xi) dy dxi / (2 pi)^p,
// u smooth with compact support inside `support`. `base` carries any fixed
// x-coordinates the phase or amplitude reference.
struct OscIntProblem {
    PhaseExpr phi;
    SymbolExpr a;
    Expr u;
    std::vector<std::array<double, 2>> support; // y-box containing supp u
    Point base{};
};

struct QuadConfig {
    double xi_radius = 1024; // >= 4
    int nodes = 16;          // Gauss points per panel, 1 radian resolved per point
    double tail_tol = 1e-4;  // budget cap, relative to max(1, largest |value|)
    double max_refine = 32;  // cap on the feature-resolution ladder
    bool check_budget = true;
};

// smallest k >= 0 with m - k*min(rho,1-delta) + 1 < -p - extra_decay
int choose_k(const SymbolOrder& ord, int p, int extra_decay = 2);

struct OscIntValue {
    cx value{};
    double err_budget = 0; // truncation tail + discretization difference
    int k = 0;
    double xi_radius = 0;
};

// Low-level quadrature: integrates every root of `tape` over ybox x {|xi|<=R}
// with phase-informed panel sizing, annulus by annulus with early termination
// once contributions fall below the budget. decay_order is the <xi>-power
// used for the truncation-tail fit. Results carry the (2 pi)^-p factor.
std::vector<OscIntValue> oscint_integrate_roots(const PhaseExpr& phi, std::span<const Expr> roots,
                                                const std::vector<std::array<double, 2>>& ybox,
                                                const Point& base, double eps, double decay_order,
                                                const QuadConfig& quad);

OscIntValue eval_oscint(const OscIntProblem& prob, double eps, int k, const QuadConfig& quad = {});

// Independent check: damped integrals with e^{-sigma |xi|^2}, sigma from the
// list (default 0.1 * 2^-i, i = 0..8), polynomial-extrapolated to sigma = 0.
OscIntValue eval_oscint_damped_oracle(const OscIntProblem& prob, double eps,
                                      std::vector<double> sigmas = {},
                                      const QuadConfig& quad = {});

struct KIndependenceReport {
    std::vector<int> ks;
    std::vector<OscIntValue> values;
    double max_rel_dev = 0;
    bool pass = false;
};

// eval_oscint at k_min, k_min+1, k_min+2; pass iff pairwise deviations < 1e-4
KIndependenceReport k_independence_check(const OscIntProblem& prob, double eps, int k_min,
                                         const QuadConfig& quad = {});

} // namespace goi

#endif
