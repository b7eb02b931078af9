#ifndef GOI_PHASE_HPP
#define GOI_PHASE_HPP

#include <span>

#include "goi/symbol.hpp"

namespace goi {

// Real-valued, smooth off xi = 0, positively homogeneous of degree 1 in xi.
// Homogeneity and realness are sample-checked by check_phase; phases composed
// from g(y,eps) * xi_j / |xi| templates satisfy them by construction.
struct PhaseExpr {
    Expr e;
    Arity ar;
    bool declared_slow_scale = false;
};

struct GradientNetReport {
    NetClass cls;
    double min_at_tail_eps = 0; // smallest sampled |grad|^2 at the smallest eps
};

struct PhaseValidity {
    bool homogeneous = false;
    bool real = false;
    bool valid = false;            // gradient inf-net strictly nonzero
    bool valid_slow_scale = false; // slow scale-strictly nonzero + slow-scale seminorms
    GradientNetReport grad;
};

// Validates homogeneity/realness by sampling and classifies the net
// eps |-> inf over K x S^{p-1} of |grad_{y,xi} phi_eps(y, xi/|xi|)|^2
// (a lattice upper bound of the true inf; strict-nonzero verdicts are
// conservative when the lattice passes). Throws NotHomogeneous / NotReal /
// DegenerateGradient.
PhaseValidity check_phase(const PhaseExpr& phi, const CompactBox& K, const EpsilonGrid& grid,
                          const ClassifyConfig& cfg = {});

// First-order operator with tL e^{i phi} = e^{i phi}:
//   a_j = i (1-chi) phi_inv d phi/d xi_j
//   b_k = i (1-chi) |xi|^-2 phi_inv d phi/d y_k
//   c   = chi + sum_j d a_j/d xi_j + sum_k d b_k/d y_k
// where phi_inv = |grad phi(y, xi/|xi|)|^-2 and chi is 1 for |xi| < 1/4 and
// 0 for |xi| > 1/2. For phases with parameter x the gradient runs over
// (y, xi) only and x rides along.
struct LPhiOperator {
    std::vector<Expr> a; // p entries, order 0
    std::vector<Expr> b; // ny entries, order -1
    Expr c;              // order -1
    Expr chi;
    Arity ar;
};

LPhiOperator build_L_phi(const PhaseExpr& phi);
// custom admissible cutoff (1 near xi = 0, 0 for large |xi|, radial, smooth)
LPhiOperator build_L_phi(const PhaseExpr& phi, Expr chi);

// max |tL(e^{i phi}) - e^{i phi}| over the samples; exact off |xi| <= 1/2,
// so samples must stay outside the cutoff zone
double transpose_identity_check(const LPhiOperator& L, const PhaseExpr& phi,
                                std::span<const Point> samples, std::span<const double> eps);

// L f = sum_j a_j d f/d xi_j + sum_k b_k d f/d y_k + c f, `times`-fold.
// Declared order drops by times * min(rho, 1-delta).
SymbolExpr apply_L_phi(const LPhiOperator& L, const SymbolExpr& f, int times);

// helper: substitute xi -> xi/|xi| over the first p coordinates
Expr unit_sphere_subst(Expr e, int p);

} // namespace goi

#endif
