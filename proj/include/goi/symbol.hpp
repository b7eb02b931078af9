#ifndef GOI_SYMBOL_HPP
#define GOI_SYMBOL_HPP

#include <array>
#include <vector>

#include "goi/expr.hpp"
#include "goi/net.hpp"

namespace goi {

struct SymbolOrder {
    double m = 0;
    double rho = 1;
    double delta = 0;
};

// a(y,xi) or a(x,y,xi) with declared order data
struct SymbolExpr {
    Expr e;
    Arity ar;
    SymbolOrder ord;
};

// Product of closed intervals in y (and x for parameterized symbols), with a
// per-axis lattice resolution used whenever the box is sampled.
struct CompactBox {
    std::vector<std::array<double, 2>> y;
    std::vector<std::array<double, 2>> x;
    int resolution = 5;
};

// Sampling skeleton for the noncompact xi directions: finite direction set
// plus dyadic radii. Every sup/inf over xi in this library is a lattice
// estimate over such a grid (documented lower/upper bound accordingly).
struct ConeGrid {
    std::vector<std::array<double, 4>> dirs; // unit vectors, first p coords used
    std::vector<double> radii;               // increasing, default 1..2^10
    static ConeGrid standard(int p, int n_dirs = 0); // 0 = per-dim default
};

// all multi-indices over `dim` coordinates with total degree <= total
std::vector<std::vector<int>> multi_indices_up_to(int dim, int total);

// unit directions within half_angle (radians) of dir; includes dir itself
std::vector<std::array<double, 4>> dirs_near(const std::array<double, 4>& dir, int p,
                                             double half_angle, int count);

// lattice over a box, `res` points per axis (midpoint for res = 1)
std::vector<std::vector<double>> box_lattice(const std::vector<std::array<double, 2>>& box,
                                             int res);

// Sampled estimate (lower bound) of sup over K x xi-grid, |alpha+beta| <= j,
// of |d^alpha_xi d^beta_{y,x} a| <xi>^{-m + rho|alpha| - delta|beta|}.
// Building the derivative tape is the expensive part; the sampler reuses it
// across epsilon values.
class SeminormSampler {
public:
    SeminormSampler(const SymbolExpr& a, const CompactBox& K, int j,
                    const ConeGrid& cone);
    double eval(double eps) const; // NonFinite on NaN samples

private:
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

double seminorm_estimate(const SymbolExpr& a, const CompactBox& K, int j, double eps,
                         const ConeGrid& cone);
double seminorm_estimate(const SymbolExpr& a, const CompactBox& K, int j, double eps);

struct SymbolClass {
    bool negligible = false;
    bool regular = false;
    int regular_n = 0;
    bool slow_scale = false;
    std::vector<double> slopes; // fitted eps-slope of the j-th seminorm net
    const char* tag() const {
        if (negligible) return "Negligible";
        if (regular) return "Regular";
        if (slow_scale) return "SlowScale";
        return "Moderate";
    }
};

SymbolClass classify_symbol(const SymbolExpr& a, const CompactBox& K,
                            const EpsilonGrid& grid, int j_max,
                            const ClassifyConfig& cfg = {});

struct ProbeNeighborhood {
    double radius = 0.5;          // box half-width around the base point
    double half_angle = 0.5236;   // 30 degrees
};

// true = (point, dir) lies outside the conic support estimate of a
bool conic_support_probe(const SymbolExpr& a, const std::vector<double>& point,
                         const std::array<double, 4>& dir, const ProbeNeighborhood& nb,
                         const EpsilonGrid& grid, const ClassifyConfig& cfg = {});

enum class MicroMode { G, Ginf };

struct MicrosupportReport {
    bool smoothing = false;
    bool negligible_on_cone = false;
    double worst_xi_slope = 0; // least negative fitted xi-decay across (alpha,beta)
    double n_spread = 0;       // spread of per-shell eps-exponents (Ginf gate)
};

// Representative-level microsupport probe. A symbol whose seminorm nets are
// negligible on U x Gamma counts as smoothing in both modes: its class
// contains the zero symbol, which is order -infinity there.
MicrosupportReport microsupport_report(const SymbolExpr& a, const std::vector<double>& point,
                                       const std::array<double, 4>& dir, MicroMode mode,
                                       const ProbeNeighborhood& nb, const EpsilonGrid& grid,
                                       const ClassifyConfig& cfg = {});
bool microsupport_probe(const SymbolExpr& a, const std::vector<double>& point,
                        const std::array<double, 4>& dir, MicroMode mode,
                        const EpsilonGrid& grid, const ClassifyConfig& cfg = {});

// Result of integrating a compactly y-supported symbol over K x R^p:
// a C^k function of x sampled on a lattice (a bare number when the symbol
// has no x), with x-derivatives up to total order k.
struct CkSample {
    std::vector<double> eps;
    std::vector<std::vector<double>> x_points;
    std::vector<std::vector<int>> derivs;      // multi-indices over x, |.| <= k
    std::vector<std::vector<std::vector<cx>>> values; // [eps][x][deriv]
    double xi_radius = 0;
    double tail_bound = 0;
};

CkSample integrate_symbol(const SymbolExpr& b, const CompactBox& K, int k,
                          const std::vector<double>& eps_list, double tol);

} // namespace goi

#endif
