#ifndef GOI_FIO_HPP
#define GOI_FIO_HPP

#include "goi/oscint.hpp"

namespace goi {

// Au(x) = int e^{i phi(x,y,xi)} a(x,y,xi) u(y) dy dxi / (2 pi)^p on an x-grid.
struct FioProblem {
    PhaseExpr phi; // over (x, y, xi); gradient nondegeneracy in (y, xi) only
    SymbolExpr a;
    Expr u;
    std::vector<std::array<double, 2>> support; // y-box containing supp u
    std::vector<std::array<double, 2>> x_box;
    int x_points = 64; // per axis
};

// Per-epsilon values of Au (and optionally exact x-derivatives) on the
// tensor x-grid. values/err are indexed [eps][point][deriv] row-major.
struct SampledGenFunction {
    int nx = 0;
    std::vector<double> eps_list;
    std::vector<std::vector<double>> axes;
    std::vector<std::array<int, 4>> derivs; // x multi-indices, first all-zero
    std::vector<cx> values;
    std::vector<double> err;

    std::size_t points() const;
    std::size_t index(std::size_t e, std::size_t pt, std::size_t d) const {
        return (e * points() + pt) * derivs.size() + d;
    }
    // coordinates of grid point pt (row-major over axes)
    void point_coords(std::size_t pt, double* out) const;
};

// How x-derivatives of Au are produced. Exact differentiation under the
// integral costs one power of |xi| per order (k must absorb it) and is the
// default; for phases whose operator coefficients blow up as eps -> 0 the
// extra L applications bury the value in cancellation, and central
// differences with spacing eps/4 (pure axis derivatives only, shared
// quadrature grid per point) are the robust fallback.
enum class DerivMode { Exact, Stencil };

// Applies the operator at every (x, eps), with derivatives up to deriv_order.
SampledGenFunction apply_fio(const FioProblem& prob, std::span<const double> eps_list, int k,
                             const QuadConfig& quad = {}, int deriv_order = 0,
                             DerivMode mode = DerivMode::Exact);

struct GInfinityReport {
    bool regular = false;
    int N = 0;                  // common bound: sup_K |d^alpha f_eps| = O(eps^-N)
    std::vector<double> slopes; // fitted eps-slope per derivative order
};

// Fits the eps-slope of sup_K |d^alpha f_eps| per derivative order |alpha|.
// Regular iff the slopes plateau (no further drop beyond 0.3 per order);
// then N is the smallest common bound. K empty means the whole grid.
GInfinityReport g_infinity_probe(const SampledGenFunction& f,
                                 const std::vector<std::array<double, 2>>& K = {});

} // namespace goi

#endif
