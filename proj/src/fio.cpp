#include "goi/fio.hpp"

#include <algorithm>
#include <cmath>

#include "goi/phase.hpp"

namespace goi {

std::size_t SampledGenFunction::points() const {
    std::size_t n = 1;
    for (const auto& ax : axes) n *= ax.size();
    return n;
}

void SampledGenFunction::point_coords(std::size_t pt, double* out) const {
    for (std::size_t k = axes.size(); k-- > 0;) {
        out[k] = axes[k][pt % axes[k].size()];
        pt /= axes[k].size();
    }
}

namespace {

// multi-indices over nx axes with |alpha| <= order, listed by total order
std::vector<std::array<int, 4>> multi_indices(int nx, int order) {
    std::vector<std::array<int, 4>> out;
    std::array<int, 4> idx{};
    auto rec = [&](auto&& self, int axis, int left) -> void {
        if (axis == nx) {
            out.push_back(idx);
            return;
        }
        for (int j = 0; j <= left; ++j) {
            idx[axis] = j;
            self(self, axis + 1, left - j);
            idx[axis] = 0;
        }
    };
    for (int m = 0; m <= order; ++m) {
        std::size_t before = out.size();
        rec(rec, 0, m);
        // rec enumerates |alpha| <= m; keep only the new order-m entries
        out.erase(std::remove_if(out.begin() + before, out.end(),
                                 [&](const std::array<int, 4>& a) {
                                     return a[0] + a[1] + a[2] + a[3] != m;
                                 }),
                  out.end());
    }
    return out;
}

double slope_fit(std::span<const double> eps, std::span<const double> sup) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = (double)eps.size();
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double x = std::log(eps[i]);
        double y = std::log(std::max(sup[i], 1e-300));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace

// 5-point central-difference rows for d/dx^o, offsets (-2,-1,0,1,2), to be
// divided by denom * h^o
struct StencilRow {
    double c[5];
    double denom;
};
constexpr StencilRow kStencil[4] = {
    {{1, -8, 0, 8, -1}, 12},
    {{-1, 16, -30, 16, -1}, 12},
    {{-1, 2, 0, -2, 1}, 2},
    {{1, -4, 6, -4, 1}, 1},
};

SampledGenFunction apply_fio(const FioProblem& prob, std::span<const double> eps_list, int k,
                             const QuadConfig& quad, int deriv_order, DerivMode mode) {
    const int nx = prob.phi.ar.nx, p = prob.phi.ar.np;
    if (nx < 1 || nx > 4) fail(errc::config, "x dimension must lie in [1, 4]");
    if ((int)prob.x_box.size() != nx) fail(errc::config, "x box does not match the phase");
    if (prob.x_points < 1) fail(errc::config, "need at least one x point");
    if (deriv_order < 0 || deriv_order > 4)
        fail(errc::config, "derivative order must lie in [0, 4]");
    if (eps_list.empty()) fail(errc::config, "need at least one eps");

    CompactBox K{prob.support, prob.x_box};
    check_phase(prob.phi, K, EpsilonGrid::dyadic());

    // each exact x-derivative of e^{i phi} a u costs a factor i d phi/dx ~ |xi|
    SymbolOrder eff = prob.a.ord;
    if (mode == DerivMode::Exact) eff.m += deriv_order;
    if (k < choose_k(eff, p, 0))
        fail(errc::config, "k below the integrability threshold for the requested derivatives");

    LPhiOperator L = build_L_phi(prob.phi);
    SymbolExpr au{prob.a.e * prob.u, prob.a.ar, prob.a.ord};
    SymbolExpr g = apply_L_phi(L, au, k);
    Expr base_root = exp(Expr::constant(cx(0, 1)) * prob.phi.e) * g.e;

    SampledGenFunction out;
    out.nx = nx;
    out.eps_list.assign(eps_list.begin(), eps_list.end());

    std::vector<Expr> roots;
    if (mode == DerivMode::Exact) {
        out.derivs = multi_indices(nx, deriv_order);
        for (const auto& alpha : out.derivs) {
            Expr r = base_root;
            for (int axis = 0; axis < nx; ++axis)
                for (int j = 0; j < alpha[axis]; ++j) r = r.d(Axis::X, axis);
            roots.push_back(r);
        }
    } else {
        // pure axis derivatives only; mixed partials are not stencilled
        out.derivs.push_back({});
        for (int o = 1; o <= deriv_order; ++o)
            for (int axis = 0; axis < nx; ++axis) {
                std::array<int, 4> a{};
                a[axis] = o;
                out.derivs.push_back(a);
            }
    }

    for (int axis = 0; axis < nx; ++axis) {
        std::vector<double> xs(prob.x_points);
        double a = prob.x_box[axis][0], b = prob.x_box[axis][1];
        for (int i = 0; i < prob.x_points; ++i)
            xs[i] = prob.x_points == 1 ? (a + b) / 2
                                       : a + (b - a) * i / double(prob.x_points - 1);
        out.axes.push_back(std::move(xs));
    }

    const std::size_t npts = out.points(), nd = out.derivs.size();
    out.values.assign(eps_list.size() * npts * nd, cx(0, 0));
    out.err.assign(out.values.size(), 0.0);

    double coords[4];
    for (std::size_t e = 0; e < eps_list.size(); ++e) {
        const double h = eps_list[e] / 4;
        if (mode == DerivMode::Stencil) {
            // base value plus x_axis +/- h, +/- 2h shifts, all on one grid
            roots.assign(1, base_root);
            if (deriv_order > 0)
                for (int axis = 0; axis < nx; ++axis)
                    for (int j : {-2, -1, 1, 2}) {
                        std::map<std::pair<Axis, int>, Expr> m;
                        m.emplace(std::pair{Axis::X, axis},
                                  Expr::var(Axis::X, axis) + Expr::constant(j * h));
                        roots.push_back(base_root.subst(m));
                    }
        }
        for (std::size_t pt = 0; pt < npts; ++pt) {
            Point base;
            out.point_coords(pt, coords);
            for (int axis = 0; axis < nx; ++axis) base.x[axis] = coords[axis];
            double decay = g.ord.m + (mode == DerivMode::Exact ? deriv_order : 0);
            auto res =
                oscint_integrate_roots(prob.phi, roots, prob.support, base, eps_list[e], decay, quad);
            if (mode == DerivMode::Exact) {
                for (std::size_t d = 0; d < nd; ++d) {
                    out.values[out.index(e, pt, d)] = res[d].value;
                    out.err[out.index(e, pt, d)] = res[d].err_budget;
                }
            } else {
                out.values[out.index(e, pt, 0)] = res[0].value;
                out.err[out.index(e, pt, 0)] = res[0].err_budget;
                for (std::size_t d = 1; d < nd; ++d) {
                    int o = 0, axis = 0;
                    for (int ax = 0; ax < nx; ++ax)
                        if (out.derivs[d][ax]) o = out.derivs[d][ax], axis = ax;
                    const StencilRow& row = kStencil[o - 1];
                    const double hs = row.denom * std::pow(h, o);
                    cx v = row.c[2] * res[0].value;
                    double err = std::abs(row.c[2]) * res[0].err_budget;
                    for (int j = 0; j < 4; ++j) {
                        const std::size_t r = 1 + 4 * (std::size_t)axis + (std::size_t)j;
                        const double c = row.c[j < 2 ? j : j + 1];
                        v += c * res[r].value;
                        err += std::abs(c) * res[r].err_budget;
                    }
                    out.values[out.index(e, pt, d)] = v / hs;
                    out.err[out.index(e, pt, d)] = err / hs;
                }
            }
        }
    }
    return out;
}

GInfinityReport g_infinity_probe(const SampledGenFunction& f,
                                 const std::vector<std::array<double, 2>>& K) {
    if (f.eps_list.size() < 3) fail(errc::config, "need at least 3 eps samples for slope fits");
    if (!K.empty() && (int)K.size() != f.nx) fail(errc::config, "K does not match the grid");

    int max_order = 0;
    for (const auto& a : f.derivs) max_order = std::max(max_order, a[0] + a[1] + a[2] + a[3]);

    const std::size_t npts = f.points();
    std::vector<char> inside(npts, 1);
    if (!K.empty()) {
        double coords[4];
        for (std::size_t pt = 0; pt < npts; ++pt) {
            f.point_coords(pt, coords);
            for (int axis = 0; axis < f.nx; ++axis)
                if (coords[axis] < K[axis][0] || coords[axis] > K[axis][1]) inside[pt] = 0;
        }
    }

    GInfinityReport rep;
    for (int m = 0; m <= max_order; ++m) {
        std::vector<double> sup(f.eps_list.size(), 0.0);
        for (std::size_t e = 0; e < f.eps_list.size(); ++e)
            for (std::size_t pt = 0; pt < npts; ++pt) {
                if (!inside[pt]) continue;
                for (std::size_t d = 0; d < f.derivs.size(); ++d) {
                    const auto& a = f.derivs[d];
                    if (a[0] + a[1] + a[2] + a[3] != m) continue;
                    sup[e] = std::max(sup[e], std::abs(f.values[f.index(e, pt, d)]));
                }
            }
        rep.slopes.push_back(slope_fit(f.eps_list, sup));
    }

    // regular iff the slopes stop dropping with the derivative order; a
    // steady decline (one extra power of 1/eps per derivative) is the
    // signature of non-regular behavior
    double worst_drop = 0, min_slope = rep.slopes[0];
    for (std::size_t m = 1; m < rep.slopes.size(); ++m) {
        worst_drop = std::max(worst_drop, rep.slopes[m - 1] - rep.slopes[m]);
        min_slope = std::min(min_slope, rep.slopes[m]);
    }
    rep.regular = worst_drop < 0.3;
    if (rep.regular) rep.N = std::max(0, (int)std::ceil(-min_slope - 0.3));
    return rep;
}

} // namespace goi
