#include "goi/phase.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <unordered_map>

#include "goi/parallel.hpp"

namespace goi {

Expr unit_sphere_subst(Expr e, int p) {
    std::map<std::pair<Axis, int>, Expr> m;
    Expr inv_norm = xi_norm_sq(p).powr(-0.5);
    for (int j = 0; j < p; ++j)
        m[{Axis::Xi, j}] = Expr::var(Axis::Xi, j) * inv_norm;
    return e.subst(m);
}

namespace {

// deterministic low-discrepancy samples in [0,1): additive golden-ratio walk
double halton_like(int i) { return std::fmod(0.5 + 0.6180339887498949 * i, 1.0); }

std::vector<Point> validation_points(const Arity& ar, int count) {
    std::vector<Point> pts(count);
    int c = 0;
    for (auto& pt : pts) {
        for (int j = 0; j < ar.nx; ++j) pt.x[j] = 2 * halton_like(c++) - 1;
        for (int j = 0; j < ar.ny; ++j) pt.y[j] = 2 * halton_like(c++) - 1;
        double ns = 0;
        for (int j = 0; j < ar.np; ++j) {
            pt.xi[j] = 2 * halton_like(c++) - 1;
            ns += pt.xi[j] * pt.xi[j];
        }
        if (ns < 1e-4) { pt.xi[0] += 0.5; }
    }
    return pts;
}

} // namespace

PhaseValidity check_phase(const PhaseExpr& phi, const CompactBox& K, const EpsilonGrid& grid,
                          const ClassifyConfig& cfg) {
    grid.validate();
    const int p = phi.ar.np;
    const int ny = phi.ar.ny;
    if (p < 1 || ny < 1) fail(errc::config, "phase needs ny >= 1 and np >= 1");
    if ((int)K.y.size() != ny || (int)K.x.size() != phi.ar.nx)
        fail(errc::config, "box dimensions do not match the phase");

    PhaseValidity out;

    // homogeneity and realness, sampled
    Tape tape(phi.e);
    auto pts = validation_points(phi.ar, 24);
    // eps = 1 is excluded: scale factors like 1/log(1/eps) are singular there
    const double eps_probe[] = {0.5, 0.1, 0.01};
    for (const auto& base : pts) {
        for (double eps : eps_probe) {
            Point q = base;
            q.eps = eps;
            cx v = tape.eval(q);
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(errc::non_finite, "phase evaluates to a non-finite value");
            if (std::abs(v.imag()) > 1e-12 * (1 + std::abs(v.real())))
                fail(errc::not_real, "phase has a nonzero imaginary part");
            for (double t : {2.0, 5.0}) {
                Point s = q;
                for (int j = 0; j < p; ++j) s.xi[j] = t * q.xi[j];
                cx vs = tape.eval(s);
                if (std::abs(vs - t * v) > 1e-9 * (1 + std::abs(t * v)))
                    fail(errc::not_homogeneous,
                         "phase is not positively homogeneous of degree 1 in xi");
            }
        }
    }
    out.homogeneous = true;
    out.real = true;

    // gradient inf-net over K x S^{p-1}: one tape of all (y,xi)-partials,
    // evaluated with xi on the unit sphere directly (degrees 0 and 1)
    std::vector<Expr> grads;
    for (int j = 0; j < p; ++j) grads.push_back(phi.e.d(Axis::Xi, j));
    for (int k = 0; k < ny; ++k) grads.push_back(phi.e.d(Axis::Y, k));
    Tape gtape(grads);

    auto box = K.y;
    for (const auto& xb : K.x) box.push_back(xb);
    auto lattice = box_lattice(box, K.resolution);
    auto cone = ConeGrid::standard(p);
    std::vector<Point> gpts;
    for (const auto& yx : lattice) {
        Point pt;
        for (int k = 0; k < ny; ++k) pt.y[k] = yx[k];
        for (int j = 0; j < phi.ar.nx; ++j) pt.x[j] = yx[ny + j];
        for (const auto& dir : cone.dirs) {
            for (int j = 0; j < p; ++j) pt.xi[j] = dir[j];
            gpts.push_back(pt);
        }
    }

    auto cache = std::make_shared<std::unordered_map<double, double>>();
    auto gradsq_min = [gtape, gpts, nroots = grads.size(), cache](double eps) -> cx {
        if (auto it = cache->find(eps); it != cache->end()) return it->second;
        std::vector<Point> pp = gpts;
        for (auto& q : pp) q.eps = eps;
        std::vector<cx> vals(pp.size() * nroots);
        gtape.eval_batch(pp, vals);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pp.size(); ++i) {
            double s = 0;
            for (std::size_t r = 0; r < nroots; ++r) s += std::norm(vals[i * nroots + r]);
            if (!std::isfinite(s)) fail(errc::non_finite, "non-finite phase gradient");
            best = std::min(best, s);
        }
        (*cache)[eps] = best;
        return best;
    };

    out.grad.cls = classify_net(gradsq_min, grid, cfg);
    out.grad.min_at_tail_eps = std::abs(gradsq_min(grid.samples.back()));

    if (!out.grad.cls.strictly_nonzero)
        fail(errc::degenerate_gradient,
             "phase gradient decays faster than every power of eps on K x S^{p-1}");
    out.valid = true;

    bool grad_slow = false;
    try {
        grad_slow = is_slow_scale_strictly_nonzero(gradsq_min, grid, cfg);
    } catch (const error&) {
        grad_slow = false; // a zero sample on the tail rules the slow-scale case out
    }
    if (grad_slow) {
        auto sc = classify_symbol(SymbolExpr{phi.e, phi.ar, {1, 1, 0}}, K, grid, 4, cfg);
        out.valid_slow_scale = sc.slow_scale || sc.negligible;
    }
    return out;
}

LPhiOperator build_L_phi(const PhaseExpr& phi) {
    return build_L_phi(phi, chi_cutoff(phi.ar.np));
}

LPhiOperator build_L_phi(const PhaseExpr& phi, Expr chi) {
    const int p = phi.ar.np;
    const int ny = phi.ar.ny;
    if (p < 1 || ny < 1) fail(errc::config, "phase needs ny >= 1 and np >= 1");

    std::vector<Expr> dxi(p), dy(ny);
    for (int j = 0; j < p; ++j) dxi[j] = phi.e.d(Axis::Xi, j);
    for (int k = 0; k < ny; ++k) dy[k] = phi.e.d(Axis::Y, k);

    Expr gradsq; // |grad phi(y, xi/|xi|)|^2
    for (int j = 0; j < p; ++j) gradsq = gradsq + unit_sphere_subst(dxi[j], p).pow(2);
    for (int k = 0; k < ny; ++k) gradsq = gradsq + unit_sphere_subst(dy[k], p).pow(2);
    Expr phi_inv = gradsq.pow(-1);

    LPhiOperator L;
    L.ar = phi.ar;
    L.chi = chi;
    Expr one_m_chi = 1.0 - L.chi;
    Expr I = Expr::constant(cx(0, 1));
    Expr inv_xi_sq = xi_norm_sq(p).pow(-1);

    L.a.resize(p);
    L.b.resize(ny);
    for (int j = 0; j < p; ++j) L.a[j] = I * one_m_chi * phi_inv * dxi[j];
    for (int k = 0; k < ny; ++k) L.b[k] = I * one_m_chi * inv_xi_sq * phi_inv * dy[k];
    L.c = L.chi;
    for (int j = 0; j < p; ++j) L.c = L.c + L.a[j].d(Axis::Xi, j);
    for (int k = 0; k < ny; ++k) L.c = L.c + L.b[k].d(Axis::Y, k);
    return L;
}

double transpose_identity_check(const LPhiOperator& L, const PhaseExpr& phi,
                                std::span<const Point> samples, std::span<const double> eps) {
    Expr E = exp(Expr::constant(cx(0, 1)) * phi.e);
    Expr r = L.c * E - E;
    for (std::size_t j = 0; j < L.a.size(); ++j) r = r - (L.a[j] * E).d(Axis::Xi, (int)j);
    for (std::size_t k = 0; k < L.b.size(); ++k) r = r - (L.b[k] * E).d(Axis::Y, (int)k);
    Tape tape(r);

    double worst = 0;
    for (const auto& base : samples) {
        double ns = 0;
        for (int j = 0; j < L.ar.np; ++j) ns += base.xi[j] * base.xi[j];
        if (ns <= 0.25) fail(errc::config, "transpose identity holds only for |xi| > 1/2");
        for (double e : eps) {
            Point q = base;
            q.eps = e;
            double v = std::abs(tape.eval(q));
            if (!std::isfinite(v)) fail(errc::non_finite, "non-finite transpose residual");
            worst = std::max(worst, v);
        }
    }
    return worst;
}

SymbolExpr apply_L_phi(const LPhiOperator& L, const SymbolExpr& f, int times) {
    if (times < 0) fail(errc::config, "negative application count");
    if (f.ar.np != L.ar.np || f.ar.ny != L.ar.ny)
        fail(errc::config, "symbol arity does not match the operator");
    constexpr int kMaxDepth = 12; // each pass multiplies the DAG; beyond this it blows up
    if (times > kMaxDepth) fail(errc::derivative_depth, "too many L_phi applications");

    Expr g = f.e;
    for (int t = 0; t < times; ++t) {
        Expr next = L.c * g;
        for (std::size_t j = 0; j < L.a.size(); ++j) next = next + L.a[j] * g.d(Axis::Xi, (int)j);
        for (std::size_t k = 0; k < L.b.size(); ++k) next = next + L.b[k] * g.d(Axis::Y, (int)k);
        g = next;
    }
    double s = std::min(f.ord.rho, 1 - f.ord.delta);
    Arity ar = f.ar;
    ar.nx = std::max(f.ar.nx, L.ar.nx);
    return SymbolExpr{g, ar, {f.ord.m - times * s, f.ord.rho, f.ord.delta}};
}

} // namespace goi
