#include "goi/hyperbolic.hpp"

#include <algorithm>
#include <cmath>

#include "goi/phase.hpp"
#include "goi/quad.hpp"

namespace goi {

CharacteristicFlow::CharacteristicFlow(const CauchyProblem& p, double eps, double tol)
    : c_(p.c), b_(p.b), eps_(eps), tol_(tol) {
    if (!(eps > 0)) fail(errc::config, "eps must be positive");
    if (!(tol > 0)) fail(errc::config, "tol must be positive");
}

namespace {

struct State {
    double gamma, damp;
};

} // namespace

std::array<double, 2> CharacteristicFlow::integrate(double x, double t, double s,
                                                    bool with_b) const {
    State y{x, 0};
    double cur = t;
    const double span = std::abs(s - t);
    if (span == 0) return {x, 0};

    Point q;
    q.eps = eps_;
    auto rhs = [&](const State& st, double r) {
        q.x[0] = st.gamma;
        q.x[1] = r;
        State d;
        d.gamma = c_.eval(q).real();
        d.damp = with_b ? b_.eval(q).real() : 0.0;
        return d;
    };
    auto rk4 = [&](const State& st, double r, double h) {
        State k1 = rhs(st, r);
        State k2 = rhs({st.gamma + h / 2 * k1.gamma, st.damp + h / 2 * k1.damp}, r + h / 2);
        State k3 = rhs({st.gamma + h / 2 * k2.gamma, st.damp + h / 2 * k2.damp}, r + h / 2);
        State k4 = rhs({st.gamma + h * k3.gamma, st.damp + h * k3.damp}, r + h);
        return State{st.gamma + h / 6 * (k1.gamma + 2 * k2.gamma + 2 * k3.gamma + k4.gamma),
                     st.damp + h / 6 * (k1.damp + 2 * k2.damp + 2 * k3.damp + k4.damp)};
    };

    double h = (s > t ? span : -span) / 8;
    while (cur != s) {
        if (std::abs(h) > std::abs(s - cur)) h = s - cur;
        State full = rk4(y, cur, h);
        State half = rk4(rk4(y, cur, h / 2), cur + h / 2, h / 2);
        double err = std::max(std::abs(full.gamma - half.gamma),
                              std::abs(full.damp - half.damp)) /
                     15.0;
        if (err <= tol_) {
            // local extrapolation: the step-doubling pair is 5th order combined
            y = {half.gamma + (half.gamma - full.gamma) / 15,
                 half.damp + (half.damp - full.damp) / 15};
            cur += h;
        }
        double grow = 0.9 * std::pow(tol_ / std::max(err, 1e-300), 0.2);
        h *= std::clamp(grow, 0.2, 5.0);
        if (std::abs(h) < 1e-14 * (std::abs(t) + std::abs(s) + 1))
            fail(errc::step_underflow, "characteristic step size underflow");
    }
    return {y.gamma, y.damp};
}

double CharacteristicFlow::gamma(double x, double t, double s) const {
    return integrate(x, t, s, false)[0];
}

std::array<double, 2> CharacteristicFlow::foot_and_damping(double x, double t) const {
    auto r = integrate(x, t, 0.0, true);
    // the damping state runs with the backward sweep, so the forward integral
    // int_0^t b comes out negated
    return {r[0], -r[1]};
}

CharacteristicFlow solve_characteristics(const CauchyProblem& p, double eps, double tol) {
    return CharacteristicFlow(p, eps, tol);
}

std::vector<cx> solve_transport(const CauchyProblem& p, const CharacteristicFlow& flow,
                                std::span<const double> xs, std::span<const double> ts) {
    Tape g(p.g);
    std::vector<cx> out(xs.size() * ts.size());
    for (std::size_t it = 0; it < ts.size(); ++it)
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            auto [foot, damp] = flow.foot_and_damping(xs[ix], ts[it]);
            Point q;
            q.eps = flow.eps();
            q.y[0] = foot;
            out[it * xs.size() + ix] = g.eval(q) * std::exp(-damp);
        }
    return out;
}

std::vector<cx> fio_solution(const CauchyProblem& p, const CharacteristicFlow& flow,
                             std::span<const double> xs, std::span<const double> ts, int k,
                             const QuadConfig& quad) {
    Arity ar{1, 1, 1};
    PhaseExpr phi{(Expr::var(Axis::X, 0) - Expr::var(Axis::Y, 0)) * Expr::var(Axis::Xi, 0), ar};
    SymbolExpr gu{p.g, ar, {0, 1, 0}};
    if (k < choose_k(gu.ord, 1, 0)) fail(errc::config, "k below the integrability threshold");
    check_phase(phi, CompactBox{{{p.support}}, {{p.x_box}}}, EpsilonGrid::dyadic());

    LPhiOperator L = build_L_phi(phi);
    SymbolExpr g = apply_L_phi(L, gu, k);
    Expr root = exp(Expr::constant(cx(0, 1)) * phi.e) * g.e;

    std::vector<std::array<double, 2>> ybox{p.support};
    std::vector<cx> out(xs.size() * ts.size());
    for (std::size_t it = 0; it < ts.size(); ++it)
        for (std::size_t ix = 0; ix < xs.size(); ++ix) {
            auto [foot, damp] = flow.foot_and_damping(xs[ix], ts[it]);
            Point base;
            base.x[0] = foot;
            auto res = oscint_integrate_roots(phi, std::span<const Expr>(&root, 1), ybox, base,
                                              flow.eps(), g.ord.m, quad);
            out[it * xs.size() + ix] = res[0].value * std::exp(-damp);
        }
    return out;
}

std::vector<double> cluster_points(std::vector<double> samples, double merge_dist) {
    std::vector<double> centers;
    if (samples.empty()) return centers;
    std::sort(samples.begin(), samples.end());
    std::size_t start = 0;
    for (std::size_t i = 1; i <= samples.size(); ++i) {
        if (i == samples.size() || samples[i] - samples[i - 1] > merge_dist) {
            double sum = 0;
            for (std::size_t j = start; j < i; ++j) sum += samples[j];
            centers.push_back(sum / (double)(i - start));
            start = i;
        }
    }
    return centers;
}

namespace {

bool clusters_match(const std::vector<double>& a, const std::vector<double>& b, double dist) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::abs(a[i] - b[i]) > dist) return false;
    return true;
}

} // namespace

DependenceReport domain_of_dependence(const CauchyProblem& p, double x0, double t0,
                                      const EpsilonGrid& grid, double tol, double merge_dist) {
    grid.validate();
    DependenceReport rep;
    for (double eps : grid.tail()) {
        CharacteristicFlow flow(p, eps, tol);
        rep.samples.push_back(flow.gamma(x0, t0, 0.0));
    }
    rep.hull = {*std::min_element(rep.samples.begin(), rep.samples.end()),
                *std::max_element(rep.samples.begin(), rep.samples.end())};
    rep.clusters = cluster_points(rep.samples, merge_dist);
    std::vector<double> late(rep.samples.begin() + rep.samples.size() / 2, rep.samples.end());
    rep.settled = clusters_match(rep.clusters, cluster_points(late, merge_dist), merge_dist);
    return rep;
}

std::vector<double> coefficient_clusters(const CauchyProblem& p, double x, double t,
                                         const EpsilonGrid& grid, double merge_dist) {
    grid.validate();
    Tape c(p.c);
    std::vector<double> vals;
    for (double eps : grid.tail()) {
        Point q;
        q.eps = eps;
        q.x[0] = x;
        q.x[1] = t;
        vals.push_back(c.eval(q).real());
    }
    return cluster_points(std::move(vals), merge_dist);
}

std::vector<WfPredictedFamily> kernel_wf_prediction(std::span<const double> c_clusters) {
    std::vector<WfPredictedFamily> out;
    for (double c : c_clusters) {
        double norm = std::sqrt(2 + c * c);
        out.push_back({c, {1 / norm, -c / norm, -1 / norm}});
    }
    return out;
}

double angle_to_prediction(std::span<const WfPredictedFamily> families,
                           std::span<const double> dir3) {
    if (dir3.size() != 3) fail(errc::config, "direction must have 3 components");
    double n = std::sqrt(dir3[0] * dir3[0] + dir3[1] * dir3[1] + dir3[2] * dir3[2]);
    if (n == 0) fail(errc::config, "direction must be nonzero");
    double best = std::numbers::pi;
    for (const auto& f : families) {
        double dot = (dir3[0] * f.dir[0] + dir3[1] * f.dir[1] + dir3[2] * f.dir[2]) / n;
        best = std::min(best, std::acos(std::clamp(std::abs(dot), 0.0, 1.0)));
    }
    return best;
}

SampledKernel sample_kernel(const CauchyProblem& p, std::span<const double> eps_list,
                            const std::vector<std::array<double, 2>>& box,
                            const std::vector<std::size_t>& shape, double tol) {
    if (box.size() != 3 || shape.size() != 3) fail(errc::config, "kernel grid must be 3-d");
    if (eps_list.empty()) fail(errc::config, "need at least one eps");

    SampledKernel k;
    k.eps_list.assign(eps_list.begin(), eps_list.end());
    k.box = box;
    k.shape = shape;

    const std::size_t nx = shape[0], nt = shape[1], ny = shape[2];
    std::vector<double> xs(nx), ts(nt), ys(ny);
    double dd[3];
    for (int i = 0; i < 3; ++i) dd[i] = (box[i][1] - box[i][0]) / (double)shape[i];
    for (std::size_t j = 0; j < nx; ++j) xs[j] = box[0][0] + ((double)j + 0.5) * dd[0];
    for (std::size_t j = 0; j < nt; ++j) ts[j] = box[1][0] + ((double)j + 0.5) * dd[1];
    for (std::size_t j = 0; j < ny; ++j) ys[j] = box[2][0] + ((double)j + 0.5) * dd[2];

    for (double eps : eps_list) {
        CharacteristicFlow flow(p, eps, tol);
        std::vector<std::array<double, 2>> feet(nx * nt);
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t it = 0; it < nt; ++it)
                feet[ix * nt + it] = flow.foot_and_damping(xs[ix], ts[it]);

        double zmin = 1e300, zmax = -1e300;
        for (const auto& f : feet) {
            zmin = std::min(zmin, f[0] - ys.back());
            zmax = std::max(zmax, f[0] - ys.front());
        }
        // the damped frequency integral depends on (x,t,y) only through
        // z = foot - y, so tabulate it once on a z-grid fine relative to eps
        // fine spacing: interpolation error shows up as a broadband spectral
        // floor in the 3-d transform, so it must sit far below the window
        // sidelobes the WF probe still has to resolve
        const double dz = eps / 64;
        const double z0 = zmin - 2 * dz;
        const std::size_t nz = (std::size_t)std::ceil((zmax - z0) / dz) + 4;
        const double R = 7 / eps;
        std::vector<double> table(nz);
        std::vector<double> qx, qw;
        for (std::size_t iz = 0; iz < nz; ++iz) {
            const double z = z0 + (double)iz * dz;
            auto panels = oscillation_panels(0, R, std::abs(z) + 1);
            qx.clear();
            qw.clear();
            panel_nodes(panels, qx, qw);
            double sum = 0;
            for (std::size_t i = 0; i < qx.size(); ++i) {
                double d = eps * qx[i];
                sum += qw[i] * std::cos(z * qx[i]) * std::exp(-d * d);
            }
            table[iz] = sum / std::numbers::pi;
        }
        auto interp = [&](double z) {
            double u = (z - z0) / dz;
            std::size_t i = (std::size_t)std::clamp((long long)u, 1LL, (long long)nz - 3);
            double f = u - (double)i;
            // 4-point Lagrange on the uniform table
            return table[i - 1] * (-f * (f - 1) * (f - 2) / 6) +
                   table[i] * ((f + 1) * (f - 1) * (f - 2) / 2) +
                   table[i + 1] * (-(f + 1) * f * (f - 2) / 2) +
                   table[i + 2] * ((f + 1) * f * (f - 1) / 6);
        };

        std::vector<cx> vals(nx * nt * ny);
        for (std::size_t ix = 0; ix < nx; ++ix)
            for (std::size_t it = 0; it < nt; ++it) {
                const auto& f = feet[ix * nt + it];
                const double amp = std::exp(-f[1]);
                for (std::size_t iy = 0; iy < ny; ++iy)
                    vals[(ix * nt + it) * ny + iy] = amp * interp(f[0] - ys[iy]);
            }
        k.values.push_back(std::move(vals));
    }
    return k;
}

} // namespace goi
