#include "goi/oscint.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "goi/parallel.hpp"
#include "goi/quad.hpp"

namespace goi {

int choose_k(const SymbolOrder& ord, int p, int extra_decay) {
    if (ord.rho <= 0 || ord.delta >= 1) fail(errc::config, "need rho > 0 and delta < 1");
    if (extra_decay < 0) fail(errc::config, "extra_decay must be >= 0");
    double s = std::min(ord.rho, 1 - ord.delta);
    double t = (ord.m + 1 + p + extra_decay) / s;
    int k = (int)std::floor(t + 1e-12) + 1;
    return std::max(0, k);
}

namespace {

constexpr double kPi = std::numbers::pi;

struct PanelRates {
    double radial = 0;  // max |phi(y, xi/|xi|)|
    double angular = 0; // max |grad_xi phi| on the unit sphere (times r later)
    std::vector<double> y;
    // grad_y phi at unit xi, for direction-resolved y rates: at a given xi
    // the y-oscillation is |grad_y phi(y, xi)|, usually far below the
    // all-directions worst case stored in `y`
    std::shared_ptr<Tape> grad;
    std::vector<std::vector<double>> lat;
};

// per-axis y-oscillation rates at the direction of `q`'s xi (radius r)
void y_rates_at(const PanelRates& rates, const Point& q, double r, int p, int ny,
                double* out) {
    Point s = q;
    double n = 0;
    for (int j = 0; j < p; ++j) n += s.xi[j] * s.xi[j];
    n = std::sqrt(n);
    if (n == 0) {
        for (int k = 0; k < ny; ++k) out[k] = 0;
        return;
    }
    for (int j = 0; j < p; ++j) s.xi[j] /= n;
    for (int k = 0; k < ny; ++k) out[k] = 0;
    std::vector<cx> vals(ny);
    for (const auto& yv : rates.lat) {
        for (int k = 0; k < ny; ++k) s.y[k] = yv[k];
        rates.grad->eval_multi(s, vals);
        for (int k = 0; k < ny; ++k) out[k] = std::max(out[k], r * std::abs(vals[k]));
    }
}

PanelRates phase_rates(const PhaseExpr& phi, const std::vector<std::array<double, 2>>& ybox,
                       const Point& base, double eps) {
    const int p = phi.ar.np, ny = phi.ar.ny;
    std::vector<Expr> roots{phi.e};
    for (int k = 0; k < ny; ++k) roots.push_back(phi.e.d(Axis::Y, k));
    for (int j = 0; j < p; ++j) roots.push_back(phi.e.d(Axis::Xi, j));
    Tape t(roots);
    auto lat = box_lattice(ybox, 5);
    auto cone = ConeGrid::standard(p);
    PanelRates r;
    r.y.assign(ny, 0.0);
    std::vector<cx> vals(roots.size());
    for (const auto& yv : lat) {
        for (const auto& dir : cone.dirs) {
            Point q = base;
            q.eps = eps;
            for (int k = 0; k < ny; ++k) q.y[k] = yv[k];
            for (int j = 0; j < p; ++j) q.xi[j] = dir[j];
            t.eval_multi(q, vals);
            double ang = 0;
            for (const cx& v : vals)
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                    fail(errc::non_finite, "non-finite phase sample");
            r.radial = std::max(r.radial, std::abs(vals[0]));
            for (int k = 0; k < ny; ++k) r.y[k] = std::max(r.y[k], std::abs(vals[1 + k]));
            for (int j = 0; j < p; ++j) ang += std::abs(vals[1 + ny + j]);
            r.angular = std::max(r.angular, ang);
        }
    }
    std::vector<Expr> grads(roots.begin() + 1, roots.begin() + 1 + ny);
    r.grad = std::make_shared<Tape>(std::span<const Expr>(grads));
    r.lat = box_lattice(ybox, 3);
    return r;
}

// integrand(y, -xi) == conj(integrand(y, xi)) for every root, sampled.
// Holds for real-coefficient data with xi-odd phases and lets the xi domain
// be halved (total = I + conj(I) over the half-space).
bool conj_symmetric(const Tape& tape, const Point& base, double eps,
                    const std::vector<std::array<double, 2>>& ybox, int p) {
    const std::size_t nr = tape.root_count();
    std::vector<cx> a(nr), b(nr);
    for (int trial = 0; trial < 12; ++trial) {
        Point q = base;
        q.eps = eps;
        double h = std::fmod(0.37 + 0.6180339887498949 * trial, 1.0);
        for (std::size_t k = 0; k < ybox.size(); ++k)
            q.y[k] = ybox[k][0] + (0.13 + 0.74 * h) * (ybox[k][1] - ybox[k][0]);
        for (int j = 0; j < p; ++j) q.xi[j] = (j % 2 ? -1.3 : 0.9) * (1 + trial * 0.61);
        tape.eval_multi(q, a);
        for (int j = 0; j < p; ++j) q.xi[j] = -q.xi[j];
        tape.eval_multi(q, b);
        for (std::size_t r = 0; r < nr; ++r)
            if (std::abs(b[r] - std::conj(a[r])) > 1e-12 * (1 + std::abs(a[r]))) return false;
    }
    return true;
}

// refinement level f -> grading depth (one extra halving per doubling)
int grade_depth(double f) {
    int depth = 2;
    for (double g = f; g > 1; g /= 2) ++depth;
    return depth;
}

// oscillation panels on [a, b] with the first and last panel geometrically
// subdivided toward the endpoints. Boundary layers (derivative spikes of
// compactly supported glue functions) are resolved at cost logarithmic in
// the layer scale. Graded subpanels sit well inside their own analyticity
// radius, so half-size rules suffice there.
std::vector<Panel1D> edge_graded_panels(double a, double b, double rate, int nodes, int depth) {
    auto panels = oscillation_panels(a, b, rate, nodes);
    if (panels.size() == 1) {
        double mid = (a + b) / 2;
        panels = {{a, mid, nodes}, {mid, b, nodes}};
    }
    int gn = std::max(8, nodes / 2);
    std::vector<Panel1D> graded;
    {
        const Panel1D& fr = panels.front();
        double w = fr.b - fr.a;
        for (int m = 1; m <= depth; ++m)
            graded.push_back({m == 1 ? fr.a : fr.a + w / (1 << (depth - m + 1)),
                              fr.a + w / (1 << (depth - m)), gn});
    }
    for (std::size_t j = 1; j + 1 < panels.size(); ++j) graded.push_back(panels[j]);
    {
        const Panel1D& bk = panels.back();
        double w = bk.b - bk.a;
        for (int m = depth; m >= 1; --m)
            graded.push_back({bk.b - w / (1 << (depth - m)),
                              m == 1 ? bk.b : bk.b - w / (1 << (depth - m + 1)), gn});
    }
    return graded;
}

// y-integral of every root at a fixed xi; panel widths track the per-axis
// oscillation rates at that xi plus a uniform 2f feature term, with
// geometric grading toward the support-box edges where compactly supported
// amplitudes carry their derivative layers. f doubles per refinement.
void inner_y_integral(const Tape& tape, const Point& base,
                      const std::vector<std::array<double, 2>>& ybox,
                      const double* yrates, int nodes, double f, double weight,
                      std::span<cx> out) {
    const int ny = (int)ybox.size();
    int depth = grade_depth(f);
    std::array<std::vector<double>, 4> xs, ws;
    for (int k = 0; k < ny; ++k) {
        auto graded = edge_graded_panels(ybox[k][0], ybox[k][1], yrates[k] + 2 * f + 6,
                                         nodes, depth);
        panel_nodes(graded, xs[k], ws[k]);
    }
    std::size_t npts = 1;
    for (int k = 0; k < ny; ++k) npts *= xs[k].size();
    const std::size_t nr = tape.root_count();

    std::vector<std::vector<cx>> buf(nr);
    for (auto& v : buf) v.reserve(npts);
    std::vector<cx> tmp(nr);
    std::array<std::size_t, 4> idx{};
    Point q = base;
    for (std::size_t i = 0; i < npts; ++i) {
        double w = weight;
        std::size_t rem = i;
        for (int k = 0; k < ny; ++k) {
            idx[k] = rem % xs[k].size();
            rem /= xs[k].size();
            q.y[k] = xs[k][idx[k]];
            w *= ws[k][idx[k]];
        }
        tape.eval_multi(q, tmp);
        for (std::size_t root = 0; root < nr; ++root) {
            const cx& v = tmp[root];
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                fail(errc::non_finite, "non-finite integrand sample");
            buf[root].push_back(w * v);
        }
    }
    for (std::size_t root = 0; root < nr; ++root) out[root] = pairwise_sum(buf[root]);
}

// one annulus [lo, hi] at feature level f; per-root values, unnormalized
std::vector<cx> annulus_integral(const Tape& tape, const Point& base,
                                 const std::vector<std::array<double, 2>>& ybox, int p,
                                 double lo, double hi, const PanelRates& rates, int nodes,
                                 double f, bool half) {
    const std::size_t nr = tape.root_count();
    // the cutoff chi and its L_phi derivatives carry boundary layers at the
    // ends of the transition shell 1/4 <= |xi| <= 1/2; grade the radial
    // panels toward both shell edges there
    bool shell = lo < 0.5 && hi > 0.25;
    std::vector<double> rs, rws;
    if (shell) {
        auto graded = edge_graded_panels(lo, hi, rates.radial + f / 2 + 8, nodes,
                                         grade_depth(f) + 2);
        panel_nodes(graded, rs, rws);
    } else {
        panel_nodes(oscillation_panels(lo, hi, rates.radial + f / 2, nodes), rs, rws);
    }

    std::size_t ntasks;
    std::vector<double> ths, tws;
    if (p == 1) {
        ntasks = rs.size() * (half ? 1 : 2);
    } else {
        double t0 = half ? -kPi / 2 : -kPi;
        double t1 = half ? kPi / 2 : kPi;
        panel_nodes(oscillation_panels(t0, t1, rates.angular * hi + 4 * f, nodes), ths, tws);
        ntasks = rs.size() * ths.size();
    }

    std::vector<cx> node_vals(ntasks * nr);
#ifdef GOI_QUAD_TRACE
    fprintf(stderr, "  [%g,%g] f=%g xi-tasks=%zu\n", lo, hi, f, ntasks);
#endif
    const int ny = (int)ybox.size();
    parallel_for(ntasks, [&](std::size_t t) {
        Point q = base;
        double r, w;
        if (p == 1) {
            std::size_t ri = t % rs.size();
            r = rs[ri];
            w = rws[ri];
            q.xi[0] = (t < rs.size()) ? r : -r;
        } else {
            std::size_t ri = t % rs.size(), ti = t / rs.size();
            r = rs[ri];
            w = rws[ri] * tws[ti] * r; // polar Jacobian
            q.xi[0] = r * std::cos(ths[ti]);
            q.xi[1] = r * std::sin(ths[ti]);
        }
        double yr[4];
        y_rates_at(rates, q, r, p, ny, yr);
        inner_y_integral(tape, q, ybox, yr, nodes, f, w,
                         std::span<cx>(node_vals).subspan(t * nr, nr));
    });

    std::vector<cx> out(nr);
    std::vector<cx> column(ntasks);
    for (std::size_t root = 0; root < nr; ++root) {
        for (std::size_t t = 0; t < ntasks; ++t) column[t] = node_vals[t * nr + root];
        out[root] = pairwise_sum(column);
    }
    return out;
}

// sampled sup of the integrand over an annulus (lattice x cone x 3 radii),
// for skipping annuli whose entire contribution is provably below budget
double annulus_sup(const Tape& tape, const Point& base,
                   const std::vector<std::array<double, 2>>& ybox, int p, double lo, double hi) {
    auto lat = box_lattice(ybox, 9);
    auto cone = ConeGrid::standard(p);
    std::vector<cx> tmp(tape.root_count());
    double m = 0;
    for (double rad : {lo, 0.75 * lo + 0.25 * hi, 0.5 * (lo + hi), 0.25 * lo + 0.75 * hi, hi}) {
        for (const auto& yv : lat) {
            for (const auto& dir : cone.dirs) {
                Point pt = base;
                for (std::size_t k = 0; k < ybox.size(); ++k) pt.y[k] = yv[k];
                for (int j = 0; j < p; ++j) pt.xi[j] = rad * dir[j];
                tape.eval_multi(pt, tmp);
                for (const cx& v : tmp) m = std::max(m, std::abs(v));
            }
        }
    }
    return m;
}

// annulus-by-annulus sweep with an independent feature-resolution ladder per
// annulus (phase oscillation is resolved exactly at every level; the ladder
// doubles the sampling density for amplitude structure until two levels
// agree within share_tol). `half` integrates xi_1 > 0 only, restored by
// conjugation. Past |xi| = 8 an annulus whose sampled sup-bound falls below
// budget is skipped outright, and contributions below stop_tol twice in a
// row terminate the sweep; skipped mass is charged to *tail_extra.
std::vector<cx> run_quadrature(const Tape& tape, const Point& base0, double eps,
                               const std::vector<std::array<double, 2>>& ybox, int p, double R,
                               const PanelRates& rates, int nodes, double max_refine, bool half,
                               double stop_tol, double share_tol,
                               std::vector<double>& ladder_budget, std::vector<double>& tail_geo,
                               double* tail_extra) {
    Point base = base0;
    base.eps = eps;
    const std::size_t nr = tape.root_count();
    std::vector<cx> total(nr, cx(0, 0));
    ladder_budget.assign(nr, 0.0);
    tail_geo.assign(nr, std::numeric_limits<double>::infinity());
    std::vector<double> dr(nr, 0.0);
    std::vector<double> mag1(nr, 0.0), mag2(nr, 0.0); // last two computed annuli
    int computed = 0;

    // the cutoff transition shell [1/4, 1/2] gets its own annulus so its
    // dense radial sampling does not leak into the rest of the unit ball
    std::vector<double> bounds{0.0, 0.25, 0.5, 1.0};
    for (double b = 2; b < R; b *= 2) bounds.push_back(b);
    if (bounds.back() < R) bounds.push_back(R);

    double yvol = 1;
    for (const auto& b : ybox) yvol *= b[1] - b[0];

    double prev_mag = std::numeric_limits<double>::infinity();
    for (std::size_t ai = 0; ai + 1 < bounds.size(); ++ai) {
        const double lo = bounds[ai], hi = bounds[ai + 1];
        if (lo >= 8) {
            double ann_vol = p == 1 ? 2 * (hi - lo) : kPi * (hi * hi - lo * lo);
            // factor 3: the sup is sampled, not exact
            double est = 3 * annulus_sup(tape, base, ybox, p, lo, hi) * ann_vol * yvol;
            if (est < stop_tol) {
                *tail_extra += est;
                if (prev_mag < stop_tol) break;
                prev_mag = est;
                continue;
            }
        }
        auto prev = annulus_integral(tape, base, ybox, p, lo, hi, rates, nodes, 2, half);
        double mag0 = 0;
        for (const cx& v : prev) mag0 = std::max(mag0, std::abs(v));
        std::vector<cx> cur = prev;
        std::fill(dr.begin(), dr.end(), 0.0);
        // annuli already at noise level past the early-stop radius are not
        // worth refining; the sweep is about to terminate anyway
        bool noise = lo >= 8 && mag0 < stop_tol && prev_mag < stop_tol;
        for (double f = 4; !noise && f <= max_refine; f *= 2) {
            cur = annulus_integral(tape, base, ybox, p, lo, hi, rates, nodes, f, half);
            bool settled = true;
            for (std::size_t root = 0; root < nr; ++root) {
                dr[root] = std::abs(cur[root] - prev[root]);
                settled = settled && dr[root] < share_tol;
            }
            if (settled) break;
            prev = cur;
        }
        double diff = 0;
        for (std::size_t root = 0; root < nr; ++root) {
            ladder_budget[root] += dr[root];
            diff = std::max(diff, dr[root]);
        }
#ifdef GOI_QUAD_TRACE
        fprintf(stderr, "annulus [%g,%g] diff=%.3g val=%.9g\n", lo, hi, diff,
                std::abs(cur[0]));
#endif

        double mag = 0;
        for (std::size_t root = 0; root < nr; ++root) {
            total[root] += cur[root];
            mag = std::max(mag, std::abs(cur[root]));
            mag1[root] = mag2[root];
            mag2[root] = std::abs(cur[root]);
        }
        ++computed;
        if (lo >= 8 && mag < stop_tol && prev_mag < stop_tol) {
            *tail_extra = std::max(*tail_extra, 2 * std::max(mag, prev_mag));
            break;
        }
        prev_mag = mag;
    }
    // geometric extrapolation of the mass past the last computed annulus;
    // unlike the static sup fit it sees the cancellation the y-oscillation
    // provides, at the price of assuming the decay trend continues
    if (computed >= 2)
        for (std::size_t root = 0; root < nr; ++root)
            if (mag2[root] < 0.9 * mag1[root])
                tail_geo[root] = mag2[root] * mag2[root] / (mag1[root] - mag2[root]);
    if (half)
        for (auto& v : total) v += std::conj(v);
    return total;
}

// C * omega_p * R^{q+p} / -(q+p) with C fitted at |xi| in {R/2, R}. q is
// clamped below the convergence threshold so the formula stays usable even
// for damped integrands whose effective decay is much faster.
std::vector<double> tail_fit(const Tape& tape, const Point& base0, double eps,
                             const std::vector<std::array<double, 2>>& ybox, int p, double R,
                             double decay_order) {
    double q = std::min(decay_order, -p - 1.5);
    Point base = base0;
    base.eps = eps;
    auto lat = box_lattice(ybox, 3);
    auto cone = ConeGrid::standard(p);
    std::vector<cx> tmp(tape.root_count());
    std::vector<double> c(tape.root_count(), 0.0);
    for (double rad : {R / 2, R}) {
        for (const auto& yv : lat) {
            for (const auto& dir : cone.dirs) {
                Point pt = base;
                for (std::size_t k = 0; k < ybox.size(); ++k) pt.y[k] = yv[k];
                for (int j = 0; j < p; ++j) pt.xi[j] = rad * dir[j];
                tape.eval_multi(pt, tmp);
                for (std::size_t r = 0; r < tmp.size(); ++r)
                    c[r] = std::max(c[r], std::abs(tmp[r]) * std::pow(rad, -q));
            }
        }
    }
    double omega = p == 1 ? 2.0 : 2 * kPi;
    for (double& v : c) v *= omega * std::pow(R, q + p) / -(q + p);
    return c;
}

} // namespace

std::vector<OscIntValue> oscint_integrate_roots(const PhaseExpr& phi, std::span<const Expr> roots,
                                                const std::vector<std::array<double, 2>>& ybox,
                                                const Point& base, double eps, double decay_order,
                                                const QuadConfig& quad) {
    const int p = phi.ar.np;
    if (p < 1 || p > 2) fail(errc::config, "only p in {1,2} is supported");
    if ((int)ybox.size() != phi.ar.ny) fail(errc::config, "support box does not match the phase");
    if (quad.xi_radius < 4) fail(errc::config, "xi truncation radius must be >= 4");
    if (quad.nodes < 4 || quad.nodes > 56) fail(errc::config, "nodes must lie in [4, 56]");
    if (quad.tail_tol <= 0) fail(errc::config, "tail tolerance must be positive");
    if (eps <= 0 || eps > 1) fail(errc::config, "eps must lie in (0, 1]");

    const double norm = std::pow(2 * kPi, -p);
    std::vector<OscIntValue> out(roots.size());
    for (auto& o : out) o.xi_radius = quad.xi_radius;

    bool all_zero = true;
    for (const Expr& r : roots) all_zero = all_zero && r.is_zero();
    if (all_zero) return out;

    Tape tape(roots);
    PanelRates rates = phase_rates(phi, ybox, base, eps);
    bool half = conj_symmetric(tape, base, eps, ybox, p);
    double stop_tol = quad.tail_tol * 0.125 / norm;
    double share_tol = quad.tail_tol * 0.08 / norm; // per-annulus ladder target

    double extra = 0;
    std::vector<double> diffs, geo;
    std::vector<cx> cur = run_quadrature(tape, base, eps, ybox, p, quad.xi_radius, rates,
                                         quad.nodes, quad.max_refine, half, stop_tol,
                                         share_tol, diffs, geo, &extra);
    std::vector<double> tail = tail_fit(tape, base, eps, ybox, p, quad.xi_radius, decay_order);
    // the sup fit cannot see oscillation cancellation, the geometric fit can;
    // take whichever is sharper
    for (std::size_t r = 0; r < tail.size(); ++r) tail[r] = std::min(tail[r], geo[r]);

    // roots share one grid, so the achievable absolute accuracy is set by the
    // largest of them; the budget gate is relative to that scale
    double vmax = 0;
    for (std::size_t r = 0; r < roots.size(); ++r) vmax = std::max(vmax, std::abs(cur[r]) * norm);
#ifdef GOI_QUAD_TRACE
    for (std::size_t r = 0; r < roots.size(); ++r)
        fprintf(stderr, "root %zu diff=%.3g tail=%.3g extra=%.3g\n", r, diffs[r], tail[r], extra);
#endif
    for (std::size_t r = 0; r < roots.size(); ++r) {
        out[r].value = cur[r] * norm;
        out[r].err_budget = (diffs[r] + tail[r] + extra) * norm;
        if (quad.check_budget && out[r].err_budget > quad.tail_tol * std::max(1.0, vmax))
            fail(errc::tail_too_fat, "quadrature error budget exceeds the tolerance");
    }
    return out;
}

OscIntValue eval_oscint(const OscIntProblem& prob, double eps, int k, const QuadConfig& quad) {
    const int p = prob.phi.ar.np;
    if (k < choose_k(prob.a.ord, p, 0))
        fail(errc::config, "k below the integrability threshold");
    LPhiOperator L = build_L_phi(prob.phi);
    SymbolExpr au{prob.a.e * prob.u, prob.a.ar, prob.a.ord};
    SymbolExpr g = apply_L_phi(L, au, k);
    Expr integrand = exp(Expr::constant(cx(0, 1)) * prob.phi.e) * g.e;
    auto res = oscint_integrate_roots(prob.phi, {&integrand, 1}, prob.support, prob.base, eps,
                                      g.ord.m, quad);
    res[0].k = k;
    return res[0];
}

OscIntValue eval_oscint_damped_oracle(const OscIntProblem& prob, double eps,
                                      std::vector<double> sigmas, const QuadConfig& quad) {
    if (sigmas.empty())
        for (int i = 0; i <= 8; ++i) sigmas.push_back(0.1 * std::ldexp(1.0, -i));
    if (sigmas.size() < 4) fail(errc::config, "need at least 4 damping values");
    for (std::size_t i = 1; i < sigmas.size(); ++i)
        if (sigmas[i] >= sigmas[i - 1] || sigmas[i] <= 0)
            fail(errc::config, "damping list must decrease to 0");

    const int p = prob.phi.ar.np;
    Expr base_int = exp(Expr::constant(cx(0, 1)) * prob.phi.e) * prob.a.e * prob.u;
    OscIntValue out;
    if (base_int.is_zero()) return out;

    // all damping levels ride one multi-root sweep: the integrands share
    // everything but the damping factor, so the panels are built once and the
    // common part of each sample is evaluated once
    double sigma_min = sigmas.back();
    double m = std::max(prob.a.ord.m, 0.0);
    double r = std::sqrt(40 / sigma_min);
    for (int it = 0; it < 3; ++it) r = std::sqrt((40 + m * std::log1p(r)) / sigma_min);
    QuadConfig q2 = quad;
    q2.xi_radius = std::max(4.0, std::min(r, quad.xi_radius));
    q2.check_budget = false;
    std::vector<Expr> damped;
    damped.reserve(sigmas.size());
    for (double sigma : sigmas)
        damped.push_back(base_int * exp(Expr::constant(-sigma) * xi_norm_sq(p)));
    auto res = oscint_integrate_roots(prob.phi, damped, prob.support, prob.base, eps,
                                      prob.a.ord.m, q2);
    std::vector<cx> vals(sigmas.size());
    for (std::size_t i = 0; i < sigmas.size(); ++i) vals[i] = res[i].value;

    // Neville extrapolation to sigma = 0, tracking the deepest column
    std::vector<cx> t = vals;
    const std::size_t n = t.size();
    cx best = t[n - 1], diag_prev = t[n - 1];
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < n; ++j) {
        for (std::size_t i = n - 1; i >= j; --i)
            t[i] = t[i] + (t[i] - t[i - 1]) * (sigmas[i] / (sigmas[i - j] - sigmas[i]));
        double err = std::abs(t[n - 1] - diag_prev);
        if (err < best_err) {
            best_err = err;
            best = t[n - 1];
        }
        diag_prev = t[n - 1];
    }
    if (best_err > 2e-5 * std::max(1.0, std::abs(best)))
        fail(errc::no_convergence, "damped extrapolants did not settle");
    out.value = best;
    out.err_budget = best_err;
    out.xi_radius = quad.xi_radius;
    return out;
}

KIndependenceReport k_independence_check(const OscIntProblem& prob, double eps, int k_min,
                                         const QuadConfig& quad) {
    KIndependenceReport rep;
    double scale = 0;
    for (int k = k_min; k < k_min + 3; ++k) {
        rep.ks.push_back(k);
        rep.values.push_back(eval_oscint(prob, eps, k, quad));
        scale = std::max(scale, std::abs(rep.values.back().value));
    }
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            rep.max_rel_dev = std::max(
                rep.max_rel_dev,
                std::abs(rep.values[i].value - rep.values[j].value) / std::max(scale, 1e-300));
    rep.pass = rep.max_rel_dev < 1e-4;
    return rep;
}

} // namespace goi
