#include "goi/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "goi/fft.hpp"

namespace goi {

const char* region_status_name(RegionStatus s) {
    switch (s) {
    case RegionStatus::Degenerate: return "Degenerate";
    case RegionStatus::InvertibleHere: return "InvertibleHere";
    case RegionStatus::SlowScaleInvertibleHere: return "SlowScaleInvertibleHere";
    }
    return "unknown";
}

namespace {

std::vector<std::array<double, 2>> box_around(const std::vector<double>& c, double radius) {
    std::vector<std::array<double, 2>> box;
    for (double v : c) box.push_back({v - radius, v + radius});
    return box;
}

// memoizing wrapper: the classifier functions sample the same eps values
// repeatedly and the inf-lattice evaluation is not cheap
EpsilonNet cached(std::function<cx(double)> f) {
    auto cache = std::make_shared<std::map<double, cx>>();
    return [f = std::move(f), cache](double eps) {
        auto it = cache->find(eps);
        if (it != cache->end()) return it->second;
        cx v = f(eps);
        cache->emplace(eps, v);
        return v;
    };
}

} // namespace

std::vector<RegionVerdict> detect_regions(const PhaseExpr& phi,
                                          const std::vector<std::vector<double>>& points,
                                          const std::vector<std::array<double, 4>>& dirs,
                                          const EpsilonGrid& grid, const ShrinkSchedule& sched,
                                          const ClassifyConfig& cfg) {
    const int n = phi.ar.ny, p = phi.ar.np;
    if (points.empty() || dirs.empty()) fail(errc::config, "need lattice points and directions");
    if (sched.levels < 1) fail(errc::config, "need at least one shrink level");
    grid.validate();

    Expr sumsq;
    for (int j = 0; j < p; ++j) {
        Expr g = unit_sphere_subst(phi.e.d(Axis::Xi, j), p);
        sumsq = sumsq + g * g;
    }
    Tape tape(sumsq);

    std::vector<RegionVerdict> out;
    out.reserve(points.size() * dirs.size());
    for (const auto& pt : points) {
        if ((int)pt.size() != n) fail(errc::config, "lattice point does not match the phase");
        for (const auto& dir : dirs) {
            RegionVerdict v;
            v.point = pt;
            v.dir = dir;
            for (int level = 0; level < sched.levels; ++level) {
                const double radius = sched.radius0 / std::pow(2.0, level);
                const double angle = sched.half_angle0 / std::pow(2.0, level);
                auto lat = box_lattice(box_around(pt, radius), 3);
                auto gdirs = dirs_near(dir, p, angle, 3);
                auto net = cached([&tape, lat, gdirs, n](double eps) {
                    Point q;
                    q.eps = eps;
                    double m = std::numeric_limits<double>::infinity();
                    for (const auto& y : lat) {
                        for (int k = 0; k < n; ++k) q.y[k] = y[k];
                        for (const auto& d : gdirs) {
                            q.xi = d;
                            m = std::min(m, std::abs(tape.eval(q)));
                        }
                    }
                    return cx(m, 0);
                });
                // shrinking the neighborhood can only raise the inf, so keep
                // descending: a plain-invertible level may still be upgraded
                // to slow-scale-invertible further down
                if (auto r = is_strictly_nonzero(net, grid)) {
                    if (is_slow_scale_strictly_nonzero(net, grid, cfg)) {
                        v.status = RegionStatus::SlowScaleInvertibleHere;
                        v.level = level;
                        v.exponent = *r;
                        break;
                    }
                    if (v.status == RegionStatus::Degenerate) {
                        v.status = RegionStatus::InvertibleHere;
                        v.level = level;
                        v.exponent = *r;
                    }
                }
                if (level == sched.levels - 1 && v.status == RegionStatus::Degenerate)
                    v.exponent = estimate_valuation(net, grid).slope;
            }
            out.push_back(std::move(v));
        }
    }
    return out;
}

std::vector<RegionStatus> region_mask(const std::vector<RegionVerdict>& verdicts,
                                      std::size_t n_dirs) {
    if (n_dirs == 0 || verdicts.size() % n_dirs != 0)
        fail(errc::config, "verdict table is not a whole number of direction blocks");
    std::vector<RegionStatus> mask;
    for (std::size_t i = 0; i < verdicts.size(); i += n_dirs) {
        RegionStatus worst = RegionStatus::SlowScaleInvertibleHere;
        for (std::size_t d = 0; d < n_dirs; ++d)
            worst = std::min(worst, verdicts[i + d].status, [](RegionStatus a, RegionStatus b) {
                return (int)a < (int)b;
            });
        mask.push_back(worst);
    }
    return mask;
}

namespace {

double point_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

double dir_angle(const std::array<double, 4>& a, const std::array<double, 4>& b) {
    double dot = 0;
    for (int i = 0; i < 4; ++i) dot += a[i] * b[i];
    return std::acos(std::clamp(dot, -1.0, 1.0));
}

} // namespace

ConicSet degenerate_cone(const std::vector<RegionVerdict>& verdicts, WfMode mode) {
    auto fails = [mode](const RegionVerdict& v) {
        return mode == WfMode::G ? v.status == RegionStatus::Degenerate
                                 : v.status != RegionStatus::SlowScaleInvertibleHere;
    };
    // one-cell fattening: the lattice pitch is the smallest nonzero gap seen
    double cell = std::numeric_limits<double>::infinity();
    double astep = std::numeric_limits<double>::infinity();
    for (const auto& v : verdicts)
        for (const auto& w : verdicts) {
            double d = point_dist(v.point, w.point);
            if (d > 1e-12) cell = std::min(cell, d);
            double ang = dir_angle(v.dir, w.dir);
            if (ang > 1e-12) astep = std::min(astep, ang);
        }

    ConicSet out;
    for (const auto& v : verdicts) {
        bool keep = fails(v);
        for (const auto& w : verdicts) {
            if (keep) break;
            keep = fails(w) && point_dist(v.point, w.point) <= 1.5 * cell &&
                   dir_angle(v.dir, w.dir) <= 1.5 * astep;
        }
        if (keep) out.items.emplace_back(v.point, v.dir);
    }
    return out;
}

WSetVerdict w_set_probe(const PhaseExpr& phi, const ConicSet& V, const std::vector<double>& x0,
                        const std::vector<double>& xi0_dir, WfMode mode, const EpsilonGrid& grid,
                        const ShrinkSchedule& sched, const ClassifyConfig& cfg) {
    const int n = phi.ar.ny;
    if ((int)x0.size() != n || (int)xi0_dir.size() != n)
        fail(errc::config, "base point and direction must match the phase's y dimension");
    grid.validate();

    std::vector<Expr> grads;
    for (int k = 0; k < n; ++k) grads.push_back(phi.e.d(Axis::Y, k));
    Tape tape(grads);

    std::array<double, 4> xdir{};
    double dnorm = 0;
    for (int k = 0; k < n; ++k) dnorm += xi0_dir[k] * xi0_dir[k];
    dnorm = std::sqrt(dnorm);
    if (dnorm == 0) fail(errc::config, "direction must be nonzero");
    for (int k = 0; k < n; ++k) xdir[k] = xi0_dir[k] / dnorm;

    WSetVerdict out;
    std::vector<cx> g(n);
    for (int level = 0; level < sched.levels; ++level) {
        const double radius = sched.radius0 / std::pow(2.0, level);
        const double angle = sched.half_angle0 / std::pow(2.0, level);

        std::vector<std::size_t> near;
        for (std::size_t i = 0; i < V.items.size(); ++i) {
            bool inside = true;
            for (int k = 0; k < n; ++k)
                inside = inside && std::abs(V.items[i].first[k] - x0[k]) <= radius;
            if (inside) near.push_back(i);
        }
        if (near.empty()) {
            // Inf over the empty set: +infinity, vacuously invertible
            out.excluded = true;
            out.empty_v = true;
            out.level = level;
            return out;
        }

        auto xis = dirs_near(xdir, n, angle, 3);
        auto net = cached([&, near, xis](double eps) {
            Point q;
            q.eps = eps;
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t i : near) {
                for (int k = 0; k < n; ++k) q.y[k] = V.items[i].first[k];
                q.xi = V.items[i].second;
                tape.eval_multi(q, g);
                for (const auto& xi : xis)
                    for (int ti = 1; ti < 16; ++ti) {
                        double t = ti / 16.0;
                        double s = 0;
                        for (int k = 0; k < n; ++k) {
                            double diff = t * xi[k] - (1 - t) * g[k].real();
                            s += diff * diff;
                        }
                        m = std::min(m, std::sqrt(s));
                    }
            }
            return cx(m, 0);
        });
        bool pass = mode == WfMode::G
                        ? is_strictly_nonzero(net, grid).has_value()
                        : is_slow_scale_strictly_nonzero(net, grid, cfg);
        if (pass) {
            out.excluded = true;
            out.level = level;
            if (auto r = is_strictly_nonzero(net, grid)) out.exponent = *r;
            return out;
        }
        if (level == sched.levels - 1) out.exponent = estimate_valuation(net, grid).slope;
    }
    return out;
}

WfPoint estimate_wf(const SampledKernel& kernel, const std::vector<double>& x0,
                    const std::vector<double>& dir, WfMode mode, const WfEstimateConfig& cfg) {
    const std::size_t nd = kernel.shape.size();
    if (nd == 0 || nd > 3) fail(errc::config, "kernel must be 1-, 2- or 3-dimensional");
    if (kernel.box.size() != nd || x0.size() != nd || dir.size() != nd)
        fail(errc::config, "kernel box, base point and direction must agree in dimension");
    if (kernel.eps_list.size() < 3) fail(errc::config, "need at least 3 eps samples");

    std::size_t total = 1;
    std::vector<double> dx(nd);
    std::vector<std::vector<double>> freqs(nd);
    for (std::size_t i = 0; i < nd; ++i) {
        const std::size_t m = kernel.shape[i];
        if (m == 0 || (m & (m - 1)) != 0) fail(errc::config, "axis sample counts must be powers of two");
        total *= m;
        dx[i] = (kernel.box[i][1] - kernel.box[i][0]) / (double)m;
        freqs[i] = fft_freqs(m, dx[i]);
    }
    const double xi_top = std::pow(2.0, cfg.shell_max) * std::numbers::sqrt2;
    for (std::size_t i = 0; i < nd; ++i)
        if (std::numbers::pi / dx[i] < xi_top)
            fail(errc::resolution_too_coarse, "grid Nyquist frequency below the top shell");

    double dnorm = 0;
    for (double v : dir) dnorm += v * v;
    dnorm = std::sqrt(dnorm);
    if (dnorm == 0) fail(errc::config, "direction must be nonzero");
    const double cos_gate = std::cos(cfg.half_angle);

    // smooth window around x0, sampled once
    std::vector<double> window(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        std::size_t rem = idx;
        double w = 1;
        for (std::size_t i = nd; i-- > 0;) {
            std::size_t j = rem % kernel.shape[i];
            rem /= kernel.shape[i];
            double t = (kernel.box[i][0] + ((double)j + 0.5) * dx[i] - x0[i]) / cfg.cutoff_width;
            double u = 1 - t * t;
            // low-order bump: a flatter window keeps the transverse bandwidth
            // of ridge-like kernels narrow, which is what the cone test needs
            w *= u > 0 ? u * u * u * u : 0.0;
        }
        window[idx] = w;
    }

    const int nshell = cfg.shell_max - cfg.shell_min + 1;
    const std::size_t ne = kernel.eps_list.size();
    std::vector<std::vector<double>> M(ne, std::vector<double>(nshell, 0.0));
    std::vector<int> counts(nshell, 0);

    std::vector<cx> buf(total);
    for (std::size_t e = 0; e < ne; ++e) {
        if (kernel.values[e].size() != total) fail(errc::config, "kernel grid size mismatch");
        for (std::size_t idx = 0; idx < total; ++idx) buf[idx] = kernel.values[e][idx] * window[idx];
        fft_nd(buf, kernel.shape, false);
        for (std::size_t idx = 0; idx < total; ++idx) {
            std::size_t rem = idx;
            double xi[3], r2 = 0, dot = 0;
            for (std::size_t i = nd; i-- > 0;) {
                xi[i] = freqs[i][rem % kernel.shape[i]];
                rem /= kernel.shape[i];
                r2 += xi[i] * xi[i];
                dot += xi[i] * dir[i] / dnorm;
            }
            const double r = std::sqrt(r2);
            if (r == 0 || dot < cos_gate * r) continue;
            int s = (int)std::floor(std::log2(r) + 0.5) - cfg.shell_min;
            if (s < 0 || s >= nshell) continue;
            M[e][s] = std::max(M[e][s], std::abs(buf[idx]));
            if (e == 0) ++counts[s];
        }
    }
    for (int s = 0; s < nshell; ++s)
        if (counts[s] == 0) fail(errc::resolution_too_coarse, "a dyadic shell has no lattice frequency in the cone");

    WfPoint out;
    out.x0 = x0;
    out.dir = dir;
    out.mode = mode;

    double gmax = 0;
    for (const auto& row : M)
        for (double v : row) gmax = std::max(gmax, v);
    double tail_max = 0;
    for (double v : M.back()) tail_max = std::max(tail_max, v);
    if (gmax == 0 || tail_max < 1e-12 * gmax) {
        out.excluded = true;
        out.negligible = true;
        return out;
    }

    auto fit = [](std::span<const double> xs, std::span<const double> ys) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = (double)xs.size();
        for (std::size_t i = 0; i < xs.size(); ++i) {
            sx += xs[i];
            sy += ys[i];
            sxx += xs[i] * xs[i];
            sxy += xs[i] * ys[i];
        }
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };

    std::vector<double> log_eps(ne), log_xi(nshell);
    for (std::size_t e = 0; e < ne; ++e) log_eps[e] = std::log(kernel.eps_list[e]);
    for (int s = 0; s < nshell; ++s) log_xi[s] = (cfg.shell_min + s) * std::numbers::ln2;

    for (int s = 0; s < nshell; ++s) {
        std::vector<double> lm(ne);
        for (std::size_t e = 0; e < ne; ++e) lm[e] = std::log(std::max(M[e][s], 1e-300));
        out.shell_n.push_back(fit(log_eps, lm)); // M ~ eps^{-N}: N = this fit
    }
    for (std::size_t e = 0; e < ne; ++e) {
        std::vector<double> lm(nshell);
        for (int s = 0; s < nshell; ++s) lm[s] = std::log(std::max(M[e][s], 1e-300));
        out.l_eff.push_back(-fit(log_xi, lm) / (1 - cfg.lambda));
    }

    double l_min = *std::min_element(out.l_eff.begin(), out.l_eff.end());
    bool rapid = l_min >= cfg.l_max;
    double n_lo = *std::min_element(out.shell_n.begin(), out.shell_n.end());
    double n_hi = *std::max_element(out.shell_n.begin(), out.shell_n.end());
    out.spread = n_hi - n_lo;
    out.excluded = mode == WfMode::G ? rapid : rapid && out.spread <= cfg.n_spread;
    return out;
}

} // namespace goi
