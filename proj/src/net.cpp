#include "goi/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace goi {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> abs_samples(const EpsilonNet& net, std::span<const double> eps,
                                bool allow_overflow = false) {
    std::vector<double> out(eps.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        std::complex<double> v = net(eps[i]);
        bool nan = std::isnan(v.real()) || std::isnan(v.imag());
        bool inf = std::isinf(v.real()) || std::isinf(v.imag());
        // overflow past double range is admissible super-polynomial evidence
        // for the classifier; NaN never is
        if (nan || (inf && !allow_overflow))
            fail(errc::non_finite, "net sample at eps=" + std::to_string(eps[i]));
        out[i] = inf ? std::numeric_limits<double>::infinity() : std::abs(v);
    }
    return out;
}
} // namespace

EpsilonGrid EpsilonGrid::dyadic(int j_min, int j_max) {
    EpsilonGrid g;
    for (int j = j_min; j <= j_max; ++j) g.samples.push_back(std::ldexp(1.0, -j));
    g.validate();
    return g;
}

void EpsilonGrid::validate() const {
    if (samples.size() < 8) fail(errc::config, "epsilon grid needs at least 8 samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!(samples[i] > 0 && samples[i] <= 1))
            fail(errc::config, "epsilon samples must lie in (0,1]");
        if (i > 0 && !(samples[i] < samples[i - 1]))
            fail(errc::config, "epsilon samples must be strictly decreasing");
    }
    if (samples.front() / samples.back() < 1e3)
        fail(errc::config, "epsilon grid must span at least three decades");
}

std::span<const double> EpsilonGrid::tail() const {
    std::size_t n = samples.size();
    std::size_t k = std::max<std::size_t>(4, std::min<std::size_t>(9, n / 2));
    k = std::min(k, n);
    return std::span<const double>(samples).subspan(n - k);
}

const char* net_tag_name(NetTag t) {
    switch (t) {
    case NetTag::Negligible: return "Negligible";
    case NetTag::Moderate: return "Moderate";
    case NetTag::SlowScale: return "SlowScale";
    case NetTag::NotModerate: return "NotModerate";
    }
    return "unknown";
}

ValuationEstimate estimate_valuation(const EpsilonNet& net, const EpsilonGrid& grid) {
    grid.validate();
    std::vector<double> all = abs_samples(net, grid.samples); // finite check on full grid
    auto teps = grid.tail();
    std::span<const double> tabs(all.data() + (all.size() - teps.size()), teps.size());

    ValuationEstimate est;
    // zeros carry no slope information; keep the nonzero part of the tail
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < teps.size(); ++i) {
        if (tabs[i] > 0) {
            lx.push_back(std::log(teps[i]));
            ly.push_back(std::log(tabs[i]));
        }
    }
    if (lx.size() < 3) {
        est.slope = kInf;
        est.residual = 0;
        est.monotone_tail = true;
        return est;
    }
    long double n = static_cast<long double>(lx.size());
    long double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    long double denom = n * sxx - sx * sx;
    long double b = (n * sxy - sx * sy) / denom;
    long double a = (sy - b * sx) / n;
    long double ss = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        long double r = ly[i] - (a + b * lx[i]);
        ss += r * r;
    }
    est.slope = static_cast<double>(b);
    est.residual = static_cast<double>(std::sqrt(ss / n));
    bool inc = true, dec = true;
    for (std::size_t i = 1; i < tabs.size(); ++i) {
        if (tabs[i] > tabs[i - 1]) dec = false;
        if (tabs[i] < tabs[i - 1]) inc = false;
    }
    est.monotone_tail = inc || dec;
    return est;
}

namespace detail {
GrowthFit fit_growth(std::span<const double> eps, std::span<const double> absu) {
    GrowthFit f;
    std::vector<long double> r1, r2, y;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        if (absu[i] > 0) {
            long double L = std::log(1.0L / eps[i]);
            r1.push_back(std::log(L));
            r2.push_back(L);
            y.push_back(std::log((long double)absu[i]));
        }
    }
    if (y.size() < 4) {
        f.all_zero = true;
        return f;
    }
    // normal equations for [1, loglog(1/eps), log(1/eps)]
    long double A[3][4] = {};
    for (std::size_t i = 0; i < y.size(); ++i) {
        long double row[3] = {1.0L, r1[i], r2[i]};
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) A[a][b] += row[a] * row[b];
            A[a][3] += row[a] * y[i];
        }
    }
    for (int c = 0; c < 3; ++c) { // Gaussian elimination, partial pivot
        int p = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs((double)A[r][c]) > std::abs((double)A[p][c])) p = r;
        for (int k = 0; k < 4; ++k) std::swap(A[c][k], A[p][k]);
        if (A[c][c] == 0) { f.all_zero = true; return f; }
        for (int r = 0; r < 3; ++r) {
            if (r == c) continue;
            long double m = A[r][c] / A[c][c];
            for (int k = 0; k < 4; ++k) A[r][k] -= m * A[c][k];
        }
    }
    f.alpha = static_cast<double>(A[0][3] / A[0][0]);
    f.beta = static_cast<double>(A[1][3] / A[1][1]);
    f.gamma = static_cast<double>(A[2][3] / A[2][2]);
    return f;
}
} // namespace detail

std::optional<int> is_strictly_nonzero(const EpsilonNet& net, const EpsilonGrid& grid) {
    grid.validate();
    std::vector<double> all = abs_samples(net, grid.samples);
    auto teps = grid.tail();
    std::span<const double> tabs(all.data() + (all.size() - teps.size()), teps.size());
    // pointwise exponent e = log|u|/log(eps); |u| >= eps^r iff e <= r.
    // 0.2 slack on the exponent scale absorbs bounded prefactors.
    double emax = -kInf;
    for (std::size_t i = 0; i < teps.size(); ++i) {
        if (tabs[i] == 0) return std::nullopt;
        emax = std::max(emax, std::log(tabs[i]) / std::log(teps[i]));
    }
    ValuationEstimate est = estimate_valuation(net, grid);
    double r = std::max(std::ceil(emax - 0.2), std::ceil(-est.slope - 0.2));
    if (!(r <= 60)) return std::nullopt; // decays faster than every tracked power
    return static_cast<int>(r);
}

bool is_slow_scale_strictly_nonzero(const EpsilonNet& net, const EpsilonGrid& grid,
                                    const ClassifyConfig& cfg) {
    grid.validate();
    auto teps = grid.tail();
    std::vector<double> inv(teps.size());
    for (std::size_t i = 0; i < teps.size(); ++i) {
        std::complex<double> v = net(teps[i]);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            fail(errc::non_finite, "net sample at eps=" + std::to_string(teps[i]));
        double a = std::abs(v);
        if (a == 0) fail(errc::zero_sample, "net vanishes at eps=" + std::to_string(teps[i]));
        inv[i] = 1.0 / a;
    }
    std::vector<double> ev(teps.begin(), teps.end());
    auto f = detail::fit_growth(ev, inv);
    return !f.all_zero && f.gamma < cfg.slow_scale_ratio;
}

double ultra_pseudo_norm(const ValuationEstimate& v) {
    if (std::isinf(v.slope) && v.slope > 0) return 0;
    return std::exp(-v.slope);
}

NetClass classify_net(const EpsilonNet& net, const EpsilonGrid& grid,
                      const ClassifyConfig& cfg) {
    grid.validate();
    std::vector<double> all = abs_samples(net, grid.samples, /*allow_overflow=*/true);
    auto teps = grid.tail();
    std::span<const double> tabs(all.data() + (all.size() - teps.size()), teps.size());

    NetClass nc;
    if (std::any_of(tabs.begin(), tabs.end(), [](double a) { return std::isinf(a); })) {
        nc.tag = NetTag::NotModerate;
        nc.slope = -std::numeric_limits<double>::infinity();
        return nc;
    }
    bool all_zero = std::all_of(tabs.begin(), tabs.end(), [](double a) { return a == 0; });
    if (all_zero) {
        nc.tag = NetTag::Negligible;
        nc.slope = kInf;
        nc.moderate_n = 0;
        return nc;
    }

    ValuationEstimate est = estimate_valuation(net, grid);
    nc.slope = est.slope;

    // super-polynomial growth: pointwise exponent below -L_max at the sharp end
    int hot = 0;
    std::size_t nt = teps.size();
    for (std::size_t i = nt >= 3 ? nt - 3 : 0; i < nt; ++i) {
        if (tabs[i] > 0 && std::log(tabs[i]) / std::log(teps[i]) < -cfg.l_max) ++hot;
    }
    if (hot >= 3) {
        nc.tag = NetTag::NotModerate;
        return nc;
    }

    std::vector<double> ev(teps.begin(), teps.end());
    std::vector<double> av(tabs.begin(), tabs.end());
    auto gf = detail::fit_growth(ev, av);
    nc.growth_exponent = gf.gamma;

    nc.strictly_nonzero = is_strictly_nonzero(net, grid);
    try {
        nc.slow_scale_strictly_nonzero = is_slow_scale_strictly_nonzero(net, grid, cfg);
    } catch (const error&) {
        nc.slow_scale_strictly_nonzero = false;
    }

    if (est.slope >= cfg.negligible_order - 1e-9) {
        nc.tag = NetTag::Negligible;
        nc.moderate_n = 0;
        nc.marginal = est.slope - cfg.negligible_order < 1.0;
        return nc;
    }
    nc.moderate_n = std::max(0, (int)std::ceil(-est.slope - cfg.marginal_band));
    // growing strictly slower than every power of 1/eps
    if (est.slope < -0.02 && !gf.all_zero && gf.gamma < cfg.slow_scale_ratio) {
        nc.tag = NetTag::SlowScale;
        nc.moderate_n = std::max(nc.moderate_n, 1);
        nc.marginal = std::abs(gf.gamma - cfg.slow_scale_ratio) < cfg.marginal_band;
        return nc;
    }
    nc.tag = NetTag::Moderate;
    nc.marginal = std::abs(est.slope - cfg.negligible_order) < cfg.marginal_band ||
                  (est.slope < -0.02 && std::abs(gf.gamma - cfg.slow_scale_ratio) < cfg.marginal_band);
    return nc;
}

} // namespace goi
