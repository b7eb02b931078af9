#include "goi/quad.hpp"

#include <cmath>
#include <mutex>
#include <unordered_map>

#include "goi/errors.hpp"

namespace goi {

namespace {
GaussRule compute_rule(int n) {
    GaussRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    // Newton on Legendre P_n from the Chebyshev-like initial guess
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            if (n == 1) { p1 = x; }
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double pn = (n == 1) ? x : p1;
            double pm = (n == 1) ? 1.0 : p0;
            pp = n * (x * pn - pm) / (x * x - 1.0);
            double dx = pn / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
}
} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 64) fail(errc::config, "Gauss-Legendre order must be in [1,64]");
    static std::mutex mu;
    static std::unordered_map<int, GaussRule> cache;
    std::lock_guard<std::mutex> g(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

std::vector<Panel1D> oscillation_panels(double a, double b, double osc_rate, int nodes) {
    double len = b - a;
    std::vector<Panel1D> out;
    if (len <= 0) return out;
    double max_width = osc_rate > 0 ? 1.0 * nodes / osc_rate : len;
    int count = std::max(1, (int)std::ceil(len / max_width));
    // cap insane panel counts; caller owns tolerance decisions
    if (count > 1 << 20) fail(errc::tail_too_fat, "oscillation rate demands too many panels");
    double w = len / count;
    for (int i = 0; i < count; ++i) out.push_back({a + i * w, a + (i + 1) * w, nodes});
    return out;
}

void panel_nodes(const std::vector<Panel1D>& panels, std::vector<double>& xs,
                 std::vector<double>& ws) {
    xs.clear();
    ws.clear();
    for (const Panel1D& p : panels) {
        const GaussRule& r = gauss_legendre(p.nodes);
        double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
        for (int i = 0; i < p.nodes; ++i) {
            xs.push_back(mid + half * r.nodes[i]);
            ws.push_back(half * r.weights[i]);
        }
    }
}

} // namespace goi
