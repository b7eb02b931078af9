#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "goi/parallel.hpp"
#include "goi/quad.hpp"

using namespace goi;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
    for (int n : {2, 5, 16, 32, 64}) {
        const GaussRule& r = gauss_legendre(n);
        double wsum = std::accumulate(r.weights.begin(), r.weights.end(), 0.0);
        CHECK(wsum == doctest::Approx(2.0).epsilon(1e-13));
        // degree 2n-1 monomial over [-1,1]
        int deg = 2 * n - 1;
        double q = 0;
        for (int i = 0; i < n; ++i) q += r.weights[i] * std::pow(r.nodes[i], deg - 1);
        double exact = 2.0 / deg; // deg-1 is even
        CHECK(q == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("panels resolve an oscillatory integral") {
    double omega = 200.0;
    auto panels = oscillation_panels(0.0, 1.0, omega, 16);
    std::vector<double> xs, ws;
    panel_nodes(panels, xs, ws);
    std::vector<double> terms(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) terms[i] = ws[i] * std::cos(omega * xs[i]);
    double got = pairwise_sum(terms);
    double exact = std::sin(omega) / omega;
    CHECK(got == doctest::Approx(exact).epsilon(1e-12));
}

TEST_CASE("pairwise sum is chunk-invariant") {
    std::vector<double> xs(1000);
    for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = std::sin(0.1 * i) * 1e-3;
    double a = pairwise_sum(xs);
    double b = pairwise_sum(std::span<const double>(xs));
    CHECK(a == b);
}

TEST_CASE("parallel_for covers every index once") {
    std::vector<int> hits(10000, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
    CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
}

TEST_CASE("parallel_for propagates exceptions") {
    CHECK_THROWS_AS(parallel_for(100, [](std::size_t i) {
        if (i == 57) throw std::runtime_error("boom");
    }), std::runtime_error);
}
