#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goi/expr_parse.hpp"
#include "goi/fft.hpp"
#include "goi/fio.hpp"

using namespace goi;

namespace {

FioProblem translation_problem(const std::string& amplitude, SymbolOrder ord) {
    Arity ar{1, 1, 1};
    FioProblem prob;
    prob.phi = PhaseExpr{parse_expr("(x1 - y1)*xi1", ar), ar};
    prob.a = SymbolExpr{parse_expr(amplitude, ar), ar, ord};
    prob.u = parse_expr("sbump(y1)", ar);
    prob.support = {{-1.0, 1.0}};
    prob.x_box = {{-0.5, 0.5}};
    prob.x_points = 3;
    return prob;
}

double sbump12(double t) { return t * t < 1 ? std::pow(1 - t * t, 12) : 0.0; }

} // namespace

TEST_CASE("identity operator: phi = (x-y) xi, a = 1 reproduces u") {
    auto prob = translation_problem("1", {0, 1, 0});
    double eps[] = {0.5};
    auto f = apply_fio(prob, eps, 3);
    REQUIRE(f.points() == 3);
    REQUIRE(f.derivs.size() == 1);
    for (std::size_t pt = 0; pt < 3; ++pt) {
        double x = f.axes[0][pt];
        std::size_t i = f.index(0, pt, 0);
        CHECK(std::abs(f.values[i] - sbump12(x)) < f.err[i] + 1e-5);
        CHECK(f.err[i] < 1e-4);
    }
}

TEST_CASE("dilation law: phi = (x - eps y) xi gives eps^-1 u(x/eps)") {
    Arity ar{1, 1, 1};
    FioProblem prob;
    prob.phi = PhaseExpr{parse_expr("(x1 - eps*y1)*xi1", ar), ar};
    prob.a = SymbolExpr{parse_expr("1", ar), ar, {0, 1, 0}};
    prob.u = parse_expr("sbump(y1)", ar);
    prob.support = {{-1.0, 1.0}};
    prob.x_box = {{-0.5, 0.5}};
    prob.x_points = 3;

    double eps[] = {0.2, 0.1, 0.05};
    auto v = apply_fio(prob, eps, 3);
    for (std::size_t e = 0; e < 3; ++e)
        for (std::size_t pt = 0; pt < v.points(); ++pt) {
            double x = v.axes[0][pt];
            double expect = sbump12(x / eps[e]) / eps[e];
            std::size_t i = v.index(e, pt, 0);
            CHECK(std::abs(v.values[i] - expect) < 1e-4 * std::max(1.0, expect));
        }

    // slope table on an inner grid whose rescaled points x/eps coincide
    // across the eps list, so each order's sup tracks the same feature
    prob.x_box = {{-0.05, 0.05}};
    prob.x_points = 11;
    auto f = apply_fio(prob, eps, 3, {}, 2, DerivMode::Stencil);
    auto rep = g_infinity_probe(f);
    CHECK_FALSE(rep.regular);
    REQUIRE(rep.slopes.size() == 3);
    for (int m = 0; m <= 2; ++m) CHECK(rep.slopes[m] <= -(1.0 + m) + 0.3);
}

TEST_CASE("epsilon-free data: probe reports Regular(0)") {
    auto prob = translation_problem("1", {0, 1, 0});
    double eps[] = {0.5, 0.25, 0.125};
    auto f = apply_fio(prob, eps, 4, {}, 1);
    auto rep = g_infinity_probe(f);
    CHECK(rep.regular);
    CHECK(rep.N == 0);
    for (double s : rep.slopes) CHECK(std::abs(s) < 0.2);
}

TEST_CASE("Bessel-potential smoothing matches the discrete Fourier multiplier") {
    auto prob = translation_problem("pow(xibracket, -2)", {-2, 1, 0});
    double eps[] = {0.5};
    auto f = apply_fio(prob, eps, 1);

    // periodized reference on [-8, 8): u is supported in [-1, 1] and the
    // Bessel kernel decays exponentially, so wraparound is far below 1e-6
    const std::size_t n = 1024;
    const double L = 8.0, dx = 2 * L / (double)n;
    std::vector<cx> grid(n);
    for (std::size_t j = 0; j < n; ++j) grid[j] = cx(sbump12(-L + (double)j * dx), 0);
    fft_inplace(grid, false);
    auto freqs = fft_freqs(n, dx);
    for (std::size_t kf = 0; kf < n; ++kf) grid[kf] /= 1 + freqs[kf] * freqs[kf];
    fft_inplace(grid, true);

    for (std::size_t pt = 0; pt < f.points(); ++pt) {
        double x = f.axes[0][pt];
        std::size_t j = (std::size_t)std::llround((x + L) / dx);
        REQUIRE(std::abs(-L + (double)j * dx - x) < 1e-12);
        std::size_t i = f.index(0, pt, 0);
        CHECK(std::abs(f.values[i] - grid[j]) < 1e-4);
    }
}

TEST_CASE("linearity in the amplitude at fixed eps") {
    auto p1 = translation_problem("pow(xibracket, -2)", {-2, 1, 0});
    auto p2 = translation_problem("pow(xibracket, -3)", {-2, 1, 0});
    auto p12 = translation_problem("pow(xibracket, -2) + pow(xibracket, -3)", {-2, 1, 0});
    p1.x_points = p2.x_points = p12.x_points = 1;
    QuadConfig quad;
    quad.xi_radius = 64;
    quad.tail_tol = 1e-300; // freeze the grids so cancellation is exact
    quad.check_budget = false;
    double eps[] = {0.5};
    cx v1 = apply_fio(p1, eps, 1, quad).values[0];
    cx v2 = apply_fio(p2, eps, 1, quad).values[0];
    cx v12 = apply_fio(p12, eps, 1, quad).values[0];
    CHECK(std::abs(v12 - (v1 + v2)) < 1e-8 * std::abs(v12));
}

TEST_CASE("rejects mismatched boxes and insufficient k") {
    auto prob = translation_problem("1", {0, 1, 0});
    double eps[] = {0.5};
    CHECK_THROWS_AS(apply_fio(prob, eps, 2), error);            // k below threshold
    CHECK_THROWS_AS(apply_fio(prob, eps, 3, {}, 1), error);     // derivative costs one power
    auto bad = prob;
    bad.x_box.push_back({0, 1});
    CHECK_THROWS_AS(apply_fio(bad, eps, 3), error);
}
