#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goi/expr_parse.hpp"
#include "goi/oscint.hpp"

using namespace goi;

namespace {

OscIntProblem delta_kernel_problem(const std::string& amplitude, SymbolOrder ord) {
    Arity ar{0, 1, 1};
    OscIntProblem prob;
    prob.phi = PhaseExpr{parse_expr("y1*xi1", ar), ar};
    prob.a = SymbolExpr{parse_expr(amplitude, ar), ar, ord};
    prob.u = parse_expr("bump(y1)", ar);
    prob.support = {{-1.0, 1.0}};
    return prob;
}

const double psi0 = std::exp(-1.0); // bump(0)

} // namespace

TEST_CASE("choose_k arithmetic") {
    CHECK(choose_k({0, 1, 0}, 1, 0) == 3);
    CHECK(choose_k({0, 1, 0}, 1, 2) == 5);
    CHECK(choose_k({1, 0.5, 0.5}, 2, 0) == 9);
    CHECK(choose_k({-4, 1, 0}, 1, 0) == 0);
    CHECK_THROWS_AS(choose_k({0, 0, 0}, 1, 0), error);
}

TEST_CASE("Fourier inversion: phi = y xi, a = 1 gives psi(0)") {
    auto prob = delta_kernel_problem("1", {0, 1, 0});
    auto v = eval_oscint(prob, 0.5, 3);
    CHECK(std::abs(v.value - psi0) < 1e-4);
    CHECK(v.err_budget < 1e-4);
    CHECK(std::abs(v.value.imag()) < 1e-6);
    // k below the threshold is rejected
    CHECK_THROWS_AS(eval_oscint(prob, 0.5, 2), error);
}

TEST_CASE("zero amplitude and zero test function give zero") {
    auto prob = delta_kernel_problem("0", {0, 1, 0});
    CHECK(std::abs(eval_oscint(prob, 0.5, 3).value) == 0.0);
    CHECK(std::abs(eval_oscint_damped_oracle(prob, 0.5).value) == 0.0);
}

TEST_CASE("damped oracle reproduces psi(0)") {
    auto prob = delta_kernel_problem("1", {0, 1, 0});
    auto v = eval_oscint_damped_oracle(prob, 0.5);
    CHECK(std::abs(v.value - psi0) < 1e-4);
}

TEST_CASE("absolutely convergent amplitude: oracle and L^k route agree") {
    auto prob = delta_kernel_problem("pow(xibracket,-4)", {-4, 1, 0});
    auto direct = eval_oscint(prob, 0.5, 0);
    auto oracle = eval_oscint_damped_oracle(prob, 0.5);
    CHECK(std::abs(direct.value - oracle.value) <
          1e-4 * std::max(1.0, std::abs(direct.value)));
    auto k2 = eval_oscint(prob, 0.5, 2);
    CHECK(std::abs(direct.value - k2.value) < 1e-4 * std::max(1.0, std::abs(direct.value)));
}

TEST_CASE("k independence for the delta kernel") {
    auto prob = delta_kernel_problem("1", {0, 1, 0});
    auto rep = k_independence_check(prob, 0.5, 3);
    CHECK(rep.pass);
    CHECK(rep.max_rel_dev < 1e-4);
    CHECK(rep.ks == std::vector<int>{3, 4, 5});
}

TEST_CASE("linearity in a and exact scaling in u at fixed quadrature") {
    QuadConfig quad;
    quad.xi_radius = 64;
    quad.tail_tol = 1e-300; // disable early termination so grids coincide
    quad.check_budget = false;
    auto p1 = delta_kernel_problem("pow(xibracket,-4)", {-4, 1, 0});
    auto p2 = delta_kernel_problem("pow(xibracket,-5)", {-4, 1, 0});
    auto p12 = delta_kernel_problem("pow(xibracket,-4) + pow(xibracket,-5)", {-4, 1, 0});
    cx v1 = eval_oscint(p1, 0.5, 0, quad).value;
    cx v2 = eval_oscint(p2, 0.5, 0, quad).value;
    cx v12 = eval_oscint(p12, 0.5, 0, quad).value;
    CHECK(std::abs(v12 - (v1 + v2)) < 1e-8 * std::abs(v12));

    auto scaled = p1;
    scaled.u = p1.u * Expr::constant(2.5);
    cx vs = eval_oscint(scaled, 0.5, 0, quad).value;
    CHECK(std::abs(vs - 2.5 * v1) < 1e-12 * std::abs(vs));
}

TEST_CASE("two-dimensional integral: direct route matches the damped oracle") {
    Arity ar{0, 2, 2};
    OscIntProblem prob;
    prob.phi = PhaseExpr{parse_expr("y1*xi1 + y2*xi2", ar), ar};
    prob.a = SymbolExpr{parse_expr("pow(xibracket, -6)", ar), ar, {-6, 1, 0}};
    prob.u = parse_expr("sbump(2*y1) * sbump(2*y2)", ar);
    prob.support = {{-0.5, 0.5}, {-0.5, 0.5}};
    QuadConfig quad;
    quad.xi_radius = 32;
    auto direct = eval_oscint(prob, 0.5, 0, quad);
    auto oracle = eval_oscint_damped_oracle(prob, 0.5, {}, quad);
    double scale = std::max(1.0, std::abs(direct.value));
    CHECK(std::abs(direct.value - oracle.value) < 1e-4 * scale);
    CHECK(direct.err_budget < 1e-4 * scale);
}

TEST_CASE("result does not depend on the admissible cutoff") {
    Arity ar{0, 1, 1};
    auto prob = delta_kernel_problem("1", {0, 1, 0});
    Expr chi2 = 1.0 - smoothstep01((xi_norm(1) - 0.3) * 5.0);
    auto L1 = build_L_phi(prob.phi);
    auto L2 = build_L_phi(prob.phi, chi2);
    Expr phase_factor = exp(Expr::constant(cx(0, 1)) * prob.phi.e);
    SymbolExpr au{prob.a.e * prob.u, ar, prob.a.ord};
    Expr roots[2] = {phase_factor * apply_L_phi(L1, au, 3).e,
                     phase_factor * apply_L_phi(L2, au, 3).e};
    auto res = oscint_integrate_roots(prob.phi, roots, prob.support, {}, 0.5, -3, {});
    CHECK(std::abs(res[0].value - res[1].value) <
          res[0].err_budget + res[1].err_budget + 1e-6);
}
