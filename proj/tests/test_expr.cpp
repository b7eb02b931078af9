#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "goi/expr.hpp"
#include "goi/expr_parse.hpp"

using namespace goi;

namespace {

cx eval1(Expr e, const Point& p) { return Tape(e).eval(p); }

// central finite difference along one coordinate
cx fd(Expr e, Point p, Axis a, int idx, double h = 1e-5) {
    Tape t(e);
    Point lo = p, hi = p;
    double* plo = nullptr;
    double* phi = nullptr;
    switch (a) {
    case Axis::X: plo = &lo.x[idx]; phi = &hi.x[idx]; break;
    case Axis::Y: plo = &lo.y[idx]; phi = &hi.y[idx]; break;
    case Axis::Xi: plo = &lo.xi[idx]; phi = &hi.xi[idx]; break;
    }
    *plo -= h;
    *phi += h;
    return (t.eval(hi) - t.eval(lo)) / (2 * h);
}

} // namespace

TEST_CASE("hash consing shares identical subtrees") {
    Expr y = Expr::var(Axis::Y, 0);
    Expr a = (y + 1.0) * (y + 1.0);
    Expr b = (y + 1.0) * (y + 1.0);
    CHECK(a.same(b));
    CHECK((y * 2.0).same(2.0 * y)); // canonical child order
}

TEST_CASE("constant folding") {
    CHECK((Expr::constant(2.0) + Expr::constant(3.0)).same(Expr::constant(5.0)));
    CHECK((Expr::constant(0.0) * Expr::var(Axis::Y, 0)).is_zero());
    CHECK(Expr::var(Axis::Y, 0).pow(0).is_one());
    Expr e = Expr::var(Axis::Y, 0).pow(2).pow(3);
    Point p;
    p.y[0] = 2.0;
    CHECK(eval1(e, p).real() == doctest::Approx(64.0));
}

TEST_CASE("evaluation basics") {
    Point p;
    p.eps = 0.25;
    p.y[0] = 0.5;
    p.xi[0] = 3.0;
    Expr e = Expr::eps() * Expr::var(Axis::Y, 0) * Expr::var(Axis::Xi, 0);
    CHECK(eval1(e, p).real() == doctest::Approx(0.375));
    CHECK(eval1(xi_bracket(1), p).real() == doctest::Approx(std::sqrt(10.0)));
    CHECK(eval1(exp(Expr::constant(cx(0, 1)) * Expr::var(Axis::Y, 0)), p) ==
          cx(std::cos(0.5), std::sin(0.5)));
}

TEST_CASE("derivatives match finite differences") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> U(-1.5, 1.5);
    Arity ar{1, 2, 2};
    Expr e = parse_expr("sin(y1*xi1) * exp(-y2*y2) + pow(xibracket, -2) * x1", ar);
    for (int trial = 0; trial < 20; ++trial) {
        Point p;
        p.eps = 0.1;
        p.x[0] = U(rng);
        p.y[0] = U(rng);
        p.y[1] = U(rng);
        p.xi[0] = U(rng) + 2.0;
        p.xi[1] = U(rng);
        for (auto [a, i] : {std::pair{Axis::X, 0}, {Axis::Y, 0}, {Axis::Y, 1},
                            {Axis::Xi, 0}, {Axis::Xi, 1}}) {
            cx exact = eval1(e.d(a, i), p);
            cx approx = fd(e, p, a, i);
            CHECK(std::abs(exact - approx) <= 1e-5 * (1.0 + std::abs(exact)));
        }
    }
}

TEST_CASE("mixed partials commute") {
    Arity ar{0, 1, 1};
    Expr e = parse_expr("sin(y*xi) * pow(xibracket, -1)", ar);
    Expr d1 = e.d(Axis::Y, 0).d(Axis::Xi, 0);
    Expr d2 = e.d(Axis::Xi, 0).d(Axis::Y, 0);
    Point p;
    p.y[0] = 0.7;
    p.xi[0] = 1.9;
    CHECK(std::abs(eval1(d1, p) - eval1(d2, p)) < 1e-9);
}

TEST_CASE("posexp is flat at the origin and mul short-circuits") {
    Expr t = Expr::var(Axis::Y, 0);
    Expr pe = posexp(t);
    Point p;
    p.y[0] = -0.5;
    CHECK(eval1(pe, p) == cx(0, 0));
    // derivative contains 1/t^2; the zero factor must win
    CHECK(eval1(pe.d(Axis::Y, 0), p) == cx(0, 0));
    p.y[0] = 0.0;
    CHECK(eval1(pe.d(Axis::Y, 0), p) == cx(0, 0));
    p.y[0] = 0.5;
    CHECK(eval1(pe, p).real() == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("pospow: piecewise-polynomial glue and its derivatives") {
    Expr t = Expr::var(Axis::Y, 0);
    Expr pp = pospow(t, 5);
    Point p;
    p.y[0] = -0.3;
    CHECK(eval1(pp, p) == cx(0, 0));
    CHECK(eval1(pp.d(Axis::Y, 0), p) == cx(0, 0));
    p.y[0] = 0.4;
    CHECK(eval1(pp, p).real() == doctest::Approx(std::pow(0.4, 5)));
    // d/dt max(t,0)^5 = 5 max(t,0)^4
    CHECK(eval1(pp.d(Axis::Y, 0), p).real() == doctest::Approx(5 * std::pow(0.4, 4)));
    // C^4 only: the fifth derivative does not exist at t = 0
    Expr d = pp;
    for (int j = 0; j < 4; ++j) d = d.d(Axis::Y, 0);
    CHECK_THROWS_AS(d.d(Axis::Y, 0), error);

    Expr sb = spline_bump(t, 3); // (1 - t^2)_+^3
    p.y[0] = 0.0;
    CHECK(eval1(sb, p).real() == doctest::Approx(1.0));
    p.y[0] = 1.2;
    CHECK(eval1(sb, p) == cx(0, 0));
    p.y[0] = 0.6;
    CHECK(eval1(sb, p).real() == doctest::Approx(std::pow(0.64, 3)));
}

TEST_CASE("smoothstep endpoints and monotonicity") {
    Expr t = Expr::var(Axis::Y, 0);
    Expr s = smoothstep01(t);
    Tape tape(s);
    Point p;
    p.y[0] = -0.1;
    CHECK(tape.eval(p) == cx(0, 0));
    p.y[0] = 1.1;
    CHECK(tape.eval(p).real() == doctest::Approx(1.0));
    double prev = -1;
    for (double v = 0.0; v <= 1.0; v += 0.05) {
        p.y[0] = v;
        double cur = tape.eval(p).real();
        CHECK(cur >= prev);
        prev = cur;
    }
}

TEST_CASE("radial cutoff chi") {
    Expr chi = chi_cutoff(2);
    Tape t(chi);
    Point p;
    p.xi = {0.1, 0.1, 0, 0};
    CHECK(t.eval(p).real() == doctest::Approx(1.0));
    p.xi = {0.5, 0.5, 0, 0}; // |xi| ~ 0.707 > 1/2
    CHECK(t.eval(p) == cx(0, 0));
    p.xi = {0.3, 0.0, 0, 0};
    double v = t.eval(p).real();
    CHECK(v > 0.0);
    CHECK(v < 1.0);
}

TEST_CASE("substitution rewrites xi to the unit sphere") {
    int p_dim = 2;
    Expr nrm_inv = xi_norm_sq(p_dim).powr(-0.5);
    std::map<std::pair<Axis, int>, Expr> m;
    for (int i = 0; i < p_dim; ++i)
        m[{Axis::Xi, i}] = Expr::var(Axis::Xi, i) * nrm_inv;
    Expr f = Expr::var(Axis::Xi, 0); // xi1 -> xi1/|xi|
    Expr g = f.subst(m);
    Point pt;
    pt.xi = {3.0, 4.0, 0, 0};
    CHECK(eval1(g, pt).real() == doctest::Approx(0.6));
}

TEST_CASE("net_const carries an epsilon net") {
    Expr n = Expr::net_const([](double e) { return cx(std::log(1 / e), 0); });
    Expr e = n * Expr::var(Axis::Y, 0);
    Point p;
    p.eps = 0.125;
    p.y[0] = 2.0;
    CHECK(eval1(e, p).real() == doctest::Approx(2 * std::log(8.0)));
    CHECK(n.d(Axis::Y, 0).is_zero());
}

TEST_CASE("tape with multiple roots and batches") {
    Expr y = Expr::var(Axis::Y, 0);
    std::vector<Expr> roots = {y, y * y, sin(y)};
    Tape t(roots);
    std::vector<Point> pts(3);
    pts[0].y[0] = 1;
    pts[1].y[0] = 2;
    pts[2].y[0] = 3;
    std::vector<cx> out(9);
    t.eval_batch(pts, out);
    CHECK(out[0].real() == doctest::Approx(1));
    CHECK(out[4].real() == doctest::Approx(4));
    CHECK(out[8].real() == doctest::Approx(std::sin(3.0)));
}

TEST_CASE("parser: numbers, precedence, functions") {
    Arity ar{0, 1, 1};
    Point p;
    p.y[0] = 2.0;
    p.xi[0] = 1.0;
    p.eps = 0.5;
    CHECK(eval1(parse_expr("1 + 2*3", ar), p).real() == doctest::Approx(7));
    CHECK(eval1(parse_expr("2^3^2", ar), p).real() == doctest::Approx(512)); // right assoc
    CHECK(eval1(parse_expr("-y^2", ar), p).real() == doctest::Approx(-4));
    CHECK(eval1(parse_expr("pow(eps,-1)", ar), p).real() == doctest::Approx(2));
    CHECK(eval1(parse_expr("sqrt(y*y)", ar), p).real() == doctest::Approx(2));
    CHECK(eval1(parse_expr("bump(0)", ar), p).real() == doctest::Approx(std::exp(-1.0)));
    CHECK(eval1(parse_expr("i*i", ar), p).real() == doctest::Approx(-1));
    CHECK(eval1(parse_expr("pospow(y - 1, 3)", ar), p).real() == doctest::Approx(1));
    CHECK(eval1(parse_expr("sbump(y/4)", ar), p).real() ==
          doctest::Approx(std::pow(0.75, 12)));
}

TEST_CASE("parser: rejects out-of-scope identifiers") {
    Arity no_x{0, 1, 1};
    CHECK_THROWS_AS(parse_expr("x1 + y1", no_x), error);
    CHECK_THROWS_AS(parse_expr("y2", no_x), error); // ny = 1
    CHECK_THROWS_AS(parse_expr("frob(y1)", no_x), error);
    CHECK_THROWS_AS(parse_expr("y1 +", no_x), error);
    CHECK_THROWS_AS(parse_expr("pow(y1, y1)", no_x), error); // non-constant exponent
    CHECK_THROWS_AS(parse_expr("pospow(y1, 2.5)", no_x), error);
    Arity no_eps{0, 1, 1, false};
    CHECK_THROWS_AS(parse_expr("eps*y1", no_eps), error);
}
