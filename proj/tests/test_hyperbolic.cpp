#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goi/expr_parse.hpp"
#include "goi/hyperbolic.hpp"

using namespace goi;

namespace {

const Arity kCoeff{2, 0, 0}; // x1 = space, x2 = time
const Arity kData{0, 1, 0};

CauchyProblem problem(const std::string& c, const std::string& b, const std::string& g) {
    CauchyProblem p;
    p.c = parse_expr(c, kCoeff);
    p.b = parse_expr(b, kCoeff);
    p.g = parse_expr(g, kData);
    return p;
}

double sbump12(double t) { return t * t < 1 ? std::pow(1 - t * t, 12) : 0.0; }

} // namespace

TEST_CASE("constant speed: straight characteristics, group law, zero damping") {
    auto p = problem("1", "0", "sbump(y1)");
    auto flow = solve_characteristics(p, 0.1, 1e-10);
    CHECK(std::abs(flow.gamma(0.3, 0.7, 0.0) - (0.3 - 0.7)) < 1e-9);
    CHECK(std::abs(flow.gamma(0.3, 0.7, 0.7) - 0.3) < 1e-12);
    auto [foot, damp] = flow.foot_and_damping(0.5, 1.0);
    CHECK(std::abs(foot - (-0.5)) < 1e-9);
    CHECK(std::abs(damp) < 1e-9);
}

TEST_CASE("constant damping: u = e^{-t} g(x - t)") {
    auto p = problem("1", "1", "sbump(y1)");
    auto flow = solve_characteristics(p, 0.1);
    double xs[] = {-0.5, 0.0, 0.4};
    double ts[] = {0.0, 0.3, 0.8};
    auto u = solve_transport(p, flow, xs, ts);
    for (int it = 0; it < 3; ++it)
        for (int ix = 0; ix < 3; ++ix) {
            double expect = std::exp(-ts[it]) * sbump12(xs[ix] - ts[it]);
            CHECK(std::abs(u[it * 3 + ix] - expect) < 1e-8);
        }
}

TEST_CASE("oscillating generalized speed: two clusters of characteristic feet") {
    // c_eps alternates between 3/2 and 1/2 with the parity of log2(1/eps),
    // so it actually oscillates along the dyadic grid
    auto p = problem("1 + cos(pi*log(1/eps)/log(2))/2", "0", "sbump(y1)");
    for (double eps : {0.25, 0.125}) {
        double c = 1 + std::cos(M_PI * std::log2(1 / eps)) / 2;
        auto flow = solve_characteristics(p, eps);
        CHECK(std::abs(flow.gamma(0.0, 1.0, 0.0) - (-c)) < 1e-9);
    }
    auto rep = domain_of_dependence(p, 0.0, 1.0, EpsilonGrid::dyadic());
    CHECK(rep.hull[0] == doctest::Approx(-1.5).epsilon(1e-6));
    CHECK(rep.hull[1] == doctest::Approx(-0.5).epsilon(1e-6));
    REQUIRE(rep.clusters.size() == 2);
    CHECK(rep.clusters[0] == doctest::Approx(-1.5).epsilon(1e-6));
    CHECK(rep.clusters[1] == doctest::Approx(-0.5).epsilon(1e-6));
    CHECK(rep.settled);
}

TEST_CASE("mollified step speed: piecewise limits and the flow group law") {
    auto p = problem("smoothstep(x1/eps)", "0", "sbump(y1)");
    const double eps = 0.05;
    auto flow = solve_characteristics(p, eps, 1e-10);

    // left of the interface nothing moves; right of it (staying clear of the
    // transition layer) the speed is exactly 1
    CHECK(std::abs(flow.gamma(-0.3, 0.5, 0.0) - (-0.3)) < 1e-9);
    CHECK(std::abs(flow.gamma(0.8, 0.5, 0.0) - 0.3) < 1e-9);

    for (double x : {-0.2, 0.05, 0.3, 0.9}) {
        double mid = flow.gamma(x, 0.6, 0.25);
        CHECK(std::abs(flow.gamma(mid, 0.25, 0.0) - flow.gamma(x, 0.6, 0.0)) < 1e-8);
    }

    auto rep = domain_of_dependence(p, 1.0, 0.4, EpsilonGrid::dyadic());
    CHECK(rep.clusters.size() == 1);
    CHECK(rep.clusters[0] == doctest::Approx(0.6).epsilon(1e-5));
}

TEST_CASE("mollified step transport agrees with a fine upwind reference") {
    auto p = problem("smoothstep(x1/eps)", "0", "sbump((y1 - 0.1)/0.4)");
    const double eps = 0.05, T = 0.4;
    auto flow = solve_characteristics(p, eps);

    // first-order upwind on a grid fine enough that its numerical diffusion
    // stays below the comparison tolerance
    const double xa = -1.0, xb = 1.5, dx = 2.5 / 40000;
    const std::size_t n = 40000;
    std::vector<double> u(n), c(n);
    Tape ct(p.c);
    Point q;
    q.eps = eps;
    for (std::size_t j = 0; j < n; ++j) {
        double x = xa + ((double)j + 0.5) * dx;
        u[j] = sbump12((x - 0.1) / 0.4);
        q.x[0] = x;
        c[j] = ct.eval(q).real();
    }
    const double dt = 0.9 * dx;
    const int steps = (int)std::ceil(T / dt);
    std::vector<double> next(n);
    for (int s = 0; s < steps; ++s) {
        double h = std::min(dt, T - s * dt);
        next[0] = u[0];
        for (std::size_t j = 1; j < n; ++j) next[j] = u[j] - h * c[j] * (u[j] - u[j - 1]) / dx;
        u.swap(next);
    }

    double xs[] = {-0.2, 0.0, 0.1, 0.3, 0.5, 0.8};
    double ts[] = {T};
    auto uc = solve_transport(p, flow, xs, ts);
    for (int i = 0; i < 6; ++i) {
        std::size_t j = (std::size_t)std::llround((xs[i] - xa) / dx - 0.5);
        CHECK(std::abs(uc[i].real() - u[j]) < 1e-3);
    }
}

TEST_CASE("operator route reproduces the characteristic solution") {
    auto p = problem("1", "0", "sbump(y1)");
    p.support = {-1, 1};
    auto flow = solve_characteristics(p, 0.1);
    double xs[] = {-0.4, 0.0, 0.3};
    double ts[] = {0.0, 0.5};
    auto uf = fio_solution(p, flow, xs, ts);
    auto uc = solve_transport(p, flow, xs, ts);
    for (std::size_t i = 0; i < uf.size(); ++i) CHECK(std::abs(uf[i] - uc[i]) < 1e-4);

    auto ps = problem("smoothstep(x1/eps)", "0", "sbump((y1 - 0.1)/0.4)");
    ps.support = {-0.4, 0.6};
    auto flow_s = solve_characteristics(ps, 0.05);
    double xs2[] = {-0.1, 0.1, 0.45};
    double ts2[] = {0.3};
    auto uf2 = fio_solution(ps, flow_s, xs2, ts2);
    auto uc2 = solve_transport(ps, flow_s, xs2, ts2);
    for (std::size_t i = 0; i < uf2.size(); ++i) CHECK(std::abs(uf2[i] - uc2[i]) < 1e-3);
}

TEST_CASE("kernel direction prediction: unit covectors per speed cluster") {
    double clusters[] = {1.0};
    auto fam = kernel_wf_prediction(clusters);
    REQUIRE(fam.size() == 1);
    double s3 = 1 / std::sqrt(3.0);
    CHECK(fam[0].dir[0] == doctest::Approx(s3));
    CHECK(fam[0].dir[1] == doctest::Approx(-s3));
    CHECK(fam[0].dir[2] == doctest::Approx(-s3));

    double two[] = {0.5, 1.5};
    auto fam2 = kernel_wf_prediction(two);
    REQUIRE(fam2.size() == 2);
    double d[] = {-s3, s3, s3}; // antipode of the c=1 direction
    CHECK(angle_to_prediction(fam, d) < 1e-12);
    double off[] = {0.0, 0.0, 1.0};
    CHECK(angle_to_prediction(fam, off) > 0.5);
}

TEST_CASE("sampled kernel matches the closed-form damped frequency integral") {
    auto p = problem("1", "0", "sbump(y1)");
    double eps[] = {0.1};
    std::vector<std::array<double, 2>> box = {{-0.5, 0.5}, {0.0, 1.0}, {-1.5, 0.5}};
    auto k = sample_kernel(p, eps, box, {8, 8, 8});
    REQUIRE(k.values.size() == 1);
    const double peak = 1 / (2 * std::sqrt(M_PI) * 0.1);
    double dd[3];
    for (int i = 0; i < 3; ++i) dd[i] = (box[i][1] - box[i][0]) / 8;
    for (std::size_t ix = 0; ix < 8; ++ix)
        for (std::size_t it = 0; it < 8; ++it)
            for (std::size_t iy = 0; iy < 8; ++iy) {
                double x = box[0][0] + (ix + 0.5) * dd[0];
                double t = box[1][0] + (it + 0.5) * dd[1];
                double y = box[2][0] + (iy + 0.5) * dd[2];
                double z = (x - t) - y;
                double expect = peak * std::exp(-z * z / (4 * 0.01));
                CHECK(std::abs(k.values[0][(ix * 8 + it) * 8 + iy] - expect) < 1e-6 * peak);
            }
}
