#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "goi/net.hpp"

using namespace goi;

namespace {
const EpsilonGrid grid = EpsilonGrid::dyadic();

EpsilonNet power(double a) {
    return [a](double e) { return std::complex<double>(std::pow(e, a), 0); };
}
} // namespace

TEST_CASE("valuation slope of exact power laws") {
    auto v2 = estimate_valuation(power(2), grid);
    CHECK(std::abs(v2.slope - 2.0) < 0.05);
    CHECK(v2.residual < 1e-9);
    CHECK(v2.monotone_tail);

    auto vm3 = estimate_valuation(power(-3), grid);
    CHECK(std::abs(vm3.slope + 3.0) < 0.05);
}

TEST_CASE("valuation slope of log(1/eps)") {
    auto v = estimate_valuation([](double e) { return std::complex<double>(std::log(1 / e), 0); }, grid);
    // regression on the dyadic tail, frozen from an independent fit
    CHECK(v.slope == doctest::Approx(-0.09160063611639).epsilon(1e-6));
    CHECK(v.slope > -0.2);
    CHECK(v.slope < 0.0);
}

TEST_CASE("valuation of the zero net") {
    auto v = estimate_valuation([](double) { return std::complex<double>(0, 0); }, grid);
    CHECK(std::isinf(v.slope));
    CHECK(v.slope > 0);
    CHECK(ultra_pseudo_norm(v) == 0.0);
}

TEST_CASE("non-finite samples are rejected") {
    EpsilonNet bad = [](double e) {
        return std::complex<double>(e < 0.01 ? std::nan("") : 1.0, 0);
    };
    CHECK_THROWS_AS(estimate_valuation(bad, grid), error);
    CHECK_THROWS_AS(classify_net(bad, grid), error);
}

TEST_CASE("classification of the spec'd net zoo") {
    auto c = classify_net(power(-1), grid);
    CHECK(c.tag == NetTag::Moderate);
    CHECK(c.moderate_n == 1);
    REQUIRE(c.strictly_nonzero.has_value());
    CHECK(*c.strictly_nonzero == 1);

    auto nm = classify_net([](double e) { return std::complex<double>(std::exp(1 / e), 0); }, grid);
    CHECK(nm.tag == NetTag::NotModerate);

    auto ss = classify_net([](double e) { return std::complex<double>(std::log(1 / e), 0); }, grid);
    CHECK(ss.tag == NetTag::SlowScale);
    CHECK(ss.moderate_n == 1); // slow scale nets are Moderate(1)

    auto ng = classify_net([](double e) { return std::complex<double>(std::exp(-1 / e), 0); }, grid);
    CHECK(ng.tag == NetTag::Negligible);
}

TEST_CASE("power-law calibration across a = -5..5") {
    for (int a = -5; a <= 5; ++a) {
        auto c = classify_net(power(a), grid);
        CHECK(c.tag == NetTag::Moderate);
        CHECK(c.moderate_n == std::max(0, -a));
        CHECK(std::abs(c.slope - a) < 0.1);
    }
    CHECK(classify_net(power(11), grid).tag == NetTag::Negligible);
    CHECK(classify_net(power(10), grid).tag == NetTag::Negligible);
}

TEST_CASE("strictly nonzero exponents") {
    CHECK(is_strictly_nonzero(power(1), grid) == 1);
    CHECK(is_strictly_nonzero(power(2), grid) == 2);
    CHECK(!is_strictly_nonzero([](double e) { return std::complex<double>(std::exp(-1 / e), 0); },
                               grid)
               .has_value());
    auto r = is_strictly_nonzero(
        [](double e) { return std::complex<double>(e / (2 + std::sin(1 / e)), 0); }, grid);
    REQUIRE(r.has_value());
    CHECK(*r == 1);
}

TEST_CASE("slow-scale strict nonzero") {
    CHECK(is_slow_scale_strictly_nonzero(
        [](double e) { return std::complex<double>(1 / std::log(1 / e), 0); }, grid));
    CHECK(!is_slow_scale_strictly_nonzero(power(1), grid));
    CHECK(is_slow_scale_strictly_nonzero(power(0), grid));
    CHECK_THROWS_AS(is_slow_scale_strictly_nonzero(
                        [](double) { return std::complex<double>(0, 0); }, grid),
                    error);
}

TEST_CASE("ultra pseudo norm") {
    ValuationEstimate v;
    v.slope = 0;
    CHECK(ultra_pseudo_norm(v) == doctest::Approx(1.0));
    v.slope = 2;
    CHECK(ultra_pseudo_norm(v) == doctest::Approx(std::exp(-2.0)));
}

TEST_CASE("property: scaling leaves the slope alone") {
    for (double c : {3.0, -7.5, 1e-3}) {
        auto u = estimate_valuation(power(-2), grid);
        auto cu = estimate_valuation(
            [c](double e) { return std::complex<double>(c * std::pow(e, -2), 0); }, grid);
        CHECK(std::abs(u.slope - cu.slope) < 1e-6 + u.residual + cu.residual);
    }
}

TEST_CASE("property: slopes add under products of power laws") {
    auto u = estimate_valuation(power(2), grid);
    auto v = estimate_valuation(power(-3), grid);
    auto uv = estimate_valuation(power(-1), grid);
    CHECK(std::abs(uv.slope - (u.slope + v.slope)) < 1e-6 + u.residual + v.residual);
}

TEST_CASE("property: slow scale closed under product and sum") {
    EpsilonNet l2 = [](double e) {
        double l = std::log(1 / e);
        return std::complex<double>(l * l, 0);
    };
    CHECK(classify_net(l2, grid).tag == NetTag::SlowScale);
    EpsilonNet sum = [](double e) { return std::complex<double>(2 * std::log(1 / e), 0); };
    CHECK(classify_net(sum, grid).tag == NetTag::SlowScale);
}

TEST_CASE("property: strict nonzero matches finite ultra-pseudo-norm of 1/u") {
    for (int a = -3; a <= 3; ++a) {
        auto r = is_strictly_nonzero(power(a), grid);
        auto inv = estimate_valuation(power(-a), grid);
        double n = ultra_pseudo_norm(inv);
        CHECK(r.has_value() == (n > 0 && std::isfinite(n)));
    }
}

TEST_CASE("grid validation") {
    EpsilonGrid g;
    g.samples = {0.5, 0.25, 0.125};
    CHECK_THROWS_AS(g.validate(), error); // too few
    g = EpsilonGrid::dyadic();
    g.samples[3] = g.samples[2]; // not strictly decreasing
    CHECK_THROWS_AS(g.validate(), error);
    EpsilonGrid narrow;
    for (int i = 0; i < 10; ++i) narrow.samples.push_back(0.5 - 0.01 * i);
    CHECK_THROWS_AS(narrow.validate(), error); // under three decades
}
