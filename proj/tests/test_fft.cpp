#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "goi/fft.hpp"

using namespace goi;

TEST_CASE("matches the direct DFT on random data") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> d(-1, 1);
    const std::size_t n = 16;
    std::vector<cx> x(n);
    for (auto& v : x) v = cx(d(rng), d(rng));

    std::vector<cx> ref(n);
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = 0; j < n; ++j) {
            double ang = -2 * std::numbers::pi * (double)(k * j) / (double)n;
            ref[k] += x[j] * cx(std::cos(ang), std::sin(ang));
        }

    std::vector<cx> y = x;
    fft_inplace(y, false);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(y[k] - ref[k]) < 1e-12);
}

TEST_CASE("round trip and Parseval") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<cx> x(256);
    for (auto& v : x) v = cx(d(rng), d(rng));

    std::vector<cx> y = x;
    fft_inplace(y, false);
    double ex = 0, ey = 0;
    for (const auto& v : x) ex += std::norm(v);
    for (const auto& v : y) ey += std::norm(v);
    CHECK(ey / (double)x.size() == doctest::Approx(ex).epsilon(1e-12));

    fft_inplace(y, true);
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(y[i] - x[i]) < 1e-12);
}

TEST_CASE("delta transforms to a flat spectrum") {
    std::vector<cx> x(64, cx(0, 0));
    x[0] = cx(1, 0);
    fft_inplace(x, false);
    for (const auto& v : x) CHECK(std::abs(v - cx(1, 0)) < 1e-13);
}

TEST_CASE("length must be a power of two") {
    std::vector<cx> x(12);
    CHECK_THROWS_AS(fft_inplace(x, false), error);
}

TEST_CASE("2-d transform separates over axes") {
    const std::size_t n0 = 8, n1 = 4;
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<cx> a(n0), b(n1);
    for (auto& v : a) v = cx(d(rng), d(rng));
    for (auto& v : b) v = cx(d(rng), d(rng));

    std::vector<cx> grid(n0 * n1);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j) grid[i * n1 + j] = a[i] * b[j];

    std::size_t shape[2] = {n0, n1};
    fft_nd(grid, shape, false);
    std::vector<cx> fa = a, fb = b;
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            CHECK(std::abs(grid[i * n1 + j] - fa[i] * fb[j]) < 1e-12);

    fft_nd(grid, shape, true);
    for (std::size_t i = 0; i < n0; ++i)
        for (std::size_t j = 0; j < n1; ++j)
            CHECK(std::abs(grid[i * n1 + j] - a[i] * b[j]) < 1e-12);
}

TEST_CASE("frequency layout: wraparound order, spacing 2 pi / (n dx)") {
    auto f = fft_freqs(8, 0.5);
    const double step = 2 * std::numbers::pi / 4.0;
    CHECK(f[0] == 0.0);
    CHECK(f[1] == doctest::Approx(step));
    CHECK(f[4] == doctest::Approx(4 * step));
    CHECK(f[5] == doctest::Approx(-3 * step));
    CHECK(f[7] == doctest::Approx(-step));
}

TEST_CASE("translation becomes a phase factor") {
    const std::size_t n = 32;
    std::vector<cx> x(n), xs(n);
    for (std::size_t j = 0; j < n; ++j) {
        double t = (double)j / n;
        x[j] = cx(std::exp(-10 * (t - 0.5) * (t - 0.5)), 0);
    }
    for (std::size_t j = 0; j < n; ++j) xs[j] = x[(j + 3) % n];
    fft_inplace(x, false);
    fft_inplace(xs, false);
    for (std::size_t k = 0; k < n; ++k) {
        double ang = 2 * std::numbers::pi * 3.0 * (double)k / n;
        CHECK(std::abs(xs[k] - x[k] * cx(std::cos(ang), std::sin(ang))) < 1e-12);
    }
}
