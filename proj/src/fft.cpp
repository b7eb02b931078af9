#include "goi/fft.hpp"

#include <cmath>
#include <numbers>

#include "goi/errors.hpp"

namespace goi {

void fft_inplace(std::span<cx> data, bool inverse) {
    const std::size_t n = data.size();
    if (n == 0 || (n & (n - 1)) != 0) fail(errc::config, "fft length must be a power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }

    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t len = 2; len <= n; len <<= 1) {
        double ang = sign * 2 * std::numbers::pi / (double)len;
        cx wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cx w(1, 0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                cx u = data[i + j];
                cx v = cx(data[i + j + len / 2].real() * w.real() -
                              data[i + j + len / 2].imag() * w.imag(),
                          data[i + j + len / 2].real() * w.imag() +
                              data[i + j + len / 2].imag() * w.real());
                data[i + j] = u + v;
                data[i + j + len / 2] = u - v;
                w = cx(w.real() * wl.real() - w.imag() * wl.imag(),
                       w.real() * wl.imag() + w.imag() * wl.real());
            }
        }
    }
    if (inverse)
        for (auto& v : data) v /= (double)n;
}

void fft_nd(std::vector<cx>& data, std::span<const std::size_t> shape, bool inverse) {
    std::size_t total = 1;
    for (std::size_t s : shape) total *= s;
    if (total != data.size()) fail(errc::config, "fft shape does not match the data length");

    // transform along each axis in turn; gather strided lines into a scratch
    std::vector<cx> line;
    std::size_t stride = 1;
    for (std::size_t ax = shape.size(); ax-- > 0;) {
        const std::size_t len = shape[ax];
        line.resize(len);
        const std::size_t nlines = total / len;
        for (std::size_t l = 0; l < nlines; ++l) {
            // index of the line's first element: distribute l over the other axes
            std::size_t outer = l / stride, inner = l % stride;
            std::size_t base = outer * stride * len + inner;
            for (std::size_t j = 0; j < len; ++j) line[j] = data[base + j * stride];
            fft_inplace(line, inverse);
            for (std::size_t j = 0; j < len; ++j) data[base + j * stride] = line[j];
        }
        stride *= len;
    }
}

std::vector<double> fft_freqs(std::size_t n, double dx) {
    std::vector<double> out(n);
    const double step = 2 * std::numbers::pi / ((double)n * dx);
    for (std::size_t k = 0; k < n; ++k) {
        double kk = (k <= n / 2) ? (double)k : (double)k - (double)n;
        out[k] = kk * step;
    }
    return out;
}

} // namespace goi
