#ifndef GOI_FFT_HPP
#define GOI_FFT_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "goi/expr.hpp"

namespace goi {

// In-place radix-2 FFT; data.size() must be a power of two.
// The inverse transform includes the 1/n factor.
void fft_inplace(std::span<cx> data, bool inverse);

// Row-major n-dimensional transform; every extent a power of two.
void fft_nd(std::vector<cx>& data, std::span<const std::size_t> shape, bool inverse);

// Frequencies of an n-point transform with grid spacing dx, in the usual
// wraparound order: 2*pi*k/(n*dx) for k = 0..n/2, then the negative half.
std::vector<double> fft_freqs(std::size_t n, double dx);

} // namespace goi

#endif
