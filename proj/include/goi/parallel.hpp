#ifndef GOI_PARALLEL_HPP
#define GOI_PARALLEL_HPP

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace goi {

// Worker count used by parallel_for. 0 = hardware concurrency.
void set_worker_count(int n);
int worker_count();

// Runs fn(i) for i in [0, n). Each index is executed exactly once; indices are
// distributed in contiguous blocks so results written to slot i are
// independent of the worker count. Exceptions are captured and the first one
// rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

// Summation with a fixed pairwise tree, independent of worker count and
// insertion chunking. Used for every quadrature reduction.
double pairwise_sum(std::span<const double> xs);
std::complex<double> pairwise_sum(std::span<const std::complex<double>> xs);

} // namespace goi

#endif
