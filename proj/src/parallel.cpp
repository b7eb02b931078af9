#include "goi/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace goi {

namespace {
std::atomic<int> g_workers{0};
}

void set_worker_count(int n) { g_workers.store(n < 0 ? 0 : n); }

int worker_count() {
    int n = g_workers.load();
    if (n == 0) {
        unsigned hc = std::thread::hardware_concurrency();
        n = hc == 0 ? 1 : static_cast<int>(hc);
    }
    return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    if (n == 0) return;
    std::size_t workers = static_cast<std::size_t>(worker_count());
    workers = std::min(workers, n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first;
    std::mutex em;
    // block size keeps cache locality; the shared counter balances uneven work
    std::size_t block = std::max<std::size_t>(1, n / (workers * 8));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                if (failed.load(std::memory_order_relaxed)) break;
                std::size_t lo = next.fetch_add(block);
                if (lo >= n) break;
                std::size_t hi = std::min(n, lo + block);
                try {
                    for (std::size_t i = lo; i < hi; ++i) fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> g(em);
                    if (!first) first = std::current_exception();
                    failed.store(true, std::memory_order_relaxed);
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

namespace {
template <class T> T pairwise_impl(std::span<const T> xs) {
    std::size_t n = xs.size();
    if (n == 0) return T{};
    if (n <= 8) {
        T s{};
        for (const T& x : xs) s += x;
        return s;
    }
    std::size_t half = n / 2;
    return pairwise_impl(xs.first(half)) + pairwise_impl(xs.subspan(half));
}
} // namespace

double pairwise_sum(std::span<const double> xs) { return pairwise_impl(xs); }
std::complex<double> pairwise_sum(std::span<const std::complex<double>> xs) {
    return pairwise_impl(xs);
}

} // namespace goi
