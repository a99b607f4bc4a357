#ifndef CRITWAVE_PARALLEL_HPP
#define CRITWAVE_PARALLEL_HPP

#include <array>
#include <cstddef>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace critwave {

// Deterministic reductions. Sums are accumulated in fixed-size blocks and
// the block partials are combined left to right, so the result is bitwise
// identical for any thread count (including the serial reference below).
inline constexpr std::size_t kReduceBlock = 4096;

namespace detail {
template <class F>
double block_sum(std::size_t lo, std::size_t hi, const F& f) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += f(i);
    return s;
}
}  // namespace detail

// Serial reference: identical arithmetic to reduce_indexed, kept for tests
// and benchmarks.
template <class F>
double reduce_indexed_serial(std::size_t n, const F& f) {
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    double total = 0.0;
    for (std::size_t b = 0; b < nblocks; ++b) {
        const std::size_t lo = b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        total += detail::block_sum(lo, hi, f);
    }
    return total;
}

template <class F>
double reduce_indexed(std::size_t n, const F& f) {
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    if (nblocks <= 1) return detail::block_sum(0, n, f);
    std::vector<double> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long b = 0; b < (long long)nblocks; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        partial[(std::size_t)b] = detail::block_sum(lo, hi, f);
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

// Same blocked scheme with a small fixed number of simultaneous accumulators;
// f(i, acc) adds sample i into acc[0..K).
template <std::size_t K, class F>
std::array<double, K> reduce_indexed_multi(std::size_t n, const F& f) {
    const std::size_t nblocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<std::array<double, K>> partial(nblocks);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long b = 0; b < (long long)nblocks; ++b) {
        const std::size_t lo = (std::size_t)b * kReduceBlock;
        const std::size_t hi = lo + kReduceBlock < n ? lo + kReduceBlock : n;
        std::array<double, K> acc{};
        for (std::size_t i = lo; i < hi; ++i) f(i, acc);
        partial[(std::size_t)b] = acc;
    }
    std::array<double, K> total{};
    for (const auto& p : partial)
        for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
    return total;
}

template <class F>
void parallel_for(std::size_t n, const F& f) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (long long i = 0; i < (long long)n; ++i) f((std::size_t)i);
}

template <class F>
void parallel_for_serial(std::size_t n, const F& f) {
    for (std::size_t i = 0; i < n; ++i) f(i);
}

inline int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_threads(int k) {
#ifdef _OPENMP
    if (k > 0) omp_set_num_threads(k);
#else
    (void)k;
#endif
}

}  // namespace critwave

#endif
