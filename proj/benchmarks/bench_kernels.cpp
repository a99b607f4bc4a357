// Compares the OpenMP kernels against their serial reference implementations:
// same blocked arithmetic, so results must be bitwise equal while wall time
// scales with the thread count.

#include <chrono>
#include <cstdio>
#include <vector>

#include "critwave/bumps.hpp"
#include "critwave/fields.hpp"
#include "critwave/nonlinear_solver.hpp"
#include "critwave/parallel.hpp"

using namespace critwave;

namespace {

template <class F>
double time_ms(const F& f, int reps) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / reps;
}

}  // namespace

int main() {
    std::printf("threads available: %d\n\n", max_threads());

    // deterministic reduction over a large field
    {
        const std::size_t n = 1 << 24;
        std::vector<double> data(n);
        for (std::size_t i = 0; i < n; ++i) data[i] = bumps::c3(double(i) / n * 1.2);
        auto f = [&](std::size_t i) { return data[i] * data[i]; };
        volatile double sink = 0.0;
        const double ts = time_ms([&] { sink = reduce_indexed_serial(n, f); }, 5);
        const double s_serial = sink;
        const double tp = time_ms([&] { sink = reduce_indexed(n, f); }, 5);
        const double s_par = sink;
        std::printf("reduce %zu samples: serial %.2f ms, parallel %.2f ms (x%.2f)\n", n, ts,
                    tp, ts / tp);
        std::printf("  bitwise equal: %s\n\n", s_serial == s_par ? "yes" : "NO");
    }

    // one leapfrog step on a fine radial grid
    {
        const RadialGrid grid(8.0, 1 << 20);
        const Dimension dim(3);
        std::vector<double> u(grid.n), ut(grid.n, 0.0);
        for (std::size_t i = 0; i < grid.n; ++i) u[i] = 0.4 * bumps::c3(grid.r(i), 2.0);
        const double dt = 0.5 * grid.h();

        auto us = u, uts = ut;
        std::vector<double> acc_p, acc_s;
        const double tp = time_ms(
            [&] { nonlinear_solver::leapfrog_step(u, ut, acc_p, grid, dim, dt); }, 20);
        const double ts = time_ms(
            [&] { nonlinear_solver::leapfrog_step_serial(us, uts, acc_s, grid, dim, dt); }, 20);
        bool equal = u == us && ut == uts;
        std::printf("leapfrog step, %zu nodes: serial %.2f ms, parallel %.2f ms (x%.2f)\n",
                    grid.n, ts, tp, ts / tp);
        std::printf("  bitwise equal after 20 steps: %s\n", equal ? "yes" : "NO");
    }
    return 0;
}
