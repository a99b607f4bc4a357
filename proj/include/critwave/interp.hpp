#ifndef CRITWAVE_INTERP_HPP
#define CRITWAVE_INTERP_HPP

#include <cmath>
#include <cstddef>
#include <span>

namespace critwave::interp {

// Lagrange interpolation through npts consecutive samples of a uniform grid,
// evaluated at fractional index xi. The stencil is centered on xi and
// clamped at the ends. npts = 4 is the usual cubic; npts = 6 gives the
// sixth-order variant used where parameter recovery needs the accuracy.
inline double lagrange_uniform(std::span<const double> f, double xi, int npts) {
    const long n = (long)f.size();
    if (n == 0) return 0.0;
    if (npts > (int)n) npts = (int)n;
    long s = (long)std::floor(xi) - (npts / 2 - 1);
    if (s < 0) s = 0;
    if (s > n - npts) s = n - npts;
    const double u = xi - double(s);
    double acc = 0.0;
    for (int i = 0; i < npts; ++i) {
        double basis = 1.0;
        for (int j = 0; j < npts; ++j) {
            if (j == i) continue;
            basis *= (u - j) / double(i - j);
        }
        acc += basis * f[(std::size_t)(s + i)];
    }
    return acc;
}

}  // namespace critwave::interp

#endif
