#ifndef CRITWAVE_BUMPS_HPP
#define CRITWAVE_BUMPS_HPP

namespace critwave::bumps {

// (1 - (r/R)^2)^4 inside r < R, zero outside; C^3 across the edge.
inline double c3(double r, double R = 1.0) {
    const double s = 1.0 - (r / R) * (r / R);
    return s > 0.0 ? s * s * s * s : 0.0;
}

inline double c3_dr(double r, double R = 1.0) {
    const double x = r / R;
    const double s = 1.0 - x * x;
    return s > 0.0 ? -8.0 * x * s * s * s / R : 0.0;
}

// c3 shape with the first moment removed: int_0^R r u(r) dr = 0, so linear
// free-wave tails vanish and exterior-energy plateaus are reached at finite
// time instead of O(1/t).
inline double moment_free(double r, double R = 1.0) {
    const double x = r / R;
    const double s = 1.0 - x * x;
    return s > 0.0 ? s * s * s * s * (1.0 / 6.0 - x * x) : 0.0;
}

}  // namespace critwave::bumps

#endif
