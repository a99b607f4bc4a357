#ifndef CRITWAVE_LINEAR_SOLVER_HPP
#define CRITWAVE_LINEAR_SOLVER_HPP

#include <array>
#include <functional>
#include <vector>

#include "critwave/field_state.hpp"

// Free-wave propagation for N = 3 radial data via v = r u, which satisfies
// the 1-D wave equation with odd reflection at r = 0. Evaluation times are
// restricted to integer multiples of the grid spacing so the d'Alembert
// formula reduces to exact node shifts of the (sampled) initial data.

namespace critwave::linear_solver {

class RadialPropagator3 {
  public:
    // state must be radial with N = 3 and (effectively) compact support.
    explicit RadialPropagator3(const FieldState& state);

    // t = k h for integer k (negative allowed). Throws std::invalid_argument
    // for off-characteristic times, truncation_error once the light cone of
    // the support leaves the grid.
    FieldState state_at(double t) const;

    // int |grad u|^2 + ut^2 at time t, evaluated in the transport variables;
    // conserved to roundoff while the support stays inside the grid.
    double energy_at(double t) const;

    // (1/2) int_{|x| >= |t|} (|grad u|^2 + ut^2) at time t = k h, using the
    // identity int_rho^inf ((v_r - v/r)^2 + w^2) dr =
    //          int_rho^inf (v_r^2 + w^2) dr + v(rho)^2 / rho.
    double exterior_half_energy(double t) const;

    double h() const { return grid_.h(); }
    double support_radius() const { return support_; }
    const RadialGrid& grid() const { return grid_; }

  private:
    RadialGrid grid_;
    std::vector<double> v0_;   // r u(0)
    std::vector<double> v1_;   // r ut(0)
    std::vector<double> V1_;   // cumulative integral of v1 (even extension)
    std::vector<double> dv0_;  // d/dr of v0 (even extension)
    double support_ = 0.0;

    long step_of(double t) const;
    double v0e(long j) const;   // odd extension of v0
    double v1e(long j) const;   // odd extension of v1
    double V1e(long j) const;   // even extension of V1, constant past the grid
    double dv0e(long j) const;  // even extension of dv0
};

FieldState evolve_linear_radial3(const FieldState& state, double t);

struct EquipartitionReport {
    std::vector<double> times;
    std::vector<double> e_plus;   // forward exterior series
    std::vector<double> e_minus;  // backward series (time reversal u1 -> -u1)
    double total = 0.0;           // (1/2)(|grad u0|^2 + |u1|^2)
    double asymptote_plus = 0.0;
    double asymptote_minus = 0.0;
    bool plateau_plus = false;
    bool plateau_minus = false;
};

// Exterior-energy series out to t_horizon in both time directions, with the
// asymptote read at the horizon once the relative change over the last
// decade of steps falls below 1e-6.
EquipartitionReport equipartition_report(const FieldState& data, double t_horizon);

// Spherical-means solution of the 3-D wave equation with data (u0, 0):
// z(t, x0) = d/dt [ t * mean_{|w|=1} u0(x0 + t w) ]. If grad_u0 is absent the
// time derivative falls back to a centered difference.
double kirchhoff_probe(const std::function<double(const double*)>& u0, double t,
                       const std::array<double, 3>& x0,
                       const std::function<void(const double*, double*)>& grad_u0 = nullptr);

}  // namespace critwave::linear_solver

#endif
