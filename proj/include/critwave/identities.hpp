#ifndef CRITWAVE_IDENTITIES_HPP
#define CRITWAVE_IDENTITIES_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "critwave/nonlinear_solver.hpp"

// Virial-type identities along trajectories: for each identity the time
// derivative of a weighted functional is compared against the closed-form
// right-hand side, the derivative taken by centered differences over the
// stored snapshots. Primed identities assume compact support inside the
// grid; unprimed ones carry an explicit radial cutoff.

namespace critwave::identities {

using nonlinear_solver::Trajectory;

// 1 on [0, r1], quintic smoothstep down to 0 at r2 (C^2).
struct Cutoff {
    double r1;
    double r2;
    double value(double r) const;
    double slope(double r) const;
};

struct IdentityTrace {
    std::string identity_id;
    std::vector<double> t;       // interior snapshot times
    std::vector<double> lhs_dt;  // centered difference of the functional
    std::vector<double> rhs;
    std::vector<double> gap;
    double max_abs_gap = 0.0;
};

// identity_id one of:
//   "identity1p"  d/dt int u ut
//   "identity2p"  d/dt int x_1 d1u ut          (radial: (1/N) int r u_r ut dx)
//   "identity3p"  d/dt int x.grad(u) ut
//   "identity4p"  d/dt int x e(u)              (vanishes identically radially)
//   "identity5"   d^2/dt^2 int u^2
//   "identity1","identity3","identity4"        cutoff versions (phi required)
IdentityTrace identity_trace(const Trajectory& traj, const std::string& identity_id,
                             std::optional<Cutoff> phi = std::nullopt);

struct PhiSeries {
    std::vector<double> t;    // interior snapshot times
    std::vector<double> phi;  // the functional itself (all snapshots)
    std::vector<double> phi_t;
    std::vector<double> dl;
    std::vector<double> gap;  // |dPhi/dt - (dl + energy_offset)|
    double energy_offset = 0.0;  // K - N E(u0,u1); zero on the normalization manifold
    double max_abs_gap = 0.0;
};

// Phi(t) = (N-2) int x.grad(u) ut + (N-2)(N-1)/2 int u ut for ell = 0;
// its derivative equals d_l plus a conserved offset that vanishes exactly
// when E(u0,u1) = E(W,0).
PhiSeries phi_functional(const Trajectory& traj, double ell, double t_end);

struct ZSRecord {
    double Z = 0.0;
    std::array<double, 3> S{0, 0, 0};
    double z_rate = 0.0;  // int (ut + ell d1 u)^2, the t-derivative of Z
};

// Nonradial monotonicity functionals, evaluated statically on box states.
ZSRecord zs_functionals(const FieldState& state, double ell, double t, double t_ref);

// (int |grad W|^2 - int W^{2N/(N-2)}) / int |grad W|^2 by trapezoid
// quadrature with analytic tails; vanishing tests the Pohozaev identity.
double pohozaev_check(Dimension dim);

}  // namespace critwave::identities

#endif
