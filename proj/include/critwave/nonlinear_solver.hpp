#ifndef CRITWAVE_NONLINEAR_SOLVER_HPP
#define CRITWAVE_NONLINEAR_SOLVER_HPP

#include <optional>
#include <utility>
#include <vector>

#include "critwave/field_state.hpp"

// Radial leapfrog integration of u_tt = u_rr + (N-1)/r u_r + |u|^{4/(N-2)} u
// for N in {3,5}, with energy-drift monitoring and amplitude-based blow-up
// detection. The scheme is velocity-Verlet, so stepping is exactly
// time-symmetric: forward then backward recovers the data to roundoff.

namespace critwave::nonlinear_solver {

struct SolverOptions {
    double cfl_safety = 0.5;       // dt = cfl_safety * h
    double u_cap = 0.0;            // 0 means 1e3 * max|u0|
    double drift_tol = 1e-5;       // relative energy-drift bound
    std::size_t snapshot_stride = 16;
    double support_eps = 1e-14;

    void validate() const {
        if (!(cfl_safety > 0.0) || cfl_safety > 0.9)
            throw std::invalid_argument("SolverOptions: cfl_safety must lie in (0, 0.9]");
        if (u_cap < 0.0 || !(drift_tol > 0.0) || snapshot_stride == 0)
            throw std::invalid_argument("SolverOptions: fields must be positive");
    }
};

struct SolverEvents {
    bool blowup = false;
    double t_halt = 0.0;
    double u_cap = 0.0;
    double drift_tol = 1e-5;                         // copied from the options
    std::vector<double> drift;                       // per snapshot
    std::vector<std::pair<double, double>> amp;      // (t, max|u|) per step
};

struct Trajectory {
    std::vector<double> times;            // snapshot times, strictly increasing
    std::vector<FieldState> snapshots;
    SolverEvents events;
    Dimension dim{3};

    const FieldState& at(std::size_t k) const { return snapshots.at(k); }
    std::size_t size() const { return snapshots.size(); }
};

double cfl_dt(const RadialGrid& grid, const SolverOptions& opt);

Trajectory evolve(const FieldState& state0, double T, const SolverOptions& opt);

// One leapfrog step (exposed for the reversal test and the benchmark).
void leapfrog_step(std::vector<double>& u, std::vector<double>& ut,
                   std::vector<double>& accel, const RadialGrid& grid, Dimension dim,
                   double dt);
void leapfrog_step_serial(std::vector<double>& u, std::vector<double>& ut,
                          std::vector<double>& accel, const RadialGrid& grid, Dimension dim,
                          double dt);

struct BlowupEstimate {
    double T_estimate = 0.0;
    double confidence = 0.0;  // normalized rms residual of the linear fit
    std::size_t crossings = 0;
};

// Fits max|u|^{-2/(N-2)} ~ c (T - t) through the geometric-threshold crossing
// times. Returns nothing for bounded runs, fewer than 4 crossings, or runs
// whose energy drift was already broken before the growth phase.
std::optional<BlowupEstimate> detect_blowup(const Trajectory& traj);

}  // namespace critwave::nonlinear_solver

#endif
