#ifndef CRITWAVE_DIAGNOSTICS_HPP
#define CRITWAVE_DIAGNOSTICS_HPP

#include <array>
#include <string>
#include <vector>

#include "critwave/modulation.hpp"
#include "critwave/nonlinear_solver.hpp"

// Trajectory-level analyses: continuation-seeded modulation tracking,
// blow-up approach reports, velocity estimation from conserved quantities,
// and the sign-persistence monitor for the defect d_l.

namespace critwave::diagnostics {

using nonlinear_solver::Trajectory;

struct TrackRow {
    double t;
    double lambda;
    std::array<double, 3> center;
    double alpha;
    double dl;
};

struct TrackResult {
    std::vector<TrackRow> rows;
    bool truncated = false;
    std::string reason;
    // finite-difference parameter rates, for comparison against d_l
    std::vector<double> lambda_rate;  // |dlambda/dt| at interior rows
    double rate_band = 0.0;           // max |lambda'| / max |d_l| over the window
};

// Per-snapshot modulation fit, each seeded by the previous one. The series
// truncates (with a reason) as soon as a fit stops converging.
TrackResult track_modulation(const Trajectory& traj, double ell);

// -P/E from the conserved quantities. Throws std::domain_error when E <= 0
// (the velocity is undefined there).
std::array<double, 3> ell_from_conserved(const FieldState& state);

struct TrappingReport {
    std::vector<double> t;
    std::vector<double> dl;
    int sign_changes = 0;
    bool applicable = false;   // (E, P) close enough to the family normalization
    double e_mismatch = 0.0;   // relative
    double p_mismatch = 0.0;   // absolute, scaled by |E|
};

// d_l series and its sign changes, valid only near the normalization
// manifold E = E(W_l(0)), P = P(W_l(0)); tolerance is relative.
TrappingReport trapping_monitor(const Trajectory& traj, double ell,
                                double normalization_tol = 2e-2);

struct BlowupProfileReport {
    bool empty = true;
    double t_estimate = 0.0;
    double confidence = 0.0;
    std::array<double, 3> ell_estimate{0, 0, 0};
    std::vector<double> t;
    std::vector<double> lambda_over_remaining;  // lambda(t) / (T_est - t)
    std::vector<double> h1_distance;            // energy-space distance to the family
    bool monotone_trend = false;                // h1_distance decreasing overall
};

// Modulation fits over the approach window of a flagged blow-up trajectory.
BlowupProfileReport blowup_profile_report(const Trajectory& traj);

}  // namespace critwave::diagnostics

#endif
