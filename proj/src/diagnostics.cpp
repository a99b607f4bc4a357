#include "critwave/diagnostics.hpp"

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/fields.hpp"

namespace critwave::diagnostics {

TrackResult track_modulation(const Trajectory& traj, double ell) {
    TrackResult out;
    std::optional<modulation::InitGuess> seed;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const auto f = modulation::fit(traj.at(k), ell, seed);
        if (!f.converged) {
            out.truncated = true;
            out.reason = "fit stopped converging at t = " + std::to_string(traj.times[k]);
            break;
        }
        out.rows.push_back({traj.times[k], f.lambda, f.center, f.alpha,
                            fields::dl_functional(traj.at(k), ell)});
        seed = modulation::InitGuess{f.lambda, f.center};
    }
    double max_rate = 0.0, max_dl = 0.0;
    for (std::size_t k = 1; k + 1 < out.rows.size(); ++k) {
        const double rate = std::abs((out.rows[k + 1].lambda - out.rows[k - 1].lambda) /
                                     (out.rows[k + 1].t - out.rows[k - 1].t));
        out.lambda_rate.push_back(rate);
        max_rate = std::max(max_rate, rate);
        max_dl = std::max(max_dl, std::abs(out.rows[k].dl));
    }
    out.rate_band = max_dl > 0.0 ? max_rate / max_dl : 0.0;
    return out;
}

std::array<double, 3> ell_from_conserved(const FieldState& state) {
    const auto c = fields::conserved_quantities(state);
    if (!(c.E > 0.0))
        throw std::domain_error("ell_from_conserved: velocity undefined for E <= 0");
    return {-c.P[0] / c.E, -c.P[1] / c.E, -c.P[2] / c.E};
}

TrappingReport trapping_monitor(const Trajectory& traj, double ell, double normalization_tol) {
    TrappingReport rep;
    if (traj.size() == 0) return rep;
    const Dimension dim = traj.dim;
    const double e_ref = closed_forms::family_energy(ell, dim);
    const double p_ref = closed_forms::family_momentum_e1(ell, dim);

    const auto c0 = fields::conserved_quantities(traj.at(0));
    rep.e_mismatch = std::abs(c0.E - e_ref) / std::abs(e_ref);
    rep.p_mismatch = std::abs(c0.P[0] - p_ref) / std::abs(e_ref);
    rep.applicable = rep.e_mismatch <= normalization_tol && rep.p_mismatch <= normalization_tol;
    if (!rep.applicable) return rep;

    int prev = 0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const double d = fields::dl_functional(traj.at(k), ell);
        rep.t.push_back(traj.times[k]);
        rep.dl.push_back(d);
        const int sgn = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sgn != 0 && prev != 0 && sgn != prev) ++rep.sign_changes;
        if (sgn != 0) prev = sgn;
    }
    return rep;
}

BlowupProfileReport blowup_profile_report(const Trajectory& traj) {
    BlowupProfileReport rep;
    const auto est = nonlinear_solver::detect_blowup(traj);
    if (!est) return rep;
    rep.empty = false;
    rep.t_estimate = est->T_estimate;
    rep.confidence = est->confidence;
    rep.ell_estimate = ell_from_conserved(traj.at(0));

    // diagnostic fits accept any Newton root; the reported distance states
    // how far from the family the windowed state actually is
    modulation::FitOptions opt;
    opt.basin_factor = 1e6;
    std::optional<modulation::InitGuess> seed;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.times[k] >= rep.t_estimate) break;
        const auto f = modulation::fit(traj.at(k), 0.0, seed, opt);
        if (!f.converged) {
            seed.reset();
            continue;
        }
        seed = modulation::InitGuess{f.lambda, f.center};
        rep.t.push_back(traj.times[k]);
        rep.lambda_over_remaining.push_back(f.lambda / (rep.t_estimate - traj.times[k]));
        rep.h1_distance.push_back(std::sqrt(f.residual_f_norm * f.residual_f_norm +
                                            f.utilde1_norm * f.utilde1_norm));
    }
    if (rep.h1_distance.size() >= 2)
        rep.monotone_trend = rep.h1_distance.back() < rep.h1_distance.front();
    return rep;
}

}  // namespace critwave::diagnostics
