#ifndef CRITWAVE_MODULATION_HPP
#define CRITWAVE_MODULATION_HPP

#include <array>
#include <optional>
#include <vector>

#include "critwave/field_state.hpp"

// Modulation decomposition near the boosted family: after unboosting, fit
// (lambda, center) by Newton iteration on the H^1 orthogonality conditions
// against {d1 W, ..., dN W, (N-2)/2 W + x.grad W}, with the amplitude alpha
// eliminated through the projection on W. All inner products are taken in
// the form <v, T> = -int v (Delta T) dx, with Delta T = -q W^{q-1} T for
// every generator T, so only the sampled field enters the quadrature.

namespace critwave::modulation {

// (u~, u~1) with u~(x) = u(sqrt(1-l^2) x1, xbar) and
// u~1 = (ut + l d1 u)(sqrt(1-l^2) x1, xbar). Sixth-order Lagrange resampling
// along x1. Radial states require ell = 0 (identity).
FieldState unboost(const FieldState& state, double ell);

struct FitOptions {
    int max_iter = 50;
    double newton_tol_factor = 1e-12;  // stop when max residual <= factor * K
    double fd_step = 1e-6;             // Jacobian step, times parameter scale
    // a converged Newton root only counts as a fit while the remainder stays
    // inside the basin |f|^2 + |u~1|^2 <= basin_factor * K; diagnostics that
    // only want the root raise this
    double basin_factor = 0.1;
};

struct InitGuess {
    double lambda = 1.0;
    std::array<double, 3> center{0, 0, 0};
};

struct ModulationFit {
    double lambda = 1.0;
    std::array<double, 3> center{0, 0, 0};
    double alpha = 0.0;
    int sign = +1;
    double ell = 0.0;
    double residual_f_norm = 0.0;          // H^1 norm of the remainder f
    double utilde1_norm = 0.0;             // L^2 norm of u~1
    std::vector<double> ortho_residuals;   // N+1 entries
    bool converged = false;
    int iterations = 0;
};

// Residuals of an unboosted state at given (lambda, center): the H^1 inner
// products against d_j W (j = 1..N) and Lambda W of the rescaled field,
// with the fitted multiple of W removed.
std::vector<double> ortho_residuals(const FieldState& unboosted, double lambda,
                                    const std::array<double, 3>& center);

// Full fit: unboost, pick the sign and an initial guess from the amplitude
// peak unless one is supplied, then Newton on (lambda, center).
ModulationFit fit(const FieldState& state, double ell,
                  std::optional<InitGuess> init = std::nullopt, const FitOptions& opt = {});

struct EstimateReport {
    std::vector<double> alpha_ratio;  // |alpha| / (|d_l| / K)
    std::vector<double> fnorm_ratio;  // (|grad f| + |u~1|) / (|d_l| / K)
    double band_lo = 0.0;
    double band_hi = 0.0;
    std::size_t excluded = 0;  // rows with |d_l| below 1e-12
};

// Empirical comparability band over a family of converged fits; the defect
// is normalized by K so the ratios are dimensionless.
EstimateReport estimate_report(const std::vector<ModulationFit>& fits,
                               const std::vector<double>& dl_values, double K);

}  // namespace critwave::modulation

#endif
