#ifndef CRITWAVE_CLOSED_FORMS_HPP
#define CRITWAVE_CLOSED_FORMS_HPP

#include <span>

#include "critwave/dimension.hpp"
#include "critwave/field_state.hpp"
#include "critwave/grid.hpp"

// Closed forms for the ground state W, the boosted family W_l, their
// derivatives, and the exact norms/energies of the family. Everything here
// is hand-differentiated; no numerical differencing.
//
//   W(x)      = (1 + |x|^2/(N(N-2)))^{-(N-2)/2}
//   W_l(t,x)  = W((x_1 - t l)/sqrt(1-l^2), x_2, ..., x_N)
//
// W solves  Delta W + W^{(N+2)/(N-2)} = 0,  and W_l solves the full wave
// equation; both facts are used as machine-precision self-tests elsewhere.

namespace critwave::closed_forms {

// --- ground state at a point ------------------------------------------------

double eval_W(std::span<const double> x, Dimension dim);

// Radial profile and its first two derivatives.
double W_radial(double r, Dimension dim);
double dW_radial(double r, Dimension dim);
double d2W_radial(double r, Dimension dim);

// Gradient and Hessian diagonal contraction helpers for box points (N = 3).
void W_grad3(const double x[3], double grad[3]);
// (N-2)/2 W + x.grad W, the generator of the scaling symmetry.
double LambdaW3(const double x[3]);

// --- boosted family ----------------------------------------------------------

// Value, first derivatives and the pieces of the wave operator for the full
// soliton  sign * lambda^{-(N-2)/2} W_l(t/lambda, (x-c)/lambda)  at (t,x).
struct SolitonJet {
    double u = 0.0;
    double ut = 0.0;
    double utt = 0.0;
    double grad[5] = {0, 0, 0, 0, 0};
    double lap = 0.0;
};

SolitonJet soliton_jet(double t, std::span<const double> x, const SolitonParams& p);

// d^2/dt^2 u - Delta u - |u|^{4/(N-2)} u at (t,x); zero up to roundoff.
double pde_residual(double t, std::span<const double> x, const SolitonParams& p);

// Sample (u, du/dt) of the family member on a grid. Radial grids require
// ell = 0 and center = 0 (the boosted members are not radial).
FieldState eval_soliton_state(double t, const SolitonParams& p, const Grid& grid);

// --- exact quantities ----------------------------------------------------------

ExactQuantities exact_quantities(double ell, Dimension dim);

struct GroundStateNorms {
    double K;         // int |grad W|^2
    double energy_W;  // E(W, 0) = K/N
    double sobolev_C; // best Sobolev constant, K^{-1/N}
};

// Radial quadrature with analytic far-field correction, cached per dimension.
const GroundStateNorms& ground_state_norms(Dimension dim);

// int |W|^{2N/(N-2)}, same quadrature route (equals K by the Pohozaev identity;
// kept as an independent integral so the identity is actually tested).
double ground_state_potential(Dimension dim);

// H^1 norms of the fit's tangent directions (any single d_j W, and LambdaW =
// (N-2)/2 W + x.grad W), cached per dimension.
struct TangentNorms {
    double djW_h1_sq;
    double LambdaW_h1_sq;
};
const TangentNorms& tangent_norms(Dimension dim);

// Absolute family quantities (ratios of exact_quantities times the cached K).
double family_grad_sq(double ell, Dimension dim);
double family_ut_sq(double ell, Dimension dim);
double family_energy(double ell, Dimension dim);
double family_momentum_e1(double ell, Dimension dim);
double family_potential(double ell, Dimension dim);  // = sqrt(1-l^2) K

// Same quantities assembled from fresh 1-D trapezoid quadratures of the
// reduced radial profiles (independent of the Gauss-Legendre route above).
struct FamilyNorms {
    double grad_sq, ut_sq, energy, momentum_e1;
};
FamilyNorms family_norms_radial_reduction(double ell, Dimension dim,
                                          std::size_t n = 1 << 15, double r_cut = 800.0);

// --- box-exterior corrections -------------------------------------------------

// Integrals of the family densities over a centered box, by composite
// Gauss-Legendre on the closed forms (N = 3 only). Used to split exact
// full-space values into interior + exterior parts when comparing against
// trapezoid quadrature of sampled states.
struct BoxQuantities {
    double grad_sq = 0, ut_sq = 0, potential = 0, momentum_e1 = 0;
    double xmoment_e1 = 0;  // int x_1 e(u)
    double energy() const;  // assembled with the N = 3 coefficient
};

BoxQuantities family_box_interior(const SolitonParams& p, const BoxGrid3D& box,
                                  double t = 0.0, int panels = 12, int points = 12);
BoxQuantities family_box_exterior(const SolitonParams& p, const BoxGrid3D& box,
                                  double t = 0.0);

}  // namespace critwave::closed_forms

#endif
