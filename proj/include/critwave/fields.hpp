#ifndef CRITWAVE_FIELDS_HPP
#define CRITWAVE_FIELDS_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "critwave/closed_forms.hpp"
#include "critwave/field_state.hpp"

// Quadrature and the scalar functionals of the energy space: energy,
// momentum, energy density, exterior energy, the defect d_l measuring
// distance-in-norm to the boosted family, and first energy moments.

namespace critwave::fields {

// Trapezoid quadrature of a sampled scalar field: weight om_{N-1} r^{N-1} on
// radial grids, tensor trapezoid on box grids. Summation order is fixed and
// independent of thread count.
double integrate(std::span<const double> f, const Grid& grid, Dimension dim);

// Radial derivative du/dr: centered in the interior, 0 at r = 0 (radial
// regularity), one-sided at r_max.
std::vector<double> radial_derivative(std::span<const double> u, const RadialGrid& g);

// One gradient component on a box grid: fourth-order centered stencils in
// the interior, centered/one-sided near the faces.
std::vector<double> box_derivative(std::span<const double> u, const BoxGrid3D& g, int axis);

struct Conserved {
    double E = 0.0;
    std::array<double, 3> P{0.0, 0.0, 0.0};
};

// E = 1/2 int ut^2 + 1/2 int |grad u|^2 - (N-2)/(2N) int |u|^{2N/(N-2)},
// P = int ut grad u. Radial states have P = 0 identically.
Conserved conserved_quantities(const FieldState& state);

// e(u) = 1/2 |grad u|^2 + 1/2 ut^2 - (N-2)/(2N) |u|^{2N/(N-2)} nodewise.
std::vector<double> energy_density(const FieldState& state);

struct ExteriorEnergy {
    double value = 0.0;
    bool truncated = false;  // rho fell beyond the grid
};

// int_{|x| >= rho} (|grad u|^2 + ut^2); the cell containing rho is weighted
// by linear interpolation.
ExteriorEnergy exterior_energy(const FieldState& state, double rho);

// |grad u|^2 + |ut|^2 - |grad W_l(0)|^2 - |dt W_l(0)|^2, the reference norms
// coming from the exact family formulas scaled by the cached K.
double dl_functional(const FieldState& state, double ell);

// int x e(u) componentwise; zero on radial grids by symmetry.
std::array<double, 3> first_moment_energy(const FieldState& state);

enum class VariationalRegion { below_W, between, above_2W };

struct VariationalReport {
    VariationalRegion region;
    bool below_global_threshold;  // |grad u|^2 + (N-2)/2 |ut|^2 < K
    double grad_sq;
    double weighted_norm_sq;
};

// Classifies |grad u|^2 against K and 2K (closed comparisons at 1e-9 K).
VariationalReport variational_region(const FieldState& state);

// Sampling helpers used by tests and scenarios.
FieldState sample_radial(const RadialGrid& g, Dimension dim,
                         const std::function<double(double)>& u0,
                         const std::function<double(double)>& u1);
FieldState sample_box(const BoxGrid3D& g,
                      const std::function<double(const double*)>& u0,
                      const std::function<double(const double*)>& u1);

}  // namespace critwave::fields

#endif
