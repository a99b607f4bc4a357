#include "critwave/fields.hpp"

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/parallel.hpp"

namespace critwave::fields {

namespace {

// Trapezoid weight along one box axis.
inline double axis_weight(std::size_t i, std::size_t m, double h) {
    return (i == 0 || i == m - 1) ? 0.5 * h : h;
}

}  // namespace

double integrate(std::span<const double> f, const Grid& grid, Dimension dim) {
    if (f.size() != grid_size(grid))
        throw std::invalid_argument("integrate: field layout does not match grid");
    if (const auto* rg = std::get_if<RadialGrid>(&grid)) {
        const double h = rg->h();
        const double om = dim.sphere_area();
        const std::size_t n = rg->n;
        return reduce_indexed(n, [&](std::size_t i) {
            const double r = rg->r(i);
            const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
            return om * w * std::pow(r, dim.N - 1) * f[i];
        });
    }
    const auto& bg = std::get<BoxGrid3D>(grid);
    const double h = bg.h();
    const std::size_t m = bg.m;
    return reduce_indexed(m * m * m, [&](std::size_t idx) {
        const std::size_t k = idx % m;
        const std::size_t j = (idx / m) % m;
        const std::size_t i = idx / (m * m);
        return axis_weight(i, m, h) * axis_weight(j, m, h) * axis_weight(k, m, h) * f[idx];
    });
}

std::vector<double> radial_derivative(std::span<const double> u, const RadialGrid& g) {
    const std::size_t n = g.n;
    if (u.size() != n) throw std::invalid_argument("radial_derivative: bad layout");
    const double h = g.h();
    std::vector<double> d(n);
    d[0] = 0.0;  // radial regularity: u is even in r
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
    return d;
}

std::vector<double> box_derivative(std::span<const double> u, const BoxGrid3D& g, int axis) {
    const std::size_t m = g.m;
    if (u.size() != m * m * m) throw std::invalid_argument("box_derivative: bad layout");
    if (axis < 0 || axis > 2) throw std::invalid_argument("box_derivative: bad axis");
    const double h = g.h();
    const std::size_t stride = axis == 0 ? m * m : (axis == 1 ? m : 1);
    std::vector<double> d(m * m * m);
    parallel_for(m * m * m, [&](std::size_t idx) {
        std::size_t pos;
        if (axis == 0) pos = idx / (m * m);
        else if (axis == 1) pos = (idx / m) % m;
        else pos = idx % m;
        double v;
        if (pos >= 2 && pos + 2 < m) {
            v = (-u[idx + 2 * stride] + 8.0 * u[idx + stride] - 8.0 * u[idx - stride] +
                 u[idx - 2 * stride]) /
                (12.0 * h);
        } else if (pos >= 1 && pos + 1 < m) {
            v = (u[idx + stride] - u[idx - stride]) / (2.0 * h);
        } else if (pos == 0) {
            v = (-3.0 * u[idx] + 4.0 * u[idx + stride] - u[idx + 2 * stride]) / (2.0 * h);
        } else {
            v = (3.0 * u[idx] - 4.0 * u[idx - stride] + u[idx - 2 * stride]) / (2.0 * h);
        }
        d[idx] = v;
    });
    return d;
}

Conserved conserved_quantities(const FieldState& state) {
    state.check_layout();
    const Dimension dim = state.dim;
    const double coeff = dim.potential_coeff();
    const double pexp = dim.critical_exponent();
    Conserved out;
    if (const auto* rg = std::get_if<RadialGrid>(&state.grid)) {
        const std::vector<double> ur = radial_derivative(state.u, *rg);
        std::vector<double> dens(rg->n);
        for (std::size_t i = 0; i < rg->n; ++i)
            dens[i] = 0.5 * state.ut[i] * state.ut[i] + 0.5 * ur[i] * ur[i] -
                      coeff * std::pow(std::abs(state.u[i]), pexp);
        out.E = integrate(dens, state.grid, dim);
        // momentum of a radial state vanishes by symmetry
        return out;
    }
    const auto& bg = std::get<BoxGrid3D>(state.grid);
    std::array<std::vector<double>, 3> grad;
    for (int a = 0; a < 3; ++a) grad[a] = box_derivative(state.u, bg, a);
    const std::size_t n = state.size();
    std::vector<double> dens(n);
    parallel_for(n, [&](std::size_t i) {
        const double g2 =
            grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] + grad[2][i] * grad[2][i];
        dens[i] = 0.5 * state.ut[i] * state.ut[i] + 0.5 * g2 -
                  coeff * std::pow(std::abs(state.u[i]), pexp);
    });
    out.E = integrate(dens, state.grid, dim);
    for (int a = 0; a < 3; ++a) {
        parallel_for(n, [&](std::size_t i) { dens[i] = state.ut[i] * grad[a][i]; });
        out.P[a] = integrate(dens, state.grid, dim);
    }
    return out;
}

std::vector<double> energy_density(const FieldState& state) {
    state.check_layout();
    const Dimension dim = state.dim;
    const double coeff = dim.potential_coeff();
    const double pexp = dim.critical_exponent();
    const std::size_t n = state.size();
    std::vector<double> dens(n);
    if (const auto* rg = std::get_if<RadialGrid>(&state.grid)) {
        const std::vector<double> ur = radial_derivative(state.u, *rg);
        for (std::size_t i = 0; i < n; ++i)
            dens[i] = 0.5 * ur[i] * ur[i] + 0.5 * state.ut[i] * state.ut[i] -
                      coeff * std::pow(std::abs(state.u[i]), pexp);
        return dens;
    }
    const auto& bg = std::get<BoxGrid3D>(state.grid);
    std::array<std::vector<double>, 3> grad;
    for (int a = 0; a < 3; ++a) grad[a] = box_derivative(state.u, bg, a);
    parallel_for(n, [&](std::size_t i) {
        const double g2 =
            grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i] + grad[2][i] * grad[2][i];
        dens[i] = 0.5 * g2 + 0.5 * state.ut[i] * state.ut[i] -
                  coeff * std::pow(std::abs(state.u[i]), pexp);
    });
    return dens;
}

ExteriorEnergy exterior_energy(const FieldState& state, double rho) {
    state.check_layout();
    if (rho < 0.0) throw std::invalid_argument("exterior_energy: rho must be nonnegative");
    const Dimension dim = state.dim;
    ExteriorEnergy out;
    if (const auto* rg = std::get_if<RadialGrid>(&state.grid)) {
        if (rho > rg->r_max) {
            out.truncated = true;
            return out;
        }
        const std::vector<double> ur = radial_derivative(state.u, *rg);
        const double h = rg->h();
        const double om = dim.sphere_area();
        const std::size_t n = rg->n;
        auto dens = [&](std::size_t i) {
            const double r = rg->r(i);
            return om * std::pow(r, dim.N - 1) *
                   (ur[i] * ur[i] + state.ut[i] * state.ut[i]);
        };
        // full trapezoid from the first node at or above rho, plus the
        // linearly interpolated partial cell containing rho
        const std::size_t k = (std::size_t)std::ceil(rho / h - 1e-12);
        double sum = 0.0;
        for (std::size_t i = k; i < n; ++i) {
            const double w = (i == k || i == n - 1) ? 0.5 * h : h;
            sum += w * dens(i);
        }
        if (k > 0 && k < n) {
            const double rk = rg->r(k);
            const double frac = rk - rho;  // width of the partial cell
            if (frac > 0) {
                const double t = (rho - rg->r(k - 1)) / h;
                const double drho = dens(k - 1) * (1.0 - t) + dens(k) * t;
                sum += 0.5 * frac * (drho + dens(k));
            }
        }
        out.value = sum;
        return out;
    }
    const auto& bg = std::get<BoxGrid3D>(state.grid);
    const double diag = bg.half_width * std::sqrt(3.0);
    if (rho > diag) {
        out.truncated = true;
        return out;
    }
    std::array<std::vector<double>, 3> grad;
    for (int a = 0; a < 3; ++a) grad[a] = box_derivative(state.u, bg, a);
    const double h = bg.h();
    const std::size_t m = bg.m;
    out.value = reduce_indexed(m * m * m, [&](std::size_t idx) {
        const std::size_t k = idx % m;
        const std::size_t j = (idx / m) % m;
        const std::size_t i = idx / (m * m);
        const double x = bg.coord(i), y = bg.coord(j), z = bg.coord(k);
        const double r = std::sqrt(x * x + y * y + z * z);
        // ramp the indicator over one cell width
        double ind = (r - rho) / h + 0.5;
        ind = ind < 0.0 ? 0.0 : (ind > 1.0 ? 1.0 : ind);
        if (ind == 0.0) return 0.0;
        const double g2 =
            grad[0][idx] * grad[0][idx] + grad[1][idx] * grad[1][idx] + grad[2][idx] * grad[2][idx];
        return ind * axis_weight(i, m, h) * axis_weight(j, m, h) * axis_weight(k, m, h) *
               (g2 + state.ut[idx] * state.ut[idx]);
    });
    return out;
}

double dl_functional(const FieldState& state, double ell) {
    check_boost(ell);
    const ExteriorEnergy full = exterior_energy(state, 0.0);
    return full.value - closed_forms::family_grad_sq(ell, state.dim) -
           closed_forms::family_ut_sq(ell, state.dim);
}

std::array<double, 3> first_moment_energy(const FieldState& state) {
    state.check_layout();
    if (is_radial(state.grid)) return {0.0, 0.0, 0.0};  // odd integrand
    const auto& bg = std::get<BoxGrid3D>(state.grid);
    const std::vector<double> dens = energy_density(state);
    const double h = bg.h();
    const std::size_t m = bg.m;
    std::array<double, 3> out{};
    for (int a = 0; a < 3; ++a) {
        out[a] = reduce_indexed(m * m * m, [&](std::size_t idx) {
            const std::size_t k = idx % m;
            const std::size_t j = (idx / m) % m;
            const std::size_t i = idx / (m * m);
            const double xa = bg.coord(a == 0 ? i : (a == 1 ? j : k));
            return xa * axis_weight(i, m, h) * axis_weight(j, m, h) * axis_weight(k, m, h) *
                   dens[idx];
        });
    }
    return out;
}

VariationalReport variational_region(const FieldState& state) {
    state.check_layout();
    const double K = closed_forms::ground_state_norms(state.dim).K;
    const double tol = 1e-9 * K;

    double grad_sq, ut_sq;
    if (const auto* rg = std::get_if<RadialGrid>(&state.grid)) {
        const std::vector<double> ur = radial_derivative(state.u, *rg);
        std::vector<double> f(rg->n);
        for (std::size_t i = 0; i < rg->n; ++i) f[i] = ur[i] * ur[i];
        grad_sq = integrate(f, state.grid, state.dim);
        for (std::size_t i = 0; i < rg->n; ++i) f[i] = state.ut[i] * state.ut[i];
        ut_sq = integrate(f, state.grid, state.dim);
    } else {
        const auto& bg = std::get<BoxGrid3D>(state.grid);
        std::vector<double> f(state.size(), 0.0);
        for (int a = 0; a < 3; ++a) {
            const std::vector<double> da = box_derivative(state.u, bg, a);
            for (std::size_t i = 0; i < f.size(); ++i) f[i] += da[i] * da[i];
        }
        grad_sq = integrate(f, state.grid, state.dim);
        for (std::size_t i = 0; i < f.size(); ++i) f[i] = state.ut[i] * state.ut[i];
        ut_sq = integrate(f, state.grid, state.dim);
    }

    VariationalReport rep;
    rep.grad_sq = grad_sq;
    rep.weighted_norm_sq = grad_sq + 0.5 * (state.dim.N - 2) * ut_sq;
    if (grad_sq < K - tol) rep.region = VariationalRegion::below_W;
    else if (grad_sq > 2.0 * K + tol) rep.region = VariationalRegion::above_2W;
    else rep.region = VariationalRegion::between;
    rep.below_global_threshold = rep.weighted_norm_sq < K - tol;
    return rep;
}

FieldState sample_radial(const RadialGrid& g, Dimension dim,
                         const std::function<double(double)>& u0,
                         const std::function<double(double)>& u1) {
    FieldState st(Grid{g}, dim);
    for (std::size_t i = 0; i < g.n; ++i) {
        st.u[i] = u0(g.r(i));
        st.ut[i] = u1 ? u1(g.r(i)) : 0.0;
    }
    return st;
}

FieldState sample_box(const BoxGrid3D& g,
                      const std::function<double(const double*)>& u0,
                      const std::function<double(const double*)>& u1) {
    FieldState st(Grid{g}, Dimension(3));
    const std::size_t m = g.m;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            for (std::size_t k = 0; k < m; ++k) {
                const double pt[3] = {g.coord(i), g.coord(j), g.coord(k)};
                const std::size_t idx = g.index(i, j, k);
                st.u[idx] = u0(pt);
                st.ut[idx] = u1 ? u1(pt) : 0.0;
            }
    return st;
}

}  // namespace critwave::fields
