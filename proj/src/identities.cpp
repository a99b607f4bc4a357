#include "critwave/identities.hpp"

#include <cmath>
#include <functional>

#include "critwave/errors.hpp"
#include "critwave/fields.hpp"
#include "critwave/quadrature.hpp"

namespace critwave::identities {

double Cutoff::value(double r) const {
    if (r <= r1) return 1.0;
    if (r >= r2) return 0.0;
    const double s = (r - r1) / (r2 - r1);
    return 1.0 - s * s * s * (10.0 - 15.0 * s + 6.0 * s * s);
}

double Cutoff::slope(double r) const {
    if (r <= r1 || r >= r2) return 0.0;
    const double s = (r - r1) / (r2 - r1);
    return -30.0 * s * s * (1.0 - s) * (1.0 - s) / (r2 - r1);
}

namespace {

struct SnapshotScalars {
    double ut_sq, grad_sq, pot;  // int ut^2, int |grad u|^2, int |u|^{2N/(N-2)}
    double u_ut;                 // int u ut
    double rur_ut;               // int x.grad(u) ut = int r u_r ut
    double u_sq;                 // int u^2
};

SnapshotScalars scalars(const FieldState& s) {
    const auto& rg = std::get<RadialGrid>(s.grid);
    const Dimension dim = s.dim;
    const auto ur = fields::radial_derivative(s.u, rg);
    const double pexp = dim.critical_exponent();
    std::vector<double> f(rg.n);
    SnapshotScalars out;
    auto integ = [&](const std::function<double(std::size_t)>& g) {
        for (std::size_t i = 0; i < rg.n; ++i) f[i] = g(i);
        return fields::integrate(f, s.grid, dim);
    };
    out.ut_sq = integ([&](std::size_t i) { return s.ut[i] * s.ut[i]; });
    out.grad_sq = integ([&](std::size_t i) { return ur[i] * ur[i]; });
    out.pot = integ([&](std::size_t i) { return std::pow(std::abs(s.u[i]), pexp); });
    out.u_ut = integ([&](std::size_t i) { return s.u[i] * s.ut[i]; });
    out.rur_ut = integ([&](std::size_t i) { return rg.r(i) * ur[i] * s.ut[i]; });
    out.u_sq = integ([&](std::size_t i) { return s.u[i] * s.u[i]; });
    return out;
}

// Functional F and right-hand side R for one identity, from precomputed
// snapshot scalars (primed set) or a cutoff quadrature (unprimed set).
struct Row {
    double F, R;
};

Row eval_identity(const FieldState& s, const SnapshotScalars& sc, const std::string& id,
                  const std::optional<Cutoff>& phi, double E0) {
    const Dimension dim = s.dim;
    const int N = dim.N;
    if (id == "identity1p")
        return {sc.u_ut, sc.ut_sq - sc.grad_sq + sc.pot};
    if (id == "identity2p")
        return {sc.rur_ut / N,
                0.5 * (-sc.ut_sq + sc.grad_sq - (N - 2.0) / N * sc.pot) - sc.grad_sq / N};
    if (id == "identity3p")
        return {sc.rur_ut, -0.5 * N * sc.ut_sq + 0.5 * (N - 2) * (sc.grad_sq - sc.pot)};
    if (id == "identity4p")
        return {0.0, 0.0};  // both sides vanish identically for radial states
    if (id == "identity5")
        return {sc.u_sq, 4.0 / (N - 2) * sc.grad_sq + 4.0 * (N - 1) / (N - 2) * sc.ut_sq -
                             4.0 * N / (N - 2) * E0};

    if (!phi) throw std::invalid_argument("identity_trace: cutoff identities need phi");
    const auto& rg = std::get<RadialGrid>(s.grid);
    const auto ur = fields::radial_derivative(s.u, rg);
    const double pexp = dim.critical_exponent();
    std::vector<double> f(rg.n), g(rg.n);

    if (id == "identity1") {
        for (std::size_t i = 0; i < rg.n; ++i) {
            const double r = rg.r(i);
            f[i] = phi->value(r) * s.u[i] * s.ut[i];
            g[i] = (s.ut[i] * s.ut[i] - ur[i] * ur[i] + std::pow(std::abs(s.u[i]), pexp)) *
                       phi->value(r) -
                   s.u[i] * ur[i] * phi->slope(r);
        }
        return {fields::integrate(f, s.grid, dim), fields::integrate(g, s.grid, dim)};
    }
    if (id == "identity2") {
        // with a radial cutoff the integrand phi d1u ut is odd in x1, so both
        // sides vanish identically for radial data
        return {0.0, 0.0};
    }
    if (id == "identity3") {
        // vector field Phi = phi(r) x: div Phi = N phi + r phi',
        // sum_jk dku dju djPhi_k = (phi + r phi') u_r^2 for radial u
        for (std::size_t i = 0; i < rg.n; ++i) {
            const double r = rg.r(i);
            f[i] = phi->value(r) * r * ur[i] * s.ut[i];
            g[i] = 0.5 *
                       (-s.ut[i] * s.ut[i] + ur[i] * ur[i] -
                        (N - 2.0) / N * std::pow(std::abs(s.u[i]), pexp)) *
                       (N * phi->value(r) + r * phi->slope(r)) -
                   (phi->value(r) + r * phi->slope(r)) * ur[i] * ur[i];
        }
        return {fields::integrate(f, s.grid, dim), fields::integrate(g, s.grid, dim)};
    }
    if (id == "identity4") {
        const double coeff = dim.potential_coeff();
        for (std::size_t i = 0; i < rg.n; ++i) {
            const double r = rg.r(i);
            const double e = 0.5 * ur[i] * ur[i] + 0.5 * s.ut[i] * s.ut[i] -
                             coeff * std::pow(std::abs(s.u[i]), pexp);
            f[i] = phi->value(r) * e;
            g[i] = -phi->slope(r) * ur[i] * s.ut[i];
        }
        return {fields::integrate(f, s.grid, dim), fields::integrate(g, s.grid, dim)};
    }
    throw std::invalid_argument("identity_trace: unknown identity id '" + id + "'");
}

}  // namespace

IdentityTrace identity_trace(const Trajectory& traj, const std::string& identity_id,
                             std::optional<Cutoff> phi) {
    if (traj.size() < 3) throw std::invalid_argument("identity_trace: need >= 3 snapshots");
    if (!is_radial(traj.at(0).grid))
        throw std::invalid_argument("identity_trace: radial trajectories only");

    const std::size_t m = traj.size();
    const double E0 = fields::conserved_quantities(traj.at(0)).E;

    std::vector<Row> rows(m);
    for (std::size_t k = 0; k < m; ++k) {
        const SnapshotScalars sc = scalars(traj.at(k));
        rows[k] = eval_identity(traj.at(k), sc, identity_id, phi, E0);
    }

    const bool second_order = identity_id == "identity5";
    IdentityTrace out;
    out.identity_id = identity_id;
    for (std::size_t k = 1; k + 1 < m; ++k) {
        const double dtm = traj.times[k] - traj.times[k - 1];
        const double dtp = traj.times[k + 1] - traj.times[k];
        double lhs;
        if (second_order) {
            // centered second difference (snapshots are uniformly spaced)
            lhs = (rows[k + 1].F - 2.0 * rows[k].F + rows[k - 1].F) / (dtp * dtm);
        } else {
            lhs = (rows[k + 1].F - rows[k - 1].F) / (dtp + dtm);
        }
        out.t.push_back(traj.times[k]);
        out.lhs_dt.push_back(lhs);
        out.rhs.push_back(rows[k].R);
        out.gap.push_back(std::abs(lhs - rows[k].R));
    }
    for (double g : out.gap) out.max_abs_gap = std::max(out.max_abs_gap, g);
    return out;
}

PhiSeries phi_functional(const Trajectory& traj, double ell, double t_end) {
    (void)t_end;  // the (t_end - t) ell weight vanishes for ell = 0
    if (ell != 0.0)
        throw std::invalid_argument("phi_functional: radial trajectories carry ell = 0");
    if (traj.size() < 3) throw std::invalid_argument("phi_functional: need >= 3 snapshots");
    const int N = traj.dim.N;
    const double K = closed_forms::ground_state_norms(traj.dim).K;
    const double E0 = fields::conserved_quantities(traj.at(0)).E;

    PhiSeries out;
    out.energy_offset = K - N * E0;

    std::vector<double> F(traj.size());
    std::vector<double> dl(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const SnapshotScalars sc = scalars(traj.at(k));
        F[k] = (N - 2) * sc.rur_ut + 0.5 * (N - 2) * (N - 1) * sc.u_ut;
        dl[k] = sc.grad_sq + sc.ut_sq - K;  // d_l at ell = 0
    }
    out.phi = F;
    for (std::size_t k = 1; k + 1 < traj.size(); ++k) {
        const double span = traj.times[k + 1] - traj.times[k - 1];
        const double d = (F[k + 1] - F[k - 1]) / span;
        out.t.push_back(traj.times[k]);
        out.phi_t.push_back(d);
        out.dl.push_back(dl[k]);
        out.gap.push_back(std::abs(d - (dl[k] + out.energy_offset)));
    }
    for (double g : out.gap) out.max_abs_gap = std::max(out.max_abs_gap, g);
    return out;
}

ZSRecord zs_functionals(const FieldState& state, double ell, double t, double t_ref) {
    check_boost(ell);
    if (is_radial(state.grid))
        throw std::invalid_argument("zs_functionals: box states only (nonradial functionals)");
    state.check_layout();
    const auto& bg = std::get<BoxGrid3D>(state.grid);
    const Dimension dim = state.dim;
    const int N = dim.N;
    const double shift = (t_ref - t) * ell;

    std::array<std::vector<double>, 3> grad;
    for (int a = 0; a < 3; ++a) grad[a] = fields::box_derivative(state.u, bg, a);
    const std::size_t n = state.size();
    std::vector<double> f(n);

    // Z = (l^2-1) int (x + shift e1).grad(u) ut + (N-2)/2 (l^2-1) int u ut
    //     - l^2 int (x_1 + shift) d1u ut
    const double l2m1 = ell * ell - 1.0;
    for (std::size_t idx = 0; idx < n; ++idx) {
        const std::size_t k = idx % bg.m;
        const std::size_t j = (idx / bg.m) % bg.m;
        const std::size_t i = idx / (bg.m * bg.m);
        const double x1 = bg.coord(i), x2 = bg.coord(j), x3 = bg.coord(k);
        const double xg = (x1 + shift) * grad[0][idx] + x2 * grad[1][idx] + x3 * grad[2][idx];
        f[idx] = l2m1 * (xg + 0.5 * (N - 2) * state.u[idx]) * state.ut[idx] -
                 ell * ell * (x1 + shift) * grad[0][idx] * state.ut[idx];
    }
    ZSRecord out;
    out.Z = fields::integrate(f, state.grid, dim);

    for (std::size_t idx = 0; idx < n; ++idx) {
        const double d = state.ut[idx] + ell * grad[0][idx];
        f[idx] = d * d;
    }
    out.z_rate = fields::integrate(f, state.grid, dim);

    const auto moment = fields::first_moment_energy(state);
    const double E = fields::conserved_quantities(state).E;
    out.S = {moment[0] + shift * E, moment[1], moment[2]};
    return out;
}

double pohozaev_check(Dimension dim) {
    const auto q = closed_forms::family_norms_radial_reduction(0.0, dim);
    // at ell = 0 the reduction gives grad_sq = K and energy = K/2 - coeff P,
    // so recover the potential integral from those two
    const double pot = (0.5 * q.grad_sq - q.energy) / dim.potential_coeff();
    return (q.grad_sq - pot) / q.grad_sq;
}

}  // namespace critwave::identities
