#include "critwave/nonlinear_solver.hpp"

#include <algorithm>
#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/fields.hpp"
#include "critwave/parallel.hpp"

namespace critwave::nonlinear_solver {

double cfl_dt(const RadialGrid& grid, const SolverOptions& opt) {
    opt.validate();
    return opt.cfl_safety * grid.h();
}

namespace {

inline double nonlin(double u, int N) {
    if (N == 3) {
        const double u2 = u * u;
        return u2 * u2 * u;  // |u|^4 u = u^5
    }
    return std::pow(std::abs(u), 4.0 / (N - 2)) * u;
}

// u_rr + (N-1)/r u_r + |u|^{4/(N-2)} u with the origin regularized by
// Delta u(0) = N u''(0) (even ghost node).
template <bool Parallel>
void acceleration(const std::vector<double>& u, std::vector<double>& a,
                  const RadialGrid& grid, int N) {
    const std::size_t n = grid.n;
    const double h = grid.h();
    const double ih2 = 1.0 / (h * h);
    auto body = [&](std::size_t i) {
        if (i == 0) {
            a[0] = N * 2.0 * (u[1] - u[0]) * ih2 + nonlin(u[0], N);
        } else if (i + 1 < n) {
            const double r = grid.r(i);
            a[i] = (u[i + 1] - 2.0 * u[i] + u[i - 1]) * ih2 +
                   (N - 1) / r * (u[i + 1] - u[i - 1]) / (2.0 * h) + nonlin(u[i], N);
        } else {
            a[n - 1] = 0.0;  // support must never reach here
        }
    };
    if constexpr (Parallel) parallel_for(n, body);
    else parallel_for_serial(n, body);
}

template <bool Parallel>
void step_impl(std::vector<double>& u, std::vector<double>& ut, std::vector<double>& accel,
               const RadialGrid& grid, Dimension dim, double dt) {
    const std::size_t n = grid.n;
    if (accel.size() != n) {
        accel.assign(n, 0.0);
        acceleration<Parallel>(u, accel, grid, dim.N);
    }
    auto kick_drift = [&](std::size_t i) {
        u[i] += dt * ut[i] + 0.5 * dt * dt * accel[i];
        ut[i] += 0.5 * dt * accel[i];
    };
    auto kick = [&](std::size_t i) { ut[i] += 0.5 * dt * accel[i]; };
    if constexpr (Parallel) parallel_for(n, kick_drift);
    else parallel_for_serial(n, kick_drift);
    acceleration<Parallel>(u, accel, grid, dim.N);
    if constexpr (Parallel) parallel_for(n, kick);
    else parallel_for_serial(n, kick);
}

}  // namespace

void leapfrog_step(std::vector<double>& u, std::vector<double>& ut, std::vector<double>& accel,
                   const RadialGrid& grid, Dimension dim, double dt) {
    step_impl<true>(u, ut, accel, grid, dim, dt);
}

void leapfrog_step_serial(std::vector<double>& u, std::vector<double>& ut,
                          std::vector<double>& accel, const RadialGrid& grid, Dimension dim,
                          double dt) {
    step_impl<false>(u, ut, accel, grid, dim, dt);
}

Trajectory evolve(const FieldState& state0, double T, const SolverOptions& opt) {
    opt.validate();
    state0.check_layout();
    if (!is_radial(state0.grid))
        throw std::invalid_argument("evolve: radial grids only");
    if (state0.dim.N != 3 && state0.dim.N != 5)
        throw std::invalid_argument("evolve: N must be 3 or 5");
    if (!state0.all_finite()) throw numeric_error("evolve: initial data not finite");

    const RadialGrid grid = std::get<RadialGrid>(state0.grid);
    const std::size_t n = grid.n;
    const double dt = cfl_dt(grid, opt);
    const long nsteps = std::lround(std::ceil(T / dt - 1e-12));

    double max0 = 0.0, support0 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        max0 = std::max(max0, std::abs(state0.u[i]));
        if (std::abs(state0.u[i]) > opt.support_eps || std::abs(state0.ut[i]) > opt.support_eps)
            support0 = grid.r(i);
    }
    if (support0 + T > grid.r_max)
        throw truncation_error("evolve: support plus T does not fit inside r_max");

    const double cap = opt.u_cap > 0.0 ? opt.u_cap : 1e3 * max0;

    Trajectory traj;
    traj.dim = state0.dim;
    traj.events.u_cap = cap;
    traj.events.drift_tol = opt.drift_tol;

    std::vector<double> u = state0.u, ut = state0.ut, accel;
    const double E0 = fields::conserved_quantities(state0).E;
    const double escale = std::max(std::abs(E0), 1e-30);

    auto snapshot = [&](double t) {
        FieldState s(state0.grid, state0.dim);
        s.u = u;
        s.ut = ut;
        const double drift = std::abs(fields::conserved_quantities(s).E - E0) / escale;
        traj.times.push_back(t);
        traj.snapshots.push_back(std::move(s));
        traj.events.drift.push_back(drift);
    };

    snapshot(0.0);
    traj.events.amp.emplace_back(0.0, max0);

    const std::size_t guard = n >= 4 ? n - 3 : n - 1;
    for (long k = 1; k <= nsteps; ++k) {
        leapfrog_step(u, ut, accel, grid, state0.dim, dt);
        const double t = double(k) * dt;

        double umax = 0.0;
        for (double x : u) umax = std::max(umax, std::abs(x));
        traj.events.amp.emplace_back(t, umax);

        if (!std::isfinite(umax)) throw numeric_error("evolve: non-finite values");
        if (std::abs(u[guard]) > opt.support_eps || std::abs(ut[guard]) > opt.support_eps)
            throw truncation_error("evolve: support reached r_max");

        if (umax >= cap) {
            traj.events.blowup = true;
            traj.events.t_halt = t;
            snapshot(t);
            return traj;
        }
        if (k % (long)opt.snapshot_stride == 0 || k == nsteps) snapshot(t);
    }
    traj.events.t_halt = traj.times.back();
    return traj;
}

std::optional<BlowupEstimate> detect_blowup(const Trajectory& traj) {
    if (!traj.events.blowup) return std::nullopt;
    const auto& amp = traj.events.amp;
    if (amp.empty()) return std::nullopt;

    const double a0 = std::max(amp.front().second, 1e-300);
    const double ratio = std::sqrt(2.0);

    // first crossing time of each geometric threshold a0 * ratio^j, j >= 1
    std::vector<std::pair<double, double>> cross;  // (t, amplitude at crossing)
    double level = a0 * ratio;
    for (const auto& [t, a] : amp) {
        while (a >= level) {
            cross.emplace_back(t, a);
            level *= ratio;
        }
    }
    if (cross.size() < 4) return std::nullopt;

    // A CFL-type instability breaks energy conservation early in the run; a
    // genuine blow-up conserves until the core stops being resolved, shortly
    // before the halt. Reject runs whose drift broke in their first 70%.
    const double break_tol =
        std::clamp(100.0 * traj.events.drift_tol, 1e-6, 1e-1);
    double t_break = traj.events.t_halt;
    for (std::size_t k = 0; k < traj.events.drift.size(); ++k)
        if (traj.events.drift[k] > break_tol) {
            t_break = traj.times[k];
            break;
        }
    if (t_break < 0.7 * traj.events.t_halt) return std::nullopt;

    // linear fit of y = max|u|^{-2/(N-2)} against t through all crossings;
    // the resolved phase fixes the slope and the terminal cluster pins the
    // intercept near the blow-up time
    const std::size_t from = 0;
    const double ex = -2.0 / (traj.dim.N - 2);
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = from; i < cross.size(); ++i) {
        const double t = cross[i].first;
        const double y = std::pow(cross[i].second, ex);
        st += t;
        sy += y;
        stt += t * t;
        sty += t * y;
    }
    const double m = double(cross.size() - from);
    const double denom = m * stt - st * st;
    if (std::abs(denom) < 1e-300) return std::nullopt;
    const double slope = (m * sty - st * sy) / denom;
    const double icept = (sy * stt - st * sty) / denom;
    if (!(slope < 0.0)) return std::nullopt;  // y must decrease toward 0

    BlowupEstimate est;
    est.T_estimate = -icept / slope;
    est.crossings = cross.size();
    double ss = 0.0, scale = 0.0;
    for (std::size_t i = from; i < cross.size(); ++i) {
        const double y = std::pow(cross[i].second, ex);
        const double fit = icept + slope * cross[i].first;
        ss += (y - fit) * (y - fit);
        scale += y * y;
    }
    est.confidence = std::sqrt(ss / std::max(scale, 1e-300));
    return est;
}

}  // namespace critwave::nonlinear_solver
