#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "critwave/bumps.hpp"
#include "critwave/closed_forms.hpp"
#include "critwave/diagnostics.hpp"
#include "critwave/fields.hpp"
#include "critwave/identities.hpp"

using namespace critwave;
namespace cf = critwave::closed_forms;
namespace nls = critwave::nonlinear_solver;
namespace diag = critwave::diagnostics;

namespace {
const Dimension kDim(3);

nls::Trajectory static_trajectory(const FieldState& st, std::vector<double> times) {
    nls::Trajectory traj;
    traj.dim = st.dim;
    traj.times = times;
    traj.snapshots.assign(times.size(), st);
    traj.events.drift.assign(times.size(), 0.0);
    traj.events.t_halt = times.back();
    return traj;
}
}  // namespace

TEST_CASE("track_modulation on the stationary family") {
    const RadialGrid rg(800.0, (1 << 14) + 1);
    SolitonParams p;
    const FieldState w = cf::eval_soliton_state(0.0, p, Grid{rg});
    const auto traj = static_trajectory(w, {0.0, 0.1, 0.2, 0.3});
    const auto track = diag::track_modulation(traj, 0.0);
    REQUIRE(track.rows.size() == 4);
    CHECK(!track.truncated);
    for (const auto& row : track.rows) {
        CHECK(row.lambda == doctest::Approx(1.0).epsilon(1e-8));
        CHECK(std::abs(row.alpha) <= 1e-8);
    }
}

TEST_CASE("track_modulation follows a gently perturbed state") {
    const RadialGrid rg(800.0, (1 << 14) + 1);
    const identities::Cutoff taper{200.0, 300.0};
    FieldState u0 = fields::sample_radial(
        rg, kDim,
        [&](double r) {
            return cf::W_radial(r, kDim) * taper.value(r) +
                   1e-3 * bumps::c3(r, 2.0) * std::cos(3.0 * r);
        },
        nullptr);
    nls::SolverOptions opt;
    opt.snapshot_stride = 4;
    opt.drift_tol = 1e-3;
    const auto traj = nls::evolve(u0, 0.5, opt);
    const auto track = diag::track_modulation(traj, 0.0);
    REQUIRE(!track.rows.empty());
    CHECK(!track.truncated);
    for (const auto& row : track.rows) {
        CHECK(row.lambda == doctest::Approx(1.0).epsilon(1e-2));
        CHECK(std::abs(row.alpha) <= 1e-2);
    }
    CHECK(track.rate_band < 100.0);
}

TEST_CASE("track_modulation truncates on basin exit") {
    // a state far from the family fails immediately with a reason
    const RadialGrid rg(800.0, (1 << 14) + 1);
    FieldState junk = fields::sample_radial(
        rg, kDim, [](double r) { return 0.8 * bumps::c3(r, 3.0) * std::sin(4.0 * r); },
        nullptr);
    const auto traj = static_trajectory(junk, {0.0, 0.1, 0.2});
    const auto track = diag::track_modulation(traj, 0.0);
    CHECK(track.truncated);
    CHECK(track.rows.empty());
    CHECK(!track.reason.empty());
}

TEST_CASE("velocity from conserved quantities") {
    SUBCASE("radial states carry zero momentum exactly") {
        const RadialGrid rg(20.0, 1025);
        FieldState st = fields::sample_radial(
            rg, kDim, [](double r) { return bumps::c3(r, 2.0); },
            [](double r) { return 0.3 * bumps::c3(r, 1.5); });
        const auto ell = diag::ell_from_conserved(st);
        CHECK(ell[0] == 0.0);
        CHECK(ell[1] == 0.0);
        CHECK(ell[2] == 0.0);
    }

    SUBCASE("E <= 0 has no velocity") {
        const RadialGrid rg(20.0, 1025);
        FieldState zero(Grid{rg}, kDim);
        CHECK_THROWS_AS(diag::ell_from_conserved(zero), std::domain_error);
    }

    SUBCASE("axis-aligned rotation equivariance on box states") {
        const BoxGrid3D bg(8.0, 48);
        SolitonParams p;
        p.ell = 0.3;
        const FieldState st = cf::eval_soliton_state(0.0, p, Grid{bg});
        const auto e0 = diag::ell_from_conserved(st);

        // rotate the grid by 90 degrees about x3: (x1, x2) -> (-x2, x1)
        FieldState rot(st.grid, kDim);
        const std::size_t m = bg.m;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j)
                for (std::size_t k = 0; k < m; ++k) {
                    rot.u[bg.index(i, j, k)] = st.u[bg.index(j, m - 1 - i, k)];
                    rot.ut[bg.index(i, j, k)] = st.ut[bg.index(j, m - 1 - i, k)];
                }
        const auto e1 = diag::ell_from_conserved(rot);
        CHECK(e1[0] == doctest::Approx(-e0[1]).epsilon(1e-12));
        CHECK(e1[1] == doctest::Approx(e0[0]).epsilon(1e-12));
        CHECK(e1[2] == doctest::Approx(e0[2]).epsilon(1e-12));
    }

    SUBCASE("scale invariance") {
        const BoxGrid3D bg(8.0, 48);
        SolitonParams p;
        p.ell = 0.2;
        const FieldState st = cf::eval_soliton_state(0.0, p, Grid{bg});
        const auto e0 = diag::ell_from_conserved(st);
        const auto e1 = diag::ell_from_conserved(rescale_state(st, 2.0));
        CHECK(e1[0] == doctest::Approx(e0[0]).epsilon(1e-12));
    }
}

TEST_CASE("trapping monitor") {
    // the taper must be wide: cutting the 1/r tail over a shell of width w
    // adds ~ 12 pi (10/7) / w of gradient norm regardless of the radius
    const RadialGrid rg(800.0, (1 << 14) + 1);
    const identities::Cutoff taper{300.0, 700.0};
    auto tapered_w = [&](double amp) {
        return fields::sample_radial(
            rg, kDim,
            [&](double r) { return amp * cf::W_radial(r, kDim) * taper.value(r); }, nullptr);
    };
    nls::SolverOptions opt;
    opt.snapshot_stride = 4;
    opt.drift_tol = 1e-3;

    SUBCASE("sampled ground state: no sign changes") {
        const auto traj = static_trajectory(tapered_w(1.0), {0.0, 0.1, 0.2});
        const auto rep = diag::trapping_monitor(traj, 0.0);
        REQUIRE(rep.applicable);
        CHECK(rep.sign_changes == 0);
    }

    SUBCASE("slightly supercritical amplitude keeps its sign") {
        const auto traj = nls::evolve(tapered_w(1.02), 0.5, opt);
        const auto rep = diag::trapping_monitor(traj, 0.0);
        REQUIRE(rep.applicable);
        CHECK(rep.sign_changes == 0);
        for (double d : rep.dl) CHECK(d > 0.0);
    }

    SUBCASE("slightly subcritical amplitude keeps its sign") {
        const auto traj = nls::evolve(tapered_w(0.98), 0.5, opt);
        const auto rep = diag::trapping_monitor(traj, 0.0);
        REQUIRE(rep.applicable);
        CHECK(rep.sign_changes == 0);
        for (double d : rep.dl) CHECK(d < 0.0);
    }

    SUBCASE("energy far from the family is not applicable") {
        const RadialGrid small(20.0, 1025);
        FieldState bump = fields::sample_radial(
            small, kDim, [](double r) { return 0.3 * bumps::c3(r, 2.0); }, nullptr);
        const auto traj = static_trajectory(bump, {0.0, 0.1, 0.2});
        const auto rep = diag::trapping_monitor(traj, 0.0);
        CHECK(!rep.applicable);
        CHECK(rep.dl.empty());
    }
}

TEST_CASE("blow-up profile report") {
    SUBCASE("bounded trajectories give an empty report") {
        const RadialGrid rg(8.0, 513);
        FieldState st = fields::sample_radial(
            rg, kDim, [](double r) { return 0.1 * bumps::c3(r); }, nullptr);
        nls::Trajectory traj;
        traj.dim = kDim;
        traj.times = {0.0, 0.1};
        traj.snapshots = {st, st};
        traj.events.drift = {0.0, 0.0};
        CHECK(diag::blowup_profile_report(traj).empty);
    }

    SUBCASE("synthetic self-similar approach") {
        // snapshots are exact members with lambda(t) = (T - t)^2, T = 2, and
        // the amplitude series follows the matching self-similar law
        const double T = 2.0;
        const RadialGrid rg(800.0, (1 << 13) + 1);
        nls::Trajectory traj;
        traj.dim = kDim;
        for (double t : {0.0, 0.5, 1.0}) {
            SolitonParams p;
            p.lambda = (T - t) * (T - t);
            traj.times.push_back(t);
            traj.snapshots.push_back(cf::eval_soliton_state(0.0, p, Grid{rg}));
            traj.events.drift.push_back(0.0);
        }
        traj.events.blowup = true;
        traj.events.t_halt = 1.999;
        for (double t = 0.0; t < 1.999; t += 1e-3)
            traj.events.amp.emplace_back(t, std::pow(T - t, -0.5));

        const auto rep = diag::blowup_profile_report(traj);
        REQUIRE(!rep.empty);
        CHECK(rep.t_estimate == doctest::Approx(T).epsilon(1e-3));
        CHECK(std::abs(rep.ell_estimate[0]) <= 1e-6);
        REQUIRE(rep.lambda_over_remaining.size() == 3);
        // lambda / (T - t) = (T - t) decreases toward the blow-up time
        CHECK(rep.lambda_over_remaining[0] > rep.lambda_over_remaining[1]);
        CHECK(rep.lambda_over_remaining[1] > rep.lambda_over_remaining[2]);
        CHECK(rep.lambda_over_remaining[2] == doctest::Approx(T - 1.0).epsilon(1e-2));
    }
}
