// Acceptance suite: one line per criterion, pinned tolerances, exit code is
// the number of failed criteria. Heavier than the unit tests; budget a few
// minutes in total on a laptop-class machine.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "critwave/bumps.hpp"
#include "critwave/closed_forms.hpp"
#include "critwave/diagnostics.hpp"
#include "critwave/fields.hpp"
#include "critwave/identities.hpp"
#include "critwave/linear_solver.hpp"
#include "critwave/modulation.hpp"
#include "critwave/nonlinear_solver.hpp"
#include "critwave/rng.hpp"
#include "critwave/scenario.hpp"

using namespace critwave;
namespace cf = critwave::closed_forms;
namespace nls = critwave::nonlinear_solver;
namespace ls = critwave::linear_solver;
namespace idn = critwave::identities;
namespace mod = critwave::modulation;

namespace {

int failures = 0;

void report(int criterion, const std::string& what, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion,
                what.c_str(), detail.c_str());
    if (!pass) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

// --- 1: pointwise residual of the family --------------------------------------
void criterion1() {
    Timer timer;
    SplitMix64 rng(2024);
    double worst = 0.0;
    for (int N : {3, 5})
        for (double ell : {0.0, 0.3, 0.7}) {
            SolitonParams p;
            p.dim = Dimension(N);
            p.ell = ell;
            for (int k = 0; k < 1000; ++k) {
                double x[5];
                for (int j = 0; j < N; ++j) x[j] = rng.uniform(-5.0, 5.0);
                const double t = rng.uniform(-1.0, 1.0);
                worst = std::max(
                    worst, std::abs(cf::pde_residual(t, std::span<const double>(x, N), p)));
            }
        }
    report(1, "closed-form wave-equation residual <= 1e-10", worst <= 1e-10,
           "max residual " + fmt(worst) + ", " + fmt(timer.seconds()) + " s");
}

// --- 2: exact family quantities vs quadrature ---------------------------------
void criterion2() {
    Timer timer;
    double worst_radial = 0.0;
    for (int N : {3, 5}) {
        const Dimension dim(N);
        for (double ell : {0.0, 0.2, 0.5}) {
            const auto q = cf::family_norms_radial_reduction(ell, dim);
            worst_radial = std::max(
                worst_radial, std::abs(q.grad_sq / cf::family_grad_sq(ell, dim) - 1.0));
            worst_radial = std::max(
                worst_radial, std::abs(q.energy / cf::family_energy(ell, dim) - 1.0));
            if (ell != 0.0) {
                worst_radial = std::max(
                    worst_radial, std::abs(q.ut_sq / cf::family_ut_sq(ell, dim) - 1.0));
                worst_radial =
                    std::max(worst_radial,
                             std::abs(q.momentum_e1 / cf::family_momentum_e1(ell, dim) - 1.0));
            }
        }
    }

    const BoxGrid3D box(8.0, 128);
    double worst_box = 0.0;
    for (double ell : {0.0, 0.2, 0.5}) {
        SolitonParams p;
        p.ell = ell;
        const FieldState st = cf::eval_soliton_state(0.0, p, Grid{box});
        const auto c = fields::conserved_quantities(st);
        const auto vr = fields::variational_region(st);
        const auto ext = cf::family_box_exterior(p, box);
        worst_box = std::max(worst_box, std::abs((vr.grad_sq + ext.grad_sq) /
                                                     cf::family_grad_sq(ell, p.dim) -
                                                 1.0));
        worst_box = std::max(
            worst_box,
            std::abs((c.E + ext.energy()) / cf::family_energy(ell, p.dim) - 1.0));
        if (ell != 0.0) {
            const double ut_quad = vr.weighted_norm_sq - vr.grad_sq;  // (N-2)/2 = 1/2 weight
            worst_box = std::max(worst_box, std::abs((2.0 * ut_quad + ext.ut_sq) /
                                                         cf::family_ut_sq(ell, p.dim) -
                                                     1.0));
            worst_box = std::max(
                worst_box, std::abs((c.P[0] + ext.momentum_e1) /
                                        cf::family_momentum_e1(ell, p.dim) -
                                    1.0));
        }
    }
    const bool pass = worst_radial <= 1e-6 && worst_box <= 1e-3;
    report(2, "family norms: radial reduction <= 1e-6, box (m=128) <= 1e-3", pass,
           "radial " + fmt(worst_radial) + ", box " + fmt(worst_box) + ", " +
               fmt(timer.seconds()) + " s");
}

// --- 3: equipartition of free waves -------------------------------------------
void criterion3() {
    Timer timer;
    const Dimension dim(3);
    const RadialGrid rg(12.0, 4096);

    FieldState a = fields::sample_radial(rg, dim, [](double r) { return bumps::c3(r); },
                                         nullptr);
    const auto repA = ls::equipartition_report(a, 10.0);
    const double errA = std::abs(repA.asymptote_plus / (2.0 * repA.total) - 0.25);

    FieldState b = fields::sample_radial(rg, dim, [](double) { return 0.0; },
                                         [](double r) { return bumps::moment_free(r); });
    const auto repB = ls::equipartition_report(b, 10.0);
    const double errB = std::abs(repB.asymptote_plus / (2.0 * repB.total) - 0.25);

    FieldState c = fields::sample_radial(
        rg, dim, [](double r) { return 0.7 * bumps::c3(r); },
        [](double r) { return 0.4 * bumps::c3(r, 0.9); });
    const auto repC = ls::equipartition_report(c, 10.0);
    const double errC =
        std::abs((repC.asymptote_plus + repC.asymptote_minus) / repC.total - 1.0);

    const bool pass = errA <= 1e-3 && errB <= 1e-3 && errC <= 1e-3;
    report(3, "linear exterior-energy equipartition at n = 4096", pass,
           "(u0,0) " + fmt(errA) + ", (0,u1) " + fmt(errB) + ", sum law " + fmt(errC) +
               ", " + fmt(timer.seconds()) + " s");
}

// --- 4: stationary integral identity ------------------------------------------
void criterion4() {
    Timer timer;
    double worst = 0.0;
    for (int N : {3, 4, 5})
        worst = std::max(worst, std::abs(idn::pohozaev_check(Dimension(N))));
    report(4, "gradient/potential identity of W <= 1e-8", worst <= 1e-8,
           "max " + fmt(worst) + ", " + fmt(timer.seconds()) + " s");
}

// --- 5: identity traces under refinement --------------------------------------
void criterion5() {
    Timer timer;
    const Dimension dim(3);
    auto gaps = [&](std::size_t n, double* hdt) {
        const RadialGrid rg(4.0, n);
        FieldState u0 = fields::sample_radial(
            rg, dim, [](double r) { return 0.5 * bumps::c3(r); }, nullptr);
        nls::SolverOptions opt;
        opt.cfl_safety = 0.5;
        opt.snapshot_stride = 4;
        opt.drift_tol = 1e-4;
        const auto traj = nls::evolve(u0, 1.0, opt);
        const double dt = nls::cfl_dt(rg, opt);
        *hdt = rg.h() * rg.h() + dt * dt;
        std::map<std::string, double> out;
        const idn::Cutoff phi{0.5, 1.5};
        for (const std::string id :
             {"identity1p", "identity3p", "identity5", "identity4", "identity4p"})
            out[id] = idn::identity_trace(
                          traj, id,
                          id == "identity4" ? std::optional<idn::Cutoff>(phi) : std::nullopt)
                          .max_abs_gap;
        return out;
    };
    double hdt1 = 0, hdt2 = 0;
    const auto g1 = gaps(1024, &hdt1);
    const auto g2 = gaps(2048, &hdt2);

    bool pass = true;
    std::ostringstream detail;
    for (const std::string id : {"identity1p", "identity3p", "identity5", "identity4"}) {
        const double ratio = g1.at(id) / g2.at(id);
        const bool ok = g1.at(id) <= 100.0 * hdt1 && ratio >= 3.2 && ratio <= 4.8;
        pass = pass && ok;
        detail << id << " ratio " << fmt(ratio) << " ";
    }
    // the vector-moment identity is identically zero for radial data; its
    // content is carried by the cutoff energy-flux trace above
    pass = pass && g1.at("identity4p") <= 1e-12;
    detail << "degenerate-moment gap " << fmt(g1.at("identity4p"));
    report(5, "identity traces: gaps <= C(h^2+dt^2), refinement ratio in [3.2, 4.8]", pass,
           detail.str() + ", " + fmt(timer.seconds()) + " s");
}

// --- 6: conservation and reversal ----------------------------------------------
void criterion6() {
    Timer timer;
    const Dimension dim(3);
    const RadialGrid rg(4.0, 2048);
    FieldState u0 = fields::sample_radial(
        rg, dim, [](double r) { return 0.08 * bumps::c3(r, 2.5); }, nullptr);
    nls::SolverOptions opt;
    opt.cfl_safety = 0.25;  // the drift has matching h^2 and dt^2 parts
    opt.snapshot_stride = 16;
    opt.drift_tol = 1e-5;
    const auto traj = nls::evolve(u0, 1.0, opt);
    double drift = 0.0;
    for (double d : traj.events.drift) drift = std::max(drift, d);

    const double dt = nls::cfl_dt(rg, opt);
    const long steps = std::lround(std::ceil(1.0 / dt - 1e-12));
    std::vector<double> u = u0.u, ut = u0.ut, accel;
    for (long k = 0; k < steps; ++k) nls::leapfrog_step(u, ut, accel, rg, dim, dt);
    for (double& v : ut) v = -v;
    accel.clear();
    for (long k = 0; k < steps; ++k) nls::leapfrog_step(u, ut, accel, rg, dim, dt);
    double rev = 0.0;
    for (std::size_t i = 0; i < rg.n; ++i) {
        rev = std::max(rev, std::abs(u[i] - u0.u[i]));
        rev = std::max(rev, std::abs(-ut[i] - u0.ut[i]));
    }
    const bool pass = drift <= 1e-6 && rev <= 1e-10;
    report(6, "energy drift <= 1e-6 at n = 2048, exact reversal <= 1e-10", pass,
           "drift " + fmt(drift) + ", reversal " + fmt(rev) + ", " + fmt(timer.seconds()) +
               " s");
}

// --- 7: modulation exact recovery ----------------------------------------------
void criterion7() {
    Timer timer;
    const Dimension dim(3);
    const double K = cf::ground_state_norms(dim).K;
    const BoxGrid3D box(8.0, 128);
    double worst_lambda = 0.0, worst_alpha = 0.0, worst_res = 0.0;
    bool all_converged = true;
    for (double lambda : {0.5, 1.0, 1.7})
        for (double ell : {0.0, 0.3}) {
            SolitonParams p;
            p.ell = ell;
            p.lambda = lambda;
            p.center = {0.137, -0.251, 0.083};  // off the grid nodes
            const FieldState st = cf::eval_soliton_state(0.0, p, Grid{box});
            const auto f = mod::fit(st, ell);
            all_converged = all_converged && f.converged;
            worst_lambda = std::max(worst_lambda, std::abs(f.lambda / lambda - 1.0));
            worst_alpha = std::max(worst_alpha, std::abs(f.alpha));
            for (double r : f.ortho_residuals) worst_res = std::max(worst_res, std::abs(r));
        }
    const bool pass = all_converged && worst_lambda <= 1e-6 && worst_alpha <= 1e-6 &&
                      worst_res <= 1e-9 * K;
    report(7, "modulation fit recovers exact members", pass,
           "lambda " + fmt(worst_lambda) + ", alpha " + fmt(worst_alpha) + ", ortho " +
               fmt(worst_res) + " (tol " + fmt(1e-9 * K) + "), " + fmt(timer.seconds()) +
               " s");
}

// --- 8: comparability band ------------------------------------------------------
void criterion8() {
    Timer timer;
    const Dimension dim(3);
    const double K = cf::ground_state_norms(dim).K;
    const RadialGrid rg(800.0, (1 << 15) + 1);

    const double lamW = cf::tangent_norms(dim).LambdaW_h1_sq;
    const std::size_t n = rg.n;
    std::vector<double> prof(n), wW(n), wL(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rg.r(i);
        prof[i] = bumps::c3(r, 3.0) * std::cos(2.0 * r);
        const double Wv = cf::W_radial(r, dim);
        wW[i] = std::pow(Wv, 5.0);
        wL[i] = 5.0 * std::pow(Wv, 4.0) * (0.5 * Wv + r * cf::dW_radial(r, dim));
    }
    auto proj = [&](const std::vector<double>& f, const std::vector<double>& w) {
        std::vector<double> prod(n);
        for (std::size_t i = 0; i < n; ++i) prod[i] = f[i] * w[i];
        return fields::integrate(prod, Grid{rg}, dim);
    };
    const double aW = proj(prof, wW) / K;
    const double aL = proj(prof, wL) / lamW;
    std::vector<double> f0(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double r = rg.r(i);
        f0[i] = prof[i] - aW * cf::W_radial(r, dim) -
                aL * (0.5 * cf::W_radial(r, dim) + r * cf::dW_radial(r, dim));
    }
    const auto d0 = fields::radial_derivative(f0, rg);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = d0[i] * d0[i];
    const double nrm = std::sqrt(fields::integrate(sq, Grid{rg}, dim));
    for (double& v : f0) v /= nrm;

    const double tail = 4.0 * M_PI * 3.0 * (1.0 / 800.0 - 3.0 / std::pow(800.0, 3));
    std::vector<mod::ModulationFit> fits;
    std::vector<double> dls;
    bool converged = true;
    for (double eps : {1e-4, 3e-4, 1e-3, 3e-3, 1e-2}) {
        const double amp = 1.0 + 0.5 * eps;
        FieldState st(Grid{rg}, dim);
        for (std::size_t i = 0; i < n; ++i)
            st.u[i] = amp * cf::W_radial(rg.r(i), dim) + eps * f0[i];
        const auto f = mod::fit(st, 0.0);
        converged = converged && f.converged;
        if (!f.converged) continue;
        fits.push_back(f);
        dls.push_back(fields::dl_functional(st, 0.0) + amp * amp * tail);
    }
    const auto band = mod::estimate_report(fits, dls, K);
    const bool pass =
        converged && band.band_lo >= 0.1 && band.band_hi <= 10.0 && band.excluded == 0;
    report(8, "comparability ratios in a band [1/10, 10]", pass,
           "band [" + fmt(band.band_lo) + ", " + fmt(band.band_hi) + "], " +
               fmt(timer.seconds()) + " s");
}

// --- 9: velocity estimator -------------------------------------------------------
void criterion9() {
    Timer timer;
    const BoxGrid3D box(8.0, 128);
    double worst = 0.0, worst_scale = 0.0;
    for (double ell : {0.2, 0.5}) {
        auto estimate = [&](double lambda) {
            SolitonParams p;
            p.ell = ell;
            p.lambda = lambda;
            const BoxGrid3D scaled(box.half_width * lambda, box.m);
            const FieldState st = cf::eval_soliton_state(0.0, p, Grid{scaled});
            const auto c = fields::conserved_quantities(st);
            const auto ext = cf::family_box_exterior(p, scaled);
            return -(c.P[0] + ext.momentum_e1) / (c.E + ext.energy());
        };
        const double e1 = estimate(1.0);
        const double e2 = estimate(2.0);
        worst = std::max(worst, std::abs(e1 - ell));
        worst_scale = std::max(worst_scale, std::abs(e1 - e2));
    }
    const bool pass = worst <= 1e-3 && worst_scale <= 1e-6;
    report(9, "velocity from conserved quantities: error <= 1e-3, scale drift <= 1e-6",
           pass,
           "error " + fmt(worst) + ", scale drift " + fmt(worst_scale) + ", " +
               fmt(timer.seconds()) + " s");
}

// --- 10: blow-up detection --------------------------------------------------------
void criterion10() {
    Timer timer;
    const Dimension dim(3);
    const double K = cf::ground_state_norms(dim).K;
    const idn::Cutoff taper{8.0, 10.0};
    auto run = [&](std::size_t n) {
        const RadialGrid rg(24.0, n);
        FieldState u0 = fields::sample_radial(
            rg, dim,
            [&](double r) { return 1.2 * cf::W_radial(r, dim) * taper.value(r); }, nullptr);
        nls::SolverOptions opt;
        opt.cfl_safety = 0.5;
        opt.snapshot_stride = 32;
        opt.drift_tol = 1e-4;
        return nls::evolve(u0, 8.0, opt);
    };
    const auto t1 = run(4096);
    const auto t2 = run(8192);
    double grad_max = 0.0;
    for (const auto& s : t1.snapshots)
        grad_max = std::max(grad_max, fields::variational_region(s).grad_sq);
    const auto e1 = nls::detect_blowup(t1);
    const auto e2 = nls::detect_blowup(t2);
    double agreement = 1.0;
    if (e1 && e2) agreement = std::abs(e1->T_estimate / e2->T_estimate - 1.0);
    const bool pass = t1.events.blowup && t2.events.blowup && grad_max >= 2.0 * K &&
                      e1.has_value() && e2.has_value() && agreement <= 0.05;
    std::ostringstream detail;
    detail << "flagged " << (t1.events.blowup && t2.events.blowup ? "yes" : "no")
           << ", max |grad u|^2 / 2K " << fmt(grad_max / (2.0 * K));
    if (e1 && e2)
        detail << ", T " << fmt(e1->T_estimate) << " vs " << fmt(e2->T_estimate)
               << " (rel " << fmt(agreement) << ")";
    detail << ", " << fmt(timer.seconds()) << " s";
    report(10, "supercritical data: flag, 2K crossing, resolution-stable blow-up time",
           pass, detail.str());
}

// --- 11: determinism ---------------------------------------------------------------
void criterion11() {
    Timer timer;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "critwave_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "cfg.json");
        cfg << R"({"scenario": "equipartition", "n": 1024, "r_max": 8.0, "t_horizon": 6.0})";
    }
    scenario::RunOptions a, b;
    a.out_dir = (dir / "a").string();
    b.out_dir = (dir / "b").string();
    b.threads = 1;
    const int ra = scenario::run((dir / "cfg.json").string(), a);
    const int rb = scenario::run((dir / "cfg.json").string(), b);
    auto slurp = [](const fs::path& p) {
        std::ifstream f(p, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    const std::string sa = slurp(dir / "a" / "summary.json");
    const std::string sb = slurp(dir / "b" / "summary.json");
    const bool pass = ra == 0 && rb == 0 && !sa.empty() && sa == sb;
    fs::remove_all(dir);
    report(11, "identical configs produce byte-identical summaries", pass,
           std::string(sa == sb ? "identical" : "mismatch") + ", " + fmt(timer.seconds()) +
               " s");
}

}  // namespace

int main() {
    Timer total;
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    std::printf("\n%d of 11 criteria passed (%.1f s total)\n", 11 - failures,
                total.seconds());
    return failures;
}
