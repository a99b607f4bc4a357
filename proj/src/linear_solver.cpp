#include "critwave/linear_solver.hpp"

#include <cmath>

#include "critwave/errors.hpp"
#include "critwave/quadrature.hpp"

namespace critwave::linear_solver {

RadialPropagator3::RadialPropagator3(const FieldState& state) {
    state.check_layout();
    if (state.dim.N != 3 || !is_radial(state.grid))
        throw std::invalid_argument("RadialPropagator3: need a radial N = 3 state");
    grid_ = std::get<RadialGrid>(state.grid);
    const std::size_t n = grid_.n;
    const double h = grid_.h();

    v0_.resize(n);
    v1_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        v0_[i] = grid_.r(i) * state.u[i];
        v1_[i] = grid_.r(i) * state.ut[i];
    }

    V1_.assign(n, 0.0);
    for (std::size_t i = 1; i < n; ++i)
        V1_[i] = V1_[i - 1] + 0.5 * h * (v1_[i - 1] + v1_[i]);

    // v0' with the exact value v0'(0) = u(0); fourth order inside.
    dv0_.assign(n, 0.0);
    dv0_[0] = state.u[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (i >= 2 && i + 2 < n)
            dv0_[i] = (-v0_[i + 2] + 8 * v0_[i + 1] - 8 * v0_[i - 1] + v0_[i - 2]) / (12 * h);
        else if (i + 1 < n)
            dv0_[i] = (v0_[i + 1] - v0_[i - 1]) / (2 * h);
        else
            dv0_[i] = (3 * v0_[i] - 4 * v0_[i - 1] + v0_[i - 2]) / (2 * h);
    }

    support_ = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(state.u[i]) > 1e-14 || std::abs(state.ut[i]) > 1e-14)
            support_ = grid_.r(i);
}

long RadialPropagator3::step_of(double t) const {
    const double h = grid_.h();
    const double k = t / h;
    const long kl = std::lround(k);
    if (std::abs(k - double(kl)) > 1e-9)
        throw std::invalid_argument("linear solver: t must be an integer multiple of h");
    if (support_ + std::abs(t) > grid_.r_max + 0.5 * h)
        throw truncation_error("linear solver: light cone of the support leaves the grid");
    return kl;
}

double RadialPropagator3::v0e(long j) const {
    if (j < 0) return -v0e(-j);
    return j < long(v0_.size()) ? v0_[j] : 0.0;
}
double RadialPropagator3::v1e(long j) const {
    if (j < 0) return -v1e(-j);
    return j < long(v1_.size()) ? v1_[j] : 0.0;
}
double RadialPropagator3::V1e(long j) const {
    if (j < 0) j = -j;
    return j < long(V1_.size()) ? V1_[j] : V1_.back();
}
double RadialPropagator3::dv0e(long j) const {
    if (j < 0) j = -j;
    return j < long(dv0_.size()) ? dv0_[j] : 0.0;
}

FieldState RadialPropagator3::state_at(double t) const {
    const long k = step_of(t);
    const std::size_t n = grid_.n;
    FieldState out(Grid{grid_}, Dimension(3));

    for (std::size_t i = 0; i < n; ++i) {
        const long a = long(i) + k;
        const long b = long(i) - k;
        const double v = 0.5 * (v0e(a) + v0e(b)) + 0.5 * (V1e(a) - V1e(b));
        const double w = 0.5 * (dv0e(a) - dv0e(b)) + 0.5 * (v1e(a) + v1e(b));
        if (i == 0) {
            out.u[0] = dv0e(k) + v1e(k);  // u(t,0) = d_r v(t,0)
            out.ut[0] = 0.0;              // fixed below by extrapolation
        } else {
            out.u[i] = v / grid_.r(i);
            out.ut[i] = w / grid_.r(i);
        }
    }
    if (n >= 3) out.ut[0] = 2.0 * out.ut[1] - out.ut[2];
    return out;
}

double RadialPropagator3::energy_at(double t) const {
    const long k = step_of(t);
    const std::size_t n = grid_.n;
    const double h = grid_.h();
    // p = v_t + v_r rides left, q = v_t - v_r rides right; both are exact
    // node shifts, so this sum is conserved while the support stays inside.
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const long a = long(i) + k;
        const long b = long(i) - k;
        // reflections through the origin: p(0,-s) = -q(0,s), q(0,-s) = -p(0,s)
        const double p = a >= 0 ? (v1e(a) + dv0e(a)) : -(v1e(-a) - dv0e(-a));
        const double q = b >= 0 ? (v1e(b) - dv0e(b)) : -(v1e(-b) + dv0e(-b));
        const double w = (i == 0 || i == n - 1) ? 0.5 * h : h;
        sum += w * (p * p + q * q);
    }
    return 2.0 * M_PI * sum;
}

double RadialPropagator3::exterior_half_energy(double t) const {
    const long kt = step_of(t);      // signed evaluation time
    const long k = std::labs(kt);    // cone boundary |x| = |t| sits on node k
    const std::size_t n = grid_.n;
    const double h = grid_.h();

    double sum = 0.0;
    for (std::size_t i = std::size_t(k); i < n; ++i) {
        const long a = long(i) + kt;
        const long b = long(i) - kt;
        const double p = a >= 0 ? (v1e(a) + dv0e(a)) : -(v1e(-a) - dv0e(-a));
        const double q = b >= 0 ? (v1e(b) - dv0e(b)) : -(v1e(-b) + dv0e(-b));
        const double w = (i == std::size_t(k) || i == n - 1) ? 0.5 * h : h;
        sum += 0.5 * w * (p * p + q * q);
    }
    double boundary = 0.0;
    if (k > 0) {
        const long a = k + kt;
        const long b = k - kt;
        const double v = 0.5 * (v0e(a) + v0e(b)) + 0.5 * (V1e(a) - V1e(b));
        boundary = v * v / (double(k) * h);
    }
    return 0.5 * 4.0 * M_PI * (sum + boundary);
}

FieldState evolve_linear_radial3(const FieldState& state, double t) {
    return RadialPropagator3(state).state_at(t);
}

namespace {

// plateau: relative change below 1e-6 across the last decade of steps
bool plateau(const std::vector<double>& series) {
    if (series.size() < 10) return false;
    const std::size_t last = series.size() - 1;
    const std::size_t from = last - last / 10;
    const double ref = std::abs(series[last]) + 1e-300;
    for (std::size_t i = from; i <= last; ++i)
        if (std::abs(series[i] - series[last]) > 1e-6 * ref) return false;
    return true;
}

}  // namespace

EquipartitionReport equipartition_report(const FieldState& data, double t_horizon) {
    RadialPropagator3 fwd(data);
    FieldState reversed = data;
    for (double& x : reversed.ut) x = -x;
    RadialPropagator3 bwd(reversed);

    if (fwd.support_radius() + t_horizon > fwd.grid().r_max)
        throw truncation_error("equipartition_report: horizon exceeds the grid");

    const double h = fwd.h();
    const long ksteps = std::lround(t_horizon / h);

    EquipartitionReport rep;
    rep.total = 0.5 * fwd.energy_at(0.0);
    rep.times.reserve(ksteps + 1);
    rep.e_plus.reserve(ksteps + 1);
    rep.e_minus.reserve(ksteps + 1);
    for (long k = 0; k <= ksteps; ++k) {
        const double t = double(k) * h;
        rep.times.push_back(t);
        rep.e_plus.push_back(fwd.exterior_half_energy(t));
        // E(-t) of the original data equals E(+t) of the reversed data
        rep.e_minus.push_back(bwd.exterior_half_energy(t));
    }
    rep.asymptote_plus = rep.e_plus.back();
    rep.asymptote_minus = rep.e_minus.back();
    rep.plateau_plus = plateau(rep.e_plus);
    rep.plateau_minus = plateau(rep.e_minus);
    return rep;
}

double kirchhoff_probe(const std::function<double(const double*)>& u0, double t,
                       const std::array<double, 3>& x0,
                       const std::function<void(const double*, double*)>& grad_u0) {
    const int nmu = 32, nphi = 64;
    const GaussRule rule = gauss_legendre(nmu);

    auto sphere_mean = [&](double radius, bool with_grad) {
        double acc = 0.0;
        for (int i = 0; i < nmu; ++i) {
            const double mu = rule.x[i];
            const double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            for (int j = 0; j < nphi; ++j) {
                const double phi = 2.0 * M_PI * j / nphi;
                const double w[3] = {s * std::cos(phi), s * std::sin(phi), mu};
                const double pt[3] = {x0[0] + radius * w[0], x0[1] + radius * w[1],
                                      x0[2] + radius * w[2]};
                double val;
                if (with_grad) {
                    double g[3];
                    grad_u0(pt, g);
                    val = w[0] * g[0] + w[1] * g[1] + w[2] * g[2];
                } else {
                    val = u0(pt);
                }
                acc += rule.w[i] * val;
            }
        }
        return acc / (2.0 * nphi);  // weights sum to 2, phi average by 1/nphi
    };

    if (t == 0.0) return u0(x0.data());
    if (grad_u0) return sphere_mean(t, false) + t * sphere_mean(t, true);
    // centered difference of t -> t * mean(t)
    const double d = 1e-5 * std::max(1.0, std::abs(t));
    const double fp = (t + d) * sphere_mean(t + d, false);
    const double fm = (t - d) * sphere_mean(t - d, false);
    return (fp - fm) / (2.0 * d);
}

}  // namespace critwave::linear_solver
