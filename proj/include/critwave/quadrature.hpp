#ifndef CRITWAVE_QUADRATURE_HPP
#define CRITWAVE_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace critwave {

// Gauss-Legendre nodes and weights on [-1,1], by Newton iteration on the
// Legendre recurrence. Machine precision for the sizes used here.
struct GaussRule {
    std::vector<double> x, w;
};

inline GaussRule gauss_legendre(int n) {
    if (n < 2 || n > 64) throw std::invalid_argument("gauss_legendre: n out of range");
    GaussRule g;
    g.x.resize(n);
    g.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        g.x[i] = -x;
        g.x[n - 1 - i] = x;
        g.w[i] = g.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return g;
}

// Composite Gauss-Legendre over [a,b] split into equal panels.
template <class F>
double composite_gl(const F& f, double a, double b, int panels, const GaussRule& rule) {
    const double w = (b - a) / panels;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * w;
        double s = 0.0;
        for (std::size_t i = 0; i < rule.x.size(); ++i)
            s += rule.w[i] * f(lo + 0.5 * w * (rule.x[i] + 1.0));
        total += 0.5 * w * s;
    }
    return total;
}

// Plain trapezoid on n uniformly spaced samples over [a,b].
template <class F>
double trapezoid(const F& f, double a, double b, std::size_t n) {
    if (n < 2) throw std::invalid_argument("trapezoid: need n >= 2");
    const double h = (b - a) / double(n - 1);
    double s = 0.5 * (f(a) + f(b));
    for (std::size_t i = 1; i + 1 < n; ++i) s += f(a + double(i) * h);
    return s * h;
}

}  // namespace critwave

#endif
