#ifndef CRITWAVE_DIMENSION_HPP
#define CRITWAVE_DIMENSION_HPP

#include <array>
#include <cmath>
#include <stdexcept>

namespace critwave {

// Space dimension of the equation. Only N in {3,4,5} is meaningful here:
// the nonlinearity |u|^{4/(N-2)}u is energy-critical exactly for these N.
struct Dimension {
    int N = 3;

    Dimension() = default;
    explicit Dimension(int n) : N(n) {
        if (N < 3 || N > 5)
            throw std::invalid_argument("Dimension: N must be 3, 4 or 5");
    }

    // 2N/(N-2), the critical Sobolev exponent.
    double critical_exponent() const { return 2.0 * N / (N - 2); }
    // 4/(N-2), the power in the nonlinearity |u|^{4/(N-2)}u.
    double nonlin_power() const { return 4.0 / (N - 2); }
    // (N-2)/(2N), the coefficient of the potential term in the energy.
    double potential_coeff() const { return (N - 2) / (2.0 * N); }

    // Area of the unit sphere S^{N-1}.
    double sphere_area() const {
        switch (N) {
            case 3: return 4.0 * M_PI;
            case 4: return 2.0 * M_PI * M_PI;
            case 5: return 8.0 * M_PI * M_PI / 3.0;
        }
        throw std::invalid_argument("Dimension: bad N");
    }
};

// Velocity bound: the family is defined for |ell| < 1, and we refuse
// parameters so close to light speed that sqrt(1-ell^2) loses accuracy.
inline constexpr double kMaxBoost = 1.0 - 1e-9;

inline void check_boost(double ell) {
    if (!(std::abs(ell) < kMaxBoost))
        throw std::invalid_argument("soliton velocity must satisfy |ell| < 1 - 1e-9");
}

// One member of the boosted soliton family, up to the symmetries of the
// equation: velocity ell along e_1, scale lambda, translation, sign.
struct SolitonParams {
    double ell = 0.0;
    double lambda = 1.0;
    std::array<double, 3> center{0.0, 0.0, 0.0};
    int sign = +1;
    Dimension dim{3};

    void validate() const {
        check_boost(ell);
        if (!(lambda > 0.0))
            throw std::invalid_argument("soliton scale lambda must be positive");
        if (sign != 1 && sign != -1)
            throw std::invalid_argument("soliton sign must be +1 or -1");
    }
};

// The scale-free quantities of the boosted family, all relative to the
// ground state: ratios of squared norms and of energies, and momentum
// divided by energy (the e_1 component; the others vanish).
struct ExactQuantities {
    double grad_norm_ratio;      // |grad W_l|^2 / |grad W|^2
    double dt_norm_ratio;        // |dt W_l|^2  / |grad W|^2
    double energy_ratio;         // E(W_l)      / E(W)
    double momentum_over_energy; // P_1(W_l)    / E(W_l)   (= -ell)
};

}  // namespace critwave

#endif
