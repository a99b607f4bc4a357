#ifndef CRITWAVE_GRID_HPP
#define CRITWAVE_GRID_HPP

#include <array>
#include <cstddef>
#include <stdexcept>
#include <variant>

namespace critwave {

// Uniform radial grid on [0, r_max]; node 0 sits at r = 0.
struct RadialGrid {
    double r_max = 1.0;
    std::size_t n = 16;

    RadialGrid() = default;
    RadialGrid(double rmax, std::size_t nodes) : r_max(rmax), n(nodes) {
        if (!(r_max > 0.0)) throw std::invalid_argument("RadialGrid: r_max must be positive");
        if (n < 16) throw std::invalid_argument("RadialGrid: need at least 16 nodes");
    }

    double h() const { return r_max / double(n - 1); }
    double r(std::size_t i) const { return double(i) * h(); }
    std::size_t size() const { return n; }
};

// Uniform Cartesian grid on [-half_width, half_width]^3, m nodes per axis.
struct BoxGrid3D {
    double half_width = 1.0;
    std::size_t m = 8;

    BoxGrid3D() = default;
    BoxGrid3D(double hw, std::size_t nodes) : half_width(hw), m(nodes) {
        if (!(half_width > 0.0)) throw std::invalid_argument("BoxGrid3D: half_width must be positive");
        if (m < 8) throw std::invalid_argument("BoxGrid3D: need at least 8 nodes per axis");
    }

    double h() const { return 2.0 * half_width / double(m - 1); }
    double coord(std::size_t i) const { return -half_width + double(i) * h(); }
    std::size_t size() const { return m * m * m; }
    std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
        return (i * m + j) * m + k;
    }
};

using Grid = std::variant<RadialGrid, BoxGrid3D>;

inline std::size_t grid_size(const Grid& g) {
    return std::visit([](const auto& gr) { return gr.size(); }, g);
}

inline double grid_spacing(const Grid& g) {
    return std::visit([](const auto& gr) { return gr.h(); }, g);
}

inline bool is_radial(const Grid& g) { return std::holds_alternative<RadialGrid>(g); }

}  // namespace critwave

#endif
