#ifndef CRITWAVE_FIELD_STATE_HPP
#define CRITWAVE_FIELD_STATE_HPP

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "critwave/dimension.hpp"
#include "critwave/errors.hpp"
#include "critwave/grid.hpp"

namespace critwave {

// A sampled element of H^1 x L^2: the pair (u, du/dt) on a grid.
struct FieldState {
    std::vector<double> u;
    std::vector<double> ut;
    Grid grid;
    Dimension dim{3};

    FieldState() = default;
    FieldState(const Grid& g, Dimension d)
        : u(grid_size(g), 0.0), ut(grid_size(g), 0.0), grid(g), dim(d) {}

    std::size_t size() const { return u.size(); }

    void check_layout() const {
        if (u.size() != grid_size(grid) || ut.size() != u.size())
            throw std::invalid_argument("FieldState: sample layout does not match grid");
    }

    bool all_finite() const {
        for (double x : u) if (!std::isfinite(x)) return false;
        for (double x : ut) if (!std::isfinite(x)) return false;
        return true;
    }
};

// The scaling symmetry of the energy space: u -> lambda^{-(N-2)/2} u(x/lambda),
// ut -> lambda^{-N/2} ut(x/lambda), with the grid stretched by lambda so the
// samples are reused exactly. All energy-space norms are invariant under this.
inline FieldState rescale_state(const FieldState& s, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("rescale_state: lambda must be positive");
    FieldState out = s;
    const int N = s.dim.N;
    const double cu = std::pow(lambda, -(N - 2) / 2.0);
    const double cut = std::pow(lambda, -N / 2.0);
    if (auto* rg = std::get_if<RadialGrid>(&out.grid)) rg->r_max *= lambda;
    else std::get<BoxGrid3D>(out.grid).half_width *= lambda;
    for (double& x : out.u) x *= cu;
    for (double& x : out.ut) x *= cut;
    return out;
}

// ---------------------------------------------------------------------------
// Checkpoint format "CWV1": magic, dimension, grid descriptor, then u and ut
// as little-endian 64-bit floats. Round-trips must be bit exact.
// ---------------------------------------------------------------------------

namespace detail {
inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 4);
}
inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = (unsigned char)((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b), 8);
}
inline void put_f64(std::ostream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64(os, v);
}
inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(b[i]) << (8 * i);
    return v;
}
inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    is.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= std::uint64_t(b[i]) << (8 * i);
    return v;
}
inline double get_f64(std::istream& is) {
    std::uint64_t v = get_u64(is);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}
}  // namespace detail

inline void write_checkpoint(const FieldState& s, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_checkpoint: cannot open " + path);
    os.write("CWV1", 4);
    detail::put_u32(os, (std::uint32_t)s.dim.N);
    if (const auto* rg = std::get_if<RadialGrid>(&s.grid)) {
        detail::put_u32(os, 0);  // grid kind: radial
        detail::put_f64(os, rg->r_max);
        detail::put_u64(os, rg->n);
    } else {
        const auto& bg = std::get<BoxGrid3D>(s.grid);
        detail::put_u32(os, 1);  // grid kind: box
        detail::put_f64(os, bg.half_width);
        detail::put_u64(os, bg.m);
    }
    for (double x : s.u) detail::put_f64(os, x);
    for (double x : s.ut) detail::put_f64(os, x);
    if (!os) throw std::runtime_error("write_checkpoint: write failed for " + path);
}

inline FieldState read_checkpoint(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_checkpoint: cannot open " + path);
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "CWV1", 4) != 0)
        throw std::runtime_error("read_checkpoint: bad magic (want CWV1)");
    const int N = (int)detail::get_u32(is);
    const std::uint32_t kind = detail::get_u32(is);
    Grid grid;
    if (kind == 0) {
        const double rmax = detail::get_f64(is);
        const std::uint64_t n = detail::get_u64(is);
        grid = RadialGrid(rmax, (std::size_t)n);
    } else if (kind == 1) {
        const double hw = detail::get_f64(is);
        const std::uint64_t m = detail::get_u64(is);
        grid = BoxGrid3D(hw, (std::size_t)m);
    } else {
        throw std::runtime_error("read_checkpoint: unknown grid kind");
    }
    FieldState s(grid, Dimension(N));
    for (double& x : s.u) x = detail::get_f64(is);
    for (double& x : s.ut) x = detail::get_f64(is);
    if (!is) throw std::runtime_error("read_checkpoint: truncated file " + path);
    return s;
}

}  // namespace critwave

#endif
