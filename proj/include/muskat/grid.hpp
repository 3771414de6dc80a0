#pragma once

#include <array>
#include <cstddef>
#include <cstdlib>

namespace muskat {

// Small spatial / frequency vector. Component d..1 stay zero when dim < 2 so
// dimension-generic loops can run over both axes unconditionally.
using Vec = std::array<double, 2>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec& a) { return dot(a, a); }

// Uniform periodic grid on a torus of dim 1 or 2. Pure value type; all lattice
// bookkeeping (mode numbering, Nyquist, de-aliasing band) lives here so the
// rest of the library never touches raw indices.
//
// Storage is row-major over (axis0, axis1); for dim==1 axis1 has a single
// sample so the same flat indexing covers both dimensions.
struct Grid {
    int dim = 1;
    std::array<int, 2> n = {8, 1};                  // samples per axis
    std::array<double, 2> lengths = {6.283185307179586, 6.283185307179586};

    std::size_t size() const { return static_cast<std::size_t>(n[0]) * n[1]; }
    double volume() const { return dim == 1 ? lengths[0] : lengths[0] * lengths[1]; }
    double spacing(int axis) const { return lengths[axis] / n[axis]; }

    std::array<int, 2> unflatten(std::size_t idx) const {
        return {static_cast<int>(idx) / n[1], static_cast<int>(idx) % n[1]};
    }
    std::size_t flatten(int i0, int i1) const {
        return static_cast<std::size_t>(i0) * n[1] + i1;
    }

    Vec point(std::size_t idx) const {
        auto ij = unflatten(idx);
        return {ij[0] * spacing(0), dim == 2 ? ij[1] * spacing(1) : 0.0};
    }

    // Signed integer mode for a storage index along one axis; the Nyquist
    // index n/2 maps to -n/2.
    int signed_mode(int axis, int i) const {
        if (n[axis] == 1) return 0;
        return i < n[axis] / 2 ? i : i - n[axis];
    }

    Vec wavevector(std::size_t idx) const {
        auto ij = unflatten(idx);
        Vec k = {signed_mode(0, ij[0]) * (two_pi / lengths[0]), 0.0};
        if (dim == 2) k[1] = signed_mode(1, ij[1]) * (two_pi / lengths[1]);
        return k;
    }

    bool is_nyquist(std::size_t idx) const {
        auto ij = unflatten(idx);
        if (n[0] > 1 && ij[0] == n[0] / 2) return true;
        return dim == 2 && n[1] > 1 && ij[1] == n[1] / 2;
    }

    // 2/3-rule band: per-axis |mode| <= n/3.
    bool in_dealias_band(std::size_t idx) const {
        auto ij = unflatten(idx);
        if (3 * std::abs(signed_mode(0, ij[0])) > n[0]) return false;
        return dim != 2 || 3 * std::abs(signed_mode(1, ij[1])) <= n[1];
    }

    // Index of the conjugate mode -k (mod n per axis).
    std::size_t conjugate_index(std::size_t idx) const {
        auto ij = unflatten(idx);
        int i0 = ij[0] == 0 ? 0 : n[0] - ij[0];
        int i1 = ij[1] == 0 ? 0 : n[1] - ij[1];
        return flatten(i0, i1);
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && lengths == o.lengths;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }

    static constexpr double two_pi = 6.283185307179586476925286766559;
};

// Validates and builds a grid: dim in {1,2}, per-axis n a power of two >= 8,
// positive periods. Throws ConfigError listing every violation.
Grid make_grid(int dim, std::array<int, 2> n, std::array<double, 2> lengths);

inline Grid make_grid_1d(int n, double length = Grid::two_pi) {
    return make_grid(1, {n, 1}, {length, length});
}
inline Grid make_grid_2d(int n0, int n1, double l0 = Grid::two_pi, double l1 = Grid::two_pi) {
    return make_grid(2, {n0, n1}, {l0, l1});
}

}  // namespace muskat
