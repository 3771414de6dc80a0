#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "muskat/grid.hpp"

namespace muskat {

using Complex = std::complex<double>;

// Real-valued periodic field carrying both representations eagerly:
//   values   : samples on the grid, row-major
//   spectrum : Fourier-series coefficients c_k = (1/|T^d|) \int u e^{-ik.x} dx,
//              one per lattice mode, same flat indexing as the grid.
// Both are computed at construction and never mutated, so Fields are safe to
// share read-only across threads. Operations return new Fields.
class Field {
public:
    Field() = default;

    // Rejects non-finite samples (ConfigError names the first bad index).
    static Field from_values(const Grid& g, std::vector<double> values);

    // Checks Hermitian symmetry (relative tolerance 1e-9 on the largest
    // coefficient), then symmetrizes exactly so the sample values are real.
    static Field from_spectrum(const Grid& g, std::vector<Complex> spectrum);

    static Field zeros(const Grid& g);
    static Field constant(const Grid& g, double c);
    static Field sample(const Grid& g, const std::function<double(const Vec&)>& f);

    const Grid& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    const std::vector<Complex>& spectrum() const { return spectrum_; }

    double value(std::size_t i) const { return values_[i]; }
    Complex coeff(std::size_t i) const { return spectrum_[i]; }
    double mean() const { return spectrum_[0].real(); }

private:
    Grid grid_;
    std::vector<double> values_;
    std::vector<Complex> spectrum_;
};

// Explicit transform directions, for callers that work with raw buffers.
std::vector<Complex> to_spectral(const Grid& g, const std::vector<double>& values);
std::vector<double> to_physical(const Grid& g, const std::vector<Complex>& spectrum);

Field add(const Field& a, const Field& b);
Field sub(const Field& a, const Field& b);
Field scale(const Field& a, double c);

// Copy with the zero mode removed; mean() of the result is exactly 0.
Field drop_mean(const Field& a);

// Pointwise product with the 2/3 rule applied afterwards (and the Nyquist
// modes zeroed, which the 2/3 mask already covers). This is the default for
// every nonlinear operation in the library.
Field multiply(const Field& a, const Field& b);

// Pointwise application of a scalar function, de-aliased like multiply().
Field map_pointwise(const Field& a, const std::function<double(double)>& f);

// Fourier multiplier u -> m(k) u_k. The multiplier must be conjugate-even
// (m(-k) == conj(m(k))) so the result stays real; violations and non-finite
// values are rejected. Nyquist handling is the multiplier's own business;
// use gradient_component() for derivatives.
Field apply_multiplier(const Field& a, const std::function<Complex(const Vec&)>& m);

// Spectral d/dx_axis with the Nyquist modes zeroed (the ik multiplier has no
// conjugate-even continuation there).
Field gradient_component(const Field& a, int axis);

// Keep only per-axis |mode| <= n/3.
Field dealias(const Field& a);

// Sharp spectral truncation: drop every coefficient with |k| > cut, where k
// is the physical wavevector (2*pi/length units included).
Field low_pass(const Field& a, double cut);

}  // namespace muskat
