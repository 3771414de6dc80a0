#include "muskat/field.hpp"

#include <algorithm>
#include <cmath>

#include "muskat/errors.hpp"

namespace muskat {
namespace {

void check_finite(const std::vector<double>& v, const char* what) {
    for (std::size_t i = 0; i < v.size(); ++i)
        if (!std::isfinite(v[i]))
            throw ConfigError(std::string(what) + ": non-finite sample at flat index " +
                              std::to_string(i));
}

}  // namespace

Field Field::from_values(const Grid& g, std::vector<double> values) {
    if (values.size() != g.size())
        throw ConfigError("Field::from_values: sample count does not match grid size");
    check_finite(values, "Field::from_values");
    Field f;
    f.grid_ = g;
    f.spectrum_ = to_spectral(g, values);
    // Enforce exact Hermitian symmetry: the transform of real samples is
    // symmetric only to rounding, and multiplier chains can amplify that
    // imbalance by many orders of magnitude.
    for (std::size_t i = 0; i < f.spectrum_.size(); ++i) {
        std::size_t j = g.conjugate_index(i);
        if (j < i) continue;
        Complex c = 0.5 * (f.spectrum_[i] + std::conj(f.spectrum_[j]));
        if (j == i) c = Complex(c.real(), 0.0);
        f.spectrum_[i] = c;
        f.spectrum_[j] = std::conj(c);
    }
    f.values_ = std::move(values);
    return f;
}

Field Field::from_spectrum(const Grid& g, std::vector<Complex> spectrum) {
    if (spectrum.size() != g.size())
        throw ConfigError("Field::from_spectrum: coefficient count does not match grid size");
    double max_mag = 0.0, max_asym = 0.0;
    for (std::size_t i = 0; i < spectrum.size(); ++i) {
        if (!std::isfinite(spectrum[i].real()) || !std::isfinite(spectrum[i].imag()))
            throw ConfigError("Field::from_spectrum: non-finite coefficient at flat index " +
                              std::to_string(i));
        max_mag = std::max(max_mag, std::abs(spectrum[i]));
        max_asym = std::max(max_asym, std::abs(spectrum[i] - std::conj(spectrum[g.conjugate_index(i)])));
    }
    // Relative check plus an absolute floor: spectra that are pure rounding
    // dust (e.g. transforms of sampled data) carry O(1e-17) asymmetry that
    // the symmetrization below absorbs anyway.
    if (max_asym > 1e-9 * max_mag + 1e-12)
        throw ConfigError("Field::from_spectrum: spectrum is not Hermitian-symmetric "
                          "(asymmetry " + std::to_string(max_asym) + ")");
    // Exact symmetrization so the inverse transform is real to rounding.
    std::vector<Complex> sym(spectrum.size());
    for (std::size_t i = 0; i < spectrum.size(); ++i)
        sym[i] = 0.5 * (spectrum[i] + std::conj(spectrum[g.conjugate_index(i)]));
    Field f;
    f.grid_ = g;
    f.values_ = to_physical(g, sym);
    f.spectrum_ = std::move(sym);
    return f;
}

Field Field::zeros(const Grid& g) {
    return from_values(g, std::vector<double>(g.size(), 0.0));
}

Field Field::constant(const Grid& g, double c) {
    return from_values(g, std::vector<double>(g.size(), c));
}

Field Field::sample(const Grid& g, const std::function<double(const Vec&)>& f) {
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.point(i));
    return from_values(g, std::move(v));
}

namespace {

void require_same_grid(const Field& a, const Field& b, const char* op) {
    if (a.grid() != b.grid())
        throw ConfigError(std::string(op) + ": operands live on different grids");
}

}  // namespace

Field add(const Field& a, const Field& b) {
    require_same_grid(a, b, "add");
    std::vector<double> v(a.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += b.value(i);
    return Field::from_values(a.grid(), std::move(v));
}

Field sub(const Field& a, const Field& b) {
    require_same_grid(a, b, "sub");
    std::vector<double> v(a.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= b.value(i);
    return Field::from_values(a.grid(), std::move(v));
}

Field scale(const Field& a, double c) {
    std::vector<double> v(a.values());
    for (auto& x : v) x *= c;
    return Field::from_values(a.grid(), std::move(v));
}

Field drop_mean(const Field& a) {
    std::vector<Complex> sp(a.spectrum());
    sp[0] = Complex(0.0, 0.0);
    return Field::from_spectrum(a.grid(), std::move(sp));
}

Field multiply(const Field& a, const Field& b) {
    require_same_grid(a, b, "multiply");
    std::vector<double> v(a.values());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= b.value(i);
    return dealias(Field::from_values(a.grid(), std::move(v)));
}

Field map_pointwise(const Field& a, const std::function<double(double)>& f) {
    std::vector<double> v(a.values());
    for (auto& x : v) x = f(x);
    return dealias(Field::from_values(a.grid(), std::move(v)));
}

Field apply_multiplier(const Field& a, const std::function<Complex(const Vec&)>& m) {
    const Grid& g = a.grid();
    std::vector<Complex> mval(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        mval[i] = m(g.wavevector(i));
        if (!std::isfinite(mval[i].real()) || !std::isfinite(mval[i].imag()))
            throw ConfigError("apply_multiplier: multiplier non-finite at lattice index " +
                              std::to_string(i));
    }
    // Conjugate-even check keeps the output real; fail loudly instead of
    // silently projecting.
    for (std::size_t i = 0; i < g.size(); ++i) {
        std::size_t j = g.conjugate_index(i);
        double scalemag = std::max({std::abs(mval[i]), std::abs(mval[j]), 1.0});
        if (std::abs(mval[i] - std::conj(mval[j])) > 1e-12 * scalemag)
            throw ConfigError("apply_multiplier: multiplier is not conjugate-even "
                              "(result would not be real)");
    }
    std::vector<Complex> s(a.spectrum());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] *= mval[i];
    return Field::from_spectrum(g, std::move(s));
}

Field gradient_component(const Field& a, int axis) {
    const Grid& g = a.grid();
    if (axis < 0 || axis >= g.dim) throw ConfigError("gradient_component: axis out of range");
    std::vector<Complex> s(a.spectrum());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (g.is_nyquist(i))
            s[i] = 0.0;
        else
            s[i] *= Complex(0.0, g.wavevector(i)[axis]);
    }
    return Field::from_spectrum(g, std::move(s));
}

Field dealias(const Field& a) {
    const Grid& g = a.grid();
    std::vector<Complex> s(a.spectrum());
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!g.in_dealias_band(i)) s[i] = 0.0;
    return Field::from_spectrum(g, std::move(s));
}

Field low_pass(const Field& a, double cut) {
    const Grid& g = a.grid();
    std::vector<Complex> s(a.spectrum());
    for (std::size_t i = 0; i < s.size(); ++i) {
        Vec k = g.wavevector(i);
        if (std::sqrt(norm2(k)) > cut) s[i] = 0.0;
    }
    return Field::from_spectrum(g, std::move(s));
}

}  // namespace muskat
