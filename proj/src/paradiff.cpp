#include "muskat/paradiff.hpp"

#include <cmath>
#include <limits>

#include "muskat/errors.hpp"

namespace muskat {
namespace {

// C^inf step: 0 for t <= 0, 1 for t >= 1.
double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    double a = std::exp(-1.0 / t);
    double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

double chi_of_ratio(double t, double eps1, double eps2) {
    return 1.0 - smooth_step((t - eps1) / (eps2 - eps1));
}

}  // namespace

double CutoffPair::psi(const Vec& xi) const {
    double r = std::sqrt(norm2(xi));
    return smooth_step((r - 0.2) / 0.05);  // ramp between 1/5 and 1/4
}

double CutoffPair::chi(const Vec& theta, const Vec& eta) const {
    double re = std::sqrt(norm2(eta));
    if (re == 0.0) return 0.0;
    return chi_of_ratio(std::sqrt(norm2(theta)) / re, eps1, eps2);
}

CutoffPair make_cutoffs(double eps1, double eps2) {
    std::vector<std::string> bad;
    if (!(eps1 > 0.0)) bad.push_back("eps1 must be positive");
    if (!(eps2 > eps1)) bad.push_back("eps2 must exceed eps1");
    if (!(eps2 < 0.5)) bad.push_back("eps2 must stay below 1/2 (cone separation)");
    if (!bad.empty()) throw ConfigError("make_cutoffs rejected parameters", bad);
    CutoffPair c{eps1, eps2};
    // Spot-check the defining properties at sampled radii.
    auto fail = [](const char* what) { throw ConfigError(std::string("make_cutoffs: ") + what); };
    if (c.psi({0.19, 0.0}) != 0.0 || c.psi({0.26, 0.0}) != 1.0) fail("psi plateau broken");
    if (!(c.psi({0.21, 0.0}) < c.psi({0.23, 0.0}))) fail("psi not monotone on the ramp");
    for (double r : {1.0, 4.0, 32.0}) {
        if (c.chi({0.99 * eps1 * r, 0.0}, {r, 0.0}) != 1.0) fail("chi inner plateau broken");
        if (c.chi({1.01 * eps2 * r, 0.0}, {r, 0.0}) != 0.0) fail("chi outer support broken");
        // Derivative decay |d_theta chi| <= C/|eta| (finite differences on the ramp).
        double t = 0.5 * (eps1 + eps2), h = 1e-3;
        double d = (c.chi({(t * r) + h, 0.0}, {r, 0.0}) - c.chi({(t * r) - h, 0.0}, {r, 0.0})) /
                   (2.0 * h);
        if (std::abs(d) > 30.0 / r) fail("chi derivative decay violated");
    }
    return c;
}

namespace {

// Integer-lattice helpers for the quantization loops.
struct Lattice {
    const Grid& g;
    std::array<double, 2> unit;  // physical wavenumber per integer mode

    explicit Lattice(const Grid& grid) : g(grid) {
        unit = {Grid::two_pi / g.lengths[0], g.dim == 2 ? Grid::two_pi / g.lengths[1] : 0.0};
    }
    // Signed mode range along an axis: [-n/2, n/2 - 1].
    bool in_range(int axis, int m) const {
        if (axis >= g.dim) return m == 0;
        return m >= -g.n[axis] / 2 && m <= g.n[axis] / 2 - 1;
    }
    std::size_t index_of(int m0, int m1) const {
        int i0 = m0 >= 0 ? m0 : m0 + g.n[0];
        int i1 = g.dim == 2 ? (m1 >= 0 ? m1 : m1 + g.n[1]) : 0;
        return g.flatten(i0, i1);
    }
    Vec wavevec(int m0, int m1) const { return {m0 * unit[0], m1 * unit[1]}; }
};

// Spatial transform of x -> a(x, xi_eta) as lattice coefficients. Uses the
// separable decomposition when present (same values, one FFT per coefficient
// instead of one per eta).
struct SymbolTransforms {
    const Symbol& a;
    const Grid& g;
    std::vector<std::vector<Complex>> term_hats;  // c_j transforms

    SymbolTransforms(const Symbol& sym, const Grid& grid) : a(sym), g(grid) {
        for (const auto& t : a.terms) term_hats.push_back(to_spectral(g, *t.coef));
    }

    std::vector<Complex> at(const Vec& eta) const {
        std::vector<Complex> hat(g.size(), Complex(0, 0));
        if (!a.terms.empty()) {
            for (std::size_t j = 0; j < a.terms.size(); ++j) {
                double mj = a.terms[j].mult(eta);
                if (mj == 0.0) continue;
                for (std::size_t i = 0; i < hat.size(); ++i) hat[i] += mj * term_hats[j][i];
            }
            return hat;
        }
        std::vector<double> av(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) av[i] = a.eval(i, eta);
        return to_spectral(g, av);
    }
};

void require_grid(const Symbol& a, const Field& u, const char* op) {
    if (a.grid != u.grid())
        throw ConfigError(std::string(op) + ": symbol and field live on different grids");
}

Field apply_para_direct(const Symbol& a, const Field& u, const CutoffPair& c) {
    const Grid& g = u.grid();
    Lattice lat(g);
    SymbolTransforms hats(a, g);
    std::vector<Complex> out(g.size(), Complex(0, 0));
    for (std::size_t ie = 0; ie < g.size(); ++ie) {
        Complex ue = u.coeff(ie);
        if (ue == Complex(0, 0)) continue;
        Vec ke = g.wavevector(ie);
        double psi_v = c.psi(ke);
        if (psi_v == 0.0) continue;
        auto em = g.unflatten(ie);
        int e0 = g.signed_mode(0, em[0]);
        int e1 = g.dim == 2 ? g.signed_mode(1, em[1]) : 0;
        std::vector<Complex> ahat = hats.at(ke);
        // theta cone: |theta| <= eps2 |eta| (chi vanishes outside).
        double rad = c.eps2 * std::sqrt(norm2(ke));
        int b0 = static_cast<int>(std::floor(rad / lat.unit[0]));
        int b1 = g.dim == 2 ? static_cast<int>(std::floor(rad / lat.unit[1])) : 0;
        for (int t0 = -b0; t0 <= b0; ++t0)
            for (int t1 = -b1; t1 <= b1; ++t1) {
                if (!lat.in_range(0, t0) || (g.dim == 2 && !lat.in_range(1, t1))) continue;
                double chi_v = c.chi(lat.wavevec(t0, t1), ke);
                if (chi_v == 0.0) continue;
                int x0 = e0 + t0, x1 = e1 + t1;
                if (!lat.in_range(0, x0) || (g.dim == 2 && !lat.in_range(1, x1))) continue;
                out[lat.index_of(x0, x1)] += chi_v * psi_v * ahat[lat.index_of(t0, t1)] * ue;
            }
    }
    return Field::from_spectrum(g, std::move(out));
}

Field apply_para_fast(const Symbol& a, const Field& u, const CutoffPair& c) {
    const Grid& g = u.grid();
    if (a.terms.empty())
        throw ConfigError("apply_para fast path needs a finite-sum symbol decomposition");
    // Alias safety requires band-limited input (see header).
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(u.coeff(i)));
    for (std::size_t i = 0; i < g.size(); ++i)
        if (!g.in_dealias_band(i) && std::abs(u.coeff(i)) > 1e-13 * peak)
            throw ConfigError("apply_para fast path needs 2/3-band-limited input");

    // Dyadic shells over |eta|: shell s holds 2^s <= |eta| < 2^{s+1} (physical
    // units), representative radius 2^{s+1/2}.
    double kmin = std::sqrt(norm2(g.wavevector(1)));
    if (g.dim == 2) kmin = std::min(kmin, std::sqrt(norm2(g.wavevector(g.flatten(0, 1)))));
    double kmax = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.in_dealias_band(i)) kmax = std::max(kmax, std::sqrt(norm2(g.wavevector(i))));
    int s_lo = static_cast<int>(std::floor(std::log2(kmin)));
    int s_hi = static_cast<int>(std::floor(std::log2(kmax)));

    std::vector<std::vector<Complex>> term_hats;
    for (const auto& t : a.terms) term_hats.push_back(to_spectral(g, *t.coef));

    std::vector<double> acc(g.size(), 0.0);
    for (int s = s_lo; s <= s_hi; ++s) {
        double lo = std::pow(2.0, s), hi = 2.0 * lo;
        double rep = lo * std::sqrt(2.0);
        for (std::size_t j = 0; j < a.terms.size(); ++j) {
            std::vector<Complex> ws(g.size(), Complex(0, 0));
            bool any = false;
            for (std::size_t i = 0; i < g.size(); ++i) {
                double r = std::sqrt(norm2(g.wavevector(i)));
                if (r < lo || r >= hi) continue;
                Complex v = c.psi(g.wavevector(i)) * a.terms[j].mult(g.wavevector(i)) * u.coeff(i);
                // Shells holding only transform dust contribute nothing but
                // rounding noise; skip them.
                if (std::abs(v) > 1e-14 * peak) any = true;
                ws[i] = v;
            }
            if (!any) continue;
            Field w = Field::from_spectrum(g, std::move(ws));
            std::vector<Complex> cf(g.size());
            for (std::size_t i = 0; i < g.size(); ++i) {
                double r = std::sqrt(norm2(g.wavevector(i)));
                cf[i] = term_hats[j][i] * chi_of_ratio(r / rep, c.eps1, c.eps2);
            }
            Field cfield = Field::from_spectrum(g, std::move(cf));
            for (std::size_t i = 0; i < g.size(); ++i) acc[i] += cfield.value(i) * w.value(i);
        }
    }
    return Field::from_values(g, std::move(acc));
}

}  // namespace

Field apply_para(const Symbol& a, const Field& u, const CutoffPair& c, ParaMode mode) {
    require_grid(a, u, "apply_para");
    return mode == ParaMode::Direct ? apply_para_direct(a, u, c) : apply_para_fast(a, u, c);
}

Field apply_para_adjoint(const Symbol& a, const Field& u, const CutoffPair& c) {
    require_grid(a, u, "apply_para_adjoint");
    const Grid& g = u.grid();
    Lattice lat(g);
    SymbolTransforms hats(a, g);
    std::vector<Complex> out(g.size(), Complex(0, 0));
    for (std::size_t iw = 0; iw < g.size(); ++iw) {
        Vec kw = g.wavevector(iw);
        double psi_v = c.psi(kw);
        if (psi_v == 0.0) continue;
        auto wm = g.unflatten(iw);
        int w0 = g.signed_mode(0, wm[0]);
        int w1 = g.dim == 2 ? g.signed_mode(1, wm[1]) : 0;
        std::vector<Complex> ahat = hats.at(kw);
        double rad = c.eps2 * std::sqrt(norm2(kw));
        int b0 = static_cast<int>(std::floor(rad / lat.unit[0]));
        int b1 = g.dim == 2 ? static_cast<int>(std::floor(rad / lat.unit[1])) : 0;
        Complex acc(0, 0);
        for (int t0 = -b0; t0 <= b0; ++t0)
            for (int t1 = -b1; t1 <= b1; ++t1) {
                if (!lat.in_range(0, t0) || (g.dim == 2 && !lat.in_range(1, t1))) continue;
                double chi_v = c.chi(lat.wavevec(t0, t1), kw);
                if (chi_v == 0.0) continue;
                int s0 = w0 + t0, s1 = w1 + t1;
                if (!lat.in_range(0, s0) || (g.dim == 2 && !lat.in_range(1, s1))) continue;
                acc += std::conj(chi_v * psi_v * ahat[lat.index_of(t0, t1)]) *
                       u.coeff(lat.index_of(s0, s1));
            }
        out[iw] = acc;
    }
    return Field::from_spectrum(g, std::move(out));
}

double boundedness_ratio(const Symbol& a, const Field& u, const CutoffPair& c, double mu) {
    Field tu = apply_para(a, u, c);
    double denom = sobolev_norm(u, mu);
    if (denom == 0.0) throw ConfigError("boundedness_ratio: zero input");
    return sobolev_norm(tu, mu - a.order) / denom;
}

double wave_image_norm(const std::function<Field(const Field&)>& op, const Grid& g, int k) {
    Field cosk = Field::sample(g, [k](const Vec& x) { return std::cos(k * x[0]); });
    Field sink = Field::sample(g, [k](const Vec& x) { return std::sin(k * x[0]); });
    double nc = l2_norm(op(cosk));
    double ns = l2_norm(op(sink));
    return std::sqrt(nc * nc + ns * ns);
}

namespace {

void validate_probes(const std::vector<int>& ks, const Grid& g) {
    if (ks.size() < 3)
        throw ConfigError("defect order fit: need at least 3 probe frequencies");
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (ks[i] <= 0) throw ConfigError("defect order fit: probes must be positive");
        if (3 * ks[i] > g.n[0])
            throw ConfigError("defect order fit: probe outside the 2/3 band");
        if (i > 0 && ks[i] != 2 * ks[i - 1])
            throw ConfigError("defect order fit: probes must be dyadic");
    }
}

}  // namespace

DefectReport fit_operator_order(const std::function<Field(const Field&)>& op, const Grid& g,
                                const std::vector<int>& ks) {
    validate_probes(ks, g);
    DefectReport rep;
    double max_norm = 0.0;
    for (int k : ks) {
        rep.probe_ks.push_back(k);
        rep.defect_norms.push_back(wave_image_norm(op, g, k));
        max_norm = std::max(max_norm, rep.defect_norms.back());
    }
    rep.fit_floor = 1e-12 * std::max(1.0, max_norm);
    std::vector<double> fit_norms;
    for (std::size_t i = 0; i < ks.size(); ++i)
        if (rep.defect_norms[i] > rep.fit_floor) {
            rep.fitted_ks.push_back(rep.probe_ks[i]);
            fit_norms.push_back(rep.defect_norms[i]);
        }
    if (rep.fitted_ks.size() < 2) {
        rep.order = -std::numeric_limits<double>::infinity();
        return rep;
    }
    rep.order = fit_log_slope(rep.fitted_ks, fit_norms).slope;
    return rep;
}

DefectReport defect_order_composition(const Symbol& a, const Symbol& b, const CutoffPair& c,
                                      const std::vector<int>& probe_ks) {
    if (a.grid != b.grid) throw ConfigError("defect_order_composition: symbol grids differ");
    Symbol ab = product_symbol(a, b);
    auto op = [&](const Field& u) {
        return sub(apply_para(a, apply_para(b, u, c), c), apply_para(ab, u, c));
    };
    return fit_operator_order(op, a.grid, probe_ks);
}

DefectReport defect_order_adjoint(const Symbol& a, const CutoffPair& c,
                                  const std::vector<int>& probe_ks) {
    // Our symbols are real-valued, so T_{conj a} = T_a.
    auto op = [&](const Field& u) {
        return sub(apply_para_adjoint(a, u, c), apply_para(a, u, c));
    };
    return fit_operator_order(op, a.grid, probe_ks);
}

}  // namespace muskat
