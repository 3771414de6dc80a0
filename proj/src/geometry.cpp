#include "muskat/geometry.hpp"

#include <cmath>
#include <limits>

#include "muskat/errors.hpp"
#include "muskat/symbols.hpp"

namespace muskat {
namespace {

// Gradient samples per axis; the second axis is zero for d = 1.
std::array<std::vector<double>, 2> gradient_values(const Field& eta) {
    const Grid& g = eta.grid();
    std::array<std::vector<double>, 2> out;
    for (int axis = 0; axis < 2; ++axis) {
        if (axis < g.dim) {
            Field d = gradient_component(eta, axis);
            out[axis].assign(d.values().begin(), d.values().end());
        } else {
            out[axis].assign(g.size(), 0.0);
        }
    }
    return out;
}

}  // namespace

Field mean_curvature(const Field& eta) {
    const Grid& g = eta.grid();
    auto grad = gradient_values(eta);
    // Assemble the divergence in coefficient space so the mean is exactly
    // zero (the k = 0 coefficient never receives a contribution).
    std::vector<Complex> div(g.size(), Complex(0, 0));
    for (int axis = 0; axis < g.dim; ++axis) {
        std::vector<double> q(g.size());
        for (std::size_t i = 0; i < g.size(); ++i) {
            double n2 = grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i];
            q[i] = grad[axis][i] / std::sqrt(1.0 + n2);
        }
        Field qa = dealias(Field::from_values(g, std::move(q)));
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.is_nyquist(i)) continue;
            div[i] -= Complex(0.0, g.wavevector(i)[axis]) * qa.coeff(i);
        }
    }
    return Field::from_spectrum(g, std::move(div));
}

CurvatureResult curvature_paralinearization(const Field& eta, const CutoffPair& cutoffs) {
    const Grid& g = eta.grid();
    auto grad = gradient_values(eta);
    std::vector<std::array<double, 4>> m(g.size(), {0.0, 0.0, 0.0, 0.0});
    for (std::size_t i = 0; i < g.size(); ++i) {
        double n2 = grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i];
        double s1 = std::pow(1.0 + n2, -0.5), s3 = std::pow(1.0 + n2, -1.5);
        if (g.dim == 1) {
            m[i][0] = s1 - grad[0][i] * grad[0][i] * s3;
        } else {
            m[i][0] = s1 - grad[0][i] * grad[0][i] * s3;
            m[i][1] = -grad[0][i] * grad[1][i] * s3;
            m[i][2] = m[i][1];
            m[i][3] = s1 - grad[1][i] * grad[1][i] * s3;
        }
    }
    // Consistency spot check: the quadratic form of M must reproduce ell.
    Symbol ell = ell_symbol(eta);
    for (std::size_t i = 0; i < g.size(); i += std::max<std::size_t>(1, g.size() / 7)) {
        for (Vec xi : {Vec{1.0, 0.0}, Vec{2.0, g.dim == 2 ? -3.0 : 0.0}}) {
            double quad = m[i][0] * xi[0] * xi[0];
            if (g.dim == 2)
                quad += (m[i][1] + m[i][2]) * xi[0] * xi[1] + m[i][3] * xi[1] * xi[1];
            double ref = ell.eval(i, xi);
            if (std::abs(quad - ref) > 1e-10 * std::max(1.0, std::abs(ref)))
                throw Error("curvature_paralinearization: M quadratic form disagrees with ell");
        }
    }
    CurvatureResult res{mean_curvature(eta), std::move(m),
                        apply_para(ell, eta, cutoffs), Field::zeros(g)};
    res.remainder = sub(res.h_field, res.t_ell_eta);
    return res;
}

BoundaryDistance boundary_distance(const Field& eta, const BottomSpec& bottom) {
    const Grid& g = eta.grid();
    if (bottom.kind == BottomSpec::Kind::Infinite) {
        double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    std::vector<double> wall(g.size());
    if (bottom.kind == BottomSpec::Kind::Flat) {
        wall.assign(g.size(), -bottom.depth);
    } else {
        if (bottom.profile->grid() != g)
            throw ConfigError("boundary_distance: wall profile grid differs from surface");
        for (std::size_t i = 0; i < g.size(); ++i) wall[i] = bottom.profile->value(i);
    }
    double vertical = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i)
        vertical = std::min(vertical, eta.value(i) - wall[i]);

    auto wrap = [](double d, double period) {
        d = std::abs(d);
        return std::min(d, period - d);
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.size(); ++i) {
        Vec xi = g.point(i);
        for (std::size_t j = 0; j < g.size(); ++j) {
            Vec xj = g.point(j);
            double dx0 = wrap(xi[0] - xj[0], g.lengths[0]);
            double dx1 = g.dim == 2 ? wrap(xi[1] - xj[1], g.lengths[1]) : 0.0;
            double dy = eta.value(i) - wall[j];
            best = std::min(best, std::sqrt(dx0 * dx0 + dx1 * dx1 + dy * dy));
        }
    }
    return {vertical, best};
}

double energy(const Field& eta, const PhaseParams& params) {
    params.validate();
    const Grid& g = eta.grid();
    auto grad = gradient_values(eta);
    double cell = g.volume() / static_cast<double>(g.size());
    double area = 0.0, mass = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double n2 = grad[0][i] * grad[0][i] + grad[1][i] * grad[1][i];
        area += std::sqrt(1.0 + n2);
        mass += eta.value(i) * eta.value(i);
    }
    return params.sigma * area * cell +
           0.5 * params.density_jump() * params.g * mass * cell;
}

RemainderSlopes curvature_remainder_slopes(const Grid& g, double amp, const std::vector<int>& ks,
                                           const CutoffPair& cutoffs) {
    if (ks.size() < 2) throw ConfigError("curvature_remainder_slopes: need at least 2 modes");
    std::vector<double> kd, hn, rn;
    RemainderSlopes out;
    for (int k : ks) {
        if (3 * k > g.n[0])
            throw ConfigError("curvature_remainder_slopes: mode outside the 2/3 band");
        Field eta = Field::sample(
            g, [amp, k](const Vec& x) { return amp / k * std::cos(k * x[0]); });
        CurvatureResult res = curvature_paralinearization(eta, cutoffs);
        kd.push_back(k);
        hn.push_back(l2_norm(res.h_field));
        rn.push_back(l2_norm(res.remainder));
        out.ratio.push_back(rn.back() / hn.back());
    }
    out.h = fit_log_slope(kd, hn);
    out.remainder = fit_log_slope(kd, rn);
    return out;
}

}  // namespace muskat
