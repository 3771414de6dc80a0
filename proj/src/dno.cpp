#include "muskat/dno.hpp"

#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "muskat/errors.hpp"
#include "muskat/norms.hpp"
#include "muskat/symbols.hpp"

namespace muskat {

namespace {

// m-th vertical derivative of the flat-layer harmonic extension, at the
// flat interface: |xi|^m for even m, sgn |xi|^m t(|xi|) for odd m (the
// profile is cosh-like in the layer interior, so derivatives alternate
// between the profile and its tanh-weighted companion). sgn = -1 for the
// upper layer, whose profile decays upward.
Field vertical_derivative(const Field& u, int m, const BottomSpec& b, double sgn) {
    if (m == 0) return u;
    const Grid& g = u.grid();
    double peak = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) peak = std::max(peak, std::abs(u.coeff(i)));
    std::vector<Complex> sp(g.size(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        // |xi|^m amplifies rounding dust by many orders of magnitude, so act
        // only on the de-aliasing band and on coefficients that carry actual
        // content (same floor as the paraproduct's shell skipping).
        if (!g.in_dealias_band(i)) continue;
        if (std::abs(u.coeff(i)) <= 1e-14 * peak) continue;
        double r = std::sqrt(norm2(g.wavevector(i)));
        double v = std::pow(r, m);
        if (m % 2 == 1) v *= sgn * flat_profile_factor(b, r);
        sp[i] = v * u.coeff(i);
    }
    return Field::from_spectrum(g, sp);
}

}  // namespace

std::function<double(const Vec&)> dno_flat_multiplier(const BottomSpec& bottom, Side side) {
    if (bottom.kind == BottomSpec::Kind::Graph)
        throw ConfigError("dno_flat_multiplier: graph walls have no closed form");
    double sgn = side == Side::Lower ? 1.0 : -1.0;
    BottomSpec b = bottom;
    return [b, sgn](const Vec& xi) {
        double r = std::sqrt(norm2(xi));
        if (r == 0.0) return 0.0;
        return sgn * r * flat_profile_factor(b, r);
    };
}

DnoResult dno_series(const Field& eta, const Field& f, int order, const BottomSpec& bottom,
                     Side side) {
    if (bottom.kind == BottomSpec::Kind::Graph)
        throw ConfigError("dno_series: graph walls are served by the elliptic route");
    if (order < 0) throw ConfigError("dno_series: order must be >= 0");
    if (eta.grid() != f.grid()) throw ConfigError("dno_series: eta and f on different grids");
    const Grid& g = eta.grid();
    double sgn = side == Side::Lower ? 1.0 : -1.0;

    // eta^m / m!, products de-aliased as they accumulate.
    std::vector<Field> pw(order + 1);
    pw[0] = Field::constant(g, 1.0);
    for (int m = 1; m <= order; ++m) pw[m] = scale(multiply(pw[m - 1], eta), 1.0 / m);

    auto dv = [&](const Field& u, int m) { return vertical_derivative(u, m, bottom, sgn); };

    // Boundary data of the flat-extension pieces: the extension of psi_j
    // evaluated along the moving surface must cancel the order-j excess,
    // psi_j = -sum_{m=1}^{j} (eta^m/m!) D_m psi_{j-m}, psi_0 = f.
    std::vector<Field> psi(order + 1);
    psi[0] = f;
    for (int j = 1; j <= order; ++j) {
        Field acc = multiply(pw[1], dv(psi[j - 1], 1));
        for (int m = 2; m <= j; ++m) acc = add(acc, multiply(pw[m], dv(psi[j - m], m)));
        psi[j] = scale(acc, -1.0);
    }

    // Order-n slice of the upward conormal derivative along the surface:
    //   G_n = sum_m (eta^m/m!) D_{m+1} psi_{n-m}
    //         - grad eta . sum_m (eta^m/m!) grad D_m psi_{n-1-m}.
    std::vector<Field> grad_eta;
    for (int ax = 0; ax < g.dim; ++ax) grad_eta.push_back(gradient_component(eta, ax));
    DnoResult res;
    res.method = "series(" + std::to_string(order) + ")";
    Field total = Field::zeros(g);
    for (int n = 0; n <= order; ++n) {
        Field term = dv(psi[n], 1);
        for (int m = 1; m <= n; ++m) term = add(term, multiply(pw[m], dv(psi[n - m], m + 1)));
        for (int ax = 0; ax < g.dim; ++ax) {
            Field s = Field::zeros(g);
            for (int m = 0; m + 1 <= n; ++m) {
                Field gm = gradient_component(dv(psi[n - 1 - m], m), ax);
                s = add(s, m == 0 ? gm : multiply(pw[m], gm));
            }
            if (n >= 1) term = sub(term, multiply(grad_eta[ax], s));
        }
        total = add(total, term);
        res.term_norms.push_back(l2_norm(term));
    }

    // Refuse to certify a tail that is still growing. Odd-order slices can
    // vanish identically (infinite-depth cancellations), so the last term is
    // held against the preceding two, and rounding-level terms are never
    // grounds for rejection.
    if (order >= 1) {
        double mx = *std::max_element(res.term_norms.begin(), res.term_norms.end());
        double last = res.term_norms[order];
        double prev = res.term_norms[order - 1];
        if (order >= 2) prev = std::max(prev, res.term_norms[order - 2]);
        if (last > prev && last > 1e-13 * mx)
            throw ConvergenceError(
                "dno_series: term norms fail to decay; the surface is too steep for the "
                "flat-layer expansion",
                res.term_norms);
    }

    res.boundary_value = total;
    res.residual_norm = res.term_norms.back();
    return res;
}

namespace {

// Nodal geometry of the vertically mapped strip y = yb(x) + sigma (yt - yb).
struct Strip {
    Grid g;
    int ny = 0;
    std::vector<double> yb, yt;    // wall / interface heights
    std::vector<double> ybp, ytp;  // spectral x-derivatives
};

Strip build_strip(const Field& eta, const BottomSpec& bottom, int ny) {
    const Grid& g = eta.grid();
    if (g.dim != 1) throw ConfigError("dno_elliptic: one-dimensional interfaces only");
    if (ny < 2) throw ConfigError("dno_elliptic: need at least two vertical cells");
    Strip s;
    s.g = g;
    s.ny = ny;
    s.yt = eta.values();
    s.ytp = gradient_component(eta, 0).values();
    int n = g.n[0];
    switch (bottom.kind) {
        case BottomSpec::Kind::Infinite: {
            // Harmonic modes decay like e^{-|k| y}, so a Neumann wall three
            // periods down perturbs the gravest mode below rounding.
            double H = 3.0 * g.lengths[0];
            s.yb.assign(n, -H);
            s.ybp.assign(n, 0.0);
            break;
        }
        case BottomSpec::Kind::Flat:
            s.yb.assign(n, -bottom.depth);
            s.ybp.assign(n, 0.0);
            break;
        case BottomSpec::Kind::Graph:
            if (bottom.profile->grid() != g)
                throw ConfigError("dno_elliptic: wall profile grid differs from the surface");
            s.yb = bottom.profile->values();
            s.ybp = gradient_component(*bottom.profile, 0).values();
            break;
    }
    double gap = s.yt[0] - s.yb[0];
    for (int i = 1; i < n; ++i) gap = std::min(gap, s.yt[i] - s.yb[i]);
    if (gap <= 0.0)
        throw GeometryError("dno_elliptic: interface touches the wall (min gap " +
                            std::to_string(gap) + ")");
    return s;
}

struct StripSolution {
    std::vector<double> phi;  // (ny+1) * n, wall row first
    double rel_residual = 0.0;
};

// Laplace's equation in mapped coordinates: div_(x,sigma) K grad phi = 0 with
//   K = [[Delta, -y_x], [-y_x, (1+y_x^2)/Delta]],  y_x = yb' + sigma (yt'-yb'),
// Dirichlet data f along sigma=1, natural (no-flux) closure at sigma=0.
// Bilinear elements on the tensor mesh, 2x2 Gauss points, K interpolated
// from its nodal values; the assembled matrix is SPD (det K = 1).
StripSolution solve_strip(const Strip& s, const std::vector<double>& f) {
    int n = s.g.n[0], ny = s.ny;
    double hx = s.g.spacing(0), hs = 1.0 / ny;

    std::vector<double> K11(static_cast<std::size_t>(ny + 1) * n);
    std::vector<double> K12(K11.size()), K22(K11.size());
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < n; ++i) {
            double delta = s.yt[i] - s.yb[i];
            double yx = s.ybp[i] + (j * hs) * (s.ytp[i] - s.ybp[i]);
            std::size_t u = static_cast<std::size_t>(j) * n + i;
            K11[u] = delta;
            K12[u] = -yx;
            K22[u] = (1.0 + yx * yx) / delta;
        }

    auto node = [n](int j, int i) { return j * n + i; };
    const int nu = ny * n;  // unknowns; the sigma=1 row is eliminated
    const double gp[2] = {0.5 - 0.5 / std::sqrt(3.0), 0.5 + 0.5 / std::sqrt(3.0)};

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(16) * n * ny);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(nu);

    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < n; ++i) {
            int ip = (i + 1) % n;
            int corner[4] = {node(j, i), node(j, ip), node(j + 1, i), node(j + 1, ip)};
            double Ae[4][4] = {};
            for (int gx = 0; gx < 2; ++gx)
                for (int gz = 0; gz < 2; ++gz) {
                    double xi = gp[gx], ze = gp[gz];
                    double N[4] = {(1 - xi) * (1 - ze), xi * (1 - ze), (1 - xi) * ze, xi * ze};
                    double Nx[4] = {-(1 - ze) / hx, (1 - ze) / hx, -ze / hx, ze / hx};
                    double Ns[4] = {-(1 - xi) / hs, -xi / hs, (1 - xi) / hs, xi / hs};
                    double k11 = 0, k12 = 0, k22 = 0;
                    for (int a = 0; a < 4; ++a) {
                        k11 += N[a] * K11[corner[a]];
                        k12 += N[a] * K12[corner[a]];
                        k22 += N[a] * K22[corner[a]];
                    }
                    double w = 0.25 * hx * hs;
                    for (int a = 0; a < 4; ++a)
                        for (int c = 0; c < 4; ++c)
                            Ae[a][c] += w * (k11 * Nx[a] * Nx[c] +
                                             k12 * (Nx[a] * Ns[c] + Ns[a] * Nx[c]) +
                                             k22 * Ns[a] * Ns[c]);
                }
            for (int a = 0; a < 4; ++a) {
                if (corner[a] >= nu) continue;
                for (int c = 0; c < 4; ++c) {
                    if (corner[c] >= nu)
                        b[corner[a]] -= Ae[a][c] * f[corner[c] - nu];
                    else
                        trip.emplace_back(corner[a], corner[c], Ae[a][c]);
                }
            }
        }

    Eigen::SparseMatrix<double> A(nu, nu);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() != Eigen::Success)
        throw ConvergenceError("dno_elliptic: factorization of the mapped Laplacian failed", {});
    Eigen::VectorXd x = ldlt.solve(b);
    double bn = b.norm();
    double rn = (A * x - b).norm();

    StripSolution sol;
    sol.rel_residual = bn > 0.0 ? rn / bn : rn;
    sol.phi.resize(static_cast<std::size_t>(ny + 1) * n);
    for (int u = 0; u < nu; ++u) sol.phi[u] = x[u];
    for (int i = 0; i < n; ++i) sol.phi[nu + i] = f[i];
    return sol;
}

// Upward conormal derivative along sigma=1:
//   G f = -eta' f' + (1+eta'^2) phi_sigma / Delta,
// with phi_sigma from the one-sided second-order stencil.
Field conormal_trace(const Strip& s, const std::vector<double>& phi, const Field& f) {
    int n = s.g.n[0], ny = s.ny;
    double hs = 1.0 / ny;
    std::vector<double> fp = gradient_component(f, 0).values();
    std::vector<double> gv(n);
    for (int i = 0; i < n; ++i) {
        double ps =
            (3.0 * phi[ny * n + i] - 4.0 * phi[(ny - 1) * n + i] + phi[(ny - 2) * n + i]) /
            (2.0 * hs);
        gv[i] = -s.ytp[i] * fp[i] +
                (1.0 + s.ytp[i] * s.ytp[i]) * ps / (s.yt[i] - s.yb[i]);
    }
    return Field::from_values(s.g, gv);
}

}  // namespace

DnoResult dno_elliptic(const Field& eta, const Field& f, const BottomSpec& bottom, int ny,
                       Side side) {
    if (eta.grid() != f.grid()) throw ConfigError("dno_elliptic: eta and f on different grids");
    if (side == Side::Upper) {
        // Reflect through y -> -y: the upper layer becomes a lower-type strip
        // with surface -eta, and the upward conormal picks up a sign.
        BottomSpec wall = bottom;
        if (bottom.kind == BottomSpec::Kind::Graph)
            wall = BottomSpec::graph(scale(*bottom.profile, -1.0));
        DnoResult res = dno_elliptic(scale(eta, -1.0), f, wall, ny, Side::Lower);
        res.boundary_value = scale(res.boundary_value, -1.0);
        res.interior->mirrored = true;
        return res;
    }
    Strip s = build_strip(eta, bottom, ny);
    StripSolution sol = solve_strip(s, f.values());
    DnoResult res;
    res.method = "elliptic(" + std::to_string(ny) + ")";
    res.boundary_value = conormal_trace(s, sol.phi, f);
    res.residual_norm = sol.rel_residual;
    DnoInterior in;
    in.grid = s.g;
    in.ny = ny;
    in.phi = std::move(sol.phi);
    in.yb = std::move(s.yb);
    in.yt = std::move(s.yt);
    res.interior = std::move(in);
    return res;
}

Field apply_dno(const Field& eta, const Field& f, const BottomSpec& bottom, Side side,
                const DnoEval& how) {
    if (how.method == DnoEval::Method::Series)
        return dno_series(eta, f, how.series_order, bottom, side).boundary_value;
    return dno_elliptic(eta, f, bottom, how.elliptic_ny, side).boundary_value;
}

DefectReport dno_remainder_order(const Field& eta, const BottomSpec& bottom, const CutoffPair& c,
                                 const std::vector<int>& probe_ks, const DnoEval& how,
                                 Side side) {
    Symbol lam = lambda_symbol(eta);
    bool lower = side == Side::Lower;
    auto op = [&](const Field& u) {
        Field gu = apply_dno(eta, u, bottom, side, how);
        Field tl = apply_para(lam, u, c);
        return lower ? sub(gu, tl) : add(gu, tl);
    };
    return fit_operator_order(op, eta.grid(), probe_ks);
}

double dno_contraction_check(const Field& eta1, const Field& eta2, const Field& f,
                             const BottomSpec& bottom, double s, const DnoEval& how, Side side) {
    double den = sobolev_norm(sub(eta1, eta2), s);
    if (den == 0.0) return 0.0;
    Field diff = sub(apply_dno(eta1, f, bottom, side, how),
                     apply_dno(eta2, f, bottom, side, how));
    return sobolev_norm(diff, s - 1.5) / den;
}

VelocityField reconstruct_velocity(const DnoResult& result, const PhaseParams& params) {
    if (!result.interior)
        throw ConfigError("reconstruct_velocity: result carries no interior potential "
                          "(series evaluations cannot be post-processed)");
    const DnoInterior& in = *result.interior;
    const Grid& g = in.grid;
    const int n = g.n[0], ny = in.ny;
    const double hs = 1.0 / ny;
    double mu = in.mirrored ? params.mu_plus : params.mu_minus;
    if (mu <= 0.0)
        throw ConfigError("reconstruct_velocity: nonpositive viscosity on the stored side");

    std::vector<double> ybp = gradient_component(Field::from_values(g, in.yb), 0).values();
    std::vector<double> ytp = gradient_component(Field::from_values(g, in.yt), 0).values();
    auto node = [n](int j, int i) { return j * n + i; };

    auto ddx_rows = [&](const std::vector<double>& a) {
        std::vector<double> out(a.size());
        std::vector<double> row(n);
        for (int j = 0; j <= ny; ++j) {
            std::copy(a.begin() + node(j, 0), a.begin() + node(j, 0) + n, row.begin());
            std::vector<double> d = gradient_component(Field::from_values(g, row), 0).values();
            std::copy(d.begin(), d.end(), out.begin() + node(j, 0));
        }
        return out;
    };
    auto dds = [&](const std::vector<double>& a) {
        std::vector<double> out(a.size());
        for (int i = 0; i < n; ++i) {
            out[node(0, i)] =
                (-3.0 * a[node(0, i)] + 4.0 * a[node(1, i)] - a[node(2, i)]) / (2.0 * hs);
            for (int j = 1; j < ny; ++j)
                out[node(j, i)] = (a[node(j + 1, i)] - a[node(j - 1, i)]) / (2.0 * hs);
            out[node(ny, i)] =
                (3.0 * a[node(ny, i)] - 4.0 * a[node(ny - 1, i)] + a[node(ny - 2, i)]) /
                (2.0 * hs);
        }
        return out;
    };

    std::vector<double> delta(n), yx(in.phi.size());
    for (int i = 0; i < n; ++i) delta[i] = in.yt[i] - in.yb[i];
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < n; ++i)
            yx[node(j, i)] = ybp[i] + (j * hs) * (ytp[i] - ybp[i]);

    // u = -(1/mu) grad phi in the strip frame: the physical x-derivative of
    // phi is phi_x - phi_sigma y_x / Delta, the vertical one phi_sigma / Delta.
    std::vector<double> phx = ddx_rows(in.phi), phs = dds(in.phi);
    VelocityField v;
    v.ux.resize(in.phi.size());
    v.uy.resize(in.phi.size());
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t u = node(j, i);
            double ps = phs[u] / delta[i];
            v.ux[u] = -(phx[u] - yx[u] * ps) / mu;
            v.uy[u] = -ps / mu;
        }

    // Interior incompressibility, mapped the same way; wall rows excluded
    // (their one-sided stencils measure the closure, not the PDE).
    std::vector<double> uxx = ddx_rows(v.ux), uxs = dds(v.ux), uys = dds(v.uy);
    double acc = 0.0;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < n; ++i) {
            std::size_t u = node(j, i);
            double div = (uxx[u] - uxs[u] * yx[u] / delta[i]) + uys[u] / delta[i];
            acc += div * div;
        }
    v.divergence_norm = std::sqrt(acc / (static_cast<double>(ny - 1) * n));

    // No-penetration along the wall graph.
    acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double r = (v.uy[node(0, i)] - ybp[i] * v.ux[node(0, i)]) /
                   std::sqrt(1.0 + ybp[i] * ybp[i]);
        acc += r * r;
    }
    v.wall_residual = std::sqrt(acc / n);

    // Kinematic trace identity in the stored frame: u_y - eta' u_x along
    // sigma=1 must equal -(1/mu) G f; a mirrored interior pairs with the
    // negated boundary value.
    double sgn = in.mirrored ? -1.0 : 1.0;
    const std::vector<double>& gv = result.boundary_value.values();
    acc = 0.0;
    for (int i = 0; i < n; ++i) {
        double lhs = v.uy[node(ny, i)] - ytp[i] * v.ux[node(ny, i)];
        double r = lhs + sgn * gv[i] / mu;
        acc += r * r;
    }
    v.kinematic_residual = std::sqrt(acc / n);

    // Report physical components: a mirrored interior has its vertical axis
    // flipped.
    if (in.mirrored)
        for (double& u : v.uy) u = -u;
    return v;
}

}  // namespace muskat
