#include "muskat/twophase.hpp"

#include <cmath>
#include <cstdlib>

#include "muskat/errors.hpp"
#include "muskat/geometry.hpp"
#include "muskat/norms.hpp"

namespace muskat {

Field pressure_jump(const Field& eta, const PhaseParams& params) {
    return add(scale(mean_curvature(eta), params.sigma),
               scale(eta, params.density_jump() * params.g));
}

namespace {

// Inverse of the flat-interface symbol of the eliminated operator,
//   (1/mu+)(-|xi| t+) - (1/mu-)(|xi| t-) = -|xi| (t+/mu+ + t-/mu-),
// applied mode by mode; the zero mode stays zero (gauge).
Field precondition(const Field& u, const PhaseParams& p) {
    const Grid& g = u.grid();
    std::vector<Complex> sp(g.size(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < g.size(); ++i) {
        double r = std::sqrt(norm2(g.wavevector(i)));
        if (r == 0.0) continue;
        // Graph walls have no closed-form factor; the infinite-depth 1 keeps
        // the preconditioner valid, just less sharp.
        double m = -r * (flat_profile_factor(p.bottom_plus, r) / p.mu_plus +
                         flat_profile_factor(p.bottom_minus, r) / p.mu_minus);
        sp[i] = u.coeff(i) / m;
    }
    return Field::from_spectrum(g, sp);
}

}  // namespace

TraceSolution solve_traces(const Field& eta, const Field& k, const PhaseParams& params,
                           const DnoEval& how, double tol, int max_iter) {
    params.validate();
    if (eta.grid() != k.grid())
        throw ConfigError("solve_traces: eta and the source on different grids");
    if (tol <= 0.0) throw ConfigError("solve_traces: tolerance must be positive");
    if (vertical_separation(eta, params.bottom_minus, Side::Lower) <= 0.0)
        throw GeometryError("solve_traces: interface touches the lower wall");

    const Grid& g = eta.grid();
    Field k0 = drop_mean(k);

    TraceSolution ts;
    if (params.one_phase()) {
        // The flux equation is dropped; the jump condition alone fixes the
        // trace up to its gauge constant.
        ts.f_minus = k0;
        ts.f_plus = Field::zeros(g);
        return ts;
    }
    if (vertical_separation(eta, params.bottom_plus, Side::Upper) <= 0.0)
        throw GeometryError("solve_traces: interface touches the upper wall");

    // The whole system lives on the zero-mean quotient (constants are gauge),
    // so the operator and data are projected there; this also discards the
    // O(h^2) spurious mean an elliptic evaluation leaves behind.
    auto op = [&](const Field& v) {
        Field gp = apply_dno(eta, v, params.bottom_plus, Side::Upper, how);
        Field gm = apply_dno(eta, v, params.bottom_minus, Side::Lower, how);
        return drop_mean(
            sub(scale(gp, 1.0 / params.mu_plus), scale(gm, 1.0 / params.mu_minus)));
    };
    auto hnorm = [](const Field& u) { return sobolev_norm(u, -0.5); };

    Field b = drop_mean(scale(apply_dno(eta, k0, params.bottom_plus, Side::Upper, how),
                              1.0 / params.mu_plus));
    double bnorm = hnorm(b);

    Field x = Field::zeros(g);
    if (bnorm > 0.0) {
        // BiCGSTAB on the zero-mean subspace, right preconditioning.
        double stop = tol * bnorm;
        Field r = b, rhat = b;
        Field p = Field::zeros(g), v = Field::zeros(g);
        double rho = 1.0, alpha = 1.0, omega = 1.0;
        bool done = false;
        for (int it = 1; it <= max_iter && !done; ++it) {
            double rho_new = inner_l2(rhat, r);
            if (std::abs(rho_new) < 1e-300)
                throw ConvergenceError("solve_traces: Krylov breakdown (rho ~ 0)", ts.history);
            double beta = (rho_new / rho) * (alpha / omega);
            rho = rho_new;
            p = add(r, scale(sub(p, scale(v, omega)), beta));
            Field ph = precondition(p, params);
            v = op(ph);
            double rv = inner_l2(rhat, v);
            if (std::abs(rv) < 1e-300)
                throw ConvergenceError("solve_traces: Krylov breakdown (r.v ~ 0)", ts.history);
            alpha = rho / rv;
            Field s = sub(r, scale(v, alpha));
            x = add(x, scale(ph, alpha));
            double snorm = hnorm(s);
            if (snorm <= stop) {
                ts.history.push_back(snorm);
                ts.iterations = it;
                done = true;
                break;
            }
            Field sh = precondition(s, params);
            Field t = op(sh);
            double tt = inner_l2(t, t);
            if (tt == 0.0)
                throw ConvergenceError("solve_traces: Krylov breakdown (t = 0)", ts.history);
            omega = inner_l2(t, s) / tt;
            x = add(x, scale(sh, omega));
            r = sub(s, scale(t, omega));
            double rnorm = hnorm(r);
            ts.history.push_back(rnorm);
            ts.iterations = it;
            if (rnorm <= stop) done = true;
        }
        if (!done)
            throw ConvergenceError("solve_traces: iteration cap reached at residual " +
                                       std::to_string(ts.history.back()),
                                   ts.history);
    }

    ts.f_minus = drop_mean(x);
    ts.f_plus = drop_mean(sub(ts.f_minus, k0));
    ts.residual_jump = hnorm(sub(sub(ts.f_minus, ts.f_plus), k0));
    Field flux = drop_mean(sub(
        scale(apply_dno(eta, ts.f_plus, params.bottom_plus, Side::Upper, how),
              1.0 / params.mu_plus),
        scale(apply_dno(eta, ts.f_minus, params.bottom_minus, Side::Lower, how),
              1.0 / params.mu_minus)));
    ts.residual_flux = hnorm(flux);
    ts.residual_flux_l2 = l2_norm(flux);
    return ts;
}

TraceSolution solve_traces(const Field& eta, const PhaseParams& params, const DnoEval& how,
                           double tol, int max_iter) {
    return solve_traces(eta, pressure_jump(eta, params), params, how, tol, max_iter);
}

}  // namespace muskat
