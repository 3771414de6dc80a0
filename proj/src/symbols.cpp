#include "muskat/symbols.hpp"

#include <cmath>

#include "muskat/errors.hpp"

namespace muskat {
namespace {

using VecPtr = std::shared_ptr<const std::vector<double>>;

// Gradient samples of eta, shared by every symbol closure built from it.
struct GradEta {
    VecPtr g0, g1;
    int dim;
};

GradEta grad_of(const Field& eta) {
    GradEta g;
    g.dim = eta.grid().dim;
    g.g0 = std::make_shared<const std::vector<double>>(gradient_component(eta, 0).values());
    g.g1 = g.dim == 2
               ? std::make_shared<const std::vector<double>>(gradient_component(eta, 1).values())
               : std::make_shared<const std::vector<double>>(eta.grid().size(), 0.0);
    return g;
}

// On a d=1 grid the frequency variable is scalar; the padding component of a
// Vec is ignored by contract.
Vec mask_xi(int dim, const Vec& xi) { return dim == 1 ? Vec{xi[0], 0.0} : xi; }

double lambda_val(const GradEta& g, std::size_t i, const Vec& xi_in) {
    Vec xi = mask_xi(g.dim, xi_in);
    Vec grad = {(*g.g0)[i], (*g.g1)[i]};
    double q = (1.0 + norm2(grad)) * norm2(xi) - dot(grad, xi) * dot(grad, xi);
    return std::sqrt(std::max(q, 0.0));
}

double ell_val(const GradEta& g, std::size_t i, const Vec& xi_in) {
    Vec xi = mask_xi(g.dim, xi_in);
    Vec grad = {(*g.g0)[i], (*g.g1)[i]};
    double one_p = 1.0 + norm2(grad);
    double gxi = dot(grad, xi);
    return (norm2(xi) - gxi * gxi / one_p) / std::sqrt(one_p);
}

VecPtr pointwise(const std::vector<double>& v, const std::function<double(double)>& f) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = f(v[i]);
    return std::make_shared<const std::vector<double>>(std::move(out));
}

}  // namespace

Symbol multiplier_symbol(const Grid& g, double order, std::string name,
                         std::function<double(const Vec&)> m) {
    Symbol s;
    s.grid = g;
    s.order = order;
    s.name = std::move(name);
    s.x_independent = true;
    s.eval = [m](std::size_t, const Vec& xi) { return m(xi); };
    Symbol::Term t;
    t.coef = std::make_shared<const std::vector<double>>(g.size(), 1.0);
    t.mult = m;
    s.terms.push_back(std::move(t));
    return s;
}

Symbol lambda_symbol(const Field& eta) {
    const Grid& grid = eta.grid();
    if (grid.dim == 1) {
        // (1+eta'^2)|xi|^2 - eta'^2 xi^2 = xi^2: lambda == |xi| exactly.
        return multiplier_symbol(grid, 1.0, "lambda",
                                 [](const Vec& xi) { return std::abs(xi[0]); });
    }
    GradEta g = grad_of(eta);
    Symbol s;
    s.grid = grid;
    s.order = 1.0;
    s.name = "lambda";
    s.eval = [g](std::size_t i, const Vec& xi) { return lambda_val(g, i, xi); };
    return s;
}

Symbol ell_symbol(const Field& eta) {
    const Grid& grid = eta.grid();
    GradEta g = grad_of(eta);
    Symbol s;
    s.grid = grid;
    s.order = 2.0;
    s.name = "ell";
    s.eval = [g](std::size_t i, const Vec& xi) { return ell_val(g, i, xi); };
    // Finite-sum form: (1+|G|^2)^{-1/2} |xi|^2 - sum_{ij} G_i G_j (1+|G|^2)^{-3/2} xi_i xi_j.
    std::vector<double> gsq(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        gsq[i] = (*g.g0)[i] * (*g.g0)[i] + (*g.g1)[i] * (*g.g1)[i];
    Symbol::Term t0;
    t0.coef = pointwise(gsq, [](double q) { return 1.0 / std::sqrt(1.0 + q); });
    int dim = grid.dim;
    t0.mult = [dim](const Vec& xi) { return norm2(mask_xi(dim, xi)); };
    s.terms.push_back(std::move(t0));
    for (int i = 0; i < grid.dim; ++i)
        for (int j = 0; j < grid.dim; ++j) {
            std::vector<double> c(grid.size());
            const auto& gi = i == 0 ? *g.g0 : *g.g1;
            const auto& gj = j == 0 ? *g.g0 : *g.g1;
            for (std::size_t p = 0; p < grid.size(); ++p)
                c[p] = -gi[p] * gj[p] * std::pow(1.0 + gsq[p], -1.5);
            Symbol::Term t;
            t.coef = std::make_shared<const std::vector<double>>(std::move(c));
            t.mult = [i, j](const Vec& xi) { return xi[i] * xi[j]; };
            s.terms.push_back(std::move(t));
        }
    return s;
}

namespace {

// lambda^p * (1+|grad|^2)^q family covering lambda*ell and its square roots.
Symbol power_symbol(const Field& eta, double p, double q, double order, std::string name) {
    const Grid& grid = eta.grid();
    GradEta g = grad_of(eta);
    Symbol s;
    s.grid = grid;
    s.order = order;
    s.name = std::move(name);
    s.eval = [g, p, q](std::size_t i, const Vec& xi_in) {
        Vec xi = mask_xi(g.dim, xi_in);
        if (norm2(xi) == 0.0) return 0.0;
        Vec grad = {(*g.g0)[i], (*g.g1)[i]};
        return std::pow(lambda_val(g, i, xi), p) * std::pow(1.0 + norm2(grad), q);
    };
    if (grid.dim == 1) {
        // lambda = |xi|: coefficient (1+eta'^2)^q times the multiplier |xi|^p.
        std::vector<double> c(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            c[i] = std::pow(1.0 + (*g.g0)[i] * (*g.g0)[i], q);
        Symbol::Term t;
        t.coef = std::make_shared<const std::vector<double>>(std::move(c));
        t.mult = [p](const Vec& xi) {
            double r = std::abs(xi[0]);
            return r == 0.0 ? 0.0 : std::pow(r, p);
        };
        s.terms.push_back(std::move(t));
    }
    return s;
}

}  // namespace

Symbol lambda_ell_symbol(const Field& eta) {
    return power_symbol(eta, 3.0, -1.5, 3.0, "lambda*ell");
}

Symbol sqrt_lambda_ell_symbol(const Field& eta) {
    return power_symbol(eta, 1.5, -0.75, 1.5, "sqrt(lambda*ell)");
}

Symbol inv_sqrt_lambda_ell_symbol(const Field& eta) {
    return power_symbol(eta, -1.5, 0.75, -1.5, "1/sqrt(lambda*ell)");
}

Symbol product_symbol(const Symbol& a, const Symbol& b) {
    if (a.grid != b.grid) throw ConfigError("product_symbol: grids differ");
    Symbol s;
    s.grid = a.grid;
    s.order = a.order + b.order;
    s.name = a.name + "*" + b.name;
    s.x_independent = a.x_independent && b.x_independent;
    auto ea = a.eval, eb = b.eval;
    s.eval = [ea, eb](std::size_t i, const Vec& xi) { return ea(i, xi) * eb(i, xi); };
    if (!a.terms.empty() && !b.terms.empty()) {
        for (const auto& ta : a.terms)
            for (const auto& tb : b.terms) {
                std::vector<double> c(a.grid.size());
                for (std::size_t i = 0; i < c.size(); ++i) c[i] = (*ta.coef)[i] * (*tb.coef)[i];
                Symbol::Term t;
                t.coef = std::make_shared<const std::vector<double>>(std::move(c));
                auto ma = ta.mult, mb = tb.mult;
                t.mult = [ma, mb](const Vec& xi) { return ma(xi) * mb(xi); };
                s.terms.push_back(std::move(t));
            }
    }
    return s;
}

namespace {

// Unit directions for the shell sampling.
std::vector<Vec> directions(int dim) {
    std::vector<Vec> out;
    if (dim == 1) {
        out.push_back({1.0, 0.0});
        out.push_back({-1.0, 0.0});
    } else {
        for (int j = 0; j < 16; ++j) {
            double th = Grid::two_pi * j / 16.0;
            out.push_back({std::cos(th), std::sin(th)});
        }
    }
    return out;
}

// Central-difference d_xi^alpha a(x, xi), one x-field at a time.
std::vector<double> xi_derivative(const Symbol& a, const Vec& xi, std::array<int, 2> alpha,
                                  double h) {
    const std::size_t n = a.grid.size();
    if (alpha[0] == 0 && alpha[1] == 0) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = a.eval(i, xi);
        return v;
    }
    int ax = alpha[0] > 0 ? 0 : 1;
    std::array<int, 2> lower = alpha;
    lower[ax] -= 1;
    Vec xp = xi, xm = xi;
    xp[ax] += h;
    xm[ax] -= h;
    std::vector<double> vp = xi_derivative(a, xp, lower, h);
    std::vector<double> vm = xi_derivative(a, xm, lower, h);
    for (std::size_t i = 0; i < n; ++i) vp[i] = (vp[i] - vm[i]) / (2.0 * h);
    return vp;
}

}  // namespace

SeminormReport seminorm_estimate(const Symbol& a, double m, double rho, int alpha_cap,
                                 double max_shell) {
    if (rho < 0.0 || rho > 1.0)
        throw ConfigError("seminorm_estimate: rho must lie in [0, 1]");
    if (alpha_cap < 0 || alpha_cap > 2)
        throw ConfigError("seminorm_estimate: alpha_cap must be 0, 1 or 2");
    const Grid& g = a.grid;
    SeminormReport rep;
    rep.m = m;
    rep.rho = rho;
    rep.alpha_cap = alpha_cap;
    rep.max_shell = max_shell;
    rep.x_spacing = g.spacing(0);
    if (g.dim == 2) rep.x_spacing = std::min(rep.x_spacing, g.spacing(1));

    std::vector<std::array<int, 2>> alphas = {{0, 0}};
    if (alpha_cap >= 1) {
        alphas.push_back({1, 0});
        if (g.dim == 2) alphas.push_back({0, 1});
    }
    if (alpha_cap >= 2) {
        alphas.push_back({2, 0});
        if (g.dim == 2) {
            alphas.push_back({1, 1});
            alphas.push_back({0, 2});
        }
    }

    auto dirs = directions(g.dim);
    for (double r = 0.5; r <= max_shell * (1.0 + 1e-12); r *= 2.0) {
        for (const auto& dir : dirs) {
            Vec xi = {r * dir[0], r * dir[1]};
            for (const auto& alpha : alphas) {
                int aa = alpha[0] + alpha[1];
                std::vector<double> v = xi_derivative(a, xi, alpha, 1e-2 * r);
                double wnorm = 0.0;
                for (double x : v) {
                    if (!std::isfinite(x))
                        throw ConfigError("seminorm_estimate: symbol non-finite at |xi|=" +
                                          std::to_string(r));
                    wnorm = std::max(wnorm, std::abs(x));
                }
                if (rho > 0.0) {
                    // Holder quotient over dyadic axis lags (see header note).
                    for (int ax = 0; ax < g.dim; ++ax) {
                        for (int lag = 1; lag <= g.n[ax] / 2; lag *= 2) {
                            double dist = lag * g.spacing(ax);
                            double wd = std::pow(dist, rho);
                            for (std::size_t i = 0; i < g.size(); ++i) {
                                auto ij = g.unflatten(i);
                                int shifted = ax == 0 ? (ij[0] + lag) % g.n[0] : ij[0];
                                int shifted1 = ax == 1 ? (ij[1] + lag) % g.n[1] : ij[1];
                                std::size_t jdx = g.flatten(shifted, shifted1);
                                wnorm = std::max(wnorm, std::abs(v[i] - v[jdx]) / wd);
                            }
                        }
                    }
                }
                rep.value = std::max(rep.value, std::pow(1.0 + r, aa - m) * wnorm);
            }
        }
    }
    return rep;
}

}  // namespace muskat
