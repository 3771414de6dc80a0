#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "muskat/field.hpp"

namespace muskat {

// Symbol a(x, xi): x ranges over the grid (flat index), xi over R^d. The
// symbols of interest here are real-valued and positively homogeneous in xi
// away from xi = 0; eval returns 0 at xi = 0 (that mode never matters: the
// low-frequency cutoff in the quantization vanishes there). On d=1 grids the
// padding component xi[1] is ignored by contract.
//
// When the symbol is a finite sum  sum_j c_j(x) m_j(xi)  the decomposition is
// kept in `terms` so the paraproduct fast path can use it; `terms` is empty
// for genuinely non-separable symbols (lambda*ell in d=2).
struct Symbol {
    struct Term {
        std::shared_ptr<const std::vector<double>> coef;  // c_j on the grid
        std::function<double(const Vec&)> mult;           // m_j(xi)
    };

    Grid grid;
    double order = 0.0;
    std::string name;
    std::function<double(std::size_t, const Vec&)> eval;
    std::vector<Term> terms;
    bool x_independent = false;
};

// Plain Fourier multiplier viewed as a symbol.
Symbol multiplier_symbol(const Grid& g, double order, std::string name,
                         std::function<double(const Vec&)> m);

// First-order principal symbol of the Dirichlet-Neumann operator:
//   lambda(x,xi) = ( (1+|grad eta|^2)|xi|^2 - (grad eta . xi)^2 )^{1/2}.
// Satisfies lambda >= |xi| pointwise; in d=1 it collapses to |xi| exactly.
Symbol lambda_symbol(const Field& eta);

// Second-order symbol of the paralinearized mean-curvature operator:
//   ell(x,xi) = (1+|grad eta|^2)^{-1/2} ( |xi|^2 - (grad eta . xi)^2/(1+|grad eta|^2) ).
Symbol ell_symbol(const Field& eta);

// Third-order product symbol lambda*ell = (1+|grad eta|^2)^{-3/2} lambda^3,
// elliptic: lambda*ell >= |xi|^3 / (1+|grad eta|_inf^2)^{3/2}.
Symbol lambda_ell_symbol(const Field& eta);

// Half-order companions used by the adjoint-defect probes and energy
// arguments: (lambda*ell)^{1/2} (order 3/2) and its reciprocal (order -3/2).
Symbol sqrt_lambda_ell_symbol(const Field& eta);
Symbol inv_sqrt_lambda_ell_symbol(const Field& eta);

// Pointwise product symbol (order adds; separable decompositions combine when
// both factors carry one).
Symbol product_symbol(const Symbol& a, const Symbol& b);

// Numerical stand-in for the symbol-class seminorm
//   M_rho^m(a) = sup_{|alpha| <= cap} sup_{|xi| >= 1/2}
//                  |(1+|xi|)^{|alpha|-m} d_xi^alpha a(., xi)|_{W^{rho,inf}}.
// The true sup over |alpha| <= 2(d+2)+rho is cut to alpha_cap <= 2 (documented
// estimator reduction); xi runs over dyadic shells {1/2, 1, 2, ..., max_shell}
// with 16 directions (2 in d=1); xi-derivatives are central differences with
// relative step 1e-2. The W^{rho,inf} part in x uses the grid max plus, for
// rho > 0, a discrete Holder quotient over axis-aligned dyadic lags; that
// quotient depends on the grid spacing, which is reported, with no claim of
// h -> 0 convergence.
struct SeminormReport {
    double value = 0.0;
    double m = 0.0;
    double rho = 0.0;
    int alpha_cap = 2;
    double max_shell = 0.0;
    double x_spacing = 0.0;  // finest grid spacing used by the Holder quotient
};

SeminormReport seminorm_estimate(const Symbol& a, double m, double rho,
                                 int alpha_cap = 2, double max_shell = 32.0);

}  // namespace muskat
