#pragma once

// Interface-trace system of the two-phase problem: given the surface eta,
// find the potential traces f- and f+ with
//
//   f- - f+ = pressure jump (surface tension + gravity),
//   (1/mu+) G+(eta) f+ - (1/mu-) G-(eta) f- = 0   (flux continuity),
//
// both determined up to additive constants; zero-mean representatives are
// returned. f+ is eliminated through the jump condition and the remaining
// operator equation is solved by a preconditioned Krylov iteration, the
// preconditioner being the inverse of the flat-interface symbol
// (1/mu+)(-|xi| t+) - (1/mu-)(|xi| t-).

#include <vector>

#include "muskat/dno.hpp"
#include "muskat/phase.hpp"

namespace muskat {

// sigma H(eta) + (rho- - rho+) g eta: the pressure jump the traces must
// reproduce (lower density alone in the one-phase case).
Field pressure_jump(const Field& eta, const PhaseParams& params);

struct TraceSolution {
    Field f_minus, f_plus;  // zero-mean representatives
    int iterations = 0;
    // Jump condition, measured against the zero-mean part of the source.
    double residual_jump = 0.0;  // H^{-1/2}
    // Flux continuity, re-evaluated with the returned traces on the
    // zero-mean quotient (an elliptic evaluation leaves an O(h^2) spurious
    // mean that is pure gauge).
    double residual_flux = 0.0;     // H^{-1/2}
    double residual_flux_l2 = 0.0;  // L2
    std::vector<double> history;    // Krylov residual per iteration (H^{-1/2})
};

// Explicit-source form: solve the system with a given jump source k.
// One-phase parameters short-circuit to f- = k - mean(k), f+ = 0.
// Throws GeometryError when eta touches a wall, ConfigError on invalid
// parameters, ConvergenceError (with the residual history) at the
// iteration cap.
TraceSolution solve_traces(const Field& eta, const Field& k, const PhaseParams& params,
                           const DnoEval& how, double tol = 1e-10, int max_iter = 200);

// Convenience form: the source is pressure_jump(eta, params).
TraceSolution solve_traces(const Field& eta, const PhaseParams& params, const DnoEval& how,
                           double tol = 1e-10, int max_iter = 200);

}  // namespace muskat
