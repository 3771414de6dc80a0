#pragma once

// Interface geometry: mean curvature of a graph, its paralinearization
// against the second-order symbol ell, distances to the rigid walls, and the
// physical energy (wetted area plus gravitational potential).

#include <array>
#include <vector>

#include "muskat/norms.hpp"
#include "muskat/paradiff.hpp"
#include "muskat/phase.hpp"

namespace muskat {

// H(eta) = -div(grad eta / sqrt(1 + |grad eta|^2)); spectral derivatives,
// pointwise quotient, dealiased. Exactly mean-free (divergence form).
Field mean_curvature(const Field& eta);

struct CurvatureResult {
    Field h_field;     // H(eta)
    // Per-point symmetric matrix M = (1+|grad|^2)^{-1/2} Id
    //                              - grad x grad (1+|grad|^2)^{-3/2},
    // row-major d x d in the first d*d slots. Satisfies M xi . xi = ell(x, xi)
    // and has eigenvalues in (0, 1].
    std::vector<std::array<double, 4>> m_matrix;
    Field t_ell_eta;   // T_ell applied to eta itself
    Field remainder;   // R_H = H(eta) - T_ell eta
};

CurvatureResult curvature_paralinearization(const Field& eta, const CutoffPair& cutoffs);

struct BoundaryDistance {
    double vertical_min;   // signed min of (surface - wall); negative = crossing
    double euclidean_min;  // min over sample pairs, periodic in x
};

// Both +infinity for an infinite layer. Euclidean distance is a brute-force
// pairwise search over grid samples (exact at desk scale).
BoundaryDistance boundary_distance(const Field& eta, const BottomSpec& bottom);

// E = sigma * integral sqrt(1+|grad eta|^2) + (drho g / 2) * integral eta^2,
// with drho the effective density difference from params.
double energy(const Field& eta, const PhaseParams& params);

// Diagnostic along the rescaled family eta_k = (amp/k) cos(k x): log-log
// slopes of |H| and |R_H| in L2 versus k, plus the ratio |R_H|/|H| at each k.
// The remainder must stay subordinate to H; the smoothing estimate itself is
// normalized by surface-dependent constants and is not certified here.
struct RemainderSlopes {
    SlopeFit h;
    SlopeFit remainder;
    std::vector<double> ratio;
};

RemainderSlopes curvature_remainder_slopes(const Grid& g, double amp, const std::vector<int>& ks,
                                           const CutoffPair& cutoffs);

}  // namespace muskat
