#pragma once

// Dirichlet-to-Neumann operators for a fluid layer bounded by the moving
// interface graph and a rigid wall. Two independent evaluation routes:
//
//  - a perturbation series about the flat interface (infinite or flat
//    walls), with the flat-layer vertical-derivative multipliers driving a
//    recursion in powers of eta;
//  - a mapped elliptic solve on sigma coordinates (straight vertical lines
//    from wall to interface), second-order finite elements, supporting
//    graph walls and retaining the interior potential.
//
// Sign convention: both sides use the upward normal, so the flat-interface
// operator is |xi| t(h|xi|) below and its negative above. The upper-layer
// elliptic solve reflects the geometry through y -> -y and reuses the lower
// solver.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "muskat/field.hpp"
#include "muskat/paradiff.hpp"
#include "muskat/phase.hpp"

namespace muskat {

// Flat-interface multiplier: Lower |xi| t(xi), Upper -|xi| t(xi), with
// t = tanh(depth |xi|) for a flat wall and 1 for an infinite layer.
// Graph walls have no closed form and are rejected.
std::function<double(const Vec&)> dno_flat_multiplier(const BottomSpec& bottom, Side side);

// Interior potential on the mapped strip; row j holds the sigma = j/ny
// level, j = 0 at the wall, j = ny at the interface. Upper-side solves
// store the reflected configuration (mirrored = true): heights and the
// potential live in y -> -y coordinates.
struct DnoInterior {
    Grid grid;
    int ny = 0;
    std::vector<double> phi;  // (ny+1) * grid.size(), wall row first
    std::vector<double> yb;   // nodal wall height
    std::vector<double> yt;   // nodal interface height
    bool mirrored = false;
};

struct DnoResult {
    Field boundary_value;
    std::string method;
    // Series: norm of the last retained term (Cauchy tail estimate).
    // Elliptic: relative algebraic residual of the linear solve.
    double residual_norm = 0.0;
    std::vector<double> term_norms;  // series only: per-order L2 norms
    std::optional<DnoInterior> interior;
};

// Perturbation series up to the given order (inclusive). Requires an
// infinite or flat wall. Throws ConvergenceError with the term-norm history
// when the tail fails to decay.
DnoResult dno_series(const Field& eta, const Field& f, int order, const BottomSpec& bottom,
                     Side side = Side::Lower);

// Mapped elliptic solve with ny vertical cells (one-dimensional interfaces
// only). Infinite layers are truncated at depth 3 * period with a Neumann
// closure. Throws GeometryError when the interface touches the wall.
DnoResult dno_elliptic(const Field& eta, const Field& f, const BottomSpec& bottom, int ny,
                       Side side = Side::Lower);

// Uniform handle for operator positions (trace solves, time stepping).
struct DnoEval {
    enum class Method { Series, Elliptic } method = Method::Series;
    int series_order = 12;
    int elliptic_ny = 64;
};

Field apply_dno(const Field& eta, const Field& f, const BottomSpec& bottom, Side side,
                const DnoEval& how);

// Operator-order fit of R = G(eta) - T_lambda on probe waves (dust-floor
// rule as in the paradifferential defect fits). The remainder acts one full
// derivative below G; the configured smoothing delta only enters the bound
// asserted by callers.
DefectReport dno_remainder_order(const Field& eta, const BottomSpec& bottom, const CutoffPair& c,
                                 const std::vector<int>& probe_ks, const DnoEval& how,
                                 Side side = Side::Lower);

// |G(eta1)f - G(eta2)f|_{H^{s-3/2}} / |eta1 - eta2|_{H^s}; bounded as the
// surfaces approach each other.
double dno_contraction_check(const Field& eta1, const Field& eta2, const Field& f,
                             const BottomSpec& bottom, double s, const DnoEval& how,
                             Side side = Side::Lower);

// Interior Darcy velocity u = -(1/mu) grad phi from an elliptic result,
// with discretization-level consistency checks.
struct VelocityField {
    std::vector<double> ux, uy;  // node-ordered like DnoInterior::phi
    double divergence_norm = 0.0;   // L2 of the interior divergence
    double wall_residual = 0.0;     // L2 of u . wall normal at the wall
    double kinematic_residual = 0.0;  // sqrt(1+|grad eta|^2) u.n vs -(1/mu) G f
};

VelocityField reconstruct_velocity(const DnoResult& result, const PhaseParams& params);

}  // namespace muskat
