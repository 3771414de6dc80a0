#pragma once

// Time integration of the interface evolution.
//
// The right-hand sides assemble the surface-tension/gravity source and push
// it through the Dirichlet-to-Neumann operator (one phase), or through the
// interfacial trace solve first (two phases). Two steppers share them:
//
//  - an exponential IMEX scheme: the flat-interface linearization is a
//    diagonal Fourier multiplier and is integrated exactly; the remainder is
//    treated explicitly to second order, with dt halving when the remainder
//    changes too fast across a step;
//  - the frequency-truncated scheme: a sharp low-pass at |k| <= 1/eps inside
//    and outside the right-hand side, integrated with classical RK4, which
//    is non-stiff once the retained band is fixed.
//
// Experiment drivers at the bottom measure the properties the solver theory
// predicts: residual smoothing of the third-order paradifferential
// reduction, Lipschitz dependence on initial data, and the parabolic
// lambda^{-1} eta(lambda^3 t, lambda x) invariance of the leading-order
// model.

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "muskat/dno.hpp"
#include "muskat/norms.hpp"
#include "muskat/phase.hpp"
#include "muskat/twophase.hpp"

namespace muskat {

struct SchemeConfig {
    enum class Kind { Imex, Mollified };

    Kind kind = Kind::Imex;
    double dt = 1e-3;
    double dt_min = 1e-8;   // IMEX halving floor; underflow raises StiffnessError
    double eps = 0.1;       // Mollified only: retain |k| <= 1/eps
    DnoEval dno;
    double trace_tol = 1e-10;  // two-phase trace solve tolerance
    double s = 2.5;         // Sobolev index for diagnostics and Z^s accumulation
    double delta = 0.4;     // smoothing exponent asserted by the order fits
    double nl_tol = 0.5;    // IMEX: relative change of the explicit part that
                            // triggers dt halving

    // Collects every violation (dt, dt_min, eps, tolerances, and the
    // admissible window delta in (0, s-1-dim/2], delta <= 1/2).
    void validate(int dim) const;
};

struct SimState {
    double t = 0.0;
    Field eta;
    PhaseParams params;

    // Running diagnostics, maintained by the steppers at the config's s.
    double hs_sup = 0.0;            // sup over past states of |eta|_{H^s}
    double hs32_sq_integral = 0.0;  // trapezoid of |eta|^2_{H^{s+3/2}} dt
    double last_hs32 = 0.0;
    std::vector<double> dt_history;

    // C_t H^s + L^2_t H^{s+3/2} seminorm accumulated so far.
    double zs() const { return hs_sup + std::sqrt(hs32_sq_integral); }
};

// Validates params and cfg, requires positive separation from both walls,
// and seeds the running norms at t = 0.
SimState make_state(Field eta0, PhaseParams params, const SchemeConfig& cfg);

// -(1/mu-) G-(eta) (sigma H(eta) + rho- g eta), projected to mean zero (the
// continuum operator is mean-free; the discrete mean is dust or grid error).
Field rhs_one_phase(const Field& eta, const PhaseParams& params, const DnoEval& how);

// Two-phase: solve the trace system, then -(1/mu-) G-(eta) f-.
Field rhs_two_phase(const Field& eta, const PhaseParams& params, const DnoEval& how,
                    double trace_tol = 1e-10);

// Dispatch on params.one_phase().
Field evolution_rhs(const Field& eta, const PhaseParams& params, const DnoEval& how,
                    double trace_tol = 1e-10);

// Flat-interface decay rate per lattice mode (positive = decaying):
//   one phase   r = |k| t-(k) (sigma |k|^2 + rho- g) / mu-
//   two phases  r = |k| t+t- (sigma |k|^2 + drho g) / (mu- t+ + mu+ t-)
// with t the tanh profile of each wall (1 for infinite layers; graph walls
// have no closed form and fall back to 1, so the split stays exact only for
// flat geometries). Unstable stratification makes low modes negative.
std::vector<double> linear_decay_rates(const Grid& g, const PhaseParams& params);

// One exponential step of  d eta/dt = diag(lin) eta + nonlinear(eta):
//   a    = e^{z} eta + dt phi1(z) N(eta),        z = lin dt
//   eta' = a + dt phi2(z) (N(a) - N(eta)),
// exact on linear problems (N = 0) and second order otherwise. Exposed as
// the kernel under step_imex and the scaling driver.
Field etd_rk2_step(const Field& eta, const std::vector<double>& lin,
                   const std::function<Field(const Field&)>& nonlinear, double dt);

// Advances by cfg.dt when the explicit remainder stays tame, otherwise by
// the largest halving of it that does; the accepted size lands in
// dt_history. Throws StiffnessError below cfg.dt_min.
SimState step_imex(const SimState& state, const SchemeConfig& cfg);

// Truncated right-hand side with classical RK4 at fixed dt. Rejects dt
// against the retained band's stiffest linear rate (RK4 real-axis limit
// 2.785) with a suggested step. A cutoff below the first nonzero mode
// freezes the state exactly.
SimState step_mollified(const SimState& state, const SchemeConfig& cfg);

// Dispatch on cfg.kind.
SimState step(const SimState& state, const SchemeConfig& cfg);

// L2 fraction of |eta| carried by the top third of the dealias band; the
// resolution monitor and the order fits treat a large value as
// under-resolved.
double spectral_tail_fraction(const Field& u);

struct MonitorConfig {
    double h_floor = 1e-3;         // minimum vertical wall separation
    double blowup_factor = 50.0;   // |eta|_{H^s} exceeding this multiple of the
                                   // initial norm (or going non-finite) trips
    double tail_threshold = 1e-6;  // spectral_tail_fraction above this trips
};

struct TerminationRecord {
    enum class Reason { Completed, SeparationFloor, NormGrowth, SpectralTail };
    Reason reason = Reason::Completed;
    double t = 0.0;
    std::string detail;
};

std::string termination_reason_name(TerminationRecord::Reason r);

struct DiagnosticsRow {
    double t = 0.0;
    double hs_norm = 0.0;
    double l2_norm = 0.0;
    double hs32_norm = 0.0;
    double zs_norm = 0.0;
    double dist_vertical = 0.0;
    double dist_euclidean = 0.0;
    double energy = 0.0;
    double dt = 0.0;        // step that produced this state; 0 for the seed row
    double rhs_norm = 0.0;  // L2 of the assembled right-hand side at this state
};

struct RunControl {
    double t_final = 0.1;
    MonitorConfig monitors;
    int diag_stride = 1;      // diagnostics row every k accepted steps
    int snapshot_stride = 0;  // stored eta every k steps; 0 keeps first and last
};

struct Trajectory {
    std::vector<TimeSample> snapshots;
    std::vector<DiagnosticsRow> rows;
    TerminationRecord termination;
    SimState final_state;
};

// Steps until t_final or until a monitor trips (checked on the initial state
// too); monitor trips terminate cleanly with the record filled in, they do
// not throw. Numerical failures from the steppers propagate.
Trajectory run_simulation(const Field& eta0, const PhaseParams& params, const SchemeConfig& cfg,
                          const RunControl& ctrl);

// Defect of the third-order reduction: g = rhs(eta) + (sigma/mu_hat)
// T_{lambda ell} eta, with mu_hat = mu- or mu+ + mu-. The report fits
// log(|g_k| / |(T_{lambda ell} eta)_k|) against log k over the modes where
// both spectra sit above their dust floors; a gap of delta' means g decays
// delta' powers faster than the principal part. No assertion is made when
// the state is under-resolved or too few modes survive (inconclusive).
struct SmoothnessReport {
    double slope_gap = 0.0;
    double g_norm = 0.0;          // L2 of g
    double principal_norm = 0.0;  // L2 of T_{lambda ell} eta
    bool inconclusive = false;
    double tail_fraction = 0.0;
    std::vector<double> ks;  // fitted modes with the two magnitude tracks
    std::vector<double> g_mags, principal_mags;
    std::string detail;
};

SmoothnessReport residual_smoothness_check(const SimState& state, const SchemeConfig& cfg);
SmoothnessReport residual_smoothness_check(const Trajectory& traj, const SchemeConfig& cfg);

// Evolves eta10 and eta10 + scale (eta20 - eta10) in lockstep at fixed dt
// for scale in {1, 1/2, 1/4}; each ratio is |difference|_{Z^s(T)} over the
// initial |difference|_{H^s}. Identical data short-circuits to ratio 0. A
// failing run is rethrown as ConvergenceError naming the scale, with
// {scale, t reached} as history.
struct StabilityReport {
    std::vector<double> scales;
    std::vector<double> ratios;
    double spread = 0.0;    // (max - min) / min over the ratios, 0 if all zero
    double max_diff = 0.0;  // sup_t |difference|_{H^s} at scale 1
};

StabilityReport stability_experiment(const Field& eta10, const Field& eta20,
                                     const PhaseParams& params, const SchemeConfig& cfg,
                                     double T);

// Parabolic rescaling check on the leading-order model
//   d eta/dt = (sigma/mu-) G-(eta) Lap eta
// (the curvature replaced by its linearization; with H = -div(grad eta /
// sqrt(...)) the sign keeps the flow decaying). Runs eta0 on [0, T] and the
// lambda-dilated data lambda^{-1} eta0(lambda x) on [0, T/lambda^3] with dt
// scaled the same way, and returns the final-time L2 discrepancy against
// the dilated reference plus the finer run's own dt-Richardson error.
// Requires one phase, infinite depth, and integer lambda >= 1.
struct ScalingReport {
    double lam = 1.0;
    double discrepancy = 0.0;
    double self_convergence = 0.0;
    int steps = 0;  // steps of the coarse run
};

ScalingReport scaling_check(const Field& eta0, double lam, double T, const PhaseParams& params,
                            const SchemeConfig& cfg);

}  // namespace muskat
