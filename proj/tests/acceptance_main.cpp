// Acceptance gate: twelve numbered end-to-end properties, one line each.
// Tolerances are pinned here, not read from anywhere else. Exit status is
// the number of failing criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "muskat/dno.hpp"
#include "muskat/errors.hpp"
#include "muskat/evolve.hpp"
#include "muskat/geometry.hpp"
#include "muskat/norms.hpp"
#include "muskat/paradiff.hpp"
#include "muskat/symbols.hpp"
#include "muskat/twophase.hpp"
#include "muskat/verify.hpp"

namespace {

using namespace muskat;
using Clock = std::chrono::steady_clock;

int failures = 0;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* spec, double x) {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

void run_criterion(const char* name, const std::function<std::pair<bool, std::string>()>& body) {
    bool pass = false;
    std::string detail;
    try {
        auto [ok, text] = body();
        pass = ok;
        detail = text;
    } catch (const Error& e) {
        detail = std::string("threw: ") + e.what();
    }
    if (!pass) ++failures;
    std::printf("%s  %-28s %s\n", pass ? "PASS" : "FAIL", name, detail.c_str());
    std::fflush(stdout);
}

Field cosine(const Grid& g, int k, double a = 1.0) {
    return Field::sample(g, [k, a](const Vec& x) { return a * std::cos(k * x[0]); });
}

double rel_l2(const Field& got, const Field& want) {
    return l2_norm(sub(got, want)) / l2_norm(want);
}

double mode_amp(const Field& u, int k) {
    return 2.0 * std::abs(u.coeff(u.grid().flatten(k, 0)));
}

PhaseParams two_fluids(double mu_plus, double mu_minus) {
    PhaseParams p;
    p.mu_plus = mu_plus;
    p.mu_minus = mu_minus;
    p.rho_plus = 1.0;
    p.rho_minus = 2.0;
    return p;
}

// Conservation checks shared by criterion 11 across every trajectory the
// gate integrates.
struct ConservationLog {
    double worst_mean = 0.0;
    double worst_energy_step = -std::numeric_limits<double>::infinity();
    int runs = 0;

    void absorb(const Trajectory& traj) {
        ++runs;
        worst_mean = std::max(worst_mean, std::abs(traj.final_state.eta.mean()));
        for (std::size_t i = 1; i < traj.rows.size(); ++i)
            worst_energy_step =
                std::max(worst_energy_step, traj.rows[i].energy - traj.rows[i - 1].energy);
    }
};

ConservationLog conservation;

// 1. Flat-interface operator: both evaluation routes against the closed
// forms, plus the mapped solve's grid order and wall time.
std::pair<bool, std::string> flat_interface_operator() {
    Grid g = make_grid_1d(64);
    Field zero = Field::zeros(g);
    double worst_series = 0.0;
    for (int k = 1; k <= 8; ++k) {
        DnoResult inf = dno_series(zero, cosine(g, k), 6, BottomSpec::infinite());
        worst_series = std::max(worst_series, rel_l2(inf.boundary_value, cosine(g, k, k)));
        DnoResult fin = dno_series(zero, cosine(g, k), 6, BottomSpec::flat(1.0));
        worst_series = std::max(
            worst_series, rel_l2(fin.boundary_value, cosine(g, k, k * std::tanh(double(k)))));
    }
    auto err = [](int n, int ny) {
        Grid gi = make_grid_1d(n);
        DnoResult r = dno_elliptic(Field::zeros(gi), cosine(gi, 1), BottomSpec::flat(1.0), ny);
        return rel_l2(r.boundary_value, cosine(gi, 1, std::tanh(1.0)));
    };
    double ratio = err(32, 32) / err(64, 64);

    Grid big = make_grid_1d(256);
    auto t0 = Clock::now();
    DnoResult r = dno_elliptic(cosine(big, 1, 0.1), cosine(big, 1), BottomSpec::flat(1.0), 129);
    double wall = seconds_since(t0);
    bool ok = worst_series <= 1e-6 && ratio >= 3.0 && ratio <= 5.0 && wall < 30.0 &&
              l2_norm(r.boundary_value) > 0.0;
    return {ok, "series worst " + fmt("%.2e", worst_series) + " (<= 1e-6), elliptic ratio " +
                    fmt("%.3f", ratio) + " (in [3,5]), 256x129 solve " + fmt("%.2f", wall) +
                    " s (< 30)"};
}

// 2. Linear decay rates through the actual time stepper.
std::pair<bool, std::string> linearized_decay() {
    Grid g = make_grid_1d(64);
    double t_end = 0.05, dt = 1e-3;
    auto evolve_amp = [&](const PhaseParams& p) {
        SchemeConfig cfg;
        cfg.dt = dt;
        cfg.dno.series_order = 12;
        RunControl ctrl;
        ctrl.t_final = t_end;
        Trajectory traj = run_simulation(cosine(g, 2, 1e-4), p, cfg, ctrl);
        conservation.absorb(traj);
        return mode_amp(traj.final_state.eta, 2);
    };
    PhaseParams one;  // mu = sigma = rho g = 1: rate |k|(s k^2 + rho g) = 10
    double a1 = evolve_amp(one);
    double err1 = std::abs(a1 / (1e-4 * std::exp(-10.0 * t_end)) - 1.0);
    // equal viscosities divide the load: rate 2(4+1)/2 = 5
    double a2 = evolve_amp(two_fluids(1.0, 1.0));
    double err2 = std::abs(a2 / (1e-4 * std::exp(-5.0 * t_end)) - 1.0);
    bool ok = err1 <= 0.01 && err2 <= 0.01;
    return {ok, "one-phase off by " + fmt("%.2e", err1) + ", two-phase by " + fmt("%.2e", err2) +
                    " (<= 1e-2 each)"};
}

// 3. Two-phase flat traces: the viscosity-weighted split is exact.
std::pair<bool, std::string> flat_trace_split() {
    Grid g = make_grid_1d(64);
    TraceSolution ts =
        solve_traces(Field::zeros(g), cosine(g, 1), two_fluids(1.0, 3.0), DnoEval{});
    double err = l2_norm(sub(ts.f_minus, cosine(g, 1, 0.75)));
    return {err <= 1e-10, "|f- - (3/4)cos| = " + fmt("%.2e", err) + " (<= 1e-10)"};
}

// 4. Paradifferential calculus: composition and adjoint defects gain a
// derivative, measured over the pinned dyadic probes.
std::pair<bool, std::string> calculus_orders() {
    Grid g = make_grid_1d(256);
    Field eta = cosine(g, 1, 0.2);
    CutoffPair c = make_cutoffs();
    DefectReport comp =
        defect_order_composition(lambda_symbol(eta), ell_symbol(eta), c, {4, 8, 16, 32});
    DefectReport adj = defect_order_adjoint(sqrt_lambda_ell_symbol(eta), c, {4, 8, 16, 32});
    bool ok = comp.order <= 2.3 && adj.order <= 0.8;
    return {ok, "composition order " + fmt("%.3f", comp.order) + " (<= 2.3), adjoint " +
                    fmt("%.3f", adj.order) + " (<= 0.8)"};
}

// 5. The operator minus its paradifferential principal part smooths.
std::pair<bool, std::string> remainder_smoothing() {
    Grid g = make_grid_1d(256);
    DnoEval how;
    how.series_order = 24;
    DefectReport rep = dno_remainder_order(cosine(g, 1, 0.2), BottomSpec::infinite(),
                                           make_cutoffs(), {4, 8, 16, 32}, how);
    return {rep.order <= 0.8,
            "fitted order " + fmt("%.3f", rep.order) + " (<= 0.8 at delta = 0.4)"};
}

// 6. Surface-to-surface contraction ratios stabilize as the perturbation
// shrinks.
std::pair<bool, std::string> contraction_stabilization() {
    Grid g = make_grid_1d(128);
    Field eta1 = cosine(g, 1, 0.1);
    Field f = cosine(g, 1);
    DnoEval how;
    how.series_order = 10;
    std::vector<double> ratios;
    for (double tau : {1.0, 0.5, 0.25})
        ratios.push_back(dno_contraction_check(eta1, add(eta1, cosine(g, 2, tau * 0.01)), f,
                                               BottomSpec::infinite(), 2.5, how));
    double lo = *std::min_element(ratios.begin(), ratios.end());
    double hi = *std::max_element(ratios.begin(), ratios.end());
    double spread = (hi - lo) / lo;
    return {spread <= 0.2, "ratio spread " + fmt("%.2e", spread) + " (<= 0.2)"};
}

// 7. The reduction residual is spectrally steeper than its principal part
// on the resolved demo trajectory.
std::pair<bool, std::string> residual_smoothness() {
    Grid g = make_grid_1d(256);
    PhaseParams p;
    p.bottom_minus = BottomSpec::flat(1.0);
    SchemeConfig cfg;
    cfg.kind = SchemeConfig::Kind::Mollified;
    cfg.eps = 0.04;
    cfg.dno.series_order = 20;
    cfg.dt = 1e-4;
    RunControl ctrl;
    ctrl.t_final = 2e-3;
    ctrl.diag_stride = 5;
    Trajectory traj = run_simulation(cosine(g, 1, 0.2), p, cfg, ctrl);
    conservation.absorb(traj);
    SmoothnessReport rep = residual_smoothness_check(traj, cfg);
    bool ok = !rep.inconclusive && rep.slope_gap >= 0.2;
    return {ok, "slope gap " + fmt("%.3f", rep.slope_gap) + " (>= 0.2 = delta/2), fitted over " +
                    fmt("%.0f", double(rep.ks.size())) + " modes"};
}

// 8. Parabolic rescaling: the dilated run is conjugate to the original.
std::pair<bool, std::string> scaling_invariance() {
    Grid g = make_grid_1d(64);
    PhaseParams p;
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.dno.series_order = 10;
    ScalingReport rep = scaling_check(cosine(g, 1, 0.01), 2.0, 0.05, p, cfg);
    bool ok = rep.discrepancy <= 10.0 * rep.self_convergence;
    return {ok, "lambda=2 discrepancy " + fmt("%.2e", rep.discrepancy) + " vs 10x self " +
                    fmt("%.2e", 10.0 * rep.self_convergence)};
}

// 9. Stability: the difference of nearby runs scales linearly with the
// initial distance, and identical data stays identical.
std::pair<bool, std::string> stability_ratios() {
    Grid g = make_grid_1d(64);
    PhaseParams p;
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.dno.series_order = 10;
    Field base = cosine(g, 1, 0.1);
    StabilityReport rep =
        stability_experiment(base, add(base, cosine(g, 2, 1e-3)), p, cfg, 0.05);
    StabilityReport same = stability_experiment(base, base, p, cfg, 0.01);
    bool zeros = same.spread == 0.0 && same.max_diff == 0.0;
    for (double r : same.ratios) zeros = zeros && r == 0.0;
    bool ok = rep.spread <= 0.3 && zeros;
    return {ok, "ratio spread " + fmt("%.2e", rep.spread) + " (<= 0.3); identical data " +
                    (zeros ? "exactly 0" : "NONZERO")};
}

// 10. The truncated scheme is Cauchy in the cutoff and lands on the
// exponential scheme's answer.
std::pair<bool, std::string> mollified_family() {
    Grid g = make_grid_1d(128);
    PhaseParams p;
    p.g = 0.0;
    auto run = [&](double cut) {
        SchemeConfig cfg;
        cfg.kind = SchemeConfig::Kind::Mollified;
        cfg.eps = 1.0 / cut;
        cfg.dt = 5e-5;
        cfg.dno.series_order = 12;
        SimState st = make_state(cosine(g, 1, 0.2), p, cfg);
        std::vector<TimeSample> out{{st.t, st.eta}};
        for (int i = 0; i < 50; ++i) {
            st = step_mollified(st, cfg);
            out.push_back({st.t, st.eta});
        }
        return out;
    };
    auto a = run(4.0), b = run(8.0), c = run(16.0), d = run(32.0);
    auto dist = [](const std::vector<TimeSample>& u, const std::vector<TimeSample>& v) {
        std::vector<TimeSample> diff;
        for (std::size_t i = 0; i < u.size(); ++i)
            diff.push_back({u[i].t, sub(u[i].eta, v[i].eta)});
        return zs_norm(diff, 2.5).value;
    };
    double d1 = dist(a, b), d2 = dist(b, c), d3 = dist(c, d);
    bool cauchy = d1 > d2 && d2 > d3 && d3 > 0.0;

    Grid gs = make_grid_1d(64);
    SchemeConfig mi;
    mi.dt = 1e-4;
    mi.dno.series_order = 12;
    SimState si = make_state(cosine(gs, 1, 0.1), p, mi);
    for (int i = 0; i < 100; ++i) si = step_imex(si, mi);
    SchemeConfig mm = mi;
    mm.kind = SchemeConfig::Kind::Mollified;
    mm.eps = 1.0 / 20.0;
    SimState sm = make_state(cosine(gs, 1, 0.1), p, mm);
    for (int i = 0; i < 100; ++i) sm = step_mollified(sm, mm);
    double gap = sobolev_norm(sub(si.eta, sm.eta), 2.5);

    bool ok = cauchy && gap <= 1e-7;
    return {ok, "cutoff gaps " + fmt("%.2e", d1) + " > " + fmt("%.2e", d2) + " > " +
                    fmt("%.2e", d3) + "; scheme gap " + fmt("%.2e", gap) + " (<= 1e-7)"};
}

// 11. Mean conservation and energy dissipation over every trajectory this
// gate ran (criteria 2 and 7) plus a dedicated nonlinear demo.
std::pair<bool, std::string> conservation_dissipation() {
    Grid g = make_grid_1d(64);
    PhaseParams p;
    SchemeConfig cfg;
    cfg.dt = 1e-3;
    cfg.dno.series_order = 12;
    RunControl ctrl;
    ctrl.t_final = 0.03;
    conservation.absorb(
        run_simulation(add(cosine(g, 1, 0.1), cosine(g, 3, 0.02)), p, cfg, ctrl));
    bool ok = conservation.worst_mean <= 1e-10 && conservation.worst_energy_step <= 0.0;
    return {ok, "mean drift " + fmt("%.2e", conservation.worst_mean) +
                    " (<= 1e-10), largest energy increment " +
                    fmt("%.2e", conservation.worst_energy_step) + " (<= 0) over " +
                    fmt("%.0f", double(conservation.runs)) + " runs"};
}

// 12. The self-check suite finishes fast and repeats bit for bit.
std::pair<bool, std::string> suite_time_determinism() {
    auto t0 = Clock::now();
    VerifyReport first = verify_suite({});
    double wall = seconds_since(t0);
    VerifyReport second = verify_suite({});
    bool same = first.checks.size() == second.checks.size();
    for (std::size_t i = 0; same && i < first.checks.size(); ++i)
        same = first.checks[i].measured == second.checks[i].measured &&
               first.checks[i].pass == second.checks[i].pass;
    bool ok = first.all_pass && wall <= 600.0 && same;
    return {ok, fmt("%.0f", double(first.checks.size())) + " checks in " + fmt("%.1f", wall) +
                    " s (<= 600), repeat " + (same ? "identical" : "DIFFERS") +
                    (first.all_pass ? "" : ", suite has failures")};
}

}  // namespace

int main() {
    run_criterion("01-flat-interface-operator", flat_interface_operator);
    run_criterion("02-linearized-decay", linearized_decay);
    run_criterion("03-flat-trace-split", flat_trace_split);
    run_criterion("04-calculus-orders", calculus_orders);
    run_criterion("05-remainder-smoothing", remainder_smoothing);
    run_criterion("06-contraction-stabilization", contraction_stabilization);
    run_criterion("07-residual-smoothness", residual_smoothness);
    run_criterion("08-scaling-invariance", scaling_invariance);
    run_criterion("09-stability-ratios", stability_ratios);
    run_criterion("10-mollified-family", mollified_family);
    run_criterion("11-conservation-dissipation", conservation_dissipation);
    run_criterion("12-suite-time-determinism", suite_time_determinism);
    std::printf("%d of 12 criteria failing\n", failures);
    return failures;
}
