#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "muskat/dno.hpp"
#include "muskat/errors.hpp"
#include "muskat/evolve.hpp"
#include "muskat/io.hpp"
#include "muskat/norms.hpp"
#include "muskat/twophase.hpp"
#include "muskat/verify.hpp"

// Command-line front end. Exit codes: 0 success, 1 configuration or usage
// problem, 2 numerical failure, 3 clean monitor trip before t_final.

namespace {

using namespace muskat;
namespace fs = std::filesystem;

void print_error(const char* kind, const Error& e) {
    std::fprintf(stderr, "error (%s): %s\n", kind, e.what());
}

int guarded(const std::function<int()>& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        print_error("configuration", e);
        for (const std::string& v : e.violations()) std::fprintf(stderr, "  - %s\n", v.c_str());
        return 1;
    } catch (const IoError& e) {
        print_error("io", e);
        return 1;
    } catch (const StiffnessError& e) {
        print_error("stiffness", e);
        return 2;
    } catch (const ConvergenceError& e) {
        print_error("convergence", e);
        return 2;
    } catch (const Error& e) {
        print_error("numerical", e);
        return 2;
    }
}

// --out beats the config's directory, which beats $MUSKAT_OUT_ROOT/<stem>,
// which beats ./runs/<stem>.
std::string resolve_out_dir(const RunConfig& cfg, const std::string& flag_dir,
                            const std::string& config_path) {
    if (!flag_dir.empty()) return flag_dir;
    if (!cfg.output.directory.empty()) return cfg.output.directory;
    std::string stem = fs::path(config_path).stem().string();
    if (stem.empty()) stem = "run";
    if (const char* root = std::getenv("MUSKAT_OUT_ROOT"))
        return (fs::path(root) / stem).string();
    return (fs::path("runs") / stem).string();
}

struct CommonFlags {
    std::string config_path;
    bool quiet = false;
};

void add_config_flag(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "path to a run configuration (JSON)")
        ->required();
    cmd->add_flag("--quiet", flags.quiet, "suppress progress output");
}

int cmd_simulate(const CommonFlags& flags, const std::string& out_flag, std::uint64_t seed,
                 bool seed_given, int resolution, bool resolution_given) {
    RunConfig cfg = load_config(flags.config_path);
    if (seed_given) {
        if (!cfg.init.random)
            throw ConfigError("--seed override needs random initial data",
                              {"this config lists explicit modes; remove --seed or switch "
                               "'initial' to a random draw"});
        cfg.init.seed = seed;
    }
    if (resolution_given) {
        cfg.resolution[0] = resolution;
        if (cfg.dim == 2) cfg.resolution[1] = resolution;
    }
    std::string out_dir = resolve_out_dir(cfg, out_flag, flags.config_path);
    RunArtifacts art = run_to_files(cfg, out_dir);
    const TerminationRecord& term = art.trajectory.termination;
    if (!flags.quiet) {
        std::printf("run finished: %s (%s) at t = %g after %lld steps\n",
                    termination_reason_name(term.reason).c_str(), term.detail.c_str(),
                    art.trajectory.final_state.t,
                    static_cast<long long>(art.manifest.steps));
        std::printf("artifacts: %s (%zu files)\n", art.directory.c_str(),
                    art.manifest.files.size());
    }
    return term.reason == TerminationRecord::Reason::Completed ? 0 : 3;
}

int cmd_verify(const std::vector<std::string>& modules, const std::string& json_path,
               bool quiet) {
    VerifyReport rep = verify_suite(modules);
    if (!quiet) std::fputs(report_table(rep).c_str(), stdout);
    if (!json_path.empty()) {
        std::ofstream f(json_path, std::ios::binary | std::ios::trunc);
        if (!f.good()) throw IoError("cannot create report file: " + json_path);
        f << report_json(rep);
    }
    return rep.all_pass ? 0 : 2;
}

int cmd_dno_test(int n, double depth, int order, int kmax, bool quiet) {
    if (n < 8 || kmax < 1 || order < 1 || depth < 0.0)
        throw ConfigError("dno-test parameters",
                          {"resolution must be at least 8, kmax and order at least 1, "
                           "depth nonnegative (0 means infinite)"});
    Grid g = make_grid_1d(n);
    BottomSpec b = depth == 0.0 ? BottomSpec::infinite() : BottomSpec::flat(depth);
    double worst = 0.0;
    for (int k = 1; k <= kmax; ++k) {
        Field f = Field::sample(g, [k](const Vec& x) { return std::cos(k * x[0]); });
        DnoResult r = dno_series(Field::zeros(g), f, order, b);
        double factor = depth == 0.0 ? double(k) : k * std::tanh(k * depth);
        Field want = Field::sample(
            g, [k, factor](const Vec& x) { return factor * std::cos(k * x[0]); });
        double err = l2_norm(sub(r.boundary_value, want)) / l2_norm(want);
        worst = std::max(worst, err);
        if (!quiet) std::printf("k = %2d  multiplier %10.6f  rel error %.3e\n", k, factor, err);
    }
    if (!quiet)
        std::printf("worst relative error %.3e over |k| <= %d (bound 1e-6)\n", worst, kmax);
    return worst <= 1e-6 ? 0 : 2;
}

int cmd_stability(const CommonFlags& flags, double horizon) {
    RunConfig cfg = load_config(flags.config_path);
    Field base = cfg.initial_field();
    Grid g = base.grid();
    Field pert =
        add(base, Field::sample(g, [](const Vec& x) { return 1e-3 * std::cos(2.0 * x[0]); }));
    StabilityReport rep = stability_experiment(base, pert, cfg.physics, cfg.scheme, horizon);
    if (!flags.quiet) {
        for (std::size_t i = 0; i < rep.scales.size(); ++i)
            std::printf("scale %-5g ratio %.6f\n", rep.scales[i], rep.ratios[i]);
        std::printf("spread %.3e (bound 0.3), sup difference %.3e\n", rep.spread, rep.max_diff);
    }
    return rep.spread <= 0.3 ? 0 : 2;
}

int cmd_scaling(const CommonFlags& flags, double lam, double horizon) {
    RunConfig cfg = load_config(flags.config_path);
    ScalingReport rep = scaling_check(cfg.initial_field(), lam, horizon, cfg.physics, cfg.scheme);
    if (!flags.quiet) {
        std::printf("lambda %g over %d coarse steps\n", rep.lam, rep.steps);
        std::printf("discrepancy %.3e, self-convergence %.3e\n", rep.discrepancy,
                    rep.self_convergence);
    }
    return rep.discrepancy <= 10.0 * rep.self_convergence ? 0 : 2;
}

int cmd_traces(const CommonFlags& flags) {
    RunConfig cfg = load_config(flags.config_path);
    if (cfg.physics.one_phase())
        throw ConfigError("trace solve needs two phases",
                          {"set physics.mu_plus > 0 to pose the two-sided system"});
    Field eta = cfg.initial_field();
    TraceSolution ts =
        solve_traces(eta, cfg.physics, cfg.scheme.dno, cfg.scheme.trace_tol);
    if (!flags.quiet) {
        std::printf("traces at t = 0: |f-| = %.6e, |f+| = %.6e\n", l2_norm(ts.f_minus),
                    l2_norm(ts.f_plus));
        std::printf("%d iteration(s), jump residual %.3e, flux residual %.3e\n", ts.iterations,
                    ts.residual_jump, ts.residual_flux);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"periodic viscous interface flows with surface tension"};
    app.set_version_flag("--version", version_string());
    app.require_subcommand(1);

    CommonFlags sim_flags;
    std::string sim_out;
    std::uint64_t sim_seed = 0;
    int sim_resolution = 0;
    auto* sim = app.add_subcommand("simulate", "run a configuration to completion");
    add_config_flag(sim, sim_flags);
    sim->add_option("--out", sim_out, "output directory (defaults from config, then env)");
    auto* seed_opt = sim->add_option("--seed", sim_seed, "override the random-draw seed");
    auto* res_opt =
        sim->add_option("--resolution", sim_resolution, "override samples per axis");

    std::vector<std::string> ver_modules;
    std::string ver_json;
    bool ver_quiet = false;
    auto* ver = app.add_subcommand("verify", "run the numerical self-checks");
    ver->add_option("modules", ver_modules,
                    "modules to check (symbols, dno, paradiff, geometry, twophase, evolve, all)");
    ver->add_option("--json", ver_json, "write the machine-readable report here");
    ver->add_flag("--quiet", ver_quiet, "suppress the table");

    int dno_n = 64, dno_order = 8, dno_kmax = 8;
    double dno_depth = 0.0;
    bool dno_quiet = false;
    auto* dnt = app.add_subcommand("dno-test", "flat-interface operator oracle sweep");
    dnt->add_option("--resolution", dno_n, "grid points");
    dnt->add_option("--depth", dno_depth, "wall depth, 0 for an infinite layer");
    dnt->add_option("--order", dno_order, "series truncation order");
    dnt->add_option("--kmax", dno_kmax, "highest probe frequency");
    dnt->add_flag("--quiet", dno_quiet, "print only the exit status");

    CommonFlags stab_flags;
    double stab_horizon = 0.05;
    auto* stab = app.add_subcommand("stability", "perturbation growth across scales");
    add_config_flag(stab, stab_flags);
    stab->add_option("--horizon", stab_horizon, "experiment length in time units");

    CommonFlags scal_flags;
    double scal_lambda = 2.0, scal_horizon = 0.05;
    auto* scal = app.add_subcommand("scaling", "parabolic rescaling consistency");
    add_config_flag(scal, scal_flags);
    scal->add_option("--lambda", scal_lambda, "integer dilation factor");
    scal->add_option("--horizon", scal_horizon, "coarse-run length in time units");

    CommonFlags tr_flags;
    auto* tr = app.add_subcommand("traces", "solve the two-phase trace system at t = 0");
    add_config_flag(tr, tr_flags);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (sim->parsed())
        return guarded([&] {
            return cmd_simulate(sim_flags, sim_out, sim_seed, seed_opt->count() > 0,
                                sim_resolution, res_opt->count() > 0);
        });
    if (ver->parsed())
        return guarded([&] { return cmd_verify(ver_modules, ver_json, ver_quiet); });
    if (dnt->parsed())
        return guarded(
            [&] { return cmd_dno_test(dno_n, dno_depth, dno_order, dno_kmax, dno_quiet); });
    if (stab->parsed()) return guarded([&] { return cmd_stability(stab_flags, stab_horizon); });
    if (scal->parsed())
        return guarded([&] { return cmd_scaling(scal_flags, scal_lambda, scal_horizon); });
    if (tr->parsed()) return guarded([&] { return cmd_traces(tr_flags); });
    return 1;
}
