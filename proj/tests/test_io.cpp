#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"
#include "muskat/sampling.hpp"
#include "muskat/verify.hpp"

using namespace muskat;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / ("muskat_io_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& bytes) {
    std::ofstream out(p, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

// Smallest config that should parse: everything else defaulted.
const char* kMinimalConfig = R"({
    "domain": {"dim": 1, "resolution": [32]},
    "initial": {"modes": [{"k": [1], "amplitude": 0.05}]}
})";

std::vector<std::string> violations_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.violations();
    }
    return {};
}

bool any_mentions(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) {
        return s.find(needle) != std::string::npos;
    });
}

}  // namespace

// ---- config parsing -------------------------------------------------------

TEST_CASE("minimal config parses with defaults filled") {
    RunConfig c = parse_config(kMinimalConfig);
    CHECK(c.dim == 1);
    CHECK(c.resolution[0] == 32);
    CHECK(c.periods[0] == doctest::Approx(Grid::two_pi));
    CHECK(c.physics.one_phase());
    CHECK(c.physics.sigma == 1.0);
    CHECK(c.scheme.kind == SchemeConfig::Kind::Imex);
    CHECK(c.scheme.dt == 1e-3);
    CHECK(c.control.t_final == doctest::Approx(0.1));
    CHECK(c.init.modes.size() == 1);
    CHECK(c.init.modes[0].k[0] == 1);
    CHECK_FALSE(c.init.random);
    c.validate();  // must not throw
}

TEST_CASE("full config round-trips through its canonical echo") {
    RunConfig c;
    c.dim = 1;
    c.resolution = {64, 1};
    c.periods = {Grid::two_pi, Grid::two_pi};
    c.physics.mu_minus = 2.0;
    c.physics.mu_plus = 1.0;
    c.physics.rho_minus = 3.0;
    c.physics.rho_plus = 1.0;
    c.physics.sigma = 0.7;
    c.physics.g = 0.25;
    c.physics.bottom_minus = BottomSpec::flat(1.5);
    c.physics.bottom_plus = BottomSpec::infinite();
    c.scheme.kind = SchemeConfig::Kind::Mollified;
    c.scheme.dt = 5e-4;
    c.scheme.eps = 0.07;
    c.scheme.s = 2.25;
    c.scheme.delta = 0.3;
    c.scheme.dno.method = DnoEval::Method::Series;
    c.scheme.dno.series_order = 9;
    c.control.t_final = 0.02;
    c.control.diag_stride = 3;
    c.control.snapshot_stride = 7;
    c.control.monitors.h_floor = 2e-3;
    c.init.random = true;
    c.init.random_amplitude = 0.01;
    c.init.random_gamma = 0.2;
    c.init.seed = 42;
    c.output.directory = "runs/demo";

    RunConfig back = parse_config(dump_config(c));
    CHECK(back.physics.mu_plus == 1.0);
    CHECK(back.physics.sigma == 0.7);
    CHECK(back.physics.bottom_minus.kind == BottomSpec::Kind::Flat);
    CHECK(back.physics.bottom_minus.depth == 1.5);
    CHECK(back.scheme.kind == SchemeConfig::Kind::Mollified);
    CHECK(back.scheme.eps == 0.07);
    CHECK(back.scheme.dno.series_order == 9);
    CHECK(back.control.diag_stride == 3);
    CHECK(back.control.monitors.h_floor == 2e-3);
    CHECK(back.init.random);
    CHECK(back.init.seed == 42);
    CHECK(back.output.directory == "runs/demo");
    // Echo of the echo is stable text.
    CHECK(dump_config(back) == dump_config(c));
}

TEST_CASE("vanishing surface tension is rejected as out of regime") {
    std::string text = R"({
        "domain": {"dim": 1, "resolution": [32]},
        "physics": {"surface_tension": 0.0},
        "initial": {"modes": [{"k": [1], "amplitude": 0.05}]}
    })";
    auto v = violations_of(text);
    REQUIRE(!v.empty());
    CHECK(any_mentions(v, "surface-tension regime"));
}

TEST_CASE("sobolev index at the critical threshold is rejected") {
    // s must exceed 1 + dim/2 strictly; equality leaves no admissible delta.
    std::string text = R"({
        "domain": {"dim": 1, "resolution": [32]},
        "scheme": {"s": 1.5},
        "initial": {"modes": [{"k": [1], "amplitude": 0.05}]}
    })";
    auto v = violations_of(text);
    REQUIRE(!v.empty());
    CHECK(any_mentions(v, "s"));
    // Just above threshold with a delta inside the window is fine.
    std::string ok = R"({
        "domain": {"dim": 1, "resolution": [32]},
        "scheme": {"s": 1.75, "delta": 0.2},
        "initial": {"modes": [{"k": [1], "amplitude": 0.05}]}
    })";
    CHECK_NOTHROW(parse_config(ok));
}

TEST_CASE("unknown keys are rejected with their path") {
    std::string text = R"({
        "domain": {"dim": 1, "resolution": [32], "colour": 3},
        "initial": {"modes": [{"k": [1], "amplitude": 0.05}]},
        "extra_top": true
    })";
    auto v = violations_of(text);
    CHECK(any_mentions(v, "domain.colour"));
    CHECK(any_mentions(v, "extra_top"));
}

TEST_CASE("all violations are enumerated in one error") {
    // Four planted problems: bad resolution, negative viscosity, zero dt,
    // and an empty initial block.
    std::string text = R"({
        "domain": {"dim": 1, "resolution": [33]},
        "physics": {"mu_minus": -1.0},
        "scheme": {"dt": 0.0},
        "initial": {}
    })";
    auto v = violations_of(text);
    CHECK(v.size() >= 4);
    CHECK(any_mentions(v, "power of two"));
    CHECK(any_mentions(v, "mu_minus"));
    CHECK(any_mentions(v, "dt"));
    CHECK(any_mentions(v, "initial"));
}

TEST_CASE("malformed json is a config error, not a crash") {
    CHECK_THROWS_AS(parse_config("{ not json"), ConfigError);
    CHECK_THROWS_AS(parse_config("[1, 2, 3]"), ConfigError);
    CHECK_THROWS_AS(parse_config(""), ConfigError);
}

TEST_CASE("initial data must be exactly one of modes or random") {
    std::string both = R"({
        "domain": {"dim": 1, "resolution": [32]},
        "initial": {"modes": [{"k": [1], "amplitude": 0.05}],
                    "random": {"amplitude": 0.01, "seed": 3}}
    })";
    CHECK(any_mentions(violations_of(both), "one of"));

    std::string zero_mode = R"({
        "domain": {"dim": 1, "resolution": [32]},
        "initial": {"modes": [{"k": [0], "amplitude": 0.05}]}
    })";
    CHECK(any_mentions(violations_of(zero_mode), "nonzero wavevector"));
}

TEST_CASE("initial separation is checked before any stepping") {
    // Amplitude 0.2 over a wall at depth 0.201: separated, but not by twice
    // the monitor floor.
    std::string text = R"({
        "domain": {"dim": 1, "resolution": [64]},
        "physics": {"bottom_minus": {"kind": "flat", "depth": 0.201}},
        "run": {"monitors": {"h_floor": 0.01}},
        "initial": {"modes": [{"k": [1], "amplitude": 0.2}]}
    })";
    auto v = violations_of(text);
    REQUIRE(!v.empty());
    CHECK(any_mentions(v, "separation"));
}

TEST_CASE("mode initial data evaluates to the stated cosine sum") {
    RunConfig c = parse_config(R"({
        "domain": {"dim": 1, "resolution": [64]},
        "initial": {"modes": [{"k": [2], "amplitude": 0.1, "phase": 0.3},
                               {"k": [5], "amplitude": 0.02}]}
    })");
    Field u = c.initial_field();
    const Grid& g = u.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        double x = g.point(i)[0];
        double want = 0.1 * std::cos(2.0 * x + 0.3) + 0.02 * std::cos(5.0 * x);
        CHECK(u.values()[i] == doctest::Approx(want).epsilon(1e-13));
    }
}

TEST_CASE("random initial data is seed-deterministic") {
    std::string base = R"({
        "domain": {"dim": 1, "resolution": [64]},
        "initial": {"random": {"amplitude": 0.05, "seed": 11}}
    })";
    Field a = parse_config(base).initial_field();
    Field b = parse_config(base).initial_field();
    CHECK(a.values() == b.values());  // bitwise

    RunConfig other = parse_config(base);
    other.init.seed = 12;
    CHECK(other.initial_field().values() != a.values());

    // And it matches the library sampler it claims to use.
    RunConfig c = parse_config(base);
    Field direct = random_hs_field(c.grid(), c.scheme.s, c.init.random_gamma,
                                   c.init.random_amplitude, 11);
    CHECK(a.values() == direct.values());
}

// ---- snapshots ------------------------------------------------------------

TEST_CASE("snapshot save/load round-trips bit exactly") {
    fs::path dir = scratch_dir("snap_roundtrip");
    Grid g = make_grid_1d(64);
    Field u = random_hs_field(g, 2.5, 0.1, 0.3, 99);
    fs::path p = dir / "state.msk";
    save_snapshot(p.string(), u, 0.375);

    Snapshot s = load_snapshot(p.string());
    CHECK(s.t == 0.375);
    CHECK(s.eta.grid().dim == 1);
    CHECK(s.eta.grid().n[0] == 64);
    CHECK(s.eta.grid().lengths[0] == g.lengths[0]);
    REQUIRE(s.eta.values().size() == u.values().size());
    CHECK(std::memcmp(s.eta.values().data(), u.values().data(),
                      u.values().size() * sizeof(double)) == 0);
}

TEST_CASE("snapshot round-trip in two dimensions") {
    fs::path dir = scratch_dir("snap_2d");
    Grid g = make_grid_2d(16, 8, Grid::two_pi, 3.0);
    Field u = Field::sample(g, [](const Vec& x) {
        return 0.1 * std::cos(x[0]) * std::sin(2.0 * Grid::two_pi * x[1] / 3.0);
    });
    fs::path p = dir / "f.msk";
    save_snapshot(p.string(), u, 1.5);
    Snapshot s = load_snapshot(p.string());
    CHECK(s.eta.grid().dim == 2);
    CHECK(s.eta.grid().n[1] == 8);
    CHECK(s.eta.grid().lengths[1] == 3.0);
    CHECK(s.eta.values() == u.values());
}

TEST_CASE("snapshot loader rejects damaged and foreign files") {
    fs::path dir = scratch_dir("snap_bad");
    Grid g = make_grid_1d(16);
    Field u = Field::constant(g, 0.0);
    fs::path p = dir / "good.msk";
    save_snapshot(p.string(), u, 0.0);
    std::string bytes = slurp(p);

    SUBCASE("wrong magic") {
        std::string bad = bytes;
        bad[0] = 'X';
        spit(dir / "magic.msk", bad);
        CHECK_THROWS_AS(load_snapshot((dir / "magic.msk").string()), IoError);
    }
    SUBCASE("future format version mentions upgrading") {
        std::string bad = bytes;
        bad[4] = 2;  // version field, little endian
        spit(dir / "future.msk", bad);
        try {
            load_snapshot((dir / "future.msk").string());
            FAIL("expected IoError");
        } catch (const IoError& e) {
            CHECK(std::string(e.what()).find("newer") != std::string::npos);
        }
    }
    SUBCASE("truncated payload") {
        spit(dir / "trunc.msk", bytes.substr(0, bytes.size() - 7));
        CHECK_THROWS_AS(load_snapshot((dir / "trunc.msk").string()), IoError);
    }
    SUBCASE("trailing garbage") {
        spit(dir / "long.msk", bytes + "xx");
        CHECK_THROWS_AS(load_snapshot((dir / "long.msk").string()), IoError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(load_snapshot((dir / "absent.msk").string()), IoError);
    }
}

// ---- diagnostics ----------------------------------------------------------

TEST_CASE("diagnostics header is the pinned column list") {
    std::string csv = diagnostics_csv({});
    CHECK(csv ==
          "t,hs_norm,l2_norm,hs32_norm,zs_norm,dist_vertical,dist_euclidean,"
          "energy,dt,rhs_norm\n");
}

TEST_CASE("diagnostics rows survive a parse at full precision") {
    DiagnosticsRow r;
    r.t = 0.1 / 3.0;
    r.hs_norm = 1.2345678901234567e-3;
    r.l2_norm = 7.0;
    r.hs32_norm = 2.5e-17;
    r.zs_norm = 3.14159;
    r.dist_vertical = std::numeric_limits<double>::infinity();
    r.dist_euclidean = 0.5;
    r.energy = -1.0e100;
    r.dt = 1e-3;
    r.rhs_norm = 42.0;

    std::string csv = diagnostics_csv({r});
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);

    std::vector<double> cols;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) cols.push_back(std::strtod(tok.c_str(), nullptr));
    REQUIRE(cols.size() == 10);
    CHECK(cols[0] == r.t);
    CHECK(cols[1] == r.hs_norm);
    CHECK(cols[3] == r.hs32_norm);
    CHECK(std::isinf(cols[5]));
    CHECK(cols[7] == r.energy);
    CHECK(cols[9] == r.rhs_norm);
}

// ---- checksums and manifest -----------------------------------------------

TEST_CASE("checksum matches the published fnv-1a test vectors") {
    auto of = [](const std::string& s) {
        return fnv1a64(reinterpret_cast<const unsigned char*>(s.data()), s.size());
    };
    CHECK(of("") == 0xcbf29ce484222325ull);
    CHECK(of("a") == 0xaf63dc4c8601ec8cull);
    CHECK(of("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("manifest round-trips through disk") {
    fs::path dir = scratch_dir("manifest");
    RunManifest m;
    m.config_echo = "{}";
    m.code_version = version_string();
    m.started_at = "2026-01-07T09:00:00Z";
    m.finished_at = "2026-01-07T09:00:05Z";
    m.termination = "completed";
    m.detail = "reached t_final";
    m.t_end = 0.25;
    m.steps = 250;
    m.files.push_back({"diagnostics.csv", 1024, "0123456789abcdef"});

    fs::path p = dir / "manifest.json";
    save_manifest(p.string(), m);
    RunManifest back = load_manifest(p.string());
    CHECK(back.config_echo == m.config_echo);
    CHECK(back.code_version == m.code_version);
    CHECK(back.termination == "completed");
    CHECK(back.t_end == 0.25);
    CHECK(back.steps == 250);
    REQUIRE(back.files.size() == 1);
    CHECK(back.files[0].path == "diagnostics.csv");
    CHECK(back.files[0].bytes == 1024);
    CHECK(back.files[0].checksum == "0123456789abcdef");
}

// ---- run driver -----------------------------------------------------------

namespace {

RunConfig small_run_config() {
    // A Sobolev-decaying random draw holds a few permille of its energy in
    // the top third of the band by construction, so the tail monitor needs
    // headroom above the strict default.
    RunConfig c = parse_config(R"({
        "domain": {"dim": 1, "resolution": [32]},
        "physics": {"gravity": 0.0},
        "scheme": {"dt": 1e-3},
        "run": {"t_final": 5e-3, "snapshot_stride": 2,
                "monitors": {"tail_threshold": 0.05}},
        "initial": {"random": {"amplitude": 0.02, "seed": 5}}
    })");
    return c;
}

}  // namespace

TEST_CASE("run driver writes diagnostics, snapshots, and a complete manifest") {
    fs::path dir = scratch_dir("run_driver");
    RunArtifacts art = run_to_files(small_run_config(), dir.string());

    CHECK(art.manifest.termination == "completed");
    CHECK(art.manifest.code_version == version_string());
    CHECK(art.trajectory.rows.size() >= 2);
    CHECK(fs::exists(dir / "diagnostics.csv"));
    CHECK(fs::exists(dir / "manifest.json"));

    // Every data file present is indexed, with a correct checksum and size.
    std::set<std::string> on_disk;
    for (const auto& e : fs::directory_iterator(dir)) {
        std::string name = e.path().filename().string();
        if (name != "manifest.json") on_disk.insert(name);
    }
    std::set<std::string> indexed;
    for (const auto& f : art.manifest.files) {
        indexed.insert(f.path);
        fs::path p = dir / f.path;
        REQUIRE(fs::exists(p));
        CHECK(fs::file_size(p) == f.bytes);
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx",
                      static_cast<unsigned long long>(file_checksum(p.string())));
        CHECK(f.checksum == buf);
    }
    CHECK(on_disk == indexed);

    // The manifest echoes a config that parses back.
    RunConfig echo = parse_config(art.manifest.config_echo);
    CHECK(echo.init.seed == 5);

    // Snapshots: first and last are present; the last one matches the final
    // state bit for bit.
    REQUIRE(art.trajectory.snapshots.size() >= 2);
    std::vector<std::string> snaps;
    for (const auto& f : art.manifest.files)
        if (f.path.find(".msk") != std::string::npos) snaps.push_back(f.path);
    REQUIRE(snaps.size() == art.trajectory.snapshots.size());
    std::sort(snaps.begin(), snaps.end());
    Snapshot last = load_snapshot((dir / snaps.back()).string());
    CHECK(last.t == art.trajectory.final_state.t);
    CHECK(last.eta.values() == art.trajectory.final_state.eta.values());
}

TEST_CASE("identical config and seed reproduce identical artifacts") {
    fs::path d1 = scratch_dir("repro_a");
    fs::path d2 = scratch_dir("repro_b");
    RunArtifacts a = run_to_files(small_run_config(), d1.string());
    RunArtifacts b = run_to_files(small_run_config(), d2.string());

    REQUIRE(a.manifest.files.size() == b.manifest.files.size());
    for (std::size_t i = 0; i < a.manifest.files.size(); ++i) {
        CHECK(a.manifest.files[i].path == b.manifest.files[i].path);
        CHECK(a.manifest.files[i].bytes == b.manifest.files[i].bytes);
        CHECK(a.manifest.files[i].checksum == b.manifest.files[i].checksum);
    }
}

TEST_CASE("run driver refuses an invalid config up front") {
    RunConfig c = small_run_config();
    c.scheme.dt = -1.0;
    fs::path dir = scratch_dir("run_invalid");
    CHECK_THROWS_AS(run_to_files(c, dir.string()), ConfigError);
    CHECK_FALSE(fs::exists(dir / "manifest.json"));
}

// ---- verify suite ---------------------------------------------------------

TEST_CASE("verify suite rejects unknown selection tokens") {
    CHECK_THROWS_AS(verify_suite({"dno", "nonsense"}), ConfigError);
    try {
        verify_suite({"nonsense"});
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("selection") != std::string::npos);
    }
}

TEST_CASE("symbols checks pass quickly and deterministically") {
    auto t0 = std::chrono::steady_clock::now();
    VerifyReport r = verify_suite({"symbols"});
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(secs < 10.0);
    REQUIRE(!r.checks.empty());
    CHECK(r.all_pass);
    for (const auto& c : r.checks) {
        CHECK(c.module == "symbols");
        CHECK(c.pass);
    }
    VerifyReport again = verify_suite({"symbols"});
    REQUIRE(again.checks.size() == r.checks.size());
    for (std::size_t i = 0; i < r.checks.size(); ++i)
        CHECK(again.checks[i].measured == r.checks[i].measured);
}

TEST_CASE("verify report serializes with measured values and bounds") {
    VerifyReport r = verify_suite({"geometry"});
    nlohmann::json j = nlohmann::json::parse(report_json(r));
    CHECK(j["all_pass"].is_boolean());
    CHECK(j["seconds"].is_number());
    REQUIRE(j["checks"].is_array());
    REQUIRE(!j["checks"].empty());
    for (const auto& c : j["checks"]) {
        CHECK(c.contains("module"));
        CHECK(c.contains("name"));
        CHECK(c.contains("pass"));
        CHECK(c.contains("measured"));
        CHECK(c.contains("bound"));
        CHECK(c.contains("seconds"));
    }
    CHECK(!report_table(r).empty());
}

TEST_CASE("selecting all modules covers every token once") {
    std::vector<std::string> mods = verify_modules();
    CHECK(std::find(mods.begin(), mods.end(), "all") != mods.end());
    // "all" may not be combined with a module list; on its own it is the
    // same as an empty selection.
    CHECK_THROWS_AS(verify_suite({"all", "dno"}), ConfigError);
}
