#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "muskat/evolve.hpp"

// Run configuration files, on-disk artifacts, and the driver that turns a
// config into a directory of outputs.
//
// Configs are JSON. Parsing is strict: unknown keys are rejected, and every
// violation found is reported in one ConfigError rather than stopping at the
// first. Snapshots use a small binary format (magic, version, shape, data)
// that round-trips bit exactly. Each run writes a manifest naming every file
// it produced together with a checksum, so reruns of the same config and
// seed can be compared byte for byte.

namespace muskat {

const char* version_string();

// Initial interface: either an explicit list of cosine modes or a seeded
// random draw with Sobolev-decaying amplitudes (see random_hs_field).
struct InitSpec {
    struct Mode {
        std::array<int, 2> k = {0, 0};  // integer wavevector, k[1] unused in 1d
        double amplitude = 0.0;
        double phase = 0.0;  // amplitude * cos(k.x + phase)
    };
    std::vector<Mode> modes;

    bool random = false;
    double random_amplitude = 0.05;
    double random_gamma = 0.1;  // extra spectral decay beyond H^s
    std::uint64_t seed = 1;
};

struct OutputSpec {
    std::string directory;  // empty: resolved by the caller (flag, env, cwd)
};

struct RunConfig {
    int dim = 1;
    std::array<int, 2> resolution = {128, 1};
    std::array<double, 2> periods = {Grid::two_pi, Grid::two_pi};
    PhaseParams physics;
    SchemeConfig scheme;
    RunControl control;
    InitSpec init;
    OutputSpec output;

    Grid grid() const;
    Field initial_field() const;

    // Every violation at once: grid and period constraints, phase and scheme
    // parameter checks, initial-data shape, run control, and the wall
    // separation of the initial interface (required to clear twice the
    // monitor floor before any stepping happens).
    void validate() const;
};

// Parse from JSON text / a file on disk. Structural problems (bad JSON,
// wrong types, unknown keys, missing requirements) and semantic ones are all
// collected into the thrown ConfigError's violation list.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

// Canonical JSON echo of a config (stable key order, full precision).
// parse_config(dump_config(c)) reproduces c.
std::string dump_config(const RunConfig& cfg);

// ---- snapshots ------------------------------------------------------------

inline constexpr std::uint32_t snapshot_format_version = 1;

struct Snapshot {
    double t = 0.0;
    Field eta;
};

// Layout (little endian): "MSKT", u32 format version, u32 dim, u32 n per
// axis, f64 period per axis, f64 time, then the samples as f64 in storage
// order. Doubles are moved as raw bit patterns, so save/load is exact.
void save_snapshot(const std::string& path, const Field& eta, double t);
Snapshot load_snapshot(const std::string& path);

// ---- diagnostics ----------------------------------------------------------

// CSV with a fixed header; one row per DiagnosticsRow, full precision.
std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows);
void save_diagnostics(const std::string& path, const std::vector<DiagnosticsRow>& rows);

// ---- manifest -------------------------------------------------------------

std::uint64_t fnv1a64(const unsigned char* data, std::size_t count);
std::uint64_t file_checksum(const std::string& path);

struct RunManifest {
    std::string config_echo;  // dump_config of the config that ran
    std::string code_version;
    std::string started_at;   // UTC, e.g. 2026-01-07T12:00:00Z
    std::string finished_at;
    std::string termination;  // reason name from the trajectory
    std::string detail;
    double t_end = 0.0;
    std::int64_t steps = 0;

    struct FileEntry {
        std::string path;  // relative to the manifest's directory
        std::uint64_t bytes = 0;
        std::string checksum;  // fnv1a64, 16 hex digits
    };
    std::vector<FileEntry> files;
};

void save_manifest(const std::string& path, const RunManifest& m);
RunManifest load_manifest(const std::string& path);

// ---- run driver -----------------------------------------------------------

// Validates, runs, and writes diagnostics.csv, numbered snapshots, and
// manifest.json under out_dir (created if missing). The trajectory comes
// back for callers that want to inspect it; file contents for a given
// config and seed are identical across runs.
struct RunArtifacts {
    Trajectory trajectory;
    std::string directory;
    RunManifest manifest;
};

RunArtifacts run_to_files(const RunConfig& cfg, const std::string& out_dir);

}  // namespace muskat
