#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"

namespace muskat {

using nlohmann::json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(const unsigned char* data, std::size_t count) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < count; ++i) {
        h ^= data[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t file_checksum(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f.good()) throw IoError("cannot open file for checksum: " + path);
    std::uint64_t h = 0xcbf29ce484222325ull;
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof buf);
        std::streamsize got = f.gcount();
        for (std::streamsize i = 0; i < got; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

namespace {

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string iso_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

const json* field_of(const json& j, const char* key, json::value_t want, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end() || it->type() != want)
        throw IoError("manifest " + path + " is missing or mistypes '" + key + "'");
    return &*it;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f.good()) throw IoError("cannot create file: " + path);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.flush();
    if (!f.good()) throw IoError("failed writing file: " + path);
}

}  // namespace

void save_manifest(const std::string& path, const RunManifest& m) {
    json j;
    j["code_version"] = m.code_version;
    j["config_echo"] = m.config_echo;
    j["started_at"] = m.started_at;
    j["finished_at"] = m.finished_at;
    j["termination"] = m.termination;
    j["detail"] = m.detail;
    j["t_end"] = m.t_end;
    j["steps"] = m.steps;
    j["files"] = json::array();
    for (const auto& f : m.files) {
        json e;
        e["path"] = f.path;
        e["bytes"] = f.bytes;
        e["fnv1a64"] = f.checksum;
        j["files"].push_back(e);
    }
    write_text(path, j.dump(2) + "\n");
}

RunManifest load_manifest(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f.good()) throw IoError("cannot open manifest: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw IoError("manifest " + path + " is not valid JSON: " + e.what());
    }
    if (!j.is_object()) throw IoError("manifest " + path + " is not a JSON object");

    RunManifest m;
    m.code_version = field_of(j, "code_version", json::value_t::string, path)->get<std::string>();
    m.config_echo = field_of(j, "config_echo", json::value_t::string, path)->get<std::string>();
    m.started_at = field_of(j, "started_at", json::value_t::string, path)->get<std::string>();
    m.finished_at = field_of(j, "finished_at", json::value_t::string, path)->get<std::string>();
    m.termination = field_of(j, "termination", json::value_t::string, path)->get<std::string>();
    m.detail = field_of(j, "detail", json::value_t::string, path)->get<std::string>();
    auto tv = j.find("t_end");
    if (tv == j.end() || !tv->is_number()) throw IoError("manifest " + path + " lacks 't_end'");
    m.t_end = tv->get<double>();
    auto sv = j.find("steps");
    if (sv == j.end() || !sv->is_number_integer())
        throw IoError("manifest " + path + " lacks 'steps'");
    m.steps = sv->get<std::int64_t>();
    auto fv = j.find("files");
    if (fv == j.end() || !fv->is_array()) throw IoError("manifest " + path + " lacks 'files'");
    for (const json& e : *fv) {
        if (!e.is_object()) throw IoError("manifest " + path + " has a malformed file entry");
        RunManifest::FileEntry fe;
        fe.path = field_of(e, "path", json::value_t::string, path)->get<std::string>();
        auto bv = e.find("bytes");
        if (bv == e.end() || !bv->is_number_integer())
            throw IoError("manifest " + path + " has a file entry without 'bytes'");
        fe.bytes = bv->get<std::uint64_t>();
        fe.checksum = field_of(e, "fnv1a64", json::value_t::string, path)->get<std::string>();
        m.files.push_back(fe);
    }
    return m;
}

RunArtifacts run_to_files(const RunConfig& cfg, const std::string& out_dir) {
    cfg.validate();
    fs::path dir(out_dir);
    fs::create_directories(dir);

    RunManifest m;
    m.config_echo = dump_config(cfg);
    m.code_version = version_string();
    m.started_at = iso_utc_now();

    RunArtifacts art;
    art.directory = dir.string();
    art.trajectory = run_simulation(cfg.initial_field(), cfg.physics, cfg.scheme, cfg.control);
    m.finished_at = iso_utc_now();
    m.termination = termination_reason_name(art.trajectory.termination.reason);
    m.detail = art.trajectory.termination.detail;
    m.t_end = art.trajectory.final_state.t;
    m.steps = static_cast<std::int64_t>(art.trajectory.final_state.dt_history.size());

    std::vector<std::string> written;
    write_text((dir / "config.json").string(), m.config_echo);
    written.push_back("config.json");
    save_diagnostics((dir / "diagnostics.csv").string(), art.trajectory.rows);
    written.push_back("diagnostics.csv");
    int idx = 0;
    for (const TimeSample& s : art.trajectory.snapshots) {
        char name[32];
        std::snprintf(name, sizeof name, "state_%06d.msk", idx++);
        save_snapshot((dir / name).string(), s.eta, s.t);
        written.push_back(name);
    }

    for (const std::string& name : written) {
        RunManifest::FileEntry e;
        e.path = name;
        e.bytes = static_cast<std::uint64_t>(fs::file_size(dir / name));
        e.checksum = hex16(file_checksum((dir / name).string()));
        m.files.push_back(e);
    }
    save_manifest((dir / "manifest.json").string(), m);
    art.manifest = std::move(m);
    return art;
}

}  // namespace muskat
