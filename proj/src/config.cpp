#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"
#include "muskat/sampling.hpp"

namespace muskat {

using nlohmann::json;

const char* version_string() { return "0.1.0"; }

namespace {

// Reads one JSON object, accumulating violations instead of throwing and
// tracking which keys were consumed so leftovers can be flagged.
class ObjReader {
public:
    ObjReader(const json* j, std::string path, std::vector<std::string>& bad)
        : j_(j), path_(std::move(path)), bad_(&bad) {}

    bool ok() const { return j_ != nullptr; }
    const json* raw(const std::string& key) {
        if (!j_) return nullptr;
        seen_.insert(key);
        auto it = j_->find(key);
        return it == j_->end() ? nullptr : &*it;
    }

    double num(const std::string& key, double def) {
        const json* v = raw(key);
        if (!v) return def;
        if (!v->is_number()) {
            complain(key, "must be a number");
            return def;
        }
        return v->get<double>();
    }

    int integer(const std::string& key, int def) {
        const json* v = raw(key);
        if (!v) return def;
        if (!v->is_number_integer()) {
            complain(key, "must be an integer");
            return def;
        }
        return v->get<int>();
    }

    std::uint64_t u64(const std::string& key, std::uint64_t def) {
        const json* v = raw(key);
        if (!v) return def;
        bool fits = v->is_number_unsigned() ||
                    (v->is_number_integer() && v->get<std::int64_t>() >= 0);
        if (!fits) {
            complain(key, "must be a nonnegative integer");
            return def;
        }
        return v->get<std::uint64_t>();
    }

    std::string str(const std::string& key, const std::string& def) {
        const json* v = raw(key);
        if (!v) return def;
        if (!v->is_string()) {
            complain(key, "must be a string");
            return def;
        }
        return v->get<std::string>();
    }

    // Child object reader; missing key yields a reader with ok() == false
    // that silently defaults everything.
    ObjReader child(const std::string& key) {
        const json* v = raw(key);
        if (!v) return ObjReader(nullptr, join(key), *bad_);
        if (!v->is_object()) {
            complain(key, "must be an object");
            return ObjReader(nullptr, join(key), *bad_);
        }
        return ObjReader(v, join(key), *bad_);
    }

    void complain(const std::string& key, const std::string& what) {
        bad_->push_back("'" + join(key) + "' " + what);
    }

    std::string join(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

    // Flag keys nobody asked for.
    void finish() {
        if (!j_) return;
        for (auto it = j_->begin(); it != j_->end(); ++it)
            if (!seen_.count(it.key()))
                bad_->push_back("unknown key '" + join(it.key()) + "'");
    }

private:
    const json* j_;
    std::string path_;
    std::vector<std::string>* bad_;
    std::set<std::string> seen_;
};

// Fixed-size numeric array (resolution, periods); length must match dim.
template <typename T>
void read_axis_array(ObjReader& r, const std::string& key, int dim, std::array<T, 2>& out,
                     bool require_integer) {
    const json* v = r.raw(key);
    if (!v) return;
    if (!v->is_array() || static_cast<int>(v->size()) != dim) {
        r.complain(key, "must be an array with one entry per axis");
        return;
    }
    for (int a = 0; a < dim; ++a) {
        const json& e = (*v)[a];
        if (require_integer ? !e.is_number_integer() : !e.is_number()) {
            r.complain(key, require_integer ? "entries must be integers"
                                            : "entries must be numbers");
            return;
        }
        out[static_cast<std::size_t>(a)] = e.get<T>();
    }
}

BottomSpec read_bottom(ObjReader& parent, const std::string& key, std::vector<std::string>& bad) {
    ObjReader r = parent.child(key);
    BottomSpec b = BottomSpec::infinite();
    if (!r.ok()) {
        r.finish();
        return b;
    }
    std::string kind = r.str("kind", "infinite");
    if (kind == "infinite") {
        b = BottomSpec::infinite();
        if (r.raw("depth")) r.complain("depth", "only applies to flat walls");
    } else if (kind == "flat") {
        b = BottomSpec::flat(r.num("depth", 0.0));
    } else if (kind == "graph") {
        bad.push_back("'" + parent.join(key) + "' graph walls cannot be described in a config file");
    } else {
        r.complain("kind", "must be \"infinite\" or \"flat\"");
    }
    r.finish();
    return b;
}

void read_initial(ObjReader& parent, InitSpec& init, int dim, std::vector<std::string>& bad) {
    ObjReader r = parent.child("initial");
    const json* modes = r.raw("modes");
    const json* random = r.raw("random");
    if ((modes != nullptr) == (random != nullptr)) {
        bad.push_back("'initial' must specify exactly one of 'modes' or 'random'");
        r.finish();
        return;
    }
    if (modes) {
        if (!modes->is_array() || modes->empty()) {
            r.complain("modes", "must be a nonempty array");
            r.finish();
            return;
        }
        int idx = 0;
        for (const json& m : *modes) {
            std::string where = r.join("modes") + "[" + std::to_string(idx++) + "]";
            if (!m.is_object()) {
                bad.push_back("'" + where + "' must be an object");
                continue;
            }
            ObjReader mr(&m, where, bad);
            InitSpec::Mode mode;
            read_axis_array<int>(mr, "k", dim, mode.k, true);
            mode.amplitude = mr.num("amplitude", 0.0);
            mode.phase = mr.num("phase", 0.0);
            mr.finish();
            init.modes.push_back(mode);
        }
    } else {
        init.random = true;
        ObjReader rr = r.child("random");
        init.random_amplitude = rr.num("amplitude", init.random_amplitude);
        init.random_gamma = rr.num("gamma", init.random_gamma);
        init.seed = rr.u64("seed", init.seed);
        rr.finish();
    }
    r.finish();
}

std::string fmt_full(double x) {
    std::ostringstream ss;
    ss.precision(17);
    ss << x;
    return ss.str();
}

json bottom_json(const BottomSpec& b) {
    json j;
    switch (b.kind) {
        case BottomSpec::Kind::Infinite: j["kind"] = "infinite"; break;
        case BottomSpec::Kind::Flat:
            j["kind"] = "flat";
            j["depth"] = b.depth;
            break;
        case BottomSpec::Kind::Graph: j["kind"] = "graph"; break;
    }
    return j;
}

// Storage index of integer mode k (components wrap modulo n).
std::size_t spectral_index(const Grid& g, const std::array<int, 2>& k) {
    int i0 = k[0] >= 0 ? k[0] : k[0] + g.n[0];
    int i1 = g.dim == 2 ? (k[1] >= 0 ? k[1] : k[1] + g.n[1]) : 0;
    return g.flatten(i0, i1);
}

bool mode_in_band(const Grid& g, const std::array<int, 2>& k) {
    for (int a = 0; a < g.dim; ++a)
        if (3 * std::abs(k[static_cast<std::size_t>(a)]) > g.n[a]) return false;
    return true;
}

}  // namespace

Grid RunConfig::grid() const { return make_grid(dim, resolution, periods); }

Field RunConfig::initial_field() const {
    Grid g = grid();
    if (init.random)
        return random_hs_field(g, scheme.s, init.random_gamma, init.random_amplitude, init.seed);
    std::vector<Complex> sp(g.size(), Complex(0.0, 0.0));
    for (const auto& m : init.modes) {
        Complex half = 0.5 * m.amplitude * Complex(std::cos(m.phase), std::sin(m.phase));
        std::array<int, 2> neg = {-m.k[0], -m.k[1]};
        sp[spectral_index(g, m.k)] += half;
        sp[spectral_index(g, neg)] += std::conj(half);
    }
    return Field::from_spectrum(g, std::move(sp));
}

void RunConfig::validate() const {
    std::vector<std::string> bad;
    bool grid_ok = true;
    try {
        (void)grid();
    } catch (const ConfigError& e) {
        grid_ok = false;
        for (const auto& v : e.violations()) bad.push_back(v);
    }
    try {
        physics.validate();
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) bad.push_back(v);
    }
    try {
        scheme.validate(dim);
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) bad.push_back(v);
    }
    if (!(control.t_final > 0.0)) bad.push_back("t_final must be positive");
    if (control.diag_stride < 1) bad.push_back("diag_stride must be at least 1");
    if (control.snapshot_stride < 0) bad.push_back("snapshot_stride must be nonnegative");
    if (!(control.monitors.h_floor > 0.0)) bad.push_back("monitor h_floor must be positive");
    if (!(control.monitors.blowup_factor > 1.0))
        bad.push_back("monitor blowup_factor must exceed 1");
    if (!(control.monitors.tail_threshold > 0.0))
        bad.push_back("monitor tail_threshold must be positive");

    bool init_ok = true;
    if (init.random) {
        if (!init.modes.empty()) {
            bad.push_back("'initial' must specify exactly one of 'modes' or 'random'");
            init_ok = false;
        }
        if (!(init.random_amplitude > 0.0)) {
            bad.push_back("random initial amplitude must be positive");
            init_ok = false;
        }
        if (init.random_gamma < 0.0) {
            bad.push_back("random initial gamma must be nonnegative");
            init_ok = false;
        }
    } else if (init.modes.empty()) {
        bad.push_back("'initial' must specify exactly one of 'modes' or 'random'");
        init_ok = false;
    } else {
        Grid g;
        if (grid_ok) g = grid();
        for (const auto& m : init.modes) {
            bool zero = m.k[0] == 0 && (dim == 1 || m.k[1] == 0);
            if (zero) {
                bad.push_back("initial modes need a nonzero wavevector (the mean is fixed)");
                init_ok = false;
            } else if (grid_ok && !mode_in_band(g, m.k)) {
                bad.push_back("initial mode k = [" + std::to_string(m.k[0]) +
                              (dim == 2 ? "," + std::to_string(m.k[1]) : "") +
                              "] lies outside the dealias band (3|k| <= n)");
                init_ok = false;
            }
            if (!std::isfinite(m.amplitude) || !std::isfinite(m.phase)) {
                bad.push_back("initial mode amplitudes and phases must be finite");
                init_ok = false;
            }
        }
    }

    // Separation of the starting interface, only when it can be built at
    // all: the run must begin at least twice the monitor floor away from
    // every wall, so the first trip can only come from actual motion.
    if (bad.empty() && init_ok) {
        Field eta0 = initial_field();
        double gap = vertical_separation(eta0, physics.bottom_minus, Side::Lower);
        if (!physics.one_phase())
            gap = std::min(gap, vertical_separation(eta0, physics.bottom_plus, Side::Upper));
        double need = 2.0 * control.monitors.h_floor;
        if (!(gap > need))
            bad.push_back("initial wall separation " + fmt_full(gap) +
                          " does not clear twice the monitor floor (" + fmt_full(need) + ")");
    }

    if (!bad.empty()) throw ConfigError("invalid run configuration", std::move(bad));
}

RunConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("config is not valid JSON", {e.what()});
    }
    if (!j.is_object())
        throw ConfigError("config is not valid JSON", {"top level must be an object"});

    std::vector<std::string> bad;
    RunConfig c;
    ObjReader top(&j, "", bad);

    {
        ObjReader r = top.child("domain");
        if (!r.ok()) bad.push_back("missing required section 'domain'");
        c.dim = r.integer("dim", 1);
        if (c.dim == 1 || c.dim == 2) {
            if (r.ok() && !r.raw("resolution"))
                bad.push_back("'domain.resolution' is required");
            else
                read_axis_array<int>(r, "resolution", c.dim, c.resolution, true);
            read_axis_array<double>(r, "periods", c.dim, c.periods, false);
            if (c.dim == 1) {
                c.resolution[1] = 1;
                c.periods[1] = c.periods[0];
            }
        } else {
            bad.push_back("'domain.dim' must be 1 or 2");
        }
        r.finish();
    }
    {
        ObjReader r = top.child("physics");
        c.physics.mu_minus = r.num("mu_minus", c.physics.mu_minus);
        c.physics.mu_plus = r.num("mu_plus", c.physics.mu_plus);
        c.physics.rho_minus = r.num("rho_minus", c.physics.rho_minus);
        c.physics.rho_plus = r.num("rho_plus", c.physics.rho_plus);
        c.physics.sigma = r.num("surface_tension", c.physics.sigma);
        c.physics.g = r.num("gravity", c.physics.g);
        if (r.ok()) {
            if (r.raw("bottom_minus")) c.physics.bottom_minus = read_bottom(r, "bottom_minus", bad);
            if (r.raw("bottom_plus")) c.physics.bottom_plus = read_bottom(r, "bottom_plus", bad);
        }
        r.finish();
    }
    if (top.raw("initial")) {
        read_initial(top, c.init, c.dim == 2 ? 2 : 1, bad);
    } else {
        bad.push_back("missing required section 'initial'");
    }
    {
        ObjReader r = top.child("scheme");
        std::string kind = r.str("kind", "imex");
        if (kind == "imex")
            c.scheme.kind = SchemeConfig::Kind::Imex;
        else if (kind == "mollified")
            c.scheme.kind = SchemeConfig::Kind::Mollified;
        else
            r.complain("kind", "must be \"imex\" or \"mollified\"");
        c.scheme.dt = r.num("dt", c.scheme.dt);
        c.scheme.dt_min = r.num("dt_min", c.scheme.dt_min);
        c.scheme.eps = r.num("eps", c.scheme.eps);
        c.scheme.s = r.num("s", c.scheme.s);
        c.scheme.delta = r.num("delta", c.scheme.delta);
        c.scheme.nl_tol = r.num("nl_tol", c.scheme.nl_tol);
        c.scheme.trace_tol = r.num("trace_tol", c.scheme.trace_tol);
        ObjReader d = r.child("dno");
        std::string method = d.str("method", "series");
        if (method == "series")
            c.scheme.dno.method = DnoEval::Method::Series;
        else if (method == "elliptic")
            c.scheme.dno.method = DnoEval::Method::Elliptic;
        else
            d.complain("method", "must be \"series\" or \"elliptic\"");
        c.scheme.dno.series_order = d.integer("series_order", c.scheme.dno.series_order);
        c.scheme.dno.elliptic_ny = d.integer("elliptic_ny", c.scheme.dno.elliptic_ny);
        d.finish();
        r.finish();
    }
    {
        ObjReader r = top.child("run");
        c.control.t_final = r.num("t_final", c.control.t_final);
        c.control.diag_stride = r.integer("diag_stride", c.control.diag_stride);
        c.control.snapshot_stride = r.integer("snapshot_stride", c.control.snapshot_stride);
        ObjReader m = r.child("monitors");
        c.control.monitors.h_floor = m.num("h_floor", c.control.monitors.h_floor);
        c.control.monitors.blowup_factor = m.num("blowup_factor", c.control.monitors.blowup_factor);
        c.control.monitors.tail_threshold =
            m.num("tail_threshold", c.control.monitors.tail_threshold);
        m.finish();
        r.finish();
    }
    {
        ObjReader r = top.child("output");
        c.output.directory = r.str("directory", "");
        r.finish();
    }
    top.finish();

    try {
        c.validate();
    } catch (const ConfigError& e) {
        for (const auto& v : e.violations()) bad.push_back(v);
    }
    // Structural and semantic passes can flag the same problem; keep the
    // first occurrence of each message.
    std::vector<std::string> unique;
    std::set<std::string> seen;
    for (auto& v : bad)
        if (seen.insert(v).second) unique.push_back(std::move(v));
    if (!unique.empty()) throw ConfigError("invalid run configuration", std::move(unique));
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) throw IoError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const RunConfig& cfg) {
    json j;
    json& dom = j["domain"];
    dom["dim"] = cfg.dim;
    dom["resolution"] = json::array();
    dom["periods"] = json::array();
    for (int a = 0; a < cfg.dim; ++a) {
        dom["resolution"].push_back(cfg.resolution[static_cast<std::size_t>(a)]);
        dom["periods"].push_back(cfg.periods[static_cast<std::size_t>(a)]);
    }
    json& ph = j["physics"];
    ph["mu_minus"] = cfg.physics.mu_minus;
    ph["mu_plus"] = cfg.physics.mu_plus;
    ph["rho_minus"] = cfg.physics.rho_minus;
    ph["rho_plus"] = cfg.physics.rho_plus;
    ph["surface_tension"] = cfg.physics.sigma;
    ph["gravity"] = cfg.physics.g;
    ph["bottom_minus"] = bottom_json(cfg.physics.bottom_minus);
    ph["bottom_plus"] = bottom_json(cfg.physics.bottom_plus);
    json& init = j["initial"];
    if (cfg.init.random) {
        init["random"]["amplitude"] = cfg.init.random_amplitude;
        init["random"]["gamma"] = cfg.init.random_gamma;
        init["random"]["seed"] = cfg.init.seed;
    } else {
        init["modes"] = json::array();
        for (const auto& m : cfg.init.modes) {
            json jm;
            jm["k"] = json::array();
            for (int a = 0; a < cfg.dim; ++a) jm["k"].push_back(m.k[static_cast<std::size_t>(a)]);
            jm["amplitude"] = m.amplitude;
            jm["phase"] = m.phase;
            init["modes"].push_back(jm);
        }
    }
    json& sc = j["scheme"];
    sc["kind"] = cfg.scheme.kind == SchemeConfig::Kind::Imex ? "imex" : "mollified";
    sc["dt"] = cfg.scheme.dt;
    sc["dt_min"] = cfg.scheme.dt_min;
    sc["eps"] = cfg.scheme.eps;
    sc["s"] = cfg.scheme.s;
    sc["delta"] = cfg.scheme.delta;
    sc["nl_tol"] = cfg.scheme.nl_tol;
    sc["trace_tol"] = cfg.scheme.trace_tol;
    sc["dno"]["method"] =
        cfg.scheme.dno.method == DnoEval::Method::Series ? "series" : "elliptic";
    sc["dno"]["series_order"] = cfg.scheme.dno.series_order;
    sc["dno"]["elliptic_ny"] = cfg.scheme.dno.elliptic_ny;
    json& run = j["run"];
    run["t_final"] = cfg.control.t_final;
    run["diag_stride"] = cfg.control.diag_stride;
    run["snapshot_stride"] = cfg.control.snapshot_stride;
    run["monitors"]["h_floor"] = cfg.control.monitors.h_floor;
    run["monitors"]["blowup_factor"] = cfg.control.monitors.blowup_factor;
    run["monitors"]["tail_threshold"] = cfg.control.monitors.tail_threshold;
    j["output"]["directory"] = cfg.output.directory;
    return j.dump(2) + "\n";
}

}  // namespace muskat
