#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"

// Snapshot container. All integers and doubles are serialized little endian
// regardless of host order, and doubles travel as raw bit patterns, so a
// load reproduces the saved samples exactly.

namespace muskat {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'K', 'T'};

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double x) { put_u64(out, std::bit_cast<std::uint64_t>(x)); }

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path) : b_(bytes), path_(path) {}

    void need(std::size_t count) const {
        if (pos_ + count > b_.size())
            throw IoError("truncated snapshot file: " + path_);
    }

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += 4;
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b_[pos_ + i])) << (8 * i);
        pos_ += 8;
        return v;
    }

    double f64() { return std::bit_cast<double>(u64()); }

    void magic() {
        need(4);
        for (int i = 0; i < 4; ++i)
            if (b_[pos_ + i] != kMagic[i])
                throw IoError("not a surface snapshot (bad magic): " + path_);
        pos_ += 4;
    }

    std::size_t remaining() const { return b_.size() - pos_; }

private:
    const std::string& b_;
    std::string path_;
    std::size_t pos_ = 0;
};

}  // namespace

void save_snapshot(const std::string& path, const Field& eta, double t) {
    const Grid& g = eta.grid();
    std::string out;
    out.reserve(4 + 4 + 4 + 4 * g.dim + 8 * g.dim + 8 + 8 * eta.values().size());
    out.append(kMagic, 4);
    put_u32(out, snapshot_format_version);
    put_u32(out, static_cast<std::uint32_t>(g.dim));
    for (int a = 0; a < g.dim; ++a) put_u32(out, static_cast<std::uint32_t>(g.n[a]));
    for (int a = 0; a < g.dim; ++a) put_f64(out, g.lengths[a]);
    put_f64(out, t);
    for (double v : eta.values()) put_f64(out, v);

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f.good()) throw IoError("cannot create snapshot file: " + path);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    f.flush();
    if (!f.good()) throw IoError("failed writing snapshot file: " + path);
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f.good()) throw IoError("cannot open snapshot file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    std::string bytes = ss.str();

    Reader r(bytes, path);
    r.magic();
    std::uint32_t version = r.u32();
    if (version > snapshot_format_version)
        throw IoError("snapshot " + path + " uses format version " + std::to_string(version) +
                      ", but this build reads up to " +
                      std::to_string(snapshot_format_version) +
                      "; it was written by a newer release, upgrade to load it");
    if (version == 0) throw IoError("corrupt snapshot (format version 0): " + path);

    std::uint32_t dim = r.u32();
    if (dim != 1 && dim != 2)
        throw IoError("corrupt snapshot (dim = " + std::to_string(dim) + "): " + path);
    std::array<int, 2> n = {1, 1};
    for (std::uint32_t a = 0; a < dim; ++a) {
        std::uint32_t na = r.u32();
        if (na < 2 || na > (1u << 24))
            throw IoError("corrupt snapshot (axis size " + std::to_string(na) + "): " + path);
        n[a] = static_cast<int>(na);
    }
    std::array<double, 2> lengths = {Grid::two_pi, Grid::two_pi};
    for (std::uint32_t a = 0; a < dim; ++a) {
        lengths[a] = r.f64();
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
            throw IoError("corrupt snapshot (bad period): " + path);
    }
    double t = r.f64();

    std::size_t count = static_cast<std::size_t>(n[0]) * n[1];
    r.need(8 * count);
    std::vector<double> values(count);
    for (std::size_t i = 0; i < count; ++i) values[i] = r.f64();
    if (r.remaining() != 0)
        throw IoError("snapshot has " + std::to_string(r.remaining()) +
                      " trailing byte(s), refusing to guess: " + path);

    Grid g;
    try {
        g = make_grid(static_cast<int>(dim), n, lengths);
    } catch (const ConfigError& e) {
        throw IoError("corrupt snapshot (" + std::string(e.what()) + "): " + path);
    }
    Snapshot s;
    s.t = t;
    s.eta = Field::from_values(g, std::move(values));
    return s;
}

}  // namespace muskat
