#include <cstdio>
#include <fstream>

#include "muskat/errors.hpp"
#include "muskat/io.hpp"

namespace muskat {

namespace {

// %.17g round-trips every double through strtod.
void append(std::string& out, double x, char sep) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    out += buf;
    out += sep;
}

}  // namespace

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows) {
    std::string out =
        "t,hs_norm,l2_norm,hs32_norm,zs_norm,dist_vertical,dist_euclidean,energy,dt,rhs_norm\n";
    for (const DiagnosticsRow& r : rows) {
        append(out, r.t, ',');
        append(out, r.hs_norm, ',');
        append(out, r.l2_norm, ',');
        append(out, r.hs32_norm, ',');
        append(out, r.zs_norm, ',');
        append(out, r.dist_vertical, ',');
        append(out, r.dist_euclidean, ',');
        append(out, r.energy, ',');
        append(out, r.dt, ',');
        append(out, r.rhs_norm, '\n');
    }
    return out;
}

void save_diagnostics(const std::string& path, const std::vector<DiagnosticsRow>& rows) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f.good()) throw IoError("cannot create diagnostics file: " + path);
    std::string csv = diagnostics_csv(rows);
    f.write(csv.data(), static_cast<std::streamsize>(csv.size()));
    f.flush();
    if (!f.good()) throw IoError("failed writing diagnostics file: " + path);
}

}  // namespace muskat
