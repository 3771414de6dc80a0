#include "muskat/norms.hpp"

#include <cmath>

#include "muskat/errors.hpp"

namespace muskat {

double sobolev_norm(const Field& u, double s) {
    const Grid& g = u.grid();
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        double k2 = norm2(g.wavevector(i));
        acc += std::pow(1.0 + k2, s) * std::norm(u.coeff(i));
    }
    return std::sqrt(acc);
}

double inner_l2(const Field& u, const Field& v) {
    if (u.grid() != v.grid()) throw ConfigError("inner_l2: grids differ");
    double acc = 0.0;
    for (std::size_t i = 0; i < u.grid().size(); ++i)
        acc += (u.coeff(i) * std::conj(v.coeff(i))).real();
    return acc;
}

ZsNorm zs_norm(const std::vector<TimeSample>& samples, double s) {
    if (samples.empty()) throw ConfigError("zs_norm: no samples");
    ZsNorm out;
    for (std::size_t i = 1; i < samples.size(); ++i)
        if (!(samples[i].t > samples[i - 1].t))
            throw ConfigError("zs_norm: sample times must be strictly increasing");
    std::vector<double> hs32sq(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        out.sup_part = std::max(out.sup_part, sobolev_norm(samples[i].eta, s));
        double h = sobolev_norm(samples[i].eta, s + 1.5);
        hs32sq[i] = h * h;
    }
    if (samples.size() < 2) {
        out.integral_reliable = false;
    } else {
        double integral = 0.0;
        for (std::size_t i = 1; i < samples.size(); ++i)
            integral += 0.5 * (hs32sq[i] + hs32sq[i - 1]) * (samples[i].t - samples[i - 1].t);
        out.integral_part = std::sqrt(integral);
    }
    out.value = out.sup_part + out.integral_part;
    return out;
}

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_log_slope: need >= 2 matched points");
    SlopeFit f;
    f.xs = x;
    f.ys = y;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0))
            throw ConfigError("fit_log_slope: points must be positive");
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double denom = n * sxx - sx * sx;
    if (std::abs(denom) < 1e-300) throw ConfigError("fit_log_slope: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    return f;
}

}  // namespace muskat
