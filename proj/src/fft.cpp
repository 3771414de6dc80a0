// DFT plumbing on top of FFTW. Plans are cached per grid shape and created
// with FFTW_UNALIGNED so they can execute on arbitrary caller buffers; the
// planner itself is serialized (FFTW planning is not thread-safe, execution
// on distinct arrays is).

#include <fftw3.h>

#include <map>
#include <mutex>

#include "muskat/errors.hpp"
#include "muskat/field.hpp"

namespace muskat {
namespace {

struct PlanCache {
    std::mutex mtx;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;  // (n0, n1, sign)

    fftw_plan get(const Grid& g, int sign) {
        std::lock_guard<std::mutex> lock(mtx);
        auto key = std::make_tuple(g.n[0], g.n[1], sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::vector<Complex> scratch(g.size());
        auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
        fftw_plan p;
        if (g.dim == 1 || g.n[1] == 1)
            p = fftw_plan_dft_1d(g.n[0], buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        else
            p = fftw_plan_dft_2d(g.n[0], g.n[1], buf, buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans.emplace(key, p);
        return p;
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

}  // namespace

std::vector<Complex> to_spectral(const Grid& g, const std::vector<double>& values) {
    if (values.size() != g.size())
        throw ConfigError("to_spectral: sample count does not match grid size");
    std::vector<Complex> buf(values.begin(), values.end());
    fftw_plan p = cache().get(g, FFTW_FORWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    const double inv_n = 1.0 / static_cast<double>(g.size());
    for (auto& c : buf) c *= inv_n;  // trapezoid quadrature of (1/|T|) int u e^{-ikx}
    return buf;
}

std::vector<double> to_physical(const Grid& g, const std::vector<Complex>& spectrum) {
    if (spectrum.size() != g.size())
        throw ConfigError("to_physical: coefficient count does not match grid size");
    std::vector<Complex> buf = spectrum;
    fftw_plan p = cache().get(g, FFTW_BACKWARD);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(buf.data()),
                     reinterpret_cast<fftw_complex*>(buf.data()));
    std::vector<double> out(g.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = buf[i].real();
    return out;
}

}  // namespace muskat
