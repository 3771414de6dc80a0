#include "muskat/grid.hpp"

#include <cmath>

#include "muskat/errors.hpp"

namespace muskat {
namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

Grid make_grid(int dim, std::array<int, 2> n, std::array<double, 2> lengths) {
    std::vector<std::string> bad;
    if (dim != 1 && dim != 2) bad.push_back("dim must be 1 or 2");
    if (dim == 1) n[1] = 1;
    for (int a = 0; a < (dim == 2 ? 2 : 1); ++a) {
        if (!power_of_two(n[a]) || n[a] < 8)
            bad.push_back("n[" + std::to_string(a) + "] must be a power of two >= 8");
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a]))
            bad.push_back("lengths[" + std::to_string(a) + "] must be positive and finite");
    }
    if (!bad.empty()) throw ConfigError("make_grid rejected parameters", bad);
    Grid g;
    g.dim = dim;
    g.n = n;
    g.lengths = lengths;
    if (dim == 1) g.lengths[1] = lengths[0];
    return g;
}

}  // namespace muskat
