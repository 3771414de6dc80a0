#include "muskat/sampling.hpp"

#include <cmath>
#include <random>

#include "muskat/errors.hpp"

namespace muskat {

Field random_hs_field(const Grid& g, double s, double gamma, double amplitude,
                      std::uint64_t seed) {
    if (!(gamma > 0.0)) throw ConfigError("random_hs_field: gamma must be positive");
    std::mt19937_64 rng(seed);
    std::vector<Complex> spec(g.size(), Complex(0.0, 0.0));
    std::vector<char> done(g.size(), 0);
    // Deterministic iteration order: flat index ascending; each mode and its
    // conjugate partner are filled together from one draw.
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (done[i] || i == 0) continue;
        std::size_t j = g.conjugate_index(i);
        if (!g.in_dealias_band(i)) {
            done[i] = done[j] = 1;
            continue;
        }
        // 53-bit mantissa fraction of the raw word; phase in [0, 2pi).
        double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        double theta = Grid::two_pi * u;
        double mag = amplitude * std::pow(1.0 + norm2(g.wavevector(i)), -0.5 * (s + gamma));
        if (j == i) {
            // Self-conjugate mode (real axis of the lattice): real coefficient.
            spec[i] = Complex(mag * std::cos(theta), 0.0);
        } else {
            spec[i] = std::polar(mag, theta);
            spec[j] = std::conj(spec[i]);
        }
        done[i] = done[j] = 1;
    }
    return Field::from_spectrum(g, std::move(spec));
}

}  // namespace muskat
