#pragma once

#include <cstdint>

#include "muskat/field.hpp"

namespace muskat {

// Seeded draw with a prescribed Sobolev profile: coefficients
//   c_k = amplitude * (1+|k|^2)^{-(s+gamma)/2} * e^{i theta_k},  k != 0,
// unit-modulus phases from the seed, Hermitian-symmetrized, zero mean.
// gamma > 0 keeps the draw safely inside H^s; phases are derived from raw
// mt19937_64 words (not a distribution object) so the field is bit-identical
// across platforms. Modes outside the de-aliased band are left empty.
Field random_hs_field(const Grid& g, double s, double gamma, double amplitude,
                      std::uint64_t seed);

}  // namespace muskat
