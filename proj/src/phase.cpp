#include "muskat/phase.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "muskat/errors.hpp"

namespace muskat {

BottomSpec BottomSpec::infinite() {
    return {};
}

BottomSpec BottomSpec::flat(double depth) {
    if (!(depth > 0.0)) throw ConfigError("BottomSpec::flat: depth must be positive");
    BottomSpec b;
    b.kind = Kind::Flat;
    b.depth = depth;
    return b;
}

BottomSpec BottomSpec::graph(Field profile) {
    BottomSpec b;
    b.kind = Kind::Graph;
    b.profile = std::move(profile);
    return b;
}

double BottomSpec::lipschitz_constant() const {
    if (kind != Kind::Graph) return 0.0;
    const Field& b = *profile;
    double sup = 0.0;
    for (int axis = 0; axis < b.grid().dim; ++axis) {
        Field d = gradient_component(b, axis);
        for (std::size_t i = 0; i < b.grid().size(); ++i) sup = std::max(sup, std::abs(d.value(i)));
    }
    return sup;
}

double vertical_separation(const Field& eta, const BottomSpec& bottom, Side side) {
    if (bottom.kind == BottomSpec::Kind::Infinite)
        return std::numeric_limits<double>::infinity();
    double sgn = side == Side::Lower ? 1.0 : -1.0;
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < eta.grid().size(); ++i) {
        double wall;
        if (bottom.kind == BottomSpec::Kind::Flat) {
            wall = side == Side::Lower ? -bottom.depth : bottom.depth;
        } else {
            if (bottom.profile->grid() != eta.grid())
                throw ConfigError("vertical_separation: wall profile grid differs from surface");
            wall = bottom.profile->value(i);
        }
        min_gap = std::min(min_gap, sgn * (eta.value(i) - wall));
    }
    return min_gap;
}

double flat_profile_factor(const BottomSpec& bottom, double r) {
    return bottom.kind == BottomSpec::Kind::Flat ? std::tanh(bottom.depth * r) : 1.0;
}

void PhaseParams::validate() const {
    std::vector<std::string> bad;
    if (!(mu_minus > 0.0)) bad.push_back("mu_minus must be positive");
    if (mu_plus < 0.0) bad.push_back("mu_plus must be nonnegative");
    if (mu_plus == 0.0 && rho_plus > 0.0)
        bad.push_back("one-phase configuration (mu_plus = 0) requires rho_plus = 0");
    if (rho_minus < 0.0) bad.push_back("rho_minus must be nonnegative");
    if (rho_plus < 0.0) bad.push_back("rho_plus must be nonnegative");
    if (!(sigma > 0.0)) bad.push_back("sigma must be positive (surface-tension regime)");
    if (g < 0.0) bad.push_back("g must be nonnegative");
    if (bottom_minus.kind == BottomSpec::Kind::Flat && !(bottom_minus.depth > 0.0))
        bad.push_back("lower wall depth must be positive");
    if (bottom_plus.kind == BottomSpec::Kind::Flat && !(bottom_plus.depth > 0.0))
        bad.push_back("upper wall depth must be positive");
    if (!bad.empty()) throw ConfigError("invalid phase parameters", bad);
}

}  // namespace muskat
