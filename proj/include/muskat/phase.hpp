#pragma once

// Shared physical-configuration types: which side of the interface an
// operator acts on, the rigid boundary below (or above) a fluid layer, and
// the fluid parameters of the one- and two-phase problems.

#include <optional>

#include "muskat/field.hpp"

namespace muskat {

// Side of the interface a quantity belongs to. Lower is the fluid below the
// graph (superscript minus), Upper the one above (superscript plus).
enum class Side { Lower, Upper };

struct BottomSpec {
    enum class Kind { Infinite, Flat, Graph };

    Kind kind = Kind::Infinite;
    double depth = 0.0;             // Flat only; wall at distance `depth`
    std::optional<Field> profile;   // Graph only; wall at y = profile(x)

    static BottomSpec infinite();
    static BottomSpec flat(double depth);
    static BottomSpec graph(Field profile);

    // sup-norm of the wall slope (0 for flat/infinite).
    double lipschitz_constant() const;
};

// Signed vertical gap between the interface graph and the wall, minimized
// over the grid: positive means separated. +infinity for an infinite layer.
// For Side::Upper the wall sits above the interface.
double vertical_separation(const Field& eta, const BottomSpec& bottom, Side side);

// tanh profile of the flat-layer harmonic extension at radial frequency r:
// tanh(depth r) for a flat wall, 1 for an infinite layer. Graph walls have
// no closed form; callers that accept them (preconditioners, stiffness
// splits) get the infinite-layer 1.
double flat_profile_factor(const BottomSpec& bottom, double r);

struct PhaseParams {
    double mu_minus = 1.0;   // viscosity below
    double mu_plus = 0.0;    // viscosity above; 0 encodes the one-phase problem
    double rho_minus = 1.0;  // density below
    double rho_plus = 0.0;   // density above
    double sigma = 1.0;      // surface tension
    double g = 1.0;          // gravity
    BottomSpec bottom_minus = BottomSpec::infinite();
    BottomSpec bottom_plus = BottomSpec::infinite();

    bool one_phase() const { return mu_plus == 0.0; }
    // Effective density difference driving gravity: the lower density alone
    // when the upper phase is vacuum.
    double density_jump() const { return one_phase() ? rho_minus : rho_minus - rho_plus; }

    // Throws ConfigError listing every violation.
    void validate() const;
};

}  // namespace muskat
