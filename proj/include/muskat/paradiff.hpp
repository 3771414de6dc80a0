#pragma once

#include <vector>

#include "muskat/norms.hpp"
#include "muskat/symbols.hpp"

namespace muskat {

// Frequency cutoffs of the paradifferential quantization.
//
//   psi(xi):        0 for |xi| <= 1/5, 1 for |xi| >= 1/4 (fixed thresholds);
//   chi(theta,eta): 1 for |theta| <= eps1|eta|, 0 for |theta| >= eps2|eta|.
//
// One admissible pair is fixed once and for all: with the C^inf step
// S(t) = e(t)/(e(t)+e(1-t)), e(t) = exp(-1/t) for t > 0,
//   psi(xi) = S((|xi| - 1/5)/(1/4 - 1/5)),
//   chi(theta,eta) = 1 - S((|theta|/|eta| - eps1)/(eps2 - eps1)).
// Both are radial, so chi(-theta,-eta) = chi(theta,eta) and real symbols give
// real outputs. Defaults (eps1, eps2) = (0.1, 0.2).
struct CutoffPair {
    double eps1 = 0.1;
    double eps2 = 0.2;
    double psi(const Vec& xi) const;
    double chi(const Vec& theta, const Vec& eta) const;
};

// Validates 0 < eps1 < eps2 < 1/2 and spot-checks the defining properties
// (plateau values, monotonicity, |d_theta chi| <~ 1/|eta| by finite
// differences at sampled radii). Throws ConfigError on violation.
CutoffPair make_cutoffs(double eps1 = 0.1, double eps2 = 0.2);

// Direct: the exact lattice quantization
//   (T_a u)_xi = sum_eta chi(xi-eta, eta) a_hat_{xi-eta}(eta) psi(eta) u_eta,
// where a_hat(., eta) is the spatial transform of x -> a(x, eta). O(N^2)-ish
// (the chi cone keeps the theta sum short), suitable for every defect and
// remainder fit.
//
// Fast: O(N log N) dyadic-shell paraproduct for symbols carrying a finite-sum
// decomposition sum_j c_j(x) m_j(xi). Within each dyadic input shell the
// theta-filter is frozen at the shell's geometric-mean radius, which realizes
// a slightly different admissible quantization (cone parameters scale by
// sqrt(2)); it agrees with Direct exactly for x-independent symbols and needs
// 2/3-band-limited input (enforced) to stay alias-free.
enum class ParaMode { Direct, Fast };

Field apply_para(const Symbol& a, const Field& u, const CutoffPair& c,
                 ParaMode mode = ParaMode::Direct);

// Exact discrete adjoint of the Direct quantization with respect to the
// normalized L2 inner product.
Field apply_para_adjoint(const Symbol& a, const Field& u, const CutoffPair& c);

// |T_a u|_{H^{mu - order(a)}} / |u|_{H^mu}: the constant the boundedness
// theorem bounds by K * M^m_0(a).
double boundedness_ratio(const Symbol& a, const Field& u, const CutoffPair& c, double mu);

// Operator-order fit of a defect operator D: slope of log |D e_k|_{L2} vs
// log k over unit complex waves e_k = e^{i k x_1}. Requires >= 3 dyadic
// probes inside the 2/3 band.
//
// Probes where the defect is numerically zero are excluded from the fit
// (a zero defect satisfies any order bound vacuously). This is not an edge
// case: the cone |theta| <= eps2*|k| admits no nonzero lattice mode until
// eps2*k reaches 1, and the theta = 0 term always cancels exactly, so low
// probes can vanish identically. All probes and norms are still reported;
// fit_floor records the cut. If fewer than two probes survive, the defect
// is zero within rounding and order is -infinity.
struct DefectReport {
    double order = 0.0;             // fitted slope over probes above fit_floor
    std::vector<double> probe_ks;   // every requested probe
    std::vector<double> defect_norms;
    std::vector<double> fitted_ks;  // the probes the slope was fitted over
    double fit_floor = 0.0;
};

// Measures |op(e_k)| at the probe frequencies and fits the slope with the
// dust-floor rule above. Shared by the defect fits here and the operator
// remainder fits elsewhere.
DefectReport fit_operator_order(const std::function<Field(const Field&)>& op, const Grid& g,
                                const std::vector<int>& probe_ks);

// D = T_a T_b - T_{ab}; expected order: order(a)+order(b) - 1 for our
// C^inf-coefficient symbols.
DefectReport defect_order_composition(const Symbol& a, const Symbol& b, const CutoffPair& c,
                                      const std::vector<int>& probe_ks);

// D = (T_a)^* - T_{conj a} (= T_a for real symbols); expected order
// order(a) - 1.
DefectReport defect_order_adjoint(const Symbol& a, const CutoffPair& c,
                                  const std::vector<int>& probe_ks);

// |D(cos(k x)) + i D(sin(k x))| in the normalized L2 norm, the measurement
// behind the defect fits; exposed for remainder fits elsewhere.
double wave_image_norm(const std::function<Field(const Field&)>& op, const Grid& g, int k);

}  // namespace muskat
