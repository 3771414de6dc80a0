#pragma once

#include <vector>

#include "muskat/field.hpp"

namespace muskat {

// H^s norm from the spectrum: ( sum_k (1+|k|^2)^s |u_k|^2 )^{1/2}. Negative s
// is fine (the weight just decays). With the c_k = (1/|T|) int u e^{-ikx}
// convention this makes s=0 the volume-normalized L2 norm, e.g.
// |cos|_{H^0} = 1/sqrt(2).
double sobolev_norm(const Field& u, double s);

inline double l2_norm(const Field& u) { return sobolev_norm(u, 0.0); }

// Volume-normalized L2 inner product, sum_k u_k conj(v_k) (real for real fields).
double inner_l2(const Field& u, const Field& v);

struct TimeSample {
    double t = 0.0;
    Field eta;
};

// Norm of the parabolic space C_t H^s \cap L^2_t H^{s+3/2} over a sampled
// trajectory: max of the H^s norms plus a trapezoid-rule approximation of
// ( int |eta|^2_{H^{s+3/2}} dt )^{1/2}.
struct ZsNorm {
    double value = 0.0;      // sup_part + integral_part
    double sup_part = 0.0;
    double integral_part = 0.0;
    bool integral_reliable = true;  // false when fewer than 2 samples
};

// Samples must be in strictly increasing time order; otherwise rejected.
ZsNorm zs_norm(const std::vector<TimeSample>& samples, double s);

// Least-squares slope of log(y) against log(x); the shared helper behind
// every operator-order and convergence-order fit. Requires >= 2 positive
// points (and every fit caller enforces its own minimum).
struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    std::vector<double> xs, ys;  // the fitted (x, y) pairs, for reports
};

SlopeFit fit_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace muskat
