#pragma once

#include <string>

#include "fou2_model.hpp"

// Drift estimators for continuously observed paths, the deterministic
// divergence-correction integral used by the corrected least-squares
// estimator, and the limiting variance of the rescaled estimation error.

namespace fou2 {

enum class EstimatorKind { kMoment, kLseCorrected, kPathwise };

const char* estimator_label(EstimatorKind kind);   // "moment" etc.
EstimatorKind estimator_from_label(const std::string& label);

struct EstimateResult {
  EstimatorKind kind = EstimatorKind::kPathwise;
  double theta_hat = 0.0;
  double denominator = 0.0;  // (1/T) int_0^T X_t^2 dt
  double correction = 0.0;   // divergence correction; 0 for other estimators
  double horizon = 0.0;
};

struct VarianceResult {
  double sigma_squared = 0.0;
  double error_bound = 0.0;  // conservative quadrature bound
};

class out_of_range_error : public std::runtime_error {
 public:
  out_of_range_error(const std::string& msg, double lo, double hi)
      : std::runtime_error(msg), achievable_lo(lo), achievable_hi(hi) {}
  double achievable_lo;  // attainable [lo, hi] for the target value
  double achievable_hi;
};

// Trapezoid value of (1/T) int X_t^2 dt over the path's grid.
double quadratic_functional(const SamplePath& path);

// Inverts theta -> stationary_variance(theta, H) on [bracket_lo, bracket_hi]
// against the path's quadratic functional.
EstimateResult estimate_moment(const SamplePath& path, double hurst,
                               double bracket_lo = 1.01,
                               double bracket_hi = 50.0);

// Deterministic correction: the mean of the pathwise integral int X dY,
//   (2H-1) H^{2H} int_0^T [ int_{e^{-u/H}}^1 y^{(theta-1)H} (1-y)^{2H-2} dy ] du.
// Equivalently 0.5 E[X_T^2] + theta int_0^T E[X_t^2] dt (see tests).
double skorokhod_correction(double horizon, const ModelParams& params);

// Limit of skorokhod_correction(T)/T as T grows:
// (2H-1) H^{2H} B((theta-1)H + 1, 2H-1).
double correction_limit(const ModelParams& params);

// theta_hat = (-X_T^2/2 + correction(T, params)) / int_0^T X_t^2 dt, with the
// correction evaluated at the supplied parameters (a verification device:
// the correction is deterministic but depends on the true theta).
EstimateResult estimate_lse_corrected(const SamplePath& path,
                                      const ModelParams& params);

// Fixed-point variant: starts from the moment estimate and re-plugs theta_hat
// into the correction until it stabilizes. No convergence guarantee; kept as
// an optional mode.
EstimateResult estimate_lse_iterated(const SamplePath& path, double hurst,
                                     int max_iterations = 50,
                                     double tol = 1e-8);

// theta_hat' = -(X_T^2/2) / int_0^T X_t^2 dt. The trapezoid sum for
// int X dX telescopes to X_T^2/2 exactly, so that identity is used directly.
EstimateResult estimate_pathwise(const SamplePath& path);

// sigma^2(theta, H): limiting variance of sqrt(T) (theta_hat - theta).
// The defining triple integral over [0,inf)^3 is mapped to the unit cube by
// a = e^{-x/H}, b = e^{-y/H}, c = e^{-z/H} and evaluated by nested
// singularity-aware quadrature:
//   sigma^2 = 2 theta^2 H / B^2 *
//     int_0^1 a^{-H} [ int_0^1 b^{(theta-1)H} |b-a|^{2H-2} db ]
//                    [ int_0^1 c^{-H} (1-c)^{2H-2} e^{-theta H |ln(a/c)|} dc ] da.
VarianceResult asymptotic_variance(const ModelParams& params);

}  // namespace fou2
