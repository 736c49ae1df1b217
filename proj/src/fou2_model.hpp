#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "fbm.hpp"
#include "numerics.hpp"

// The mean-reverting process X driven by Y_t = int_0^t e^{-s} dB_{a_s} with
// the exponential time change a_t = H e^{t/H}:
//
//   dX_t = -theta X_t dt + dY_t,   X_0 = 0,   theta > 1,  H in (1/2, 1).
//
// Alongside the two path samplers this module carries the covariance
// oracles used to validate them: the stationary Lamperti process
// Z_t = e^{-t} B_{a_t}, the driving-noise covariance, the covariance of X,
// and the stationary variance/covariance in closed form.

namespace fou2 {

struct ModelParams {
  double theta = 2.0;
  double hurst = 0.7;

  void validate() const {
    if (!(theta > 1.0))
      throw std::domain_error("ModelParams: requires theta > 1");
    check_hurst_upper_range(hurst);
  }
};

enum class Scheme { kLeftPoint, kTrapezoid };
enum class Route { kExactCholesky, kStationaryCirculant };

struct SimConfig {
  double horizon = 10.0;
  double dt = 0.025;
  Scheme scheme = Scheme::kLeftPoint;
  Route route = Route::kExactCholesky;
  std::size_t grid_cap = default_grid_cap();

  std::size_t steps() const;
  void validate() const;
};

// a_t = H e^{t/H}; accepts negative t (the stationary representation
// integrates from the far past).
double time_change(double t, double hurst);

// Cov(Z_s, Z_t) for Z_t = e^{-t} B_{a_t}, a function of tau = |t-s|:
//   0.5 H^{2H} [e^{-tau} + e^{tau} - e^{tau} (1 - e^{-tau/H})^{2H}],
// evaluated in expm1/log1p form so the e^{(1-1/H)tau} tail survives for
// large tau.
double z_cov(double tau, double hurst);

// Cov(Y_s, Y_t) for the driving noise of the alpha-parameterized family
// (alpha = 1 is the model's noise); evaluated by nested singularity-aware
// quadrature of
//   alpha_H H^{2H} int int (r w)^{-H} |r-w|^{2H-2} dr dw
// over the transformed ranges.
double y_alpha_cov(double s, double t, double hurst, double alpha);
double y1_cov(double s, double t, double hurst);

// Cov(X_s, X_t) for the zero-start solution, by the same quadrature with
// weight (r w)^{(theta-1)H} and the e^{-theta(s+t)} prefactor.
double x_cov(double s, double t, const ModelParams& params);

// (2H-1) H^{2H} B((theta-1)H + 1, 2H-1) / theta.
double stationary_variance(const ModelParams& params);

// Closed-form Cov(U_t, U_0) of the stationary process via the
// incomplete-Beta decomposition
//   c(t) = svar [ e^{-theta t} + sinh(theta t) I(e^{-t/H}) / B ],
// where I is the lower incomplete Beta with parameters
// ((theta-1)H + 1, 2H-1). Reduces to stationary_variance at t = 0. For
// t > 0 this decomposition drops part of the off-diagonal region of the
// defining double integral; stationary_cov_exact carries the remainder.
double stationary_cov(double t, const ModelParams& params);

// stationary_cov plus the off-wedge remainder
//   svar e^{-theta t} / (2B) int_{e^{-t/H}}^1 (u^{-(theta+1)H} - u^{(theta-1)H})
//                                              (1-u)^{2H-2} du,
// which makes it equal to the defining double integral (and to what sampled
// paths of U actually exhibit).
double stationary_cov_exact(double t, const ModelParams& params);

// ---------------------------------------------------------------------------
// Path sampling

// Reusable sampler: the covariance factorization (exact route) or circulant
// spectrum (stationary route) is prepared once, then each call maps a
// disjoint block of the stream's draws to one path. Thread-safe once built.
class PathSampler {
 public:
  PathSampler(const ModelParams& params, const SimConfig& cfg);
  ~PathSampler();
  PathSampler(PathSampler&&) noexcept;
  PathSampler& operator=(PathSampler&&) noexcept;

  SamplePath sample(const RngStream& rng, std::uint64_t base) const;
  // Draws consumed per path; callers advance `base` by at least this much.
  std::uint64_t draws_per_path() const;
  // True if the stationary route was requested but fell back to the exact
  // factorization because the circulant embedding had a negative eigenvalue.
  bool used_fallback() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// One-shot wrappers around PathSampler.
SamplePath simulate_x(const ModelParams& params, const SimConfig& cfg,
                      const RngStream& rng, std::uint64_t base = 0);
SamplePath simulate_x_stationary_route(const ModelParams& params,
                                       const SimConfig& cfg,
                                       const RngStream& rng,
                                       std::uint64_t base = 0,
                                       bool* fell_back = nullptr);

// Stationary process U on [0, horizon]: simulates X from -t0 with
// e^{-theta t0} < 1e-8 and drops the burn-in segment.
SamplePath simulate_u(const ModelParams& params, const SimConfig& cfg,
                      const RngStream& rng, std::uint64_t base = 0);

}  // namespace fou2
