#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "numerics.hpp"

// Fractional Brownian motion: covariance, the H > 1/2 Volterra kernel, the
// weighted inner product of step/smooth functions, and exact Gaussian path
// sampling on arbitrary grids.

namespace fou2 {

// Domain checks. Estimation-side code requires hurst in (1/2, 1); the
// sampler accepts the full range (0, 1).
void check_hurst(double hurst);
void check_hurst_upper_range(double hurst);

// Exact-sampler grid cap; FOU2KIT_GRID_CAP overrides the default 8192.
std::size_t default_grid_cap();

// Raised when a grid exceeds the cap of the dense factorization route.
class grid_cap_error : public std::runtime_error {
 public:
  explicit grid_cap_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct TimeGrid {
  std::vector<double> times;

  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> t);
  static TimeGrid uniform(double horizon, std::size_t steps);

  std::size_t size() const { return times.size(); }
  double front() const { return times.front(); }
  double back() const { return times.back(); }
};

struct SamplePath {
  TimeGrid grid;
  std::vector<double> values;
  std::string meta;  // single header line carried through file export

  std::size_t size() const { return values.size(); }
  double horizon() const { return grid.back() - grid.front(); }
};

// Covariance 0.5 (t^{2H} + s^{2H} - |t-s|^{2H}).
double fbm_cov(double t, double s, double hurst);

// Volterra kernel for H > 1/2:
//   K_H(t,s) = c_H s^{1/2-H} int_s^t (u-s)^{H-3/2} u^{H-1/2} du,
//   c_H = (H-1/2) sqrt(2H Gamma(3/2-H) / (Gamma(H+1/2) Gamma(2-2H))).
// Exposed for validation against fbm_cov; nothing consumes it at runtime.
double volterra_kernel(double t, double s, double hurst);

// alpha_H int_0^T int_0^T phi(s) psi(t) |t-s|^{2H-2} ds dt with
// alpha_H = H(2H-1). Discontinuities of phi/psi can be declared in
// breakpoints so the integrator splits there.
double weighted_inner_product(const std::function<double(double)>& phi,
                              const std::function<double(double)>& psi,
                              double horizon, double hurst,
                              const std::vector<double>& breakpoints = {});

// Exact multivariate-normal draw of B on the grid (increment covariance is
// factored rather than the level covariance; levels are rebuilt by a
// cumulative sum). A grid starting at 0 gets B = 0 there. Uses draw indices
// [base, base + #increments) of the stream.
SamplePath sample_fbm_exact(const TimeGrid& grid, double hurst,
                            const RngStream& rng, std::uint64_t base = 0,
                            std::size_t grid_cap = default_grid_cap());

// Increment covariance matrix (row-major) for intervals [lo[i], hi[i]].
std::vector<double> fbm_increment_cov(const std::vector<double>& lo,
                                      const std::vector<double>& hi,
                                      double hurst);

}  // namespace fou2
