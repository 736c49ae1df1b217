#include "fbm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>

namespace fou2 {

void check_hurst(double hurst) {
  if (!(hurst > 0.0 && hurst < 1.0))
    throw std::domain_error("hurst parameter must lie in (0, 1)");
}

void check_hurst_upper_range(double hurst) {
  if (!(hurst > 0.5 && hurst < 1.0))
    throw std::domain_error("hurst parameter must lie in (1/2, 1)");
}

std::size_t default_grid_cap() {
  static std::size_t cap = [] {
    if (const char* env = std::getenv("FOU2KIT_GRID_CAP")) {
      const long v = std::atol(env);
      if (v > 1) return static_cast<std::size_t>(v);
    }
    return static_cast<std::size_t>(8192);
  }();
  return cap;
}

TimeGrid::TimeGrid(std::vector<double> t) : times(std::move(t)) {
  if (times.empty()) throw std::domain_error("TimeGrid: empty");
  if (!(times.front() >= 0.0))
    throw std::domain_error("TimeGrid: first entry must be >= 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]))
      throw std::domain_error("TimeGrid: non-finite entry");
    if (i > 0 && !(times[i] > times[i - 1]))
      throw std::domain_error("TimeGrid: times must be strictly increasing");
  }
}

TimeGrid TimeGrid::uniform(double horizon, std::size_t steps) {
  if (!(horizon > 0.0) || steps == 0)
    throw std::domain_error("TimeGrid::uniform: need horizon > 0, steps >= 1");
  std::vector<double> t(steps + 1);
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = dt * static_cast<double>(i);
  t[steps] = horizon;
  return TimeGrid(std::move(t));
}

double fbm_cov(double t, double s, double hurst) {
  check_hurst(hurst);
  if (!(t >= 0.0) || !(s >= 0.0))
    throw std::domain_error("fbm_cov: requires t, s >= 0");
  const double h2 = 2.0 * hurst;
  return 0.5 * (std::pow(t, h2) + std::pow(s, h2) -
                std::pow(std::fabs(t - s), h2));
}

double volterra_kernel(double t, double s, double hurst) {
  check_hurst_upper_range(hurst);
  if (!(s > 0.0 && s < t))
    throw std::domain_error("volterra_kernel: requires 0 < s < t");
  const double ch =
      (hurst - 0.5) *
      std::sqrt(2.0 * hurst *
                std::exp(log_gamma(1.5 - hurst) - log_gamma(hurst + 0.5) -
                         log_gamma(2.0 - 2.0 * hurst)));
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-10;
  // (u-s)^{H-3/2} singular at u = s; remainder u^{H-1/2} is smooth.
  const QuadratureResult q = integrate_algebraic(
      [hurst](double u, double, double) { return std::pow(u, hurst - 0.5); },
      s, t, hurst - 1.5, 0.0, spec);
  return ch * std::pow(s, 0.5 - hurst) * q.value;
}

double weighted_inner_product(const std::function<double(double)>& phi,
                              const std::function<double(double)>& psi,
                              double horizon, double hurst,
                              const std::vector<double>& breakpoints) {
  check_hurst_upper_range(hurst);
  if (!(horizon > 0.0))
    throw std::domain_error("weighted_inner_product: requires horizon > 0");
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double lam = 2.0 * hurst - 2.0;

  std::vector<double> cuts;
  cuts.push_back(0.0);
  for (double b : breakpoints)
    if (b > 0.0 && b < horizon) cuts.push_back(b);
  cuts.push_back(horizon);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadratureSpec inner_spec;
  inner_spec.abs_tol = 1e-12;
  inner_spec.rel_tol = 1e-10;

  // F(t) = int_0^T phi(s) |t-s|^{2H-2} ds, split at t and at declared
  // breakpoints; every piece is integrated with the |t-s| factor anchored at
  // t exactly, so F stays accurate arbitrarily close to a breakpoint.
  auto kernel_integral = [&](double t) -> double {
    std::vector<double> pts = cuts;
    if (t > 0.0 && t < horizon) pts.push_back(t);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
      const double lo = pts[i], hi = pts[i + 1];
      // t is never strictly inside a piece after the split above
      total += integrate_algebraic_anchored(
                   [&](double s, double) { return phi(s); }, t, lo, hi, lam,
                   inner_spec)
                   .value;
    }
    return total;
  };

  QuadratureSpec outer_spec;
  outer_spec.abs_tol = 1e-10;
  outer_spec.rel_tol = 1e-8;
  outer_spec.singularities.assign(cuts.begin() + 1, cuts.end() - 1);
  const double outer = integrate(
      [&](double t) { return psi(t) * kernel_integral(t); }, 0.0, horizon,
      outer_spec);
  return alpha_h * outer;
}

std::vector<double> fbm_increment_cov(const std::vector<double>& lo,
                                      const std::vector<double>& hi,
                                      double hurst) {
  const std::size_t m = lo.size();
  const double h2 = 2.0 * hurst;
  auto p = [h2](double x) { return std::pow(std::fabs(x), h2); };
  std::vector<double> c(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double v = 0.5 * (p(hi[i] - lo[j]) + p(lo[i] - hi[j]) -
                              p(lo[i] - lo[j]) - p(hi[i] - hi[j]));
      c[i * m + j] = v;
      c[j * m + i] = v;
    }
  }
  return c;
}

SamplePath sample_fbm_exact(const TimeGrid& grid, double hurst,
                            const RngStream& rng, std::uint64_t base,
                            std::size_t grid_cap) {
  check_hurst(hurst);
  const std::size_t n = grid.size();
  // Work with increments over knots {0} u grid (0 prepended unless present).
  std::vector<double> knots;
  knots.reserve(n + 1);
  if (grid.times.front() > 0.0) knots.push_back(0.0);
  knots.insert(knots.end(), grid.times.begin(), grid.times.end());
  const std::size_t m = knots.size() - 1;  // number of increments
  if (m > grid_cap)
    throw grid_cap_error("sample_fbm_exact: grid size " + std::to_string(m) +
                         " exceeds the grid cap (" + std::to_string(grid_cap) +
                         ")");

  std::vector<double> lo(knots.begin(), knots.end() - 1);
  std::vector<double> hi(knots.begin() + 1, knots.end());
  std::vector<double> cov = fbm_increment_cov(lo, hi, hurst);

  // Factor the correlation matrix; increment scales vary over many orders of
  // magnitude on transformed grids and would otherwise dominate the ridge.
  std::vector<double> scale(m);
  for (std::size_t i = 0; i < m; ++i) scale[i] = std::sqrt(cov[i * m + i]);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) cov[i * m + j] /= scale[i] * scale[j];
  std::vector<double> L;
  try {
    L = psd_factor(cov, m);
  } catch (const factorization_error& e) {
    throw factorization_error(
        std::string("sample_fbm_exact: increment covariance not PSD on this "
                    "grid: ") +
            e.what(),
        e.most_negative_pivot);
  }

  std::vector<double> z(m), incr(m);
  for (std::size_t i = 0; i < m; ++i) z[i] = rng.normal(base + i);
  lower_tri_matvec(L, m, z.data(), incr.data());
  for (std::size_t i = 0; i < m; ++i) incr[i] *= scale[i];

  SamplePath out;
  out.grid = grid;
  out.values.resize(n);
  double acc = 0.0;
  if (grid.times.front() == 0.0) {
    out.values[0] = 0.0;  // B_0 = 0; increments start at grid.times[0]
    for (std::size_t i = 0; i < m; ++i) {
      acc += incr[i];
      out.values[i + 1] = acc;
    }
  } else {
    for (std::size_t i = 0; i < m; ++i) {  // first increment covers [0, t_0]
      acc += incr[i];
      out.values[i] = acc;
    }
  }
  return out;
}

}  // namespace fou2
