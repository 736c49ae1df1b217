#include "estimators.hpp"

#include <cmath>

namespace fou2 {

const char* estimator_label(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kMoment:
      return "moment";
    case EstimatorKind::kLseCorrected:
      return "lse-corrected";
    case EstimatorKind::kPathwise:
      return "pathwise";
  }
  return "?";
}

EstimatorKind estimator_from_label(const std::string& label) {
  if (label == "moment") return EstimatorKind::kMoment;
  if (label == "lse-corrected") return EstimatorKind::kLseCorrected;
  if (label == "pathwise") return EstimatorKind::kPathwise;
  throw std::domain_error("unknown estimator '" + label +
                          "' (expected moment|lse-corrected|pathwise)");
}

double quadratic_functional(const SamplePath& path) {
  const std::size_t n = path.size();
  if (n < 2) throw std::domain_error("quadratic_functional: need >= 2 points");
  const double span = path.grid.back() - path.grid.front();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double dt = path.grid.times[i + 1] - path.grid.times[i];
    acc += 0.5 * dt *
           (path.values[i] * path.values[i] +
            path.values[i + 1] * path.values[i + 1]);
  }
  return acc / span;
}

EstimateResult estimate_moment(const SamplePath& path, double hurst,
                               double bracket_lo, double bracket_hi) {
  check_hurst_upper_range(hurst);
  if (!(bracket_lo > 1.0 && bracket_hi > bracket_lo))
    throw std::domain_error("estimate_moment: need 1 < lo < hi");
  const double q = quadratic_functional(path);
  auto g = [&](double theta) {
    return stationary_variance(ModelParams{theta, hurst});
  };
  const double g_lo = g(bracket_lo), g_hi = g(bracket_hi);
  if (!(g_lo > g_hi))
    throw std::domain_error(
        "estimate_moment: stationary variance not decreasing on the bracket");
  if (!(q <= g_lo && q >= g_hi))
    throw out_of_range_error(
        "estimate_moment: quadratic functional " + std::to_string(q) +
            " outside the achievable range [" + std::to_string(g_hi) + ", " +
            std::to_string(g_lo) + "] for theta in [" +
            std::to_string(bracket_lo) + ", " + std::to_string(bracket_hi) +
            "]",
        g_hi, g_lo);
  const double theta_hat = find_root_bracketed(
      [&](double th) { return g(th) - q; }, bracket_lo, bracket_hi, 1e-10);
  EstimateResult r;
  r.kind = EstimatorKind::kMoment;
  r.theta_hat = theta_hat;
  r.denominator = q;
  r.correction = 0.0;
  r.horizon = path.grid.back() - path.grid.front();
  return r;
}

double skorokhod_correction(double horizon, const ModelParams& params) {
  params.validate();
  if (!(horizon > 0.0))
    throw std::domain_error("skorokhod_correction: horizon > 0");
  const double hurst = params.hurst;
  const double p1 = (params.theta - 1.0) * hurst + 1.0;
  const double q = 2.0 * hurst - 1.0;
  QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 4000;
  const double integral = integrate(
      [&](double u) {
        return incomplete_beta_upper(p1, q, std::exp(-u / hurst));
      },
      0.0, horizon, spec);
  return (2.0 * hurst - 1.0) * std::pow(hurst, 2.0 * hurst) * integral;
}

double correction_limit(const ModelParams& params) {
  params.validate();
  const double hurst = params.hurst;
  return (2.0 * hurst - 1.0) * std::pow(hurst, 2.0 * hurst) *
         beta((params.theta - 1.0) * hurst + 1.0, 2.0 * hurst - 1.0);
}

namespace {

double int_x2(const SamplePath& path, double* horizon) {
  const double q = quadratic_functional(path);
  *horizon = path.grid.back() - path.grid.front();
  return q * *horizon;
}

}  // namespace

EstimateResult estimate_lse_corrected(const SamplePath& path,
                                      const ModelParams& params) {
  params.validate();
  double horizon = 0.0;
  const double denom = int_x2(path, &horizon);
  if (!(denom > 0.0))
    throw std::domain_error("estimate_lse_corrected: degenerate path");
  const double xt = path.values.back();
  const double corr = skorokhod_correction(horizon, params);
  EstimateResult r;
  r.kind = EstimatorKind::kLseCorrected;
  r.theta_hat = (-0.5 * xt * xt + corr) / denom;
  r.denominator = denom / horizon;
  r.correction = corr;
  r.horizon = horizon;
  return r;
}

EstimateResult estimate_lse_iterated(const SamplePath& path, double hurst,
                                     int max_iterations, double tol) {
  EstimateResult cur = estimate_moment(path, hurst);
  double theta = cur.theta_hat;
  EstimateResult r;
  for (int it = 0; it < max_iterations; ++it) {
    if (!(theta > 1.0)) theta = 1.0 + 1e-6;  // keep the correction defined
    r = estimate_lse_corrected(path, ModelParams{theta, hurst});
    if (std::fabs(r.theta_hat - theta) <= tol * (1.0 + std::fabs(theta))) {
      return r;
    }
    theta = r.theta_hat;
  }
  return r;
}

EstimateResult estimate_pathwise(const SamplePath& path) {
  double horizon = 0.0;
  const double denom = int_x2(path, &horizon);
  if (!(denom > 0.0))
    throw std::domain_error("estimate_pathwise: degenerate path");
  const double xt = path.values.back();
  const double x0 = path.values.front();
  EstimateResult r;
  r.kind = EstimatorKind::kPathwise;
  r.theta_hat = -0.5 * (xt * xt - x0 * x0) / denom;
  r.denominator = denom / horizon;
  r.correction = 0.0;
  r.horizon = horizon;
  return r;
}

VarianceResult asymptotic_variance(const ModelParams& params) {
  params.validate();
  const double hurst = params.hurst, theta = params.theta;
  const double p = (theta - 1.0) * hurst;
  const double q = 2.0 * hurst - 1.0;
  const double lam = 2.0 * hurst - 2.0;
  const double b = beta(p + 1.0, q);
  const double th = theta * hurst;

  QuadratureSpec inner_spec;
  inner_spec.abs_tol = 1e-13;
  inner_spec.rel_tol = 1e-9;

  // int_0^1 b^{(theta-1)H} |b-a|^{2H-2} db; the piece below a integrates in
  // closed form after b = a y.
  auto ib = [&](double a) -> double {
    double total = std::pow(a, p + 2.0 * hurst - 1.0) * b;
    if (a < 1.0)
      total += integrate_algebraic(
                   [&](double x, double, double) { return std::pow(x, p); },
                   a, 1.0, lam, 0.0, inner_spec)
                   .value;
    return total;
  };
  // int_0^1 c^{-H} (1-c)^{2H-2} e^{-theta H |ln(a/c)|} dc, split at the kink:
  //   a^{-theta H} int_0^a c^{(theta-1)H} (1-c)^{2H-2} dc
  // + a^{theta H}  int_a^1 c^{-(theta+1)H} (1-c)^{2H-2} dc.
  auto ic = [&](double a) -> double {
    double total = std::pow(a, -th) * incomplete_beta(p + 1.0, q, a);
    if (a < 1.0)
      total += std::pow(a, th) *
               integrate_algebraic(
                   [&](double c, double, double) {
                     return std::pow(c, -(theta + 1.0) * hurst);
                   },
                   a, 1.0, 0.0, lam, inner_spec)
                   .value;
    return total;
  };

  // Outer integrand a^{-H} ib(a) ic(a) behaves like a^{theta H - 1} at 0.
  const double la = std::min(th - 1.0, 0.0);
  QuadratureSpec outer_spec;
  outer_spec.abs_tol = 1e-10;
  outer_spec.rel_tol = 1e-6;
  outer_spec.max_subdivisions = 4000;
  const QuadratureResult i3 = integrate_algebraic(
      [&](double a, double da, double) {
        const double head = std::pow(da, -hurst - la);
        return head * ib(a) * ic(a);
      },
      0.0, 1.0, la, 0.0, outer_spec);

  const double prefactor = 2.0 * theta * theta * hurst / (b * b);
  VarianceResult out;
  out.sigma_squared = prefactor * i3.value;
  out.error_bound =
      prefactor * (i3.error_bound + 4.0 * inner_spec.rel_tol * i3.value);
  if (!(out.sigma_squared > 0.0) || !std::isfinite(out.sigma_squared))
    throw quadrature_error("asymptotic_variance: non-finite result",
                           out.sigma_squared, out.error_bound);
  return out;
}

}  // namespace fou2
