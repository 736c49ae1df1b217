#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbm.hpp"

using namespace fou2;

namespace {
double rel_err(double got, double want) {
  return std::fabs(got - want) / std::max(1e-300, std::fabs(want));
}

// Independent oracle for the kernel-covariance identity:
// int_0^{min(s,t)} K(t,u) K(s,u) du, u^{1-2H} endpoint behavior removed.
double kernel_cov(double t, double s, double hurst) {
  const double up = std::min(s, t);
  QuadratureSpec spec;
  spec.abs_tol = 1e-10;
  spec.rel_tol = 1e-8;
  return integrate_algebraic(
             [&](double u, double, double) {
               return std::pow(u, 2.0 * hurst - 1.0) *
                      volterra_kernel(t, u, hurst) *
                      volterra_kernel(s, u, hurst);
             },
             0.0, up, 1.0 - 2.0 * hurst, 0.0, spec)
      .value;
}
}  // namespace

TEST_CASE("fbm_cov: closed-form cases") {
  CHECK(rel_err(fbm_cov(1.7, 1.7, 0.62), std::pow(1.7, 2 * 0.62)) < 1e-14);
  CHECK(rel_err(fbm_cov(2.0, 3.0, 0.5), 2.0) < 1e-14);  // Brownian: min(t,s)
  CHECK(rel_err(fbm_cov(2.0, 1.0, 0.75), M_SQRT2) < 1e-14);
}

TEST_CASE("fbm_cov: self-similarity and increment stationarity") {
  const RngStream rng{8, 0};
  std::uint64_t k = 0;
  for (int rep = 0; rep < 40; ++rep) {
    const double t = 5.0 * rng.uniform(k++);
    const double s = 5.0 * rng.uniform(k++);
    const double c = 0.1 + 4.0 * rng.uniform(k++);
    const double hurst = 0.51 + 0.48 * rng.uniform(k++);
    CHECK(rel_err(fbm_cov(c * t, c * s, hurst),
                  std::pow(c, 2.0 * hurst) * fbm_cov(t, s, hurst)) < 1e-12);
    const double var_inc = fbm_cov(t, t, hurst) - 2.0 * fbm_cov(t, s, hurst) +
                           fbm_cov(s, s, hurst);
    CHECK(std::fabs(var_inc - std::pow(std::fabs(t - s), 2.0 * hurst)) <
          1e-10 * (1.0 + var_inc));
  }
}

TEST_CASE("volterra_kernel: finite, positive, monotone in t") {
  const double k1 = volterra_kernel(1.0, 1e-6, 0.7);
  CHECK(std::isfinite(k1));
  CHECK(k1 > 0.0);
  double prev = 0.0;
  for (double t = 0.5; t <= 2.5; t += 0.5) {
    const double k = volterra_kernel(t, 0.3, 0.7);
    CHECK(k > prev);
    prev = k;
  }
  CHECK_THROWS_AS(volterra_kernel(1.0, 1.0, 0.7), std::domain_error);
  CHECK_THROWS_AS(volterra_kernel(1.0, 0.0, 0.7), std::domain_error);
}

TEST_CASE("volterra_kernel: reproduces the covariance") {
  CHECK(std::fabs(kernel_cov(1.0, 0.5, 0.7) - fbm_cov(1.0, 0.5, 0.7)) < 1e-6);
}

TEST_CASE("volterra_kernel: covariance identity across H on a grid") {
  const double ts[] = {0.4, 0.8, 1.2, 1.6, 2.0};
  for (double hurst : {0.55, 0.7, 0.9}) {
    for (double t : ts) {
      for (double s : ts) {
        const double want = fbm_cov(t, s, hurst);
        CHECK(std::fabs(kernel_cov(t, s, hurst) - want) < 1e-6);
      }
    }
  }
}

TEST_CASE("weighted_inner_product: indicator pairs give the covariance") {
  const double hurst = 0.7, horizon = 2.0;
  auto ind = [](double c) {
    return [c](double x) { return x <= c ? 1.0 : 0.0; };
  };
  const double t = 1.3, s = 0.6;
  CHECK(rel_err(weighted_inner_product(ind(t), ind(t), horizon, hurst, {t}),
                fbm_cov(t, t, hurst)) < 1e-6);
  CHECK(rel_err(weighted_inner_product(ind(t), ind(s), horizon, hurst, {s, t}),
                fbm_cov(t, s, hurst)) < 1e-6);
}

TEST_CASE("weighted_inner_product: bilinear on random step functions") {
  const double hurst = 0.62, horizon = 1.0;
  const RngStream rng{17, 2};
  std::uint64_t k = 0;
  for (int rep = 0; rep < 3; ++rep) {
    const double u1 = 0.2 + 0.3 * rng.uniform(k++);
    const double u2 = 0.6 + 0.3 * rng.uniform(k++);
    const double v1 = 0.1 + 0.4 * rng.uniform(k++);
    const double a1 = 2.0 * rng.uniform(k++) - 1.0;
    const double a2 = 2.0 * rng.uniform(k++) - 1.0;
    const double b1 = 2.0 * rng.uniform(k++) - 1.0;
    auto phi = [&](double x) {
      return a1 * (x <= u1 ? 1.0 : 0.0) + a2 * (x <= u2 ? 1.0 : 0.0);
    };
    auto psi = [&](double x) { return b1 * (x <= v1 ? 1.0 : 0.0); };
    const double got =
        weighted_inner_product(phi, psi, horizon, hurst, {u1, u2, v1});
    const double want = a1 * b1 * fbm_cov(u1, v1, hurst) +
                        a2 * b1 * fbm_cov(u2, v1, hurst);
    CHECK(std::fabs(got - want) < 1e-6 * (1.0 + std::fabs(want)));
  }
}

TEST_CASE("sample_fbm_exact: deterministic under a fixed stream") {
  const TimeGrid grid = TimeGrid::uniform(2.0, 16);
  const SamplePath a = sample_fbm_exact(grid, 0.7, RngStream{5, 9});
  const SamplePath b = sample_fbm_exact(grid, 0.7, RngStream{5, 9});
  CHECK(a.values == b.values);
  CHECK(a.values[0] == 0.0);  // grid starts at 0
  const SamplePath c = sample_fbm_exact(grid, 0.7, RngStream{5, 10});
  CHECK(a.values != c.values);
}

TEST_CASE("sample_fbm_exact: empirical covariance matches fbm_cov") {
  // 10-point grid, 20000 replicates, entrywise within 3 standard errors.
  std::vector<double> times;
  for (int i = 1; i <= 10; ++i) times.push_back(0.1 * i);
  const TimeGrid grid{times};
  const double hurst = 0.7;
  const std::size_t reps = 20000;
  const std::size_t n = grid.size();
  std::vector<double> acc(n * n, 0.0);
  const RngStream rng{4242, 0};
  for (std::size_t r = 0; r < reps; ++r) {
    const SamplePath p = sample_fbm_exact(grid, hurst, rng, r * 64);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        acc[i * n + j] += p.values[i] * p.values[j];
  }
  int violations = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double want = fbm_cov(grid.times[i], grid.times[j], hurst);
      const double got = acc[i * n + j] / static_cast<double>(reps);
      const double var_prod = fbm_cov(grid.times[i], grid.times[i], hurst) *
                                  fbm_cov(grid.times[j], grid.times[j], hurst) +
                              want * want;
      const double se = std::sqrt(var_prod / static_cast<double>(reps));
      if (std::fabs(got - want) > 3.0 * se) ++violations;
    }
  }
  // 55 entries, each within 3 SE with probability ~0.997; allow one outlier.
  CHECK(violations <= 1);
}

TEST_CASE("sample_fbm_exact: Brownian increments are uncorrelated") {
  const TimeGrid grid = TimeGrid::uniform(1.0, 50);
  const std::size_t reps = 2000;
  const RngStream rng{777, 0};
  double s01 = 0.0, s0 = 0.0, s1 = 0.0, s00 = 0.0, s11 = 0.0;
  std::size_t n_pairs = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    const SamplePath p = sample_fbm_exact(grid, 0.5, rng, r * 64);
    for (std::size_t i = 0; i + 2 < p.size(); ++i) {
      const double d0 = p.values[i + 1] - p.values[i];
      const double d1 = p.values[i + 2] - p.values[i + 1];
      s01 += d0 * d1;
      s0 += d0;
      s1 += d1;
      s00 += d0 * d0;
      s11 += d1 * d1;
      ++n_pairs;
    }
  }
  const double nn = static_cast<double>(n_pairs);
  const double rho = (s01 / nn - (s0 / nn) * (s1 / nn)) /
                     std::sqrt((s00 / nn - (s0 / nn) * (s0 / nn)) *
                               (s11 / nn - (s1 / nn) * (s1 / nn)));
  CHECK(std::fabs(rho) < 3.0 / std::sqrt(nn));
}

TEST_CASE("sample_fbm_exact: non-zero grid start and the cap") {
  std::vector<double> times = {0.5, 1.0, 1.5};
  const SamplePath p = sample_fbm_exact(TimeGrid{times}, 0.7, RngStream{1, 1});
  CHECK(p.size() == 3);
  CHECK(p.values[0] != 0.0);  // B at 0.5 is an honest draw
  CHECK_THROWS_AS(
      sample_fbm_exact(TimeGrid::uniform(1.0, 64), 0.7, RngStream{1, 1}, 0, 8),
      grid_cap_error);
}

TEST_CASE("TimeGrid: validation") {
  CHECK_THROWS_AS(TimeGrid({1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(TimeGrid({-1.0, 1.0}), std::domain_error);
  CHECK_THROWS_AS(TimeGrid(std::vector<double>{}), std::domain_error);
  CHECK_THROWS_AS(check_hurst(1.0), std::domain_error);
  CHECK_THROWS_AS(check_hurst_upper_range(0.5), std::domain_error);
}
