#include "fou2_model.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

namespace fou2 {

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

void SimConfig::validate() const {
  if (!(horizon > 0.0)) throw std::domain_error("SimConfig: horizon > 0");
  if (!(dt > 0.0 && dt < 1.0)) throw std::domain_error("SimConfig: 0 < dt < 1");
  const std::size_t n = steps();
  if (n < 1) throw std::domain_error("SimConfig: horizon shorter than dt");
  if (std::fabs(static_cast<double>(n) * dt - horizon) > 1e-9 * horizon)
    throw std::domain_error("SimConfig: horizon must be a multiple of dt");
  if (route == Route::kExactCholesky && n + 1 > grid_cap)
    throw grid_cap_error("SimConfig: " + std::to_string(n + 1) +
                         " grid points exceed the grid cap (" +
                         std::to_string(grid_cap) + ") for the exact route");
}

double time_change(double t, double hurst) {
  check_hurst(hurst);
  return hurst * std::exp(t / hurst);
}

double z_cov(double tau, double hurst) {
  check_hurst(hurst);
  tau = std::fabs(tau);
  const double h2 = 2.0 * hurst;
  if (tau == 0.0) return std::pow(hurst, h2);
  // 0.5 H^{2H} [e^{-tau} + e^{tau} (1 - (1 - e^{-tau/H})^{2H})]; the bracket's
  // second term equals exp(tau + log(-expm1(2H log1p(-x)))), x = e^{-tau/H},
  // which keeps the e^{(1-1/H)tau} tail representable for large tau.
  const double x = std::exp(-tau / hurst);
  double grown;
  if (x < 1e-14) {
    grown = std::exp(tau * (1.0 - 1.0 / hurst)) * h2;  // -expm1(g) ~ 2Hx
  } else {
    const double g = h2 * std::log1p(-x);
    const double em = -std::expm1(g);
    grown = std::exp(tau + std::log(em));
  }
  return 0.5 * std::pow(hurst, h2) * (std::exp(-tau) + grown);
}

namespace {

// J(s, t) = int_0^s int_0^t e^{c(u-s)} e^{c(v-t)} |A_u - A_v|^{2H-2} du dv
// for the time change A_u = (H/alpha) e^{alpha u / H}. The weights are
// anchored at the upper limits so the integrand stays bounded for large c,
// and the diagonal factor is split off exactly:
// |A_u - A_v| = A_min(u,v) (e^{alpha|u-v|/H} - 1).
double lamperti_weighted_cov(double s, double t, double c, double hurst,
                             double alpha) {
  if (s <= 0.0 || t <= 0.0) return 0.0;
  if (s > t) std::swap(s, t);
  const double lam = 2.0 * hurst - 2.0;
  const double aoh = alpha / hurst;
  auto a_of = [&](double u) { return (hurst / alpha) * std::exp(aoh * u); };

  QuadratureSpec inner_spec;
  inner_spec.abs_tol = 1e-13;
  inner_spec.rel_tol = 1e-9;
  QuadratureSpec outer_spec;
  outer_spec.abs_tol = 1e-12;
  outer_spec.rel_tol = 1e-8;

  auto inner = [&](double u) -> double {
    // (|A_u - A_v| / |u-v|)^{2H-2} with the exact gap d = |u-v| handed in.
    auto ratio_pow = [&](double v, double d) -> double {
      const double mn = std::min(u, v);
      return std::pow(a_of(mn) * std::expm1(aoh * d) / d, lam);
    };
    double total = 0.0;
    if (u > 0.0) {
      total += integrate_algebraic(
                   [&](double v, double, double db) {
                     return std::exp(c * (v - t)) * ratio_pow(v, db);
                   },
                   0.0, u, 0.0, lam, inner_spec)
                   .value;
    }
    if (u < t) {
      total += integrate_algebraic(
                   [&](double v, double da, double) {
                     return std::exp(c * (v - t)) * ratio_pow(v, da);
                   },
                   u, t, lam, 0.0, inner_spec)
                   .value;
    }
    return total;
  };
  return integrate([&](double u) { return std::exp(c * (u - s)) * inner(u); },
                   0.0, s, outer_spec);
}

}  // namespace

double y_alpha_cov(double s, double t, double hurst, double alpha) {
  check_hurst_upper_range(hurst);
  if (!(alpha > 0.0)) throw std::domain_error("y_alpha_cov: alpha > 0");
  if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("y_alpha_cov: s,t >= 0");
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double c = alpha * (1.0 / hurst - 1.0);
  // e^{c(u+v)} = e^{c(u-s)} e^{c(v-t)} e^{c(s+t)}
  return alpha_h * std::exp(c * (s + t)) *
         lamperti_weighted_cov(s, t, c, hurst, alpha);
}

double y1_cov(double s, double t, double hurst) {
  return y_alpha_cov(s, t, hurst, 1.0);
}

double x_cov(double s, double t, const ModelParams& params) {
  params.validate();
  if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("x_cov: s,t >= 0");
  const double hurst = params.hurst;
  const double alpha_h = hurst * (2.0 * hurst - 1.0);
  const double c = params.theta - 1.0 + 1.0 / hurst;
  // e^{-theta(s+t)} e^{c(u+v)} = e^{(1/H-1)(s+t)} e^{c(u-s)} e^{c(v-t)}
  return alpha_h * std::exp((1.0 / hurst - 1.0) * (s + t)) *
         lamperti_weighted_cov(s, t, c, hurst, 1.0);
}

double stationary_variance(const ModelParams& params) {
  params.validate();
  const double hurst = params.hurst;
  return (2.0 * hurst - 1.0) * std::pow(hurst, 2.0 * hurst) *
         beta((params.theta - 1.0) * hurst + 1.0, 2.0 * hurst - 1.0) /
         params.theta;
}

double stationary_cov(double t, const ModelParams& params) {
  params.validate();
  if (!(t >= 0.0)) throw std::domain_error("stationary_cov: t >= 0");
  const double hurst = params.hurst, theta = params.theta;
  const double p1 = (theta - 1.0) * hurst + 1.0;
  const double q = 2.0 * hurst - 1.0;
  const double b = beta(p1, q);
  const double svar = stationary_variance(params);
  const double x = std::exp(-t / hurst);
  const double tt = theta * t;
  if (tt > 200.0) {
    // sinh(theta t) I(x)/B ~ e^{(1-1/H)t} / (2 p1 B)
    return svar * (std::exp(-tt) +
                   std::exp(t * (1.0 - 1.0 / hurst)) / (2.0 * p1 * b));
  }
  if (tt < 1.0) {
    const double upper = incomplete_beta_upper(p1, q, x);
    return svar * (std::cosh(tt) - std::sinh(tt) * upper / b);
  }
  const double lower = incomplete_beta(p1, q, x);
  return svar * (std::exp(-tt) + std::sinh(tt) * lower / b);
}

double stationary_cov_exact(double t, const ModelParams& params) {
  params.validate();
  if (!(t >= 0.0)) throw std::domain_error("stationary_cov_exact: t >= 0");
  if (t == 0.0) return stationary_variance(params);
  const double hurst = params.hurst, theta = params.theta;
  const double p = (theta - 1.0) * hurst;
  const double q = 2.0 * hurst - 1.0;
  const double b = beta(p + 1.0, q);
  const double svar = stationary_variance(params);
  const double x = std::exp(-t / hurst);
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-10;
  const double mexp = (theta + 1.0) * hurst;
  const QuadratureResult rem = integrate_algebraic(
      [&](double u, double, double) {
        return std::pow(u, -mexp) - std::pow(u, p);
      },
      x, 1.0, 0.0, 2.0 * hurst - 2.0, spec);
  return stationary_cov(t, params) +
         svar * std::exp(-theta * t) * rem.value / (2.0 * b);
}

// ---------------------------------------------------------------------------
// Path sampling

struct PathSampler::Impl {
  ModelParams params;
  SimConfig cfg;
  std::size_t n = 0;  // steps; grid has n+1 points
  Route effective_route = Route::kExactCholesky;
  bool fell_back = false;
  std::vector<double> chol;     // exact route: (n+1)^2 factor of z_cov matrix
  CirculantSpectrum spectrum;   // stationary route
  std::size_t m = 0;            // spectrum length (power of two)

  void build_exact() {
    const std::size_t np = n + 1;
    if (np > cfg.grid_cap)
      throw grid_cap_error("PathSampler: " + std::to_string(np) +
                           " grid points exceed the grid cap (" +
                           std::to_string(cfg.grid_cap) + ")");
    std::vector<double> row(np);
    for (std::size_t k = 0; k < np; ++k)
      row[k] = z_cov(static_cast<double>(k) * cfg.dt, params.hurst);
    std::vector<double> cov(np * np);
    for (std::size_t i = 0; i < np; ++i)
      for (std::size_t j = 0; j < np; ++j)
        cov[i * np + j] = row[i > j ? i - j : j - i];
    chol = psd_factor(cov, np);
    effective_route = Route::kExactCholesky;
  }

  void build_stationary() {
    const std::size_t np = n + 1;
    std::size_t mm = 1;
    while (mm < 2 * np) mm <<= 1;
    // The row is a genuine covariance at every lag, so padding the circulant
    // is principled; a slowly decaying row may need a few doublings before
    // the wrap-around stops producing negative eigenvalues.
    for (int attempt = 0; attempt < 4; ++attempt, mm <<= 1) {
      std::vector<double> row(mm);
      for (std::size_t j = 0; j < mm; ++j) {
        const std::size_t lag = std::min(j, mm - j);
        row[j] = z_cov(static_cast<double>(lag) * cfg.dt, params.hurst);
      }
      spectrum = circulant_sqrt_spectrum(row);
      if (spectrum.nonnegative) {
        m = mm;
        effective_route = Route::kStationaryCirculant;
        return;
      }
    }
    std::cerr << "fou2: circulant embedding failed (min eigenvalue "
              << spectrum.min_eigenvalue
              << "); falling back to the exact factorization\n";
    fell_back = true;
    build_exact();
  }
};

PathSampler::PathSampler(const ModelParams& params, const SimConfig& cfg)
    : impl_(new Impl) {
  params.validate();
  cfg.validate();
  impl_->params = params;
  impl_->cfg = cfg;
  impl_->n = cfg.steps();
  if (cfg.route == Route::kStationaryCirculant)
    impl_->build_stationary();
  else
    impl_->build_exact();
}

PathSampler::~PathSampler() = default;
PathSampler::PathSampler(PathSampler&&) noexcept = default;
PathSampler& PathSampler::operator=(PathSampler&&) noexcept = default;

std::uint64_t PathSampler::draws_per_path() const {
  return impl_->effective_route == Route::kStationaryCirculant
             ? impl_->m
             : impl_->n + 1;
}

bool PathSampler::used_fallback() const { return impl_->fell_back; }

SamplePath PathSampler::sample(const RngStream& rng,
                               std::uint64_t base) const {
  const Impl& im = *impl_;
  const std::size_t n = im.n;
  const std::size_t np = n + 1;
  const double dt = im.cfg.dt;
  const double theta = im.params.theta;

  // Z_t = e^{-t} B_{a_t} on the grid, exactly distributed either way.
  std::vector<double> z;
  if (im.effective_route == Route::kStationaryCirculant) {
    z = sample_stationary_circulant(im.spectrum, np, rng, base);
  } else {
    std::vector<double> g(np);
    for (std::size_t i = 0; i < np; ++i) g[i] = rng.normal(base + i);
    z.resize(np);
    lower_tri_matvec(im.chol, np, g.data(), z.data());
  }

  SamplePath out;
  std::vector<double> times(np);
  for (std::size_t i = 0; i < np; ++i) times[i] = static_cast<double>(i) * dt;
  times[n] = im.cfg.horizon;
  out.grid = TimeGrid(std::move(times));
  out.values.assign(np, 0.0);

  const double eth = std::exp(-theta * dt);
  const bool trap = im.cfg.scheme == Scheme::kTrapezoid;
  if (im.effective_route == Route::kStationaryCirculant) {
    // dY_i = dZ_i + Zbar_i dt, then X_{i+1} = e^{-theta dt} X_i + w dY_i.
    const double w = trap ? 0.5 * (eth + 1.0) : eth;
    for (std::size_t i = 0; i < n; ++i) {
      const double zbar = trap ? 0.5 * (z[i] + z[i + 1]) : z[i];
      const double dy = (z[i + 1] - z[i]) + zbar * dt;
      out.values[i + 1] = eth * out.values[i] + w * dy;
    }
  } else {
    // dB_{a_t} over step i is e^{t_i} (e^{dt} Z_{i+1} - Z_i); the recursion
    // folds the e^{-theta t} prefactor in so every factor stays bounded.
    const double ed = std::exp(dt);
    const double w = trap ? 0.5 * (eth + std::exp(-dt)) : eth;
    for (std::size_t i = 0; i < n; ++i) {
      const double db_scaled = ed * z[i + 1] - z[i];  // e^{-t_i} dB_i
      out.values[i + 1] = eth * out.values[i] + w * db_scaled;
    }
  }

  std::ostringstream meta;
  meta.precision(17);
  meta << "kind=fou2 theta=" << theta << " hurst=" << im.params.hurst
       << " T=" << im.cfg.horizon << " dt=" << dt << " scheme="
       << (trap ? "trapezoid" : "left") << " route="
       << (im.effective_route == Route::kStationaryCirculant ? "stationary"
                                                             : "exact")
       << " seed=" << rng.seed << " stream=" << rng.stream << " base=" << base;
  out.meta = meta.str();
  return out;
}

SamplePath simulate_x(const ModelParams& params, const SimConfig& cfg,
                      const RngStream& rng, std::uint64_t base) {
  SimConfig c = cfg;
  c.route = Route::kExactCholesky;
  return PathSampler(params, c).sample(rng, base);
}

SamplePath simulate_x_stationary_route(const ModelParams& params,
                                       const SimConfig& cfg,
                                       const RngStream& rng,
                                       std::uint64_t base, bool* fell_back) {
  SimConfig c = cfg;
  c.route = Route::kStationaryCirculant;
  PathSampler sampler(params, c);
  if (fell_back) *fell_back = sampler.used_fallback();
  return sampler.sample(rng, base);
}

SamplePath simulate_u(const ModelParams& params, const SimConfig& cfg,
                      const RngStream& rng, std::uint64_t base) {
  params.validate();
  // Burn-in long enough that e^{-theta t0} < 1e-8.
  const double t0_raw = std::log(1e8) / params.theta;
  const std::size_t burn_steps =
      static_cast<std::size_t>(std::ceil(t0_raw / cfg.dt));
  SimConfig full = cfg;
  full.horizon = cfg.horizon + static_cast<double>(burn_steps) * cfg.dt;
  SamplePath x = PathSampler(params, full).sample(rng, base);

  const std::size_t np = cfg.steps() + 1;
  SamplePath out;
  std::vector<double> times(np);
  for (std::size_t i = 0; i < np; ++i) times[i] = static_cast<double>(i) * cfg.dt;
  times[np - 1] = cfg.horizon;
  out.grid = TimeGrid(std::move(times));
  out.values.assign(x.values.end() - static_cast<std::ptrdiff_t>(np),
                    x.values.end());
  out.meta = x.meta + " burn_in_steps=" + std::to_string(burn_steps);
  return out;
}

}  // namespace fou2
