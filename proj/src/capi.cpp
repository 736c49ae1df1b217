#include "fou2kit.h"

#include <cstdio>
#include <cstring>
#include <string>

#include "estimators.hpp"
#include "harness.hpp"
#include "io.hpp"
#include "version.hpp"

struct fou2_path {
  fou2::SamplePath path;
};

namespace {

thread_local std::string g_last_error;

fou2_status fail(fou2_status code, const char* what) {
  g_last_error = what ? what : "unknown error";
  return code;
}

template <typename Fn>
fou2_status guarded(Fn&& fn) {
  try {
    fn();
    return FOU2_OK;
  } catch (const fou2::config_error& e) {
    return fail(FOU2_ERR_CONFIG, e.what());
  } catch (const fou2::out_of_range_error& e) {
    return fail(FOU2_ERR_RANGE, e.what());
  } catch (const fou2::quadrature_error& e) {
    return fail(FOU2_ERR_NUMERIC, e.what());
  } catch (const fou2::factorization_error& e) {
    return fail(FOU2_ERR_NUMERIC, e.what());
  } catch (const fou2::bracket_error& e) {
    return fail(FOU2_ERR_NUMERIC, e.what());
  } catch (const fou2::grid_cap_error& e) {
    return fail(FOU2_ERR_NUMERIC, e.what());
  } catch (const std::domain_error& e) {
    return fail(FOU2_ERR_INVALID, e.what());
  } catch (const std::runtime_error& e) {
    return fail(FOU2_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(FOU2_ERR_NUMERIC, e.what());
  }
}

void fill_estimate(const fou2::EstimateResult& r, fou2_estimate* out) {
  std::snprintf(out->label, sizeof(out->label), "%s",
                fou2::estimator_label(r.kind));
  out->theta_hat = r.theta_hat;
  out->denominator = r.denominator;
  out->correction = r.correction;
  out->horizon = r.horizon;
}

}  // namespace

extern "C" {

const char* fou2_version(void) { return fou2::kFou2kitVersion; }

const char* fou2_last_error(void) { return g_last_error.c_str(); }

fou2_status fou2_path_from_arrays(const double* times, const double* values,
                                  size_t n, fou2_path** out) {
  if (!times || !values || !out || n < 2)
    return fail(FOU2_ERR_INVALID, "fou2_path_from_arrays: bad arguments");
  return guarded([&] {
    auto p = new fou2_path;
    try {
      p->path.grid = fou2::TimeGrid(std::vector<double>(times, times + n));
      p->path.values.assign(values, values + n);
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

void fou2_path_free(fou2_path* path) { delete path; }

size_t fou2_path_size(const fou2_path* path) {
  return path ? path->path.size() : 0;
}

const double* fou2_path_times(const fou2_path* path) {
  return path ? path->path.grid.times.data() : nullptr;
}

const double* fou2_path_values(const fou2_path* path) {
  return path ? path->path.values.data() : nullptr;
}

fou2_status fou2_path_write(const fou2_path* path, const char* file) {
  if (!path || !file) return fail(FOU2_ERR_INVALID, "fou2_path_write: null");
  return guarded([&] { fou2::write_path_file(path->path, file); });
}

fou2_status fou2_path_read(const char* file, fou2_path** out) {
  if (!file || !out) return fail(FOU2_ERR_INVALID, "fou2_path_read: null");
  return guarded([&] {
    auto p = new fou2_path;
    try {
      p->path = fou2::read_path_file(file);
    } catch (...) {
      delete p;
      throw;
    }
    *out = p;
  });
}

fou2_status fou2_sample_fbm(double hurst, const double* times, size_t n,
                            uint64_t seed, uint64_t stream, fou2_path** out) {
  if (!times || !out || n < 1)
    return fail(FOU2_ERR_INVALID, "fou2_sample_fbm: bad arguments");
  return guarded([&] {
    fou2::TimeGrid grid(std::vector<double>(times, times + n));
    fou2::RngStream rng{seed, stream};
    fou2::SamplePath path = fou2::sample_fbm_exact(grid, hurst, rng);
    path.meta = "kind=fbm hurst=" + fou2::format_g17(hurst) +
                " seed=" + std::to_string(seed) +
                " stream=" + std::to_string(stream);
    auto p = new fou2_path;
    p->path = std::move(path);
    *out = p;
  });
}

fou2_status fou2_simulate(double theta, double hurst, double horizon,
                          double dt, fou2_scheme scheme, fou2_route route,
                          uint64_t seed, uint64_t stream, fou2_path** out) {
  if (!out) return fail(FOU2_ERR_INVALID, "fou2_simulate: null output");
  return guarded([&] {
    fou2::ModelParams params{theta, hurst};
    fou2::SimConfig cfg;
    cfg.horizon = horizon;
    cfg.dt = dt;
    cfg.scheme = scheme == FOU2_SCHEME_TRAPEZOID ? fou2::Scheme::kTrapezoid
                                                 : fou2::Scheme::kLeftPoint;
    cfg.route = route == FOU2_ROUTE_STATIONARY
                    ? fou2::Route::kStationaryCirculant
                    : fou2::Route::kExactCholesky;
    fou2::PathSampler sampler(params, cfg);
    auto p = new fou2_path;
    p->path = sampler.sample(fou2::RngStream{seed, stream}, 0);
    *out = p;
  });
}

fou2_status fou2_estimate_moment(const fou2_path* path, double hurst,
                                 double bracket_lo, double bracket_hi,
                                 fou2_estimate* out) {
  if (!path || !out) return fail(FOU2_ERR_INVALID, "estimate_moment: null");
  return guarded([&] {
    fill_estimate(fou2::estimate_moment(path->path, hurst, bracket_lo,
                                        bracket_hi),
                  out);
  });
}

fou2_status fou2_estimate_lse(const fou2_path* path, double theta,
                              double hurst, fou2_estimate* out) {
  if (!path || !out) return fail(FOU2_ERR_INVALID, "estimate_lse: null");
  return guarded([&] {
    fill_estimate(
        fou2::estimate_lse_corrected(path->path, fou2::ModelParams{theta, hurst}),
        out);
  });
}

fou2_status fou2_estimate_pathwise(const fou2_path* path, fou2_estimate* out) {
  if (!path || !out) return fail(FOU2_ERR_INVALID, "estimate_pathwise: null");
  return guarded([&] { fill_estimate(fou2::estimate_pathwise(path->path), out); });
}

fou2_status fou2_stationary_variance(double theta, double hurst, double* out) {
  if (!out) return fail(FOU2_ERR_INVALID, "stationary_variance: null");
  return guarded([&] {
    *out = fou2::stationary_variance(fou2::ModelParams{theta, hurst});
  });
}

fou2_status fou2_asymptotic_variance(double theta, double hurst, double* value,
                                     double* error_bound) {
  if (!value) return fail(FOU2_ERR_INVALID, "asymptotic_variance: null");
  return guarded([&] {
    const fou2::VarianceResult r =
        fou2::asymptotic_variance(fou2::ModelParams{theta, hurst});
    *value = r.sigma_squared;
    if (error_bound) *error_bound = r.error_bound;
  });
}

fou2_status fou2_correction(double theta, double hurst, double horizon,
                            double* value, double* limit) {
  if (!value) return fail(FOU2_ERR_INVALID, "correction: null");
  return guarded([&] {
    const fou2::ModelParams params{theta, hurst};
    *value = fou2::skorokhod_correction(horizon, params);
    if (limit) *limit = fou2::correction_limit(params);
  });
}

fou2_status fou2_run_experiment(const char* config_file, const char* out_dir,
                                int workers) {
  if (!config_file || !out_dir)
    return fail(FOU2_ERR_INVALID, "run_experiment: null");
  return guarded([&] {
    const fou2::ExperimentConfig cfg =
        fou2::ExperimentConfig::parse_file(config_file);
    const fou2::ExperimentReport report = fou2::run_experiment(cfg, workers);
    fou2::write_report(report, out_dir);
  });
}

}  // extern "C"
