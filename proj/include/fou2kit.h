/*
 * fou2kit: simulation and drift inference for a mean-reverting process
 * driven by fractional Brownian motion through an exponential time change.
 *
 * C89-compatible surface over the C++ core: opaque handles, status codes,
 * and a thread-local error message. All functions returning fou2_status
 * leave outputs untouched on failure.
 */
#ifndef FOU2KIT_H
#define FOU2KIT_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fou2_status {
  FOU2_OK = 0,
  FOU2_ERR_INVALID = 1, /* argument/domain violation */
  FOU2_ERR_NUMERIC = 2, /* quadrature or factorization failure */
  FOU2_ERR_RANGE = 3,   /* target outside the achievable bracket */
  FOU2_ERR_IO = 4,      /* file unreadable/unwritable or malformed */
  FOU2_ERR_CONFIG = 5   /* experiment config violates the schema */
} fou2_status;

typedef enum fou2_scheme {
  FOU2_SCHEME_LEFT = 0,
  FOU2_SCHEME_TRAPEZOID = 1
} fou2_scheme;

typedef enum fou2_route {
  FOU2_ROUTE_EXACT = 0,     /* dense factorization of the path covariance */
  FOU2_ROUTE_STATIONARY = 1 /* circulant embedding; falls back to exact */
} fou2_route;

/* An observed or simulated path: strictly increasing times plus values. */
typedef struct fou2_path fou2_path;

typedef struct fou2_estimate {
  char label[16];     /* "moment" | "lse-corrected" | "pathwise" */
  double theta_hat;   /* drift estimate */
  double denominator; /* (1/T) int X^2 dt */
  double correction;  /* divergence correction (0 unless lse-corrected) */
  double horizon;     /* T spanned by the path */
} fou2_estimate;

const char* fou2_version(void);

/* Message for the most recent failure on this thread. */
const char* fou2_last_error(void);

/* ------------------------------------------------------------------ paths */

fou2_status fou2_path_from_arrays(const double* times, const double* values,
                                  size_t n, fou2_path** out);
void fou2_path_free(fou2_path* path);
size_t fou2_path_size(const fou2_path* path);
const double* fou2_path_times(const fou2_path* path);
const double* fou2_path_values(const fou2_path* path);

/* Delimited text with a '#' metadata header; 17 significant digits. */
fou2_status fou2_path_write(const fou2_path* path, const char* file);
fou2_status fou2_path_read(const char* file, fou2_path** out);

/* -------------------------------------------------------------- sampling */

/* Exact fractional-Brownian-motion draw on the given grid (0 < hurst < 1).
 * Identical (seed, stream) reproduce identical paths. */
fou2_status fou2_sample_fbm(double hurst, const double* times, size_t n,
                            uint64_t seed, uint64_t stream, fou2_path** out);

/* Path of the mean-reverting process on the uniform grid {0, dt, ..., T};
 * requires theta > 1 and 1/2 < hurst < 1. */
fou2_status fou2_simulate(double theta, double hurst, double horizon,
                          double dt, fou2_scheme scheme, fou2_route route,
                          uint64_t seed, uint64_t stream, fou2_path** out);

/* ------------------------------------------------------------ estimation */

fou2_status fou2_estimate_moment(const fou2_path* path, double hurst,
                                 double bracket_lo, double bracket_hi,
                                 fou2_estimate* out);
/* The correction is evaluated at the supplied (theta, hurst). */
fou2_status fou2_estimate_lse(const fou2_path* path, double theta,
                              double hurst, fou2_estimate* out);
fou2_status fou2_estimate_pathwise(const fou2_path* path, fou2_estimate* out);

/* --------------------------------------------------------- scalar values */

fou2_status fou2_stationary_variance(double theta, double hurst, double* out);

/* Limiting variance of sqrt(T)(theta_hat - theta), with a conservative
 * quadrature error bound. */
fou2_status fou2_asymptotic_variance(double theta, double hurst, double* value,
                                     double* error_bound);

/* Divergence correction at horizon T and its T -> infinity limit of
 * correction/T. */
fou2_status fou2_correction(double theta, double hurst, double horizon,
                            double* value, double* limit);

/* ------------------------------------------------------------ experiments */

/* Runs the experiment described by a key=value config file and writes
 * records.tsv, aggregates.tsv and manifest.txt into out_dir. Records are
 * independent of the worker count. */
fou2_status fou2_run_experiment(const char* config_file, const char* out_dir,
                                int workers);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FOU2KIT_H */
