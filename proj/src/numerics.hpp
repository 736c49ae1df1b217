#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

// Shared numerical primitives: special functions, singularity-aware
// quadrature, bracketed root finding, PSD factorization, circulant
// spectra via the FFT, and a counter-based Gaussian stream.
//
// Everything here is a pure function of its inputs and safe to call
// concurrently.

namespace fou2 {

// ---------------------------------------------------------------------------
// Errors

class quadrature_error : public std::runtime_error {
 public:
  quadrature_error(const std::string& msg, double best, double bound)
      : std::runtime_error(msg), best_estimate(best), error_bound(bound) {}
  double best_estimate;
  double error_bound;
};

class bracket_error : public std::runtime_error {
 public:
  explicit bracket_error(const std::string& msg) : std::runtime_error(msg) {}
};

class factorization_error : public std::runtime_error {
 public:
  factorization_error(const std::string& msg, double pivot)
      : std::runtime_error(msg), most_negative_pivot(pivot) {}
  double most_negative_pivot;
};

// ---------------------------------------------------------------------------
// Quadrature

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_subdivisions = 2000;
  // Locations of algebraic singularities (exponent > -1), interior or at an
  // endpoint. The integrator splits at interior points and switches to a
  // double-exponential variable change on sub-intervals whose endpoint is
  // listed here.
  std::vector<double> singularities;
};

struct QuadratureResult {
  double value = 0.0;
  double error_bound = 0.0;
};

// Adaptive Gauss-Kronrod 7-15 with splitting at declared singular points and
// a tanh-sinh variable change on singular-endpoint pieces. Throws
// quadrature_error (carrying the best estimate) if the subdivision budget is
// exhausted before reaching max(abs_tol, rel_tol*|value|).
//
// Note: f receives the abscissa itself, so structure closer to a nonzero
// singular endpoint than one ulp cannot be resolved through this entry
// point; callers that know their endpoint exponents should prefer
// integrate_algebraic below.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {});
QuadratureResult integrate_full(const std::function<double(double)>& f,
                                double a, double b,
                                const QuadratureSpec& spec = {});

// Computes int_a^b (x-a)^la (b-x)^lb r(x) dx for la, lb > -1 and smooth r.
// The algebraic endpoint factors are removed exactly by the substitutions
// u = (x-a)^(1+la) and v = (b-x)^(1+lb), which keep the transformed
// integrand bounded; r is evaluated with the endpoint offsets handed in
// exactly, so the result is accurate to the requested tolerance even for
// exponents close to -1.
//
// r(x, da, db): da = x - a and db = b - x, both exact in the substituted
// variable.
QuadratureResult integrate_algebraic(
    const std::function<double(double, double, double)>& r, double a, double b,
    double exponent_a, double exponent_b, const QuadratureSpec& spec = {});

// Computes int_lo^hi |x - anchor|^lam r(x, |x - anchor|) dx where the anchor
// lies outside (or on the boundary of) [lo, hi]. The same power substitution
// as integrate_algebraic, anchored at `anchor`, so the distance handed to r
// is exact even when the anchor is closer to the interval than one ulp.
QuadratureResult integrate_algebraic_anchored(
    const std::function<double(double, double)>& r, double anchor, double lo,
    double hi, double lam, const QuadratureSpec& spec = {});

// ---------------------------------------------------------------------------
// Special functions

// log Gamma(x) for x > 0 by the Stirling series with upward shift.
double log_gamma(double x);

// Complete Beta function B(x,y) = exp(lg(x) + lg(y) - lg(x+y)).
double beta(double x, double y);

// Non-regularized incomplete Beta: int_0^x z^(p-1) (1-z)^(q-1) dz.
double incomplete_beta(double p, double q, double x);

// Upper tail int_x^1 z^(p-1) (1-z)^(q-1) dz, computed without forming the
// difference beta(p,q) - incomplete_beta(p,q,x); accurate when x is near 1.
double incomplete_beta_upper(double p, double q, double x);

// Standard normal CDF and its inverse (safeguarded Newton on erfc).
double normal_cdf(double x);
double inverse_normal_cdf(double u);

// ---------------------------------------------------------------------------
// Root finding

// Bisection with safeguarded secant acceleration. Requires a sign change on
// [lo, hi]; returns a point where the final bracket width is <= tol.
double find_root_bracketed(const std::function<double(double)>& g, double lo,
                           double hi, double tol);

// ---------------------------------------------------------------------------
// PSD factorization

// Lower-triangular L with L L^T ~= M for a symmetric positive semidefinite
// matrix (row-major n x n). On the first pivot failure a ridge of
// 1e-12 * trace(M)/n is added and the factorization retried once; a second
// failure throws factorization_error reporting the most negative pivot.
std::vector<double> psd_factor(const std::vector<double>& M, std::size_t n);

// y = L x for lower-triangular L from psd_factor.
void lower_tri_matvec(const std::vector<double>& L, std::size_t n,
                      const double* x, double* y);

// ---------------------------------------------------------------------------
// Circulant spectra / stationary sampling

struct CirculantSpectrum {
  std::vector<double> sqrt_eigenvalues;  // sqrt(max(lambda_k, 0))
  double min_eigenvalue = 0.0;
  bool nonnegative = true;  // false if an eigenvalue fell below -eps*max
};

// Eigenvalues of the symmetric circulant with the given first row, via the
// DFT (radix-2 FFT when the length is a power of two, direct cosine sums
// otherwise). Negative eigenvalues below -1e-9*max are flagged; callers fall
// back to psd_factor in that case.
CirculantSpectrum circulant_sqrt_spectrum(const std::vector<double>& first_row);

// In-place complex FFT, length must be a power of two. sign = -1 forward,
// +1 inverse (unnormalized).
void fft_pow2(std::vector<double>& re, std::vector<double>& im, int sign);

// ---------------------------------------------------------------------------
// Random streams

// Counter-based stream of standard normals: Philox-4x32-10 words fed through
// the inverse normal CDF. A stream is a value; draw i is a pure function of
// (seed, stream, i), so replicates can be sampled in any order or in
// parallel without coordination.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::uint64_t bits(std::uint64_t i) const;     // raw 64-bit word i
  double uniform(std::uint64_t i) const;         // in (0,1)
  double normal(std::uint64_t i) const;          // standard normal
};

// Draws one stationary Gaussian sequence of length n_out (n_out <= m, the
// spectrum length, m a power of two) matching the circulant covariance, using
// draw indices [base, base + m) of the stream.
std::vector<double> sample_stationary_circulant(
    const CirculantSpectrum& spectrum, std::size_t n_out, const RngStream& rng,
    std::uint64_t base);

}  // namespace fou2
