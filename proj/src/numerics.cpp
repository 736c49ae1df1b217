#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace fou2 {

namespace {

// ---------------------------------------------------------------------------
// Gauss-Kronrod 7-15 (QUADPACK dqk15 abscissae/weights)

const double kGK15X[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
const double kGK15WK[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kGK15WG[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct PieceResult {
  double value;
  double error;
};

PieceResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double fc = f(centr);
  double resg = kGK15WG[3] * fc;
  double resk = kGK15WK[7] * fc;
  double resabs = std::fabs(resk);
  double fv1[7], fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double absc = hlgth * kGK15X[j];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    fv1[j] = f1;
    fv2[j] = f2;
    resk += kGK15WK[j] * (f1 + f2);
    if (j % 2 == 1) resg += kGK15WG[j / 2] * (f1 + f2);
    resabs += kGK15WK[j] * (std::fabs(f1) + std::fabs(f2));
  }
  const double reskh = 0.5 * resk;
  double resasc = kGK15WK[7] * std::fabs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kGK15WK[j] * (std::fabs(fv1[j] - reskh) + std::fabs(fv2[j] - reskh));
  resasc *= std::fabs(hlgth);
  resabs *= std::fabs(hlgth);
  double err = std::fabs((resk - resg) * hlgth);
  if (resasc != 0.0 && err != 0.0)
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  const double uflow = std::numeric_limits<double>::min();
  if (resabs > uflow / (50.0 * eps)) err = std::max(err, 50.0 * eps * resabs);
  return {resk * hlgth, err};
}

struct Interval {
  double error;
  double value;
  double a, b;
  bool operator<(const Interval& o) const { return error < o.error; }
};

// Globally adaptive GK15 over a smooth piece.
PieceResult adaptive_gk15(const std::function<double(double)>& f, double a,
                          double b, double abs_tol, double rel_tol,
                          int max_subdivisions, bool* converged) {
  std::priority_queue<Interval> heap;
  PieceResult first = gk15(f, a, b);
  heap.push({first.error, first.value, a, b});
  double total = first.value, toterr = first.error;
  int used = 1;
  while (toterr > std::max(abs_tol, rel_tol * std::fabs(total))) {
    if (used >= max_subdivisions || heap.empty()) {
      *converged = false;
      return {total, toterr};
    }
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {  // interval at rounding limit
      total += 0.0;
      continue;
    }
    PieceResult l = gk15(f, worst.a, mid);
    PieceResult r = gk15(f, mid, worst.b);
    total += l.value + r.value - worst.value;
    toterr += l.error + r.error - worst.error;
    heap.push({l.error, l.value, worst.a, mid});
    heap.push({r.error, r.value, mid, worst.b});
    ++used;
  }
  *converged = true;
  return {total, toterr};
}

// tanh-sinh quadrature on (a, b); endpoints are never evaluated, so
// integrable algebraic endpoint singularities are admissible. Abscissae are
// generated from their exact distance to the nearer endpoint; points whose
// distance underflows are dropped together with their (even smaller) weights.
PieceResult tanh_sinh(const std::function<double(double)>& f, double a,
                      double b, double abs_tol, double rel_tol,
                      bool* converged) {
  const double c = 0.5 * (a + b);
  const double w = 0.5 * (b - a);
  const double umax = 6.0;
  const int max_level = 12;

  auto eval_pair = [&](double u) -> double {
    // s = (pi/2) sinh(u); node distance from the nearer endpoint is
    // delta = w * (1 - tanh(s)) = w * 2 em / (1 + em) with em = exp(-2s).
    const double s = 0.5 * M_PI * std::sinh(u);
    const double em = std::exp(-2.0 * s);
    const double delta = w * 2.0 * em / (1.0 + em);
    if (delta <= 0.0) return 0.0;
    const double wgt =
        0.5 * M_PI * std::cosh(u) * 4.0 * em / ((1.0 + em) * (1.0 + em));
    if (wgt <= 0.0) return 0.0;
    if (u == 0.0) return wgt * f(c);
    // Drop nodes whose offset is below one ulp of the endpoint; the f(x)
    // interface cannot resolve structure there.
    const double xl = a + delta, xr = b - delta;
    double sum = 0.0;
    if (xl != a) sum += f(xl);
    if (xr != b) sum += f(xr);
    return wgt * sum;
  };

  double h = 1.0;
  double sum = eval_pair(0.0);
  {
    for (double u = h; u <= umax; u += h) sum += eval_pair(u);
  }
  double prev = sum * h * w;
  double value = prev;
  for (int level = 1; level <= max_level; ++level) {
    h *= 0.5;
    for (double u = h; u <= umax; u += 2.0 * h) sum += eval_pair(u);
    value = sum * h * w;
    const double diff = std::fabs(value - prev);
    if (level >= 3 && diff <= std::max(abs_tol, rel_tol * std::fabs(value))) {
      *converged = true;
      return {value, diff};
    }
    prev = value;
  }
  *converged = false;
  return {value, std::fabs(value - prev)};
}

bool is_singular_at(const QuadratureSpec& spec, double x) {
  for (double s : spec.singularities)
    if (s == x) return true;
  return false;
}

}  // namespace

QuadratureResult integrate_full(const std::function<double(double)>& f,
                                double a, double b,
                                const QuadratureSpec& spec) {
  if (!(spec.abs_tol > 0.0) || !(spec.rel_tol > 0.0))
    throw std::domain_error("integrate: tolerances must be positive");
  if (a > b) throw std::domain_error("integrate: requires a <= b");
  if (a == b) return {0.0, 0.0};
  for (double s : spec.singularities)
    if (s < a || s > b)
      throw std::domain_error(
          "integrate: singularity outside the integration interval");

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double s : spec.singularities)
    if (s > a && s < b) cuts.push_back(s);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t n_pieces = cuts.size() - 1;
  const double piece_abs = spec.abs_tol / static_cast<double>(n_pieces);
  double total = 0.0, toterr = 0.0;
  bool all_ok = true;
  for (std::size_t i = 0; i < n_pieces; ++i) {
    const double lo = cuts[i], hi = cuts[i + 1];
    const bool sing = is_singular_at(spec, lo) || is_singular_at(spec, hi);
    bool ok = true;
    PieceResult r =
        sing ? tanh_sinh(f, lo, hi, piece_abs, spec.rel_tol, &ok)
             : adaptive_gk15(f, lo, hi, piece_abs, spec.rel_tol,
                             spec.max_subdivisions, &ok);
    total += r.value;
    toterr += r.error;
    all_ok = all_ok && ok;
  }
  if (!all_ok && toterr > std::max(spec.abs_tol, spec.rel_tol * std::fabs(total)))
    throw quadrature_error("integrate: subdivision budget exhausted", total,
                           toterr);
  return {total, toterr};
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec) {
  return integrate_full(f, a, b, spec).value;
}

QuadratureResult integrate_algebraic(
    const std::function<double(double, double, double)>& r, double a, double b,
    double exponent_a, double exponent_b, const QuadratureSpec& spec) {
  if (!(exponent_a > -1.0) || !(exponent_b > -1.0))
    throw std::domain_error("integrate_algebraic: exponents must be > -1");
  if (a > b) throw std::domain_error("integrate_algebraic: requires a <= b");
  if (a == b) return {0.0, 0.0};

  const double len = b - a;
  const double mid = 0.5 * len;  // split point as offset from a
  double total = 0.0, toterr = 0.0;

  // Left half: substitute v = da^(1+la); da = v^(1/(1+la)) is exact in v.
  {
    const double beta_a = 1.0 + exponent_a;
    const double vmax = std::pow(mid, beta_a);
    auto g = [&](double v) -> double {
      const double da = (exponent_a == 0.0) ? v : std::pow(v, 1.0 / beta_a);
      const double db = len - da;
      const double tail = (exponent_b == 0.0) ? 1.0 : std::pow(db, exponent_b);
      return tail * r(a + da, da, db) / beta_a;
    };
    bool ok = true;
    PieceResult p = adaptive_gk15(g, 0.0, vmax, 0.5 * spec.abs_tol,
                                  spec.rel_tol, spec.max_subdivisions, &ok);
    if (!ok)
      throw quadrature_error("integrate_algebraic: budget exhausted (left)",
                             p.value, p.error);
    total += p.value;
    toterr += p.error;
  }
  // Right half: substitute v = db^(1+lb).
  {
    const double beta_b = 1.0 + exponent_b;
    const double vmax = std::pow(len - mid, beta_b);
    auto g = [&](double v) -> double {
      const double db = (exponent_b == 0.0) ? v : std::pow(v, 1.0 / beta_b);
      const double da = len - db;
      const double head = (exponent_a == 0.0) ? 1.0 : std::pow(da, exponent_a);
      return head * r(b - db, da, db) / beta_b;
    };
    bool ok = true;
    PieceResult p = adaptive_gk15(g, 0.0, vmax, 0.5 * spec.abs_tol,
                                  spec.rel_tol, spec.max_subdivisions, &ok);
    if (!ok)
      throw quadrature_error("integrate_algebraic: budget exhausted (right)",
                             p.value, p.error);
    total += p.value;
    toterr += p.error;
  }
  return {total, toterr};
}

QuadratureResult integrate_algebraic_anchored(
    const std::function<double(double, double)>& r, double anchor, double lo,
    double hi, double lam, const QuadratureSpec& spec) {
  if (!(lam > -1.0))
    throw std::domain_error("integrate_algebraic_anchored: lam must be > -1");
  if (lo > hi)
    throw std::domain_error("integrate_algebraic_anchored: lo <= hi");
  if (anchor > lo && anchor < hi)
    throw std::domain_error(
        "integrate_algebraic_anchored: anchor must not be interior");
  if (lo == hi) return {0.0, 0.0};
  const double beta_l = 1.0 + lam;
  const bool left = anchor <= lo;  // anchor at or below the interval
  const double d0 = left ? lo - anchor : anchor - hi;
  const double d1 = left ? hi - anchor : anchor - lo;
  const double v0 = std::pow(d0, beta_l);
  const double v1 = std::pow(d1, beta_l);
  auto g = [&](double v) -> double {
    const double dist = std::pow(v, 1.0 / beta_l);
    const double x = left ? anchor + dist : anchor - dist;
    return r(x, dist) / beta_l;
  };
  bool ok = true;
  PieceResult p = adaptive_gk15(g, v0, v1, spec.abs_tol, spec.rel_tol,
                                spec.max_subdivisions, &ok);
  if (!ok)
    throw quadrature_error("integrate_algebraic_anchored: budget exhausted",
                           p.value, p.error);
  return {p.value, p.error};
}

// ---------------------------------------------------------------------------
// Special functions

double log_gamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("log_gamma: requires x > 0");
  double shift = 0.0;
  while (x < 12.0) {
    shift -= std::log(x);
    x += 1.0;
  }
  // Stirling series; coefficients are B_2k / (2k (2k-1)) exactly.
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv * (1.0 / 12.0 +
             inv2 * (-1.0 / 360.0 +
                     inv2 * (1.0 / 1260.0 +
                             inv2 * (-1.0 / 1680.0 +
                                     inv2 * (1.0 / 1188.0 +
                                             inv2 * (-691.0 / 360360.0 +
                                                     inv2 * (1.0 / 156.0)))))));
  const double half_log_2pi = 0.91893853320467274178032973640562;
  return (x - 0.5) * std::log(x) - x + half_log_2pi + series + shift;
}

double beta(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw std::domain_error("beta: requires x, y > 0");
  return std::exp(log_gamma(x) + log_gamma(y) - log_gamma(x + y));
}

namespace {

// Continued fraction for the regularized incomplete Beta (modified Lentz).
double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kFpMin = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw quadrature_error("incomplete_beta: continued fraction stalled", h, 1.0);
}

// exp(p log x + q log(1-x)) with log1p for the second factor.
double beta_front(double p, double q, double x) {
  return std::exp(p * std::log(x) + q * std::log1p(-x));
}

}  // namespace

double incomplete_beta(double p, double q, double x) {
  if (!(p > 0.0) || !(q > 0.0))
    throw std::domain_error("incomplete_beta: requires p, q > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("incomplete_beta: requires 0 <= x <= 1");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return beta(p, q);
  if (x < (p + 1.0) / (p + q + 2.0))
    return beta_front(p, q, x) * betacf(p, q, x) / p;
  return beta(p, q) - beta_front(q, p, 1.0 - x) * betacf(q, p, 1.0 - x) / q;
}

double incomplete_beta_upper(double p, double q, double x) {
  if (!(p > 0.0) || !(q > 0.0))
    throw std::domain_error("incomplete_beta_upper: requires p, q > 0");
  if (!(x >= 0.0 && x <= 1.0))
    throw std::domain_error("incomplete_beta_upper: requires 0 <= x <= 1");
  if (x == 1.0) return 0.0;
  if (x == 0.0) return beta(p, q);
  if (x < (p + 1.0) / (p + q + 2.0))
    return beta(p, q) - beta_front(p, q, x) * betacf(p, q, x) / p;
  return beta_front(q, p, 1.0 - x) * betacf(q, p, 1.0 - x) / q;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double inverse_normal_cdf(double u) {
  if (!(u > 0.0 && u < 1.0))
    throw std::domain_error("inverse_normal_cdf: requires 0 < u < 1");
  const bool upper = u > 0.5;
  const double ul = upper ? 1.0 - u : u;  // in (0, 1/2]
  if (ul == 0.5) return 0.0;

  // Phi(-t) <= ul for t = sqrt(-2 log ul), so [-t, 0] brackets the quantile.
  double lo = -std::sqrt(-2.0 * std::log(ul));
  double hi = 0.0;
  double x = lo + 0.5 * (hi - lo);
  const double inv_sqrt_2pi = 0.39894228040143267793994605993438;
  for (int it = 0; it < 200; ++it) {
    const double fx = normal_cdf(x) - ul;
    if (fx == 0.0) break;
    if (fx > 0.0)
      hi = x;
    else
      lo = x;
    const double pdf = inv_sqrt_2pi * std::exp(-0.5 * x * x);
    double next = (pdf > 0.0) ? x - fx / pdf : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - x) <= 4.0 * std::numeric_limits<double>::epsilon() *
                                   (1.0 + std::fabs(next))) {
      x = next;
      break;
    }
    x = next;
  }
  return upper ? -x : x;
}

// ---------------------------------------------------------------------------
// Root finding

double find_root_bracketed(const std::function<double(double)>& g, double lo,
                           double hi, double tol) {
  if (!(tol > 0.0)) throw std::domain_error("find_root_bracketed: tol > 0");
  if (!(lo < hi)) throw std::domain_error("find_root_bracketed: lo < hi");
  double flo = g(lo), fhi = g(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw bracket_error("find_root_bracketed: non-finite evaluation");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0))
    throw bracket_error("find_root_bracketed: no sign change on [lo, hi]");

  bool force_bisect = false;
  while (hi - lo > tol) {
    double x = 0.5 * (lo + hi);
    if (!force_bisect && fhi != flo) {
      // secant proposal, kept strictly inside the bracket
      const double s = (lo * fhi - hi * flo) / (fhi - flo);
      const double margin = 0.01 * (hi - lo);
      if (s > lo + margin && s < hi - margin) x = s;
    }
    const double fx = g(x);
    if (!std::isfinite(fx))
      throw bracket_error("find_root_bracketed: non-finite evaluation");
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
      fhi = fx;
    }
    force_bisect = !force_bisect;  // alternate to guarantee progress
    if (0.5 * (lo + hi) == lo || 0.5 * (lo + hi) == hi) break;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// PSD factorization

namespace {

// In-place row-major lower Cholesky. Returns true on success; on failure
// *bad_pivot is the most negative pivot encountered when scanning on.
bool cholesky_in_place(std::vector<double>& A, std::size_t n,
                       double* bad_pivot) {
  bool ok = true;
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double* rowj = &A[j * n];
    double d = rowj[j];
    for (std::size_t k = 0; k < j; ++k) d -= rowj[k] * rowj[k];
    if (d <= 0.0) {
      ok = false;
      worst = std::min(worst, d);
      d = std::numeric_limits<double>::min();  // keep scanning for the report
    }
    const double Ljj = std::sqrt(d);
    rowj[j] = Ljj;
    const double inv = 1.0 / Ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double* rowi = &A[i * n];
      double s = rowi[j];
      for (std::size_t k = 0; k < j; ++k) s -= rowi[k] * rowj[k];
      rowi[j] = s * inv;
    }
  }
  if (!ok && bad_pivot) *bad_pivot = worst;
  return ok;
}

void zero_upper(std::vector<double>& A, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) A[i * n + j] = 0.0;
}

}  // namespace

std::vector<double> psd_factor(const std::vector<double>& M, std::size_t n) {
  if (M.size() != n * n) throw std::domain_error("psd_factor: size mismatch");
  std::vector<double> A = M;
  double bad = 0.0;
  if (cholesky_in_place(A, n, &bad)) {
    zero_upper(A, n);
    return A;
  }
  // Ridge retry once: 1e-12 * trace(M)/n on the diagonal.
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += M[i * n + i];
  const double ridge = 1e-12 * trace / static_cast<double>(n);
  A = M;
  for (std::size_t i = 0; i < n; ++i) A[i * n + i] += ridge;
  if (cholesky_in_place(A, n, &bad)) {
    zero_upper(A, n);
    return A;
  }
  throw factorization_error(
      "psd_factor: matrix indefinite beyond tolerance (most negative pivot " +
          std::to_string(bad) + ")",
      bad);
}

void lower_tri_matvec(const std::vector<double>& L, std::size_t n,
                      const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = &L[i * n];
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += row[k] * x[k];
    y[i] = s;
  }
}

// ---------------------------------------------------------------------------
// FFT / circulant spectra

void fft_pow2(std::vector<double>& re, std::vector<double>& im, int sign) {
  const std::size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0 || im.size() != n)
    throw std::domain_error("fft_pow2: length must be a power of two");
  // bit reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j |= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }
  // twiddle table for the full size
  std::vector<double> wr(n / 2), wi(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    const double ang = sign * 2.0 * M_PI * static_cast<double>(k) /
                       static_cast<double>(n);
    wr[k] = std::cos(ang);
    wi[k] = std::sin(ang);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const double cr = wr[k * stride], ci = wi[k * stride];
        const std::size_t u = i + k, v = i + k + len / 2;
        const double tr = re[v] * cr - im[v] * ci;
        const double ti = re[v] * ci + im[v] * cr;
        re[v] = re[u] - tr;
        im[v] = im[u] - ti;
        re[u] += tr;
        im[u] += ti;
      }
    }
  }
}

CirculantSpectrum circulant_sqrt_spectrum(const std::vector<double>& first_row) {
  const std::size_t n = first_row.size();
  if (n == 0) throw std::domain_error("circulant_sqrt_spectrum: empty row");
  std::vector<double> lambda(n);
  if ((n & (n - 1)) == 0) {
    std::vector<double> re = first_row, im(n, 0.0);
    fft_pow2(re, im, -1);
    lambda = re;  // symmetric row -> real spectrum
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      double s = 0.0;
      for (std::size_t j = 0; j < n; ++j)
        s += first_row[j] *
             std::cos(2.0 * M_PI * static_cast<double>(j) *
                      static_cast<double>(k) / static_cast<double>(n));
      lambda[k] = s;
    }
  }
  CirculantSpectrum out;
  double maxl = 0.0, minl = lambda[0];
  for (double l : lambda) {
    maxl = std::max(maxl, std::fabs(l));
    minl = std::min(minl, l);
  }
  out.min_eigenvalue = minl;
  out.nonnegative = minl >= -1e-9 * maxl;
  out.sqrt_eigenvalues.resize(n);
  for (std::size_t k = 0; k < n; ++k)
    out.sqrt_eigenvalues[k] = std::sqrt(std::max(lambda[k], 0.0));
  return out;
}

// ---------------------------------------------------------------------------
// Philox-4x32-10 counter-based stream

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::uint32_t c[4], std::uint32_t k0,
                         std::uint32_t k1) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  const std::uint32_t n0 = hi1 ^ c[1] ^ k0;
  const std::uint32_t n1 = lo1;
  const std::uint32_t n2 = hi0 ^ c[3] ^ k1;
  const std::uint32_t n3 = lo0;
  c[0] = n0;
  c[1] = n1;
  c[2] = n2;
  c[3] = n3;
}

inline void philox_block(std::uint64_t seed, std::uint64_t stream,
                         std::uint64_t block, std::uint32_t out[4]) {
  std::uint32_t c[4] = {static_cast<std::uint32_t>(block),
                        static_cast<std::uint32_t>(block >> 32),
                        static_cast<std::uint32_t>(stream),
                        static_cast<std::uint32_t>(stream >> 32)};
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k0, k1);
    k0 += kPhiloxW0;
    k1 += kPhiloxW1;
  }
  out[0] = c[0];
  out[1] = c[1];
  out[2] = c[2];
  out[3] = c[3];
}

}  // namespace

std::uint64_t RngStream::bits(std::uint64_t i) const {
  std::uint32_t out[4];
  philox_block(seed, stream, i >> 1, out);
  if ((i & 1u) == 0)
    return static_cast<std::uint64_t>(out[0]) |
           (static_cast<std::uint64_t>(out[1]) << 32);
  return static_cast<std::uint64_t>(out[2]) |
         (static_cast<std::uint64_t>(out[3]) << 32);
}

double RngStream::uniform(std::uint64_t i) const {
  // (0,1): 53 high bits plus a half-ulp offset
  return (static_cast<double>(bits(i) >> 11) + 0.5) * 0x1.0p-53;
}

double RngStream::normal(std::uint64_t i) const {
  return inverse_normal_cdf(uniform(i));
}

std::vector<double> sample_stationary_circulant(
    const CirculantSpectrum& spectrum, std::size_t n_out, const RngStream& rng,
    std::uint64_t base) {
  const std::size_t m = spectrum.sqrt_eigenvalues.size();
  if (m == 0 || (m & (m - 1)) != 0)
    throw std::domain_error(
        "sample_stationary_circulant: spectrum length must be a power of two");
  if (n_out > m)
    throw std::domain_error("sample_stationary_circulant: n_out > m");
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(m));
  const double inv_sqrt_2m = inv_sqrt_m * M_SQRT1_2;
  std::vector<double> re(m, 0.0), im(m, 0.0);
  re[0] = spectrum.sqrt_eigenvalues[0] * inv_sqrt_m * rng.normal(base + 0);
  re[m / 2] =
      spectrum.sqrt_eigenvalues[m / 2] * inv_sqrt_m * rng.normal(base + 1);
  for (std::size_t k = 1; k < m / 2; ++k) {
    const double amp = spectrum.sqrt_eigenvalues[k] * inv_sqrt_2m;
    const double xr = amp * rng.normal(base + 2 * k);
    const double xi = amp * rng.normal(base + 2 * k + 1);
    re[k] = xr;
    im[k] = xi;
    re[m - k] = xr;  // Hermitian symmetry -> real output
    im[m - k] = -xi;
  }
  fft_pow2(re, im, +1);
  re.resize(n_out);
  return re;
}

}  // namespace fou2
