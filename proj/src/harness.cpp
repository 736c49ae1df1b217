#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "io.hpp"
#include "version.hpp"

namespace fou2 {

namespace {

constexpr std::uint64_t kHorizonStride = 1ull << 40;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  if (horizons.empty())
    throw config_error("experiment config: horizons must be non-empty",
                       {"horizons"});
  if (replicates < 1)
    throw config_error("experiment config: replicates must be >= 1",
                       {"replicates"});
  if (estimators.empty())
    throw config_error("experiment config: estimators must be non-empty",
                       {"estimators"});
  const std::size_t cap = grid_cap ? grid_cap : default_grid_cap();
  for (double T : horizons) {
    SimConfig sim{T, dt, scheme, route, cap};
    sim.validate();  // throws on incompatible step / cap
  }
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig cfg;
  std::map<std::string, std::string> kv;
  std::vector<std::string> bad_keys;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      bad_keys.push_back(line);
      continue;
    }
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  const std::vector<std::string> known = {
      "theta",      "hurst", "horizons", "dt",      "replicates",
      "estimators", "seed",  "sampler",  "scheme",  "grid_cap"};
  for (const auto& [k, v] : kv) {
    (void)v;
    if (std::find(known.begin(), known.end(), k) == known.end())
      bad_keys.push_back(k);
  }
  const std::vector<std::string> required = {"theta",      "hurst",
                                             "horizons",   "dt",
                                             "replicates", "estimators",
                                             "seed"};
  for (const auto& k : required)
    if (!kv.count(k)) bad_keys.push_back("missing:" + k);
  if (!bad_keys.empty()) {
    std::string msg = "experiment config: offending keys:";
    for (const auto& k : bad_keys) msg += " " + k;
    throw config_error(msg, bad_keys);
  }

  try {
    cfg.params.theta = std::stod(kv["theta"]);
    cfg.params.hurst = std::stod(kv["hurst"]);
    cfg.dt = std::stod(kv["dt"]);
    cfg.replicates = std::stoi(kv["replicates"]);
    cfg.seed = std::stoull(kv["seed"]);
    for (const auto& tok : split_ws(kv["horizons"]))
      cfg.horizons.push_back(std::stod(tok));
    for (const auto& tok : split_ws(kv["estimators"])) {
      try {
        cfg.estimators.push_back(estimator_from_label(tok));
      } catch (const std::domain_error& e) {
        throw config_error(std::string("experiment config: ") + e.what(),
                           {"estimators"});
      }
    }
    if (kv.count("sampler")) {
      const std::string s = kv["sampler"];
      if (s == "exact")
        cfg.route = Route::kExactCholesky;
      else if (s == "stationary")
        cfg.route = Route::kStationaryCirculant;
      else
        throw config_error("experiment config: sampler must be exact|stationary",
                           {"sampler"});
    }
    if (kv.count("scheme")) {
      const std::string s = kv["scheme"];
      if (s == "left")
        cfg.scheme = Scheme::kLeftPoint;
      else if (s == "trapezoid")
        cfg.scheme = Scheme::kTrapezoid;
      else
        throw config_error("experiment config: scheme must be left|trapezoid",
                           {"scheme"});
    }
    if (kv.count("grid_cap"))
      cfg.grid_cap = static_cast<std::size_t>(std::stoull(kv["grid_cap"]));
  } catch (const config_error&) {
    throw;
  } catch (const std::domain_error& e) {
    throw config_error(std::string("experiment config: ") + e.what(), {});
  } catch (const std::exception& e) {
    throw config_error(std::string("experiment config: bad value: ") + e.what(),
                       {});
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  std::stringstream buf;
  buf << is.rdbuf();
  return parse(buf.str());
}

std::string ExperimentConfig::serialize() const {
  std::ostringstream os;
  os << "theta = " << format_g17(params.theta) << '\n';
  os << "hurst = " << format_g17(params.hurst) << '\n';
  os << "horizons =";
  for (double T : horizons) os << ' ' << format_g17(T);
  os << '\n';
  os << "dt = " << format_g17(dt) << '\n';
  os << "replicates = " << replicates << '\n';
  os << "estimators =";
  for (EstimatorKind k : estimators) os << ' ' << estimator_label(k);
  os << '\n';
  os << "seed = " << seed << '\n';
  os << "sampler = "
     << (route == Route::kStationaryCirculant ? "stationary" : "exact") << '\n';
  os << "scheme = " << (scheme == Scheme::kTrapezoid ? "trapezoid" : "left")
     << '\n';
  os << "grid_cap = " << (grid_cap ? grid_cap : default_grid_cap()) << '\n';
  return os.str();
}

double ks_statistic(std::vector<double> sample) {
  if (sample.size() < 20)
    throw std::domain_error("ks_statistic: need at least 20 observations");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double cdf = normal_cdf(sample[i]);
    const double hi = (static_cast<double>(i) + 1.0) / n - cdf;
    const double lo = cdf - static_cast<double>(i) / n;
    d = std::max(d, std::max(hi, lo));
  }
  return d;
}

std::vector<GroupAggregate> summarize(
    const std::vector<ReplicateRecord>& records, const ExperimentConfig& cfg,
    double sigma) {
  std::vector<GroupAggregate> out;
  for (double T : cfg.horizons) {
    for (EstimatorKind kind : cfg.estimators) {
      GroupAggregate g;
      g.horizon = T;
      g.estimator = kind;
      std::vector<double> vals;
      for (const auto& r : records) {
        if (r.horizon != T || r.estimator != kind) continue;
        if (r.ok)
          vals.push_back(r.theta_hat);
        else
          ++g.n_fail;
      }
      g.n_ok = static_cast<int>(vals.size());
      if (vals.empty()) {
        out.push_back(g);
        continue;  // empty group: aggregates stay NaN
      }
      double mean = 0.0;
      for (double v : vals) mean += v;
      mean /= static_cast<double>(vals.size());
      g.mean = mean;
      if (vals.size() > 1) {
        double ss = 0.0;
        for (double v : vals) ss += (v - mean) * (v - mean);
        g.sd = std::sqrt(ss / static_cast<double>(vals.size() - 1));
      } else {
        g.sd = 0.0;  // single record: flagged by n_ok == 1
      }
      std::vector<double> sorted = vals;
      std::sort(sorted.begin(), sorted.end());
      const std::size_t mid = sorted.size() / 2;
      g.median = (sorted.size() % 2 == 1)
                     ? sorted[mid]
                     : 0.5 * (sorted[mid - 1] + sorted[mid]);
      if (vals.size() >= 20 && sigma > 0.0 && std::isfinite(sigma)) {
        std::vector<double> z(vals.size());
        const double scale = std::sqrt(T) / sigma;
        for (std::size_t i = 0; i < vals.size(); ++i)
          z[i] = scale * (vals[i] - cfg.params.theta);
        g.ks = ks_statistic(std::move(z));
      }
      out.push_back(g);
    }
  }
  return out;
}

ExperimentReport run_experiment(const ExperimentConfig& cfg, int workers) {
  cfg.validate();
  if (workers < 1) workers = 1;
  const std::size_t cap = cfg.grid_cap ? cfg.grid_cap : default_grid_cap();

  std::vector<PathSampler> samplers;
  samplers.reserve(cfg.horizons.size());
  for (double T : cfg.horizons)
    samplers.emplace_back(cfg.params,
                          SimConfig{T, cfg.dt, cfg.scheme, cfg.route, cap});

  // Deterministic per-horizon corrections for the corrected estimator.
  std::vector<double> corrections(cfg.horizons.size(), 0.0);
  const bool need_corr =
      std::find(cfg.estimators.begin(), cfg.estimators.end(),
                EstimatorKind::kLseCorrected) != cfg.estimators.end();
  if (need_corr)
    for (std::size_t h = 0; h < cfg.horizons.size(); ++h)
      corrections[h] = skorokhod_correction(cfg.horizons[h], cfg.params);

  const std::size_t n_h = cfg.horizons.size();
  const std::size_t n_e = cfg.estimators.size();
  const std::size_t total =
      static_cast<std::size_t>(cfg.replicates) * n_h * n_e;
  std::vector<ReplicateRecord> records(total);

  auto run_replicate = [&](int r) {
    const RngStream stream{cfg.seed, static_cast<std::uint64_t>(r)};
    for (std::size_t h = 0; h < n_h; ++h) {
      SamplePath path;
      std::string path_error;
      try {
        path = samplers[h].sample(stream, kHorizonStride * h);
      } catch (const std::exception& e) {
        path_error = e.what();
      }
      for (std::size_t e = 0; e < n_e; ++e) {
        ReplicateRecord& rec =
            records[(static_cast<std::size_t>(r) * n_h + h) * n_e + e];
        rec.replicate = r;
        rec.horizon = cfg.horizons[h];
        rec.estimator = cfg.estimators[e];
        if (!path_error.empty()) {
          rec.ok = false;
          rec.error = path_error;
          continue;
        }
        try {
          EstimateResult est;
          switch (cfg.estimators[e]) {
            case EstimatorKind::kMoment:
              est = estimate_moment(path, cfg.params.hurst);
              break;
            case EstimatorKind::kLseCorrected: {
              double horizon = 0.0;
              const double q = quadratic_functional(path);
              horizon = path.grid.back() - path.grid.front();
              const double denom = q * horizon;
              if (!(denom > 0.0))
                throw std::domain_error("degenerate path");
              const double xt = path.values.back();
              est.kind = EstimatorKind::kLseCorrected;
              est.theta_hat = (-0.5 * xt * xt + corrections[h]) / denom;
              est.denominator = q;
              est.correction = corrections[h];
              est.horizon = horizon;
              break;
            }
            case EstimatorKind::kPathwise:
              est = estimate_pathwise(path);
              break;
          }
          rec.theta_hat = est.theta_hat;
          rec.ok = true;
        } catch (const std::exception& e2) {
          rec.ok = false;
          rec.error = e2.what();
        }
      }
    }
  };

  if (workers == 1) {
    for (int r = 0; r < cfg.replicates; ++r) run_replicate(r);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (int r = w; r < cfg.replicates; r += workers) run_replicate(r);
      });
    }
    for (auto& t : pool) t.join();
  }

  ExperimentReport report;
  report.config = cfg;
  report.records = std::move(records);
  report.ref_stationary_variance = stationary_variance(cfg.params);
  report.ref_correction_limit = correction_limit(cfg.params);
  report.ref_sigma_squared = asymptotic_variance(cfg.params).sigma_squared;
  for (const auto& r : report.records)
    if (!r.ok) ++report.total_failures;
  report.aggregates = summarize(report.records, cfg,
                                std::sqrt(report.ref_sigma_squared));
  const double frac = static_cast<double>(report.total_failures) /
                      static_cast<double>(report.records.size());
  if (frac > 0.10)
    throw std::runtime_error(
        "run_experiment: failure fraction " + std::to_string(frac) +
        " exceeds 10%");
  return report;
}

void write_report(const ExperimentReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  {
    std::ofstream os(fs::path(out_dir) / "records.tsv");
    if (!os) throw std::runtime_error("cannot write records.tsv");
    os << "replicate\tT\testimator\ttheta_hat\n";
    for (const auto& r : report.records)
      os << r.replicate << '\t' << format_g17(r.horizon) << '\t'
         << estimator_label(r.estimator) << '\t' << format_g17(r.theta_hat)
         << '\n';
  }
  {
    std::ofstream os(fs::path(out_dir) / "aggregates.tsv");
    if (!os) throw std::runtime_error("cannot write aggregates.tsv");
    os << "T\testimator\tmean\tsd\tmedian\tks\tn_fail\n";
    for (const auto& g : report.aggregates)
      os << format_g17(g.horizon) << '\t' << estimator_label(g.estimator)
         << '\t' << format_g17(g.mean) << '\t' << format_g17(g.sd) << '\t'
         << format_g17(g.median) << '\t' << format_g17(g.ks) << '\t'
         << g.n_fail << '\n';
  }
  {
    std::ofstream os(fs::path(out_dir) / "manifest.txt");
    if (!os) throw std::runtime_error("cannot write manifest.txt");
    os << "# fou2kit experiment manifest\n";
    os << "version = " << kFou2kitVersion << '\n';
    os << report.config.serialize();
    os << "reference_stationary_variance = "
       << format_g17(report.ref_stationary_variance) << '\n';
    os << "reference_sigma_squared = " << format_g17(report.ref_sigma_squared)
       << '\n';
    os << "reference_correction_limit = "
       << format_g17(report.ref_correction_limit) << '\n';
    os << "total_failures = " << report.total_failures << '\n';
  }
}

}  // namespace fou2
