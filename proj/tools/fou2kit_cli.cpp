// Command-line front end over the fou2kit C API.
//
// Subcommands: sample-fbm, simulate, estimate, variance, correction,
// experiment. Exit codes: 0 success, 1 numerical/runtime failure,
// 2 usage or validation error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fou2kit.h"

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int exit_code_for(fou2_status s) {
  switch (s) {
    case FOU2_OK:
      return 0;
    case FOU2_ERR_INVALID:
    case FOU2_ERR_CONFIG:
      return 2;
    default:
      return 1;
  }
}

[[noreturn]] void die(fou2_status s) {
  std::cerr << "fou2kit: error: " << fou2_last_error() << "\n";
  std::exit(exit_code_for(s));
}

[[noreturn]] void die_usage(const std::string& msg) {
  std::cerr << "fou2kit: " << msg << "\n";
  std::exit(2);
}

// "uniform:T,n" or "file:PATH" (one time per line, '#' comments allowed).
std::vector<double> parse_grid(const std::string& spec) {
  if (spec.rfind("uniform:", 0) == 0) {
    const std::string rest = spec.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos)
      die_usage("--grid uniform:T,n expects two values");
    double horizon = 0.0;
    long steps = 0;
    try {
      horizon = std::stod(rest.substr(0, comma));
      steps = std::stol(rest.substr(comma + 1));
    } catch (const std::exception&) {
      die_usage("--grid uniform:T,n: could not parse numbers");
    }
    if (!(horizon > 0.0) || steps < 1)
      die_usage("--grid uniform:T,n requires T > 0 and n >= 1");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = horizon * static_cast<double>(i) / static_cast<double>(steps);
    t.back() = horizon;
    return t;
  }
  if (spec.rfind("file:", 0) == 0) {
    std::ifstream is(spec.substr(5));
    if (!is) {
      std::cerr << "fou2kit: cannot open grid file " << spec.substr(5) << "\n";
      std::exit(1);
    }
    std::vector<double> t;
    std::string line;
    while (std::getline(is, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      std::istringstream row(line);
      double v;
      while (row >> v) t.push_back(v);
    }
    if (t.size() < 1) die_usage("grid file holds no times");
    return t;
  }
  die_usage("--grid expects uniform:T,n or file:PATH");
}

void write_estimate(const fou2_estimate& e, const std::string& out) {
  std::ostringstream line;
  line << e.label << '\t' << g17(e.theta_hat) << '\t' << g17(e.denominator)
       << '\t' << g17(e.correction) << '\t' << g17(e.horizon) << '\n';
  if (out.empty() || out == "-") {
    std::cout << line.str();
  } else {
    std::ofstream os(out);
    if (!os) {
      std::cerr << "fou2kit: cannot write " << out << "\n";
      std::exit(1);
    }
    os << line.str();
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fou2kit: sampling, simulation and drift estimation"};
  app.require_subcommand(1);

  // --- sample-fbm ---
  auto* sample = app.add_subcommand("sample-fbm", "draw an exact fBm path");
  double s_hurst = 0.5;
  std::string s_grid, s_out;
  std::uint64_t s_seed = 0, s_stream = 0;
  sample->add_option("--hurst", s_hurst, "Hurst parameter in (0,1)")
      ->required();
  sample->add_option("--grid", s_grid, "uniform:T,n or file:PATH")->required();
  sample->add_option("--seed", s_seed, "stream seed")->required();
  sample->add_option("--stream", s_stream, "stream index (default 0)");
  sample->add_option("--out", s_out, "output file")->required();

  // --- simulate ---
  auto* sim = app.add_subcommand("simulate", "simulate the model path");
  double m_theta = 0.0, m_hurst = 0.0, m_T = 0.0, m_dt = 0.025;
  std::string m_route = "exact", m_scheme = "left", m_out;
  std::uint64_t m_seed = 0, m_stream = 0;
  sim->add_option("--theta", m_theta, "drift, > 1")->required();
  sim->add_option("--hurst", m_hurst, "Hurst parameter in (1/2,1)")->required();
  sim->add_option("--T", m_T, "horizon")->required();
  sim->add_option("--dt", m_dt, "step (default 0.025)");
  sim->add_option("--route", m_route, "exact | stationary")
      ->check(CLI::IsMember({"exact", "stationary"}));
  sim->add_option("--scheme", m_scheme, "left | trapezoid")
      ->check(CLI::IsMember({"left", "trapezoid"}));
  sim->add_option("--seed", m_seed, "stream seed")->required();
  sim->add_option("--stream", m_stream, "stream index (default 0)");
  sim->add_option("--out", m_out, "output file")->required();

  // --- estimate ---
  auto* est = app.add_subcommand("estimate", "estimate drift from a path file");
  std::string e_in, e_kind, e_out;
  double e_hurst = 0.0, e_theta = 0.0;
  bool e_has_theta = false;
  std::string e_bracket;
  est->add_option("--in", e_in, "path file")->required();
  est->add_option("--estimator", e_kind, "moment | lse-corrected | pathwise")
      ->required()
      ->check(CLI::IsMember({"moment", "lse-corrected", "pathwise"}));
  est->add_option("--hurst", e_hurst, "Hurst parameter in (1/2,1)");
  auto* theta_opt = est->add_option("--theta", e_theta,
                                    "true drift for the correction");
  est->add_option("--bracket", e_bracket, "moment bracket LO,HI (default 1.01,50)");
  est->add_option("--out", e_out, "output file (default stdout)");

  // --- variance ---
  auto* var = app.add_subcommand("variance", "limiting estimator variance");
  double v_theta = 0.0, v_hurst = 0.0;
  var->add_option("--theta", v_theta)->required();
  var->add_option("--hurst", v_hurst)->required();

  // --- correction ---
  auto* corr = app.add_subcommand("correction", "divergence correction");
  double c_theta = 0.0, c_hurst = 0.0, c_T = 0.0;
  corr->add_option("--theta", c_theta)->required();
  corr->add_option("--hurst", c_hurst)->required();
  corr->add_option("--T", c_T)->required();

  // --- experiment ---
  auto* exp = app.add_subcommand("experiment", "run a Monte Carlo experiment");
  std::string x_config, x_out_dir;
  int x_workers = 1;
  exp->add_option("--config", x_config, "key=value config file")->required();
  exp->add_option("--out-dir", x_out_dir, "output directory")->required();
  exp->add_option("--workers", x_workers, "worker threads (default 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "fou2kit: " << e.what() << "\n";
    return 2;
  }
  e_has_theta = theta_opt->count() > 0;

  if (sample->parsed()) {
    const std::vector<double> grid = parse_grid(s_grid);
    fou2_path* path = nullptr;
    fou2_status s = fou2_sample_fbm(s_hurst, grid.data(), grid.size(), s_seed,
                                    s_stream, &path);
    if (s != FOU2_OK) die(s);
    s = fou2_path_write(path, s_out.c_str());
    fou2_path_free(path);
    if (s != FOU2_OK) die(s);
    return 0;
  }

  if (sim->parsed()) {
    fou2_path* path = nullptr;
    fou2_status s = fou2_simulate(
        m_theta, m_hurst, m_T, m_dt,
        m_scheme == "trapezoid" ? FOU2_SCHEME_TRAPEZOID : FOU2_SCHEME_LEFT,
        m_route == "stationary" ? FOU2_ROUTE_STATIONARY : FOU2_ROUTE_EXACT,
        m_seed, m_stream, &path);
    if (s != FOU2_OK) die(s);
    s = fou2_path_write(path, m_out.c_str());
    fou2_path_free(path);
    if (s != FOU2_OK) die(s);
    return 0;
  }

  if (est->parsed()) {
    fou2_path* path = nullptr;
    fou2_status s = fou2_path_read(e_in.c_str(), &path);
    if (s != FOU2_OK) die(s);
    fou2_estimate result{};
    if (e_kind == "moment") {
      if (est->count("--hurst") == 0)
        die_usage("estimate --estimator moment requires --hurst");
      double lo = 1.01, hi = 50.0;
      if (!e_bracket.empty()) {
        const auto comma = e_bracket.find(',');
        if (comma == std::string::npos)
          die_usage("--bracket expects LO,HI");
        try {
          lo = std::stod(e_bracket.substr(0, comma));
          hi = std::stod(e_bracket.substr(comma + 1));
        } catch (const std::exception&) {
          die_usage("--bracket expects numbers LO,HI");
        }
      }
      s = fou2_estimate_moment(path, e_hurst, lo, hi, &result);
    } else if (e_kind == "lse-corrected") {
      if (!e_has_theta)
        die_usage("estimate --estimator lse-corrected requires --theta");
      if (est->count("--hurst") == 0)
        die_usage("estimate --estimator lse-corrected requires --hurst");
      s = fou2_estimate_lse(path, e_theta, e_hurst, &result);
    } else {
      s = fou2_estimate_pathwise(path, &result);
    }
    fou2_path_free(path);
    if (s != FOU2_OK) die(s);
    write_estimate(result, e_out);
    return 0;
  }

  if (var->parsed()) {
    double value = 0.0, bound = 0.0;
    const fou2_status s =
        fou2_asymptotic_variance(v_theta, v_hurst, &value, &bound);
    if (s != FOU2_OK) die(s);
    std::cout << "sigma_squared = " << g17(value) << "\n";
    std::cout << "error_bound = " << g17(bound) << "\n";
    return 0;
  }

  if (corr->parsed()) {
    double value = 0.0, limit = 0.0;
    const fou2_status s =
        fou2_correction(c_theta, c_hurst, c_T, &value, &limit);
    if (s != FOU2_OK) die(s);
    std::cout << "correction = " << g17(value) << "\n";
    std::cout << "correction_over_T = " << g17(value / c_T) << "\n";
    std::cout << "limit = " << g17(limit) << "\n";
    return 0;
  }

  if (exp->parsed()) {
    const fou2_status s =
        fou2_run_experiment(x_config.c_str(), x_out_dir.c_str(), x_workers);
    if (s != FOU2_OK) die(s);
    return 0;
  }

  std::cerr << app.help();
  return 2;
}
