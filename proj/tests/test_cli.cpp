// End-to-end checks of the command-line interface. Spawns the binary given
// as argv[1]; not doctest-based so the binary path can be passed through.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "estimators.hpp"
#include "io.hpp"

namespace fs = std::filesystem;

namespace {

int g_failures = 0;

#define CHECK_MSG(cond, msg)                                          \
  do {                                                                \
    if (!(cond)) {                                                    \
      std::cerr << "FAIL (" << __LINE__ << "): " << msg << "\n";      \
      ++g_failures;                                                   \
    }                                                                 \
  } while (0)

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run(const std::string& cmd) {
  const fs::path tmp = fs::temp_directory_path() / "fou2kit_cli_out.txt";
  const std::string full = cmd + " > " + tmp.string() + " 2>&1";
  const int raw = std::system(full.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(raw);
  std::ifstream is(tmp);
  std::stringstream ss;
  ss << is.rdbuf();
  r.out = ss.str();
  return r;
}

std::size_t data_rows(const fs::path& file) {
  std::ifstream is(file);
  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("t\t", 0) == 0) continue;
    ++rows;
  }
  return rows;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::cerr << "usage: test_cli <path-to-binary>\n";
    return 2;
  }
  const std::string bin = argv[1];
  const fs::path dir = fs::temp_directory_path() / "fou2kit_cli_test";
  fs::remove_all(dir);
  fs::create_directories(dir);

  // ---- sample-fbm ----------------------------------------------------
  const fs::path fbm1 = dir / "fbm1.tsv";
  const fs::path fbm2 = dir / "fbm2.tsv";
  RunResult r = run(bin + " sample-fbm --hurst 0.7 --grid uniform:10,400" +
                    " --seed 1 --out " + fbm1.string());
  CHECK_MSG(r.exit_code == 0, "sample-fbm exit: " << r.out);
  CHECK_MSG(data_rows(fbm1) == 401, "sample-fbm row count " << data_rows(fbm1));
  {
    fou2::SamplePath p = fou2::read_path_file(fbm1.string());
    CHECK_MSG(p.grid.times[0] == 0.0 && p.values[0] == 0.0,
              "fbm path starts at t=0 with B=0");
  }
  r = run(bin + " sample-fbm --hurst 0.7 --grid uniform:10,400 --seed 1" +
          " --out " + fbm2.string());
  CHECK_MSG(r.exit_code == 0, "sample-fbm rerun");
  CHECK_MSG(slurp(fbm1) == slurp(fbm2), "sample-fbm reruns bit-identical");
  r = run(bin + " sample-fbm --hurst 1.5 --grid uniform:1,10 --seed 1 --out " +
          (dir / "x.tsv").string());
  CHECK_MSG(r.exit_code == 2, "hurst 1.5 must exit 2, got " << r.exit_code);
  r = run(bin + " sample-fbm --grid uniform:1,10 --seed 1 --out " +
          (dir / "x.tsv").string());
  CHECK_MSG(r.exit_code == 2, "missing --hurst must exit 2");

  // grid from a file
  const fs::path gridfile = dir / "grid.txt";
  {
    std::ofstream os(gridfile);
    os << "# three times\n0.5\n1.0\n2.5\n";
  }
  r = run(bin + " sample-fbm --hurst 0.6 --grid file:" + gridfile.string() +
          " --seed 4 --out " + (dir / "fbm3.tsv").string());
  CHECK_MSG(r.exit_code == 0, "sample-fbm grid file: " << r.out);
  CHECK_MSG(data_rows(dir / "fbm3.tsv") == 3, "grid-file row count");

  // ---- simulate -------------------------------------------------------
  const fs::path xpath = dir / "x.tsv";
  r = run(bin + " simulate --theta 2 --hurst 0.7 --T 50 --dt 0.025 --seed 1" +
          " --out " + xpath.string());
  CHECK_MSG(r.exit_code == 0, "simulate exit: " << r.out);
  CHECK_MSG(data_rows(xpath) == 2001, "simulate row count "
                                          << data_rows(xpath));
  {
    fou2::SamplePath p = fou2::read_path_file(xpath.string());
    CHECK_MSG(p.values[0] == 0.0, "X starts at 0");
    CHECK_MSG(!p.meta.empty() && p.meta.find("seed=1") != std::string::npos,
              "manifest header carries the seed: " << p.meta);
  }
  r = run(bin + " simulate --theta 0.5 --hurst 0.7 --T 10 --dt 0.025" +
          " --seed 1 --out " + (dir / "y.tsv").string());
  CHECK_MSG(r.exit_code == 2, "theta 0.5 must exit 2, got " << r.exit_code);
  r = run(bin + " simulate --theta 2 --hurst 0.7 --T 300 --dt 0.025 --seed 1" +
          " --out " + (dir / "y.tsv").string());
  CHECK_MSG(r.exit_code == 1, "grid cap exceeded must exit 1, got "
                                  << r.exit_code);
  CHECK_MSG(r.out.find("grid cap") != std::string::npos,
            "cap error names the cap: " << r.out);
  // identical flags and seed reproduce the file bitwise
  const fs::path xpath2 = dir / "x2.tsv";
  r = run(bin + " simulate --theta 2 --hurst 0.7 --T 50 --dt 0.025 --seed 1" +
          " --out " + xpath2.string());
  CHECK_MSG(r.exit_code == 0, "simulate rerun");
  CHECK_MSG(slurp(xpath) == slurp(xpath2), "simulate reruns bit-identical");
  // environment override of the grid cap
  r = run("FOU2KIT_GRID_CAP=100 " + bin +
          " simulate --theta 2 --hurst 0.7 --T 10 --dt 0.025 --seed 1 --out " +
          (dir / "y.tsv").string());
  CHECK_MSG(r.exit_code == 1 && r.out.find("(100)") != std::string::npos,
            "env var overrides the cap: " << r.out);

  // ---- estimate -------------------------------------------------------
  r = run(bin + " estimate --in " + xpath.string() +
          " --estimator pathwise");
  CHECK_MSG(r.exit_code == 0, "estimate pathwise: " << r.out);
  {
    std::istringstream line(r.out);
    std::string label;
    double theta_hat, denom, corr, horizon;
    line >> label >> theta_hat >> denom >> corr >> horizon;
    CHECK_MSG(label == "pathwise", "label " << label);
    // replay the formula from the file contents
    fou2::SamplePath p = fou2::read_path_file(xpath.string());
    const double xt = p.values.back();
    const double want =
        -0.5 * xt * xt / (fou2::quadratic_functional(p) * 50.0);
    CHECK_MSG(std::fabs(theta_hat - want) < 1e-12 * (1.0 + std::fabs(want)),
              "pathwise replay " << theta_hat << " vs " << want);
    CHECK_MSG(corr == 0.0, "pathwise correction is 0");
    CHECK_MSG(horizon == 50.0, "horizon parsed back");
  }
  r = run(bin + " estimate --in " + xpath.string() +
          " --estimator lse-corrected --hurst 0.7");
  CHECK_MSG(r.exit_code == 2, "lse-corrected without --theta exits 2, got "
                                  << r.exit_code);
  r = run(bin + " estimate --in " + xpath.string() +
          " --estimator lse-corrected --hurst 0.7 --theta 2");
  CHECK_MSG(r.exit_code == 0, "lse-corrected with theta: " << r.out);
  r = run(bin + " estimate --in " + xpath.string() +
          " --estimator moment --hurst 0.7");
  CHECK_MSG(r.exit_code == 0, "moment: " << r.out);
  {
    std::istringstream line(r.out);
    std::string label;
    double theta_hat;
    line >> label >> theta_hat;
    CHECK_MSG(std::fabs(theta_hat - 2.0) < 1.5,
              "moment estimate within MC scatter: " << theta_hat);
  }
  r = run(bin + " estimate --in /nonexistent.tsv --estimator pathwise");
  CHECK_MSG(r.exit_code == 1, "unreadable input exits 1, got " << r.exit_code);

  // ---- variance / correction ------------------------------------------
  r = run(bin + " variance --theta 2 --hurst 0.7");
  CHECK_MSG(r.exit_code == 0, "variance: " << r.out);
  {
    double v = 0.0;
    const auto pos = r.out.find("sigma_squared = ");
    CHECK_MSG(pos != std::string::npos, "variance output format");
    v = std::atof(r.out.c_str() + pos + 16);
    CHECK_MSG(v > 0.0 && std::isfinite(v), "variance positive finite " << v);
  }
  r = run(bin + " variance --theta 2 --hurst 0.4");
  CHECK_MSG(r.exit_code == 2, "H=0.4 exits 2, got " << r.exit_code);

  r = run(bin + " correction --theta 2 --hurst 0.4 --T 100");
  CHECK_MSG(r.exit_code == 2, "correction H=0.4 exits 2, got " << r.exit_code);
  r = run(bin + " correction --theta 2 --hurst 0.7 --T 100");
  CHECK_MSG(r.exit_code == 0, "correction: " << r.out);
  {
    const auto pos = r.out.find("limit = ");
    CHECK_MSG(pos != std::string::npos, "correction output format");
    const double limit = std::atof(r.out.c_str() + pos + 8);
    const double want =
        fou2::correction_limit(fou2::ModelParams{2.0, 0.7});
    CHECK_MSG(std::fabs(limit - want) < 1e-12, "limit replay: " << limit);
  }

  // ---- experiment -----------------------------------------------------
  const fs::path cfg = dir / "exp.cfg";
  {
    std::ofstream os(cfg);
    os << "theta = 2\nhurst = 0.7\nhorizons = 5\ndt = 0.025\n"
          "replicates = 16\nestimators = moment pathwise\nseed = 7\n"
          "sampler = stationary\nscheme = trapezoid\n";
  }
  const fs::path out1 = dir / "exp1";
  const fs::path out8 = dir / "exp8";
  r = run(bin + " experiment --config " + cfg.string() + " --out-dir " +
          out1.string() + " --workers 1");
  CHECK_MSG(r.exit_code == 0, "experiment workers=1: " << r.out);
  r = run(bin + " experiment --config " + cfg.string() + " --out-dir " +
          out8.string() + " --workers 8");
  CHECK_MSG(r.exit_code == 0, "experiment workers=8: " << r.out);
  for (const char* f : {"records.tsv", "aggregates.tsv", "manifest.txt"}) {
    CHECK_MSG(fs::exists(out1 / f), "experiment wrote " << f);
    CHECK_MSG(slurp(out1 / f) == slurp(out8 / f),
              "worker count does not change " << f);
  }
  {
    std::ofstream os(cfg, std::ios::app);
    os << "unexpected_key = 3\n";
  }
  r = run(bin + " experiment --config " + cfg.string() + " --out-dir " +
          (dir / "exp_bad").string());
  CHECK_MSG(r.exit_code == 2, "schema violation exits 2, got " << r.exit_code);
  CHECK_MSG(r.out.find("unexpected_key") != std::string::npos,
            "offending key is listed: " << r.out);

  // ---- usage ----------------------------------------------------------
  r = run(bin + " frobnicate");
  CHECK_MSG(r.exit_code == 2, "unknown subcommand exits 2");

  fs::remove_all(dir);
  if (g_failures == 0) {
    std::cout << "test_cli: all checks passed\n";
    return 0;
  }
  std::cerr << "test_cli: " << g_failures << " failures\n";
  return 1;
}
