#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "fou2kit.h"

namespace fs = std::filesystem;

namespace {
double rel_err(double got, double want) {
  return std::fabs(got - want) / std::fabs(want);
}
}  // namespace

TEST_CASE("version and error strings exist") {
  CHECK(std::strlen(fou2_version()) > 0);
  CHECK(fou2_last_error() != nullptr);
}

TEST_CASE("paths: arrays in, accessors out, validation") {
  const double t[] = {0.0, 0.5, 1.0};
  const double v[] = {0.0, 0.3, -0.2};
  fou2_path* p = nullptr;
  REQUIRE(fou2_path_from_arrays(t, v, 3, &p) == FOU2_OK);
  CHECK(fou2_path_size(p) == 3);
  CHECK(fou2_path_times(p)[1] == 0.5);
  CHECK(fou2_path_values(p)[2] == -0.2);
  fou2_path_free(p);

  const double bad_t[] = {0.0, 0.0, 1.0};
  fou2_path* q = nullptr;
  CHECK(fou2_path_from_arrays(bad_t, v, 3, &q) == FOU2_ERR_INVALID);
  CHECK(std::strlen(fou2_last_error()) > 0);
}

TEST_CASE("sample_fbm: deterministic; domain errors signal INVALID") {
  std::vector<double> t;
  for (int i = 0; i <= 32; ++i) t.push_back(0.125 * i);
  fou2_path* a = nullptr;
  fou2_path* b = nullptr;
  REQUIRE(fou2_sample_fbm(0.7, t.data(), t.size(), 11, 2, &a) == FOU2_OK);
  REQUIRE(fou2_sample_fbm(0.7, t.data(), t.size(), 11, 2, &b) == FOU2_OK);
  CHECK(std::memcmp(fou2_path_values(a), fou2_path_values(b),
                    sizeof(double) * fou2_path_size(a)) == 0);
  CHECK(fou2_path_values(a)[0] == 0.0);
  fou2_path_free(a);
  fou2_path_free(b);
  fou2_path* c = nullptr;
  CHECK(fou2_sample_fbm(1.5, t.data(), t.size(), 11, 2, &c) ==
        FOU2_ERR_INVALID);
}

TEST_CASE("simulate: shapes, domain errors, grid cap") {
  fou2_path* p = nullptr;
  REQUIRE(fou2_simulate(2.0, 0.7, 2.0, 0.025, FOU2_SCHEME_LEFT,
                        FOU2_ROUTE_EXACT, 7, 0, &p) == FOU2_OK);
  CHECK(fou2_path_size(p) == 81);
  CHECK(fou2_path_values(p)[0] == 0.0);
  fou2_path_free(p);

  fou2_path* q = nullptr;
  CHECK(fou2_simulate(0.5, 0.7, 2.0, 0.025, FOU2_SCHEME_LEFT, FOU2_ROUTE_EXACT,
                      7, 0, &q) == FOU2_ERR_INVALID);
  CHECK(fou2_simulate(2.0, 0.7, 300.0, 0.025, FOU2_SCHEME_LEFT,
                      FOU2_ROUTE_EXACT, 7, 0, &q) == FOU2_ERR_NUMERIC);
  CHECK(std::string(fou2_last_error()).find("grid cap") != std::string::npos);
}

TEST_CASE("estimators over the C surface") {
  fou2_path* p = nullptr;
  REQUIRE(fou2_simulate(2.0, 0.7, 50.0, 0.025, FOU2_SCHEME_TRAPEZOID,
                        FOU2_ROUTE_STATIONARY, 21, 4, &p) == FOU2_OK);
  fou2_estimate pw{}, mom{}, lse{};
  REQUIRE(fou2_estimate_pathwise(p, &pw) == FOU2_OK);
  CHECK(std::string(pw.label) == "pathwise");
  CHECK(pw.correction == 0.0);
  CHECK(pw.horizon == doctest::Approx(50.0));
  REQUIRE(fou2_estimate_moment(p, 0.7, 1.01, 50.0, &mom) == FOU2_OK);
  CHECK(std::string(mom.label) == "moment");
  CHECK(mom.theta_hat > 1.01);
  CHECK(mom.theta_hat < 50.0);
  REQUIRE(fou2_estimate_lse(p, 2.0, 0.7, &lse) == FOU2_OK);
  CHECK(std::string(lse.label) == "lse-corrected");
  CHECK(lse.correction > 0.0);
  CHECK(lse.denominator == doctest::Approx(mom.denominator));
  fou2_path_free(p);

  // A constant path far below the achievable range -> RANGE
  const double t[] = {0.0, 1.0, 2.0};
  const double v[] = {1e-4, 1e-4, 1e-4};
  fou2_path* c = nullptr;
  REQUIRE(fou2_path_from_arrays(t, v, 3, &c) == FOU2_OK);
  fou2_estimate r{};
  CHECK(fou2_estimate_moment(c, 0.7, 1.01, 50.0, &r) == FOU2_ERR_RANGE);
  fou2_path_free(c);
}

TEST_CASE("scalar values: frozen references") {
  double sv = 0.0;
  REQUIRE(fou2_stationary_variance(2.0, 0.7, &sv) == FOU2_OK);
  CHECK(rel_err(sv, 0.23378568667518398) < 1e-12);

  double s2 = 0.0, bound = 0.0;
  REQUIRE(fou2_asymptotic_variance(2.0, 0.7, &s2, &bound) == FOU2_OK);
  CHECK(rel_err(s2, 9.238610214278976) < 1e-5);
  CHECK(bound >= 0.0);

  double corr = 0.0, limit = 0.0;
  REQUIRE(fou2_correction(2.0, 0.7, 200.0, &corr, &limit) == FOU2_OK);
  CHECK(rel_err(limit, 0.4675713733503683) < 1e-10);
  CHECK(rel_err(corr / 200.0, limit) < 1.5e-3);

  CHECK(fou2_stationary_variance(2.0, 0.4, &sv) == FOU2_ERR_INVALID);
}

TEST_CASE("path file round trip through the C API") {
  fou2_path* p = nullptr;
  REQUIRE(fou2_simulate(2.0, 0.7, 1.0, 0.125, FOU2_SCHEME_LEFT,
                        FOU2_ROUTE_EXACT, 3, 0, &p) == FOU2_OK);
  const fs::path file = fs::temp_directory_path() / "fou2kit_capi_path.tsv";
  REQUIRE(fou2_path_write(p, file.string().c_str()) == FOU2_OK);
  fou2_path* q = nullptr;
  REQUIRE(fou2_path_read(file.string().c_str(), &q) == FOU2_OK);
  REQUIRE(fou2_path_size(q) == fou2_path_size(p));
  CHECK(std::memcmp(fou2_path_values(p), fou2_path_values(q),
                    sizeof(double) * fou2_path_size(p)) == 0);
  fou2_path_free(p);
  fou2_path_free(q);
  fs::remove(file);
  CHECK(fou2_path_read("/nonexistent/path.tsv", &q) == FOU2_ERR_IO);
}

TEST_CASE("experiments from a config file") {
  const fs::path dir = fs::temp_directory_path() / "fou2kit_capi_exp";
  fs::remove_all(dir);
  const fs::path cfg = fs::temp_directory_path() / "fou2kit_capi_cfg.txt";
  {
    std::ofstream os(cfg);
    os << "theta = 2\nhurst = 0.7\nhorizons = 5\ndt = 0.025\n"
          "replicates = 2\nestimators = pathwise\nseed = 1\n"
          "sampler = stationary\n";
  }
  REQUIRE(fou2_run_experiment(cfg.string().c_str(), dir.string().c_str(), 2) ==
          FOU2_OK);
  CHECK(fs::exists(dir / "records.tsv"));
  CHECK(fs::exists(dir / "aggregates.tsv"));
  CHECK(fs::exists(dir / "manifest.txt"));
  fs::remove_all(dir);

  {
    std::ofstream os(cfg);
    os << "theta = 2\nhurst = 0.7\nnot_a_key = 1\n";
  }
  CHECK(fou2_run_experiment(cfg.string().c_str(), dir.string().c_str(), 1) ==
        FOU2_ERR_CONFIG);
  fs::remove(cfg);
}
