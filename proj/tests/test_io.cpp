#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "nvw/cli.hpp"
#include "nvw/csv.hpp"
#include "nvw/error.hpp"

using namespace nvw;
using doctest::Approx;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an nvw::Error");
  return ErrorCode::InvalidArgument;
}

json box_config() {
  return json::parse(R"({
    "law": {"kind": "liquid_crystal", "alpha": 0.2, "beta": 0.1},
    "initial": {"preset": "box-example"},
    "s_range": [-5, 7.5], "N": 50, "times": [0, 1, -3]
  })");
}

}  // namespace

TEST_CASE("format_double round trips") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int k = 0; k < 1000; ++k) {
    double v = d(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    CHECK(std::stod(format_double(v)) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(3.0) == "3");
  CHECK(format_double(-2.25) == "-2.25");
}

TEST_CASE("csv write and read") {
  std::stringstream s;
  s << "a,b,c\n";
  write_csv_row(s, {1.0, -0.1, 1e-300});
  write_csv_row(s, {std::nextafter(1.0, 2.0), 2.0, 3.0});
  auto t = read_csv(s);
  CHECK(t.header == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][1] == -0.1);
  CHECK(t.rows[0][2] == 1e-300);
  CHECK(t.rows[1][0] == std::nextafter(1.0, 2.0));
  CHECK(t.column("c") == 2);
  CHECK(code_of([&] { (void)t.column("z"); }) == ErrorCode::IoError);
}

TEST_CASE("malformed csv is rejected") {
  std::stringstream empty;
  CHECK(code_of([&] { read_csv(empty); }) == ErrorCode::IoError);
  std::stringstream bad("a,b\n1,x\n");
  CHECK(code_of([&] { read_csv(bad); }) == ErrorCode::IoError);
  std::stringstream ragged("a,b\n1,2,3\n");
  CHECK(code_of([&] { read_csv(ragged); }) == ErrorCode::IoError);
}

TEST_CASE("output file names") {
  CHECK(snapshot_name(1.5) == "snapshot_1.5.csv");
  CHECK(snapshot_name(-3.0) == "snapshot_-3.csv");
  CHECK(measures_name(0.0) == "measures_0.json");
}

TEST_CASE("fitted orders") {
  std::vector<double> h{0.4, 0.2, 0.1, 0.05};
  std::vector<double> first, second;
  for (double v : h) {
    first.push_back(3.0 * v);
    second.push_back(0.5 * v * v);
  }
  CHECK(*fitted_order(h, first) == Approx(1.0));
  CHECK(*fitted_order(h, second) == Approx(2.0));
  // Entries at the rounding floor are ignored; fewer than two points give no order.
  CHECK_FALSE(fitted_order(h, {1e-16, 1e-16, 1e-16, 1e-16}).has_value());
  CHECK(*fitted_order(h, {0.4, 0.2, 1e-16, 1e-16}) == Approx(1.0));
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::ConfigError) == 2);
  CHECK(exit_code_for(ErrorCode::DomainTooSmall) == 2);
  CHECK(exit_code_for(ErrorCode::NonFiniteValue) == 3);
  CHECK(exit_code_for(ErrorCode::IoError) == 4);
}

TEST_CASE("config parsing") {
  unsetenv(kOutputDirEnv);
  SUBCASE("preset") {
    auto c = parse_config(box_config(), "/base");
    CHECK(c.preset == "box-example");
    CHECK(c.law.kind() == SpeedKind::LiquidCrystal);
    CHECK(c.N == 50);
    CHECK(c.n_samples == 400);
    CHECK(c.times == std::vector<double>{0, 1, -3});
    CHECK(c.max_abs_time() == 3.0);
    REQUIRE(c.s_range.has_value());
    CHECK((*c.s_range)[1] == 7.5);
    CHECK(c.output_dir == std::filesystem::path("/base/out"));
    CHECK(c.initial.total_energy() == Approx(3.0));
    auto r = c.resolution();
    CHECK(r.N == 50);
    CHECK(r.s_range == c.s_range);
  }
  SUBCASE("explicit samples") {
    auto j = json::parse(R"({
      "law": {"kind": "constant", "c0": 2.0},
      "initial": {"grid": [0, 1, 2], "u": [0, 1, 1], "R": [1, 0, 0], "S": [-3, 0, 0],
                  "mu_atoms": [[0.5, 0.25]], "nu_atoms": [[1.5, 1.0]], "u_infinity": 0.5},
      "times": [0.5], "emit": {"surface": false}, "seed": 5, "output_dir": "/abs"
    })");
    auto c = parse_config(j);
    CHECK(c.preset.empty());
    CHECK(c.initial.u_infinity == 0.5);
    CHECK(c.initial.mu.atom_at(0.5) == 0.25);
    CHECK(c.initial.nu.atom_at(1.5) == 1.0);
    CHECK(c.initial.mu.density_at(0.5) == Approx(0.25));
    CHECK_FALSE(c.emit.surface);
    CHECK(c.emit.grid);
    CHECK(c.seed == 5);
    CHECK(c.output_dir == std::filesystem::path("/abs"));
    CHECK_FALSE(c.s_range.has_value());
  }
  SUBCASE("velocity form") {
    auto j = json::parse(R"({
      "law": {"kind": "constant", "c0": 1.0},
      "initial": {"grid": [0, 1, 2, 3], "u0": [0, 1, 2, 3], "u1": [0, 0, 0, 0]}
    })");
    auto c = parse_config(j);
    // u_x = 1 and u_t = 0 give R = 1 and S = -1.
    CHECK(c.initial.R[0] == Approx(1.0));
    CHECK(c.initial.S[1] == Approx(-1.0));
    CHECK(c.initial.u_infinity == 0.0);
  }
  SUBCASE("environment override of the output directory") {
    setenv(kOutputDirEnv, "/tmp/elsewhere", 1);
    CHECK(parse_config(box_config(), "/base").output_dir == std::filesystem::path("/tmp/elsewhere"));
    unsetenv(kOutputDirEnv);
  }
}

TEST_CASE("invalid configs") {
  unsetenv(kOutputDirEnv);
  auto expect_config_error = [](json j) {
    CHECK(code_of([&] { parse_config(j); }) == ErrorCode::ConfigError);
  };
  json j = box_config();
  j["N"] = 4;
  expect_config_error(j);
  j = box_config();
  j["n_samples"] = 1;
  expect_config_error(j);
  j = box_config();
  j["s_range"] = {1.0, 0.0};
  expect_config_error(j);
  j = box_config();
  j["s_range"] = {-2.0, 7.5};  // too short on the left for |T| = 3
  expect_config_error(j);
  j = box_config();
  j["s_range"] = {-5.0, 7.5, 9.0};
  expect_config_error(j);
  j = box_config();
  j["initial"]["preset"] = "nope";
  expect_config_error(j);
  j = box_config();
  j.erase("law");
  expect_config_error(j);
  j = box_config();
  j["law"]["kind"] = "sonic";
  expect_config_error(j);
  j = json::parse(R"({"law": {"kind": "constant", "c0": 1},
                      "initial": {"grid": [0, 1], "u": [0], "R": [0, 0], "S": [0, 0]}})");
  expect_config_error(j);
  j["initial"]["u"] = {0, 0};
  j["initial"]["mu_atoms"] = {1.0};
  expect_config_error(j);
  j["initial"]["mu_atoms"] = json::array({json::array({5.0, 1.0})});  // outside the window
  expect_config_error(j);
  j["initial"]["mu_atoms"] = json::array({json::array({0.5, -1.0})});
  expect_config_error(j);
}

TEST_CASE("config files") {
  unsetenv(kOutputDirEnv);
  auto dir = std::filesystem::temp_directory_path() / "nvw_io_test";
  std::filesystem::create_directories(dir);
  CHECK(code_of([&] { load_config(dir / "missing.json"); }) == ErrorCode::IoError);
  {
    std::ofstream(dir / "broken.json") << "{ not json";
  }
  CHECK(code_of([&] { load_config(dir / "broken.json"); }) == ErrorCode::ConfigError);
  {
    std::ofstream(dir / "ok.json") << box_config().dump();
  }
  auto c = load_config(dir / "ok.json");
  CHECK(c.output_dir == dir / "out");
  std::filesystem::remove_all(dir);
}
