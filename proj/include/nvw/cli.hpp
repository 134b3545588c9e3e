#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvw/core.hpp"
#include "nvw/semigroup.hpp"

namespace nvw {

struct EmitFlags {
  bool grid = true;
  bool isotimes = true;
  bool characteristics = true;
  bool surface = true;
  bool measures = true;
};

struct RunConfig {
  SpeedLaw law;
  PhysicalState initial;
  std::string preset;  // "box-example" or empty for explicit samples
  std::optional<std::array<double, 2>> s_range;
  int N = 200;
  std::size_t n_samples = 400;
  double margin = 1.0;
  std::vector<double> times;
  std::filesystem::path output_dir = "out";
  EmitFlags emit;
  double audit_time = 3.0;
  std::uint64_t seed = 20240611;

  Resolution resolution() const;
  double max_abs_time() const;
};

// Environment variable that, when set, replaces the configured output directory.
inline constexpr const char* kOutputDirEnv = "NVW_OUTPUT_DIR";

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

// Each writes its artifacts into config.output_dir and throws nvw::Error on failure.
void run_solve(const RunConfig& config);
nlohmann::json run_convergence(const RunConfig& config, const std::vector<int>& n_list);
nlohmann::json run_audit(const RunConfig& config);

// File names used for time-dependent outputs.
std::string snapshot_name(double T);
std::string measures_name(double T);

// Least-squares slope of log(err) against log(h) over entries with err > floor.
std::optional<double> fitted_order(const std::vector<double>& h, const std::vector<double>& err,
                                   double floor = 1e-13);

int exit_code_for(ErrorCode code);

// Full command-line entry point; returns the process exit status.
int cli_main(int argc, char** argv);

}  // namespace nvw
