#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "svcmimo/link_model.hpp"
#include "svcmimo/uep_opt.hpp"

namespace svcmimo::cli {

/// Bad or missing configuration; maps to exit code 2.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Command { Simulate, Sweep, Calibrate, Fit, Predict, Metrics };

const char* command_name(Command cmd);

/// Fully resolved run configuration. Flat `key = value` files (# comments)
/// plus flag overrides; every key is validated before any work starts.
struct RunConfig {
  Command command = Command::Simulate;

  // inputs/outputs; trace and video accept "preset:<name>"
  std::string trace;
  std::string video;  ///< preset reference covering all three sequences
  std::string video_base, video_enh, video_ref;  ///< raw YUV paths
  std::string video_in;                          ///< metrics input (YUV)
  std::string samples;                           ///< fit input CSV
  std::string model;                             ///< predict input model file
  std::string out = ".";

  // stream geometry for CSV traces and raw YUV inputs
  int base_width = 176, base_height = 144, base_fps = 15;
  int enh_width = 352, enh_height = 288, enh_fps = 30;

  ChannelConfig channel;

  // power sweep
  double total_db = 5.50;
  double p1_min_db = 1.05;
  double p1_max_db = 3.58;
  double step_db = 0.05;
  int n_trials = 200;

  // per-command scalars
  std::optional<double> p1_db;  ///< simulate split / predict feature
  std::optional<double> si, ti;
  double target_per = 0.01;

  std::uint64_t seed = 1;
  int threads = 0;
};

/// Parses and validates; `overrides` are `key=value` entries applied after
/// the file (later entries win). Throws ConfigError with the key name and
/// location on any problem.
RunConfig parse_config(Command command, const std::string& config_path,
                       const std::vector<std::string>& overrides);

/// Executes the command, writing declared outputs atomically plus a
/// run_manifest.txt. Returns a process exit status: 0 success, 3 data error,
/// 4 runtime error. Prints one structured error line to stderr on failure.
int run(const RunConfig& config);

}  // namespace svcmimo::cli
