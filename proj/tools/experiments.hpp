#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sqmlab::cli {

/// Exit-code convention: 0 = ran and physics checks passed, 2 = ran but a
/// quantitative check failed, 1 = error (bad config, exception).
inline constexpr int exit_pass = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_check_failed = 2;

struct CheckResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct RunResult {
  int exit_code = exit_error;
  bool pass = false;
  std::string message;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;  // file names written under out_dir
};

std::vector<std::string> experiment_names();

/// Full default configuration of one experiment; user configs may only
/// override keys present here (unknown keys are rejected).
nlohmann::json default_config(const std::string& experiment);

/// Validates, merges over defaults, runs, writes outputs + manifest.json.
RunResult run_experiment(const std::string& experiment, const nlohmann::json& user_config,
                         const std::string& out_dir,
                         std::optional<std::uint64_t> seed_override, int workers,
                         int verbosity);

}  // namespace sqmlab::cli
