#pragma once

#include <string>

#include "json.hpp"

#include "hull_lab/config.hpp"

namespace hull_lab::cli {

struct RunOptions {
  std::string out_dir = ".";
  double grid_scale = 1.0;  // multiplies nx, ny
  bool sequential = true;
  bool write_files = true;
};

struct RunResult {
  int exit_code = 0;  // 0 pass, 1 verdict failure, 2 parse error, 3 internal error
  nlohmann::ordered_json report;
};

// Dispatches a parsed experiment config, writes report.json and any
// kind-specific CSV/SVG artifacts into out_dir.
RunResult run_experiment(const Config& cfg, const RunOptions& opts);

// Convenience wrapper with config-file loading and error-to-exit-code
// mapping (parse errors 2, internal errors 3).
int run_config_file(const std::string& path, const RunOptions& opts);

std::string tool_version();

}  // namespace hull_lab::cli
