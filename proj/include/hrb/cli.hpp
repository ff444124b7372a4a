#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "hrb/dataset.hpp"
#include "hrb/dynamics.hpp"

namespace hrb::cli {

// Fully parsed `run` configuration (from a JSON file or a named preset).
struct RunConfig {
  DatasetSpec dataset;
  TrainConfig train;
  std::vector<int> sweep_T;            // non-empty: repeat analysis per horizon
  std::string pca_mode = "analytic";   // analytic | empirical | both
  bool bounds_enabled = false;
  bool sweep_enabled = false;
  int sweep_count = 100;
  std::uint64_t sweep_seed = 20240501;
  bool sweep_kernels = true;
  std::string output_dir;              // empty: resolved from --out / HRB_OUT
  std::vector<std::string> formats = {"csv", "json"};
};

// Strict parser: unknown keys anywhere in the document are rejected.
RunConfig run_config_from_json(const nlohmann::json& doc);

// Named presets, returned as the JSON document the parser consumes.
nlohmann::json preset_json(const std::string& name);

// Entry point used by the binary; maps ConfigError/NumericError/IoError to
// exit codes 2/3/4.
int run_main(int argc, const char* const* argv);

}  // namespace hrb::cli
