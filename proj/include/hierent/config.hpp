#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "hierent/verify.hpp"

namespace hierent {

struct ExperimentConfig {
  std::vector<SystemDef> systems;
  VerifyParams params;
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out_dir = "hierent-out";

  const SystemDef& system(std::string_view name) const;
  void set_seed(std::uint64_t value);
  void set_jobs(int value);
};

// Format: `key = value` lines, `#` comments, global keys before the first
// section, one `[system NAME]` section per map. Throws ParseError (with the
// line number) for malformed text and ValidationError naming the key for
// out-of-range values.
ExperimentConfig parse_config_text(std::string_view text, std::string_view origin = "<config>");
ExperimentConfig parse_config(const std::filesystem::path& path);

// Catalog used when no config file is given: cat map, 4D block map, and the
// perturbed cat map with amplitude 0.05.
ExperimentConfig default_config();
std::string_view default_config_text() noexcept;

// Every key with its effective value, parseable by parse_config_text.
std::string resolved_config(const ExperimentConfig& config);

}  // namespace hierent
