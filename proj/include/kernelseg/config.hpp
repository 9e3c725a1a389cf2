#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "kernelseg/pipeline.hpp"
#include "kernelseg/scene.hpp"

namespace kernelseg {

struct config_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Everything a run needs: scene generation, simulation noise, pipeline
/// switches, and execution knobs.
struct RunConfig {
  SceneConfig scene;
  uint64_t scene_seed = 0;
  PipelineConfig pipeline;
  int jobs = 0;  // 0 = hardware concurrency
  bool write_ply = false;
};

/// Parses the flat `section.key = value` format. `#` starts a comment.
/// Unknown keys are a hard error so that typos never fall back to defaults.
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::filesystem::path& file);

/// Ablation matrices reuse the same format plus `variant.<name>.<key> = value`
/// override lines. Variants are ordered by first appearance and each applies
/// its overrides on top of the base config.
struct AblationMatrix {
  RunConfig base;
  std::vector<std::pair<std::string, RunConfig>> variants;
};
AblationMatrix load_ablation_config(const std::filesystem::path& file);

/// Applies one key/value pair; exposed for the ablation loader and tests.
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

}  // namespace kernelseg
