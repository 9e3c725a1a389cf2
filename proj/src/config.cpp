#include "kernelseg/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace kernelseg {

namespace {

std::string trim(const std::string& s) {
  size_t begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(key + ": expected a number, got '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    int v = std::stoi(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(key + ": expected an integer, got '" + value + "'");
  }
}

uint64_t parse_seed(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    uint64_t v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw config_error(key + ": expected an unsigned integer, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "on") return true;
  if (value == "false" || value == "0" || value == "off") return false;
  throw config_error(key + ": expected a boolean, got '" + value + "'");
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_int(key, item));
  }
  if (out.empty()) throw config_error(key + ": expected a comma-separated integer list");
  return out;
}

}  // namespace

void apply_config_entry(RunConfig& config, const std::string& key,
                        const std::string& value) {
  // scene.*
  if (key == "scene.n_instances") config.scene.n_instances = parse_int(key, value);
  else if (key == "scene.min_points") config.scene.min_points = parse_int(key, value);
  else if (key == "scene.max_points") config.scene.max_points = parse_int(key, value);
  else if (key == "scene.num_classes") config.scene.num_classes = parse_int(key, value);
  else if (key == "scene.room_x") config.scene.room_extent.x() = parse_double(key, value);
  else if (key == "scene.room_y") config.scene.room_extent.y() = parse_double(key, value);
  else if (key == "scene.room_z") config.scene.room_extent.z() = parse_double(key, value);
  else if (key == "scene.min_separation") config.scene.min_separation = parse_double(key, value);
  else if (key == "scene.min_size") config.scene.min_size = parse_double(key, value);
  else if (key == "scene.max_size") config.scene.max_size = parse_double(key, value);
  else if (key == "scene.background_points") config.scene.background_points = parse_int(key, value);
  else if (key == "scene.density") config.scene.density_points_per_m3 = parse_double(key, value);
  else if (key == "scene.seed") config.scene_seed = parse_seed(key, value);
  else if (key == "scene.shapes") {
    if (value == "box") { config.scene.boxes = true; config.scene.ellipsoids = false; }
    else if (value == "ellipsoid") { config.scene.boxes = false; config.scene.ellipsoids = true; }
    else if (value == "both") { config.scene.boxes = true; config.scene.ellipsoids = true; }
    else throw config_error(key + ": expected box|ellipsoid|both, got '" + value + "'");
  }
  // noise.*
  else if (key == "noise.sigma_offset") config.pipeline.noise.sigma_offset = parse_double(key, value);
  else if (key == "noise.sigma_heatmap") config.pipeline.noise.sigma_heatmap = parse_double(key, value);
  else if (key == "noise.semantic_flip_prob") config.pipeline.noise.semantic_flip_prob = parse_double(key, value);
  else if (key == "noise.sigma_feature") config.pipeline.noise.sigma_feature = parse_double(key, value);
  else if (key == "noise.seed") config.pipeline.noise.seed = parse_seed(key, value);
  // mining.*
  else if (key == "mining.mode") {
    if (value == "ln_nms") config.pipeline.mining = MiningMode::LnNms;
    else if (value == "plain_nms") config.pipeline.mining = MiningMode::PlainNms;
    else if (value == "random") config.pipeline.mining = MiningMode::Random;
    else throw config_error(key + ": expected ln_nms|plain_nms|random, got '" + value + "'");
  }
  else if (key == "mining.radius") config.pipeline.mining_params.radius = parse_double(key, value);
  else if (key == "mining.score_threshold") config.pipeline.mining_params.score_threshold = parse_double(key, value);
  else if (key == "mining.max_candidates") config.pipeline.mining_params.max_candidates = parse_int(key, value);
  else if (key == "mining.seed") config.pipeline.random_mining_seed = parse_seed(key, value);
  // aggregation.*
  else if (key == "aggregation.mode") {
    if (value == "off") config.pipeline.aggregation = AggregationMode::Off;
    else if (value == "oracle") config.pipeline.aggregation = AggregationMode::Oracle;
    else if (value == "analytic") config.pipeline.aggregation = AggregationMode::Analytic;
    else throw config_error(key + ": expected off|oracle|analytic, got '" + value + "'");
  }
  else if (key == "aggregation.merge_threshold") config.pipeline.merge_threshold = parse_double(key, value);
  else if (key == "aggregation.beta0") config.pipeline.analytic_beta0 = parse_double(key, value);
  else if (key == "aggregation.beta1") config.pipeline.analytic_beta1 = parse_double(key, value);
  // kernel.*
  else if (key == "kernel.head") {
    if (value == "prototype") config.pipeline.head = KernelHead::Prototype;
    else if (value == "direct") config.pipeline.head = KernelHead::Direct;
    else throw config_error(key + ": expected prototype|direct, got '" + value + "'");
  }
  else if (key == "kernel.channels") config.pipeline.decoder_channels = parse_int_list(key, value);
  else if (key == "kernel.feature_gain") config.pipeline.prototype.feature_gain = parse_double(key, value);
  else if (key == "kernel.self_gate") config.pipeline.prototype.self_gate = parse_double(key, value);
  else if (key == "kernel.distance_gain") config.pipeline.prototype.distance_gain = parse_double(key, value);
  else if (key == "kernel.bias") config.pipeline.prototype.bias = parse_double(key, value);
  // postprocess.*
  else if (key == "postprocess.coverage") config.pipeline.use_coverage = parse_bool(key, value);
  else if (key == "postprocess.superpoints") config.pipeline.use_superpoints = parse_bool(key, value);
  else if (key == "postprocess.superpoint_method") {
    if (value == "oracle") config.pipeline.superpoints.method = SuperpointSpec::Method::Oracle;
    else if (value == "grid") config.pipeline.superpoints.method = SuperpointSpec::Method::Grid;
    else throw config_error(key + ": expected oracle|grid, got '" + value + "'");
  }
  else if (key == "postprocess.superpoint_impurity") config.pipeline.superpoints.impurity = parse_double(key, value);
  else if (key == "postprocess.superpoint_cell") config.pipeline.superpoints.cell = parse_double(key, value);
  else if (key == "postprocess.superpoint_seed") config.pipeline.superpoints.seed = parse_seed(key, value);
  else if (key == "postprocess.min_fragment_points") config.pipeline.min_fragment_points = parse_int(key, value);
  // pipeline.*
  else if (key == "pipeline.feature_dim") config.pipeline.feature_dim = parse_int(key, value);
  else if (key == "pipeline.class_embedding_dim") config.pipeline.class_embedding_dim = parse_int(key, value);
  else if (key == "pipeline.heatmap_alpha") config.pipeline.heatmap_alpha = parse_double(key, value);
  else if (key == "pipeline.mismatch_penalty") config.pipeline.mismatch_penalty = parse_double(key, value);
  else if (key == "pipeline.full_instance_features") config.pipeline.full_instance_features = parse_bool(key, value);
  else if (key == "pipeline.background_classes") {
    config.pipeline.background_classes.clear();
    for (int c : parse_int_list(key, value)) config.pipeline.background_classes.insert(c);
  }
  // run.*
  else if (key == "run.jobs") config.jobs = parse_int(key, value);
  else if (key == "run.write_ply") config.write_ply = parse_bool(key, value);
  else {
    throw config_error("unknown config key '" + key + "'");
  }
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_lines(const std::string& text) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return entries;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
  RunConfig config;
  for (const auto& [key, value] : parse_lines(text)) {
    apply_config_entry(config, key, value);
  }
  return config;
}

RunConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

AblationMatrix load_ablation_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw config_error("cannot read config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();

  AblationMatrix matrix;
  std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>>
      variant_entries;
  for (const auto& [key, value] : parse_lines(buffer.str())) {
    if (key.rfind("variant.", 0) == 0) {
      std::string rest = key.substr(8);
      auto dot = rest.find('.');
      if (dot == std::string::npos) {
        throw config_error("variant key must look like variant.<name>.<section.key>");
      }
      std::string name = rest.substr(0, dot);
      std::string subkey = rest.substr(dot + 1);
      auto it = std::find_if(variant_entries.begin(), variant_entries.end(),
                             [&](const auto& v) { return v.first == name; });
      if (it == variant_entries.end()) {
        variant_entries.push_back({name, {{subkey, value}}});
      } else {
        it->second.emplace_back(subkey, value);
      }
    } else {
      apply_config_entry(matrix.base, key, value);
    }
  }
  if (variant_entries.empty()) {
    matrix.variants.emplace_back("base", matrix.base);
  }
  for (const auto& [name, entries] : variant_entries) {
    RunConfig variant = matrix.base;
    for (const auto& [key, value] : entries) apply_config_entry(variant, key, value);
    matrix.variants.emplace_back(name, variant);
  }
  return matrix;
}

}  // namespace kernelseg
