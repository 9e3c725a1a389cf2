#include "kernelseg/scene_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace kernelseg {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr char kMagic[8] = {'D', 'K', 'S', 'I', 'M', '0', '0', '1'};

void write_u32(std::ostream& out, uint32_t v) {
  unsigned char bytes[4] = {static_cast<unsigned char>(v & 0xff),
                            static_cast<unsigned char>((v >> 8) & 0xff),
                            static_cast<unsigned char>((v >> 16) & 0xff),
                            static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

uint32_t read_u32(std::istream& in) {
  unsigned char bytes[4];
  in.read(reinterpret_cast<char*>(bytes), 4);
  return static_cast<uint32_t>(bytes[0]) | (static_cast<uint32_t>(bytes[1]) << 8) |
         (static_cast<uint32_t>(bytes[2]) << 16) | (static_cast<uint32_t>(bytes[3]) << 24);
}

void write_f32_block(std::ostream& out, const MatX& m) {
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      float v = static_cast<float>(m(i, j));
      out.write(reinterpret_cast<const char*>(&v), 4);
    }
  }
}

MatX read_f32_block(std::istream& in, int rows, int cols) {
  MatX m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      float v;
      in.read(reinterpret_cast<char*>(&v), 4);
      m(i, j) = v;
    }
  }
  return m;
}

}  // namespace

void write_ply(const fs::path& file, const MatX& positions, const MatX& colors) {
  std::ofstream out(file);
  if (!out) throw io_error("cannot write " + file.string());
  const int n = static_cast<int>(positions.rows());
  out << "ply\nformat ascii 1.0\nelement vertex " << n << "\n";
  out << "property float x\nproperty float y\nproperty float z\n";
  out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "end_header\n";
  char line[160];
  for (int i = 0; i < n; ++i) {
    int r = 128, g = 128, b = 128;
    if (colors.rows() == positions.rows()) {
      r = static_cast<int>(std::lround(std::clamp(colors(i, 0), 0.0, 1.0) * 255));
      g = static_cast<int>(std::lround(std::clamp(colors(i, 1), 0.0, 1.0) * 255));
      b = static_cast<int>(std::lround(std::clamp(colors(i, 2), 0.0, 1.0) * 255));
    }
    std::snprintf(line, sizeof(line), "%.9g %.9g %.9g %d %d %d\n",
                  static_cast<float>(positions(i, 0)), static_cast<float>(positions(i, 1)),
                  static_cast<float>(positions(i, 2)), r, g, b);
    out << line;
  }
}

PlyData read_ply(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw io_error("cannot read " + file.string());
  std::string token;
  int n = -1;
  std::string line;
  bool header_done = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    ls >> token;
    if (token == "element") {
      std::string what;
      ls >> what >> n;
      if (what != "vertex") throw io_error(file.string() + ": unsupported PLY element");
    } else if (token == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt != "ascii") throw io_error(file.string() + ": only ASCII PLY supported");
    } else if (token == "end_header") {
      header_done = true;
      break;
    }
  }
  if (!header_done || n < 0) throw io_error(file.string() + ": malformed PLY header");

  PlyData data;
  data.positions.resize(n, 3);
  data.colors.resize(n, 3);
  for (int i = 0; i < n; ++i) {
    double x, y, z;
    int r, g, b;
    if (!(in >> x >> y >> z >> r >> g >> b)) {
      throw io_error(file.string() + ": truncated PLY body");
    }
    data.positions.row(i) << x, y, z;
    data.colors.row(i) << r / 255.0, g / 255.0, b / 255.0;
  }
  return data;
}

void save_scene(const fs::path& dir, const SyntheticScene& scene) {
  fs::create_directories(dir);
  write_ply(dir / "cloud.ply", scene.cloud.positions, scene.cloud.colors);

  json j;
  j["instance_ids"] = scene.instance_ids;
  j["semantic_labels"] = scene.semantic_labels;
  j["num_classes"] = scene.num_classes;
  json instances = json::array();
  for (const auto& rec : scene.instances) {
    json r;
    r["id"] = rec.id;
    r["class"] = rec.semantic_class;
    r["centroid"] = {rec.centroid.x(), rec.centroid.y(), rec.centroid.z()};
    r["aabb"] = {{"min", {rec.aabb_min.x(), rec.aabb_min.y(), rec.aabb_min.z()}},
                 {"max", {rec.aabb_max.x(), rec.aabb_max.y(), rec.aabb_max.z()}}};
    instances.push_back(r);
  }
  j["instances"] = instances;
  std::ofstream out(dir / "labels.json");
  if (!out) throw io_error("cannot write " + (dir / "labels.json").string());
  out << j.dump(2) << "\n";
}

SyntheticScene load_scene(const fs::path& dir) {
  PlyData ply = read_ply(dir / "cloud.ply");

  std::ifstream in(dir / "labels.json");
  if (!in) throw io_error("cannot read " + (dir / "labels.json").string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw io_error((dir / "labels.json").string() + ": " + e.what());
  }

  SyntheticScene scene;
  scene.cloud.positions = std::move(ply.positions);
  scene.cloud.colors = std::move(ply.colors);
  try {
    scene.instance_ids = j.at("instance_ids").get<std::vector<int>>();
    scene.semantic_labels = j.at("semantic_labels").get<std::vector<int>>();
    scene.num_classes = j.at("num_classes").get<int>();
    for (const auto& r : j.at("instances")) {
      InstanceRecord rec;
      rec.id = r.at("id").get<int>();
      rec.semantic_class = r.at("class").get<int>();
      auto c = r.at("centroid");
      rec.centroid = Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>());
      auto lo = r.at("aabb").at("min");
      auto hi = r.at("aabb").at("max");
      rec.aabb_min = Vec3(lo[0].get<double>(), lo[1].get<double>(), lo[2].get<double>());
      rec.aabb_max = Vec3(hi[0].get<double>(), hi[1].get<double>(), hi[2].get<double>());
      rec.max_side = (rec.aabb_max - rec.aabb_min).maxCoeff();
      scene.instances.push_back(rec);
    }
  } catch (const json::exception& e) {
    throw io_error((dir / "labels.json").string() + ": " + e.what());
  }

  if (scene.instance_ids.size() != static_cast<size_t>(scene.cloud.size()) ||
      scene.semantic_labels.size() != static_cast<size_t>(scene.cloud.size())) {
    throw io_error(dir.string() + ": label arrays do not match the point count");
  }
  return scene;
}

void save_predictions(const fs::path& file, const SimulatedPredictions& preds) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw io_error("cannot write " + file.string());
  out.write(kMagic, 8);
  write_u32(out, static_cast<uint32_t>(preds.point_features.rows()));
  write_u32(out, static_cast<uint32_t>(preds.point_features.cols()));
  write_u32(out, static_cast<uint32_t>(preds.semantic_scores.cols()));
  const char reserved[12] = {};
  out.write(reserved, 12);
  write_f32_block(out, preds.point_features);
  write_f32_block(out, preds.offsets);
  write_f32_block(out, preds.semantic_scores);
  write_f32_block(out, preds.heatmap);
}

SimulatedPredictions load_predictions(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw io_error("cannot read " + file.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kMagic, 8) != 0) {
    throw io_error(file.string() + ": bad magic");
  }
  uint32_t n = read_u32(in), d = read_u32(in), c = read_u32(in);
  char reserved[12];
  in.read(reserved, 12);
  SimulatedPredictions preds;
  preds.point_features = read_f32_block(in, n, d);
  preds.offsets = read_f32_block(in, n, 3);
  preds.semantic_scores = read_f32_block(in, n, c);
  MatX heat = read_f32_block(in, n, 1);
  preds.heatmap = heat.col(0);
  if (!in) throw io_error(file.string() + ": truncated prediction blocks");
  return preds;
}

Vec3 instance_color(int instance_id) {
  if (instance_id < 0) return Vec3::Constant(0.5);
  double hue = std::fmod(0.12 + 0.61803398875 * instance_id, 1.0) * 6.0;
  int band = static_cast<int>(hue);
  double f = hue - band;
  switch (band % 6) {
    case 0: return {1.0, f, 0.15};
    case 1: return {1.0 - f, 1.0, 0.15};
    case 2: return {0.15, 1.0, f};
    case 3: return {0.15, 1.0 - f, 1.0};
    case 4: return {f, 0.15, 1.0};
    default: return {1.0, 0.15, 1.0 - f};
  }
}

}  // namespace kernelseg
