#include "cbol/synthetic_assets.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "json.hpp"

using nlohmann::json;

namespace cbol {

namespace {

std::string checksum_tag(std::string_view bytes) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(bytes)));
  return buf;
}

json vec_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json mat_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_json(m.row(i).transpose()));
  return rows;
}

Eigen::VectorXd json_vec(const json& a, Eigen::Index expected, const char* what) {
  if (!a.is_array() || (expected >= 0 && static_cast<Eigen::Index>(a.size()) != expected)) {
    throw AssetError(std::string("asset field '") + what + "' has the wrong length");
  }
  Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
  return v;
}

Eigen::MatrixXd json_mat(const json& a, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!a.is_array() || static_cast<Eigen::Index>(a.size()) != rows) {
    throw AssetError(std::string("asset field '") + what + "' has the wrong row count");
  }
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) m.row(i) = json_vec(a[static_cast<std::size_t>(i)], cols, what).transpose();
  return m;
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_versioned_json(const std::filesystem::path& path, std::string_view kind, std::string_view payload_json) {
  const json payload = json::parse(payload_json);
  json doc;
  doc["kind"] = std::string(kind);
  doc["schema_version"] = kAssetSchemaVersion;
  doc["checksum"] = checksum_tag(payload.dump());
  doc["payload"] = payload;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(1) << '\n';
}

std::string read_versioned_json(const std::filesystem::path& path, std::string_view kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw AssetError("cannot open asset file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw AssetError("asset file " + path.string() + " is not valid JSON: " + e.what());
  }
  if (!doc.is_object() || doc.value("kind", "") != kind) {
    throw AssetError("asset file " + path.string() + " is not a " + std::string(kind) + " file");
  }
  if (doc.value("schema_version", -1) != kAssetSchemaVersion) {
    throw AssetError("asset file " + path.string() + " has unsupported schema version");
  }
  if (!doc.contains("payload")) throw AssetError("asset file " + path.string() + " has no payload");
  const std::string payload = doc["payload"].dump();
  if (doc.value("checksum", "") != checksum_tag(payload)) {
    throw AssetError("asset file " + path.string() + " failed checksum verification");
  }
  return payload;
}

void save_synthetic_constants(const SyntheticConstants& c, const std::filesystem::path& path) {
  json p;
  p["seed"] = c.seed;
  p["grid"] = c.grid;
  p["frame"] = c.frame;
  p["transition"] = mat_json(c.transition);
  p["bias"] = vec_json(c.bias);
  p["estimator_map"] = mat_json(c.estimator_map);
  json blobs = json::array();
  for (const auto& b : c.blob_maps) {
    blobs.push_back({b.center_x0, b.center_x_gain, b.center_y0, b.center_y_gain, b.log_width_x0, b.log_width_x_gain,
                     b.log_width_y0, b.log_width_y_gain});
  }
  p["blob_maps"] = blobs;
  p["projection_mass"] = c.projection_mass;
  p["frame_gain"] = mat_json(c.frame_gain);
  p["pattern"] = mat_json(c.pattern);
  json trans = json::array();
  for (const auto& t : c.transmission) {
    trans.push_back({{"curvature", t.curvature},
                     {"center", t.center},
                     {"bump_height", t.bump_height},
                     {"bump_center", t.bump_center},
                     {"bump_width", t.bump_width},
                     {"offset", t.offset}});
  }
  p["transmission"] = trans;
  p["bounds"] = {{"lower", vec_json(c.bounds.lower)}, {"upper", vec_json(c.bounds.upper)}};
  p["manifold"] = {{"center", vec_json(c.manifold_center)}, {"radius", c.manifold_radius}};
  p["classifier"] = {{"tau", c.tau},
                     {"prototype_center", mat_json(c.prototype_center)},
                     {"prototype_scale", mat_json(c.prototype_scale)}};
  p["reference_intensity"] = c.reference_intensity;
  write_versioned_json(path, kSystemAssetKind, p.dump());
}

SyntheticConstants load_synthetic_constants(const std::filesystem::path& path) {
  const json p = json::parse(read_versioned_json(path, kSystemAssetKind));
  SyntheticConstants c;
  try {
    c.seed = p.at("seed").get<std::uint64_t>();
    c.grid = p.at("grid").get<int>();
    c.frame = p.at("frame").get<int>();
    c.transition = json_mat(p.at("transition"), kLatentDim, kLatentDim, "transition");
    c.bias = json_vec(p.at("bias"), kLatentDim, "bias");
    c.estimator_map = json_mat(p.at("estimator_map"), kLatentDim, kLatentDim, "estimator_map");
    const json& blobs = p.at("blob_maps");
    if (blobs.size() != static_cast<std::size_t>(kModules * kProjections)) throw AssetError("blob_maps has wrong length");
    c.blob_maps.clear();
    for (const auto& b : blobs) {
      const Eigen::VectorXd v = json_vec(b, 8, "blob_maps");
      c.blob_maps.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]});
    }
    const Eigen::VectorXd mass = json_vec(p.at("projection_mass"), kProjections, "projection_mass");
    for (int k = 0; k < kProjections; ++k) c.projection_mass[static_cast<std::size_t>(k)] = mass[k];
    c.frame_gain = json_mat(p.at("frame_gain"), kModules, kFrameSegments, "frame_gain");
    c.pattern = json_mat(p.at("pattern"), kModules, 2, "pattern");
    const json& trans = p.at("transmission");
    if (trans.size() != kLatentDim) throw AssetError("transmission has wrong length");
    for (int d = 0; d < kLatentDim; ++d) {
      const json& t = trans[static_cast<std::size_t>(d)];
      auto& out = c.transmission[static_cast<std::size_t>(d)];
      out.curvature = t.at("curvature").get<double>();
      out.center = t.at("center").get<double>();
      out.bump_height = t.at("bump_height").get<double>();
      out.bump_center = t.at("bump_center").get<double>();
      out.bump_width = t.at("bump_width").get<double>();
      out.offset = t.at("offset").get<double>();
    }
    c.bounds = BoundsBox(json_vec(p.at("bounds").at("lower"), kLatentDim, "bounds.lower"),
                         json_vec(p.at("bounds").at("upper"), kLatentDim, "bounds.upper"));
    c.manifold_center = json_vec(p.at("manifold").at("center"), kLatentDim, "manifold.center");
    c.manifold_radius = p.at("manifold").at("radius").get<double>();
    const json& cls = p.at("classifier");
    c.tau = cls.at("tau").get<double>();
    c.prototype_center = json_mat(cls.at("prototype_center"), kModules, kFeatureCount, "prototype_center");
    c.prototype_scale = json_mat(cls.at("prototype_scale"), kModules, kFeatureCount, "prototype_scale");
    c.reference_intensity = p.at("reference_intensity").get<double>();
  } catch (const json::exception& e) {
    throw AssetError("asset file " + path.string() + " does not match the schema: " + e.what());
  }
  return c;
}

std::filesystem::path default_asset_dir() {
  if (const char* env = std::getenv("CBOL_ASSET_DIR"); env != nullptr && *env != '\0') return env;
  return CBOL_DEFAULT_ASSET_DIR;
}

std::filesystem::path default_system_asset() { return default_asset_dir() / "synthetic_system.json"; }
std::filesystem::path default_oracle_asset() { return default_asset_dir() / "oracle.json"; }

std::shared_ptr<const SyntheticSystem> load_synthetic_system(const std::filesystem::path& path) {
  return std::make_shared<const SyntheticSystem>(load_synthetic_constants(path));
}

}  // namespace cbol
