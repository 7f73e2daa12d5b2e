#include <filesystem>
#include <functional>
#include <fstream>
#include <sstream>

#include "cbol/reporting.hpp"
#include "cbol/synthetic_assets.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace cbol;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "cbol_test_assets";
  fs::create_directories(dir);
  return dir / name;
}

// Rewrite a field of the envelope (or payload) without fixing the checksum.
void edit(const fs::path& from, const fs::path& to, const std::function<void(nlohmann::json&)>& f) {
  nlohmann::json doc = nlohmann::json::parse(slurp(from));
  f(doc);
  spit(to, doc.dump(1));
}

}  // namespace

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("committed system asset loads and re-saves byte for byte") {
  const fs::path committed = default_system_asset();
  const nlohmann::json doc = nlohmann::json::parse(slurp(committed));
  CHECK(doc.at("kind") == "cbol.synthetic_system");
  CHECK(doc.at("schema_version") == 1);
  CHECK(doc.at("checksum").get<std::string>().rfind("fnv1a64:", 0) == 0);

  const SyntheticConstants c = load_synthetic_constants(committed);
  CHECK(c.tau > 0.0);
  CHECK(c.prototype_center.rows() == kModules);
  const fs::path copy = scratch("system.json");
  save_synthetic_constants(c, copy);
  CHECK(slurp(copy) == slurp(committed));
}

TEST_CASE("committed assets regenerate from seed 42") {
  SyntheticConstants c = generate_synthetic_constants(42);
  const CalibrationReport rep = calibrate(c);
  CHECK(rep.agreement >= 0.99);
  const fs::path fresh = scratch("regen.json");
  save_synthetic_constants(c, fresh);
  CHECK(slurp(fresh) == slurp(default_system_asset()));
}

TEST_CASE("committed oracle file") {
  const OracleResult o = load_oracle(default_oracle_asset());
  CHECK(o.resolution == 10000);
  const fs::path copy = scratch("oracle.json");
  save_oracle(o, copy);
  CHECK(slurp(copy) == slurp(default_oracle_asset()));
}

TEST_CASE("loaders reject tampered, mislabelled or malformed files") {
  const fs::path oracle = default_oracle_asset();
  const fs::path bad = scratch("bad.json");

  edit(oracle, bad, [](nlohmann::json& d) { d["payload"]["l_star"] = d["payload"]["l_star"].get<double>() + 1e-9; });
  CHECK_THROWS_AS(load_oracle(bad), AssetError);

  edit(oracle, bad, [](nlohmann::json& d) { d["schema_version"] = 2; });
  CHECK_THROWS_AS(load_oracle(bad), AssetError);

  edit(oracle, bad, [](nlohmann::json& d) { d.erase("checksum"); });
  CHECK_THROWS_AS(load_oracle(bad), AssetError);

  CHECK_THROWS_AS(load_oracle(default_system_asset()), AssetError);
  CHECK_THROWS_AS(load_synthetic_constants(oracle), AssetError);

  spit(bad, "{not json");
  CHECK_THROWS_AS(load_oracle(bad), AssetError);
  CHECK_THROWS_AS(load_oracle(scratch("missing.json")), AssetError);

  // A valid envelope around the wrong payload shape.
  write_versioned_json(bad, kOracleAssetKind, R"({"z_star":[0,0],"l_star":0.1,"resolution":3})");
  CHECK_THROWS_AS(load_oracle(bad), AssetError);
  write_versioned_json(bad, kSystemAssetKind, R"({"seed":1})");
  CHECK_THROWS_AS(load_synthetic_constants(bad), AssetError);
}

TEST_CASE("envelope round trip") {
  const fs::path p = scratch("env.json");
  write_versioned_json(p, "cbol.test", R"({"b":[1.5,2],"a":"x"})");
  CHECK(read_versioned_json(p, "cbol.test") == R"({"a":"x","b":[1.5,2]})");
  CHECK_THROWS_AS(read_versioned_json(p, "cbol.other"), AssetError);
}
