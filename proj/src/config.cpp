#include "cbol/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

namespace cbol {

namespace {

[[noreturn]] void fail(const std::string& source, const std::string& msg) {
  throw ConfigError(source + ": " + msg);
}

void reject_unknown(const toml::table& t, const std::set<std::string>& known, const std::string& where,
                    const std::string& source) {
  for (const auto& [key, _] : t) {
    if (!known.count(std::string(key.str()))) fail(source, "unknown key '" + std::string(key.str()) + "' in " + where);
  }
}

double number(const toml::node& n, const std::string& key, const std::string& source) {
  if (auto v = n.value<double>()) return *v;
  fail(source, "'" + key + "' must be a number");
}

std::int64_t integer(const toml::node& n, const std::string& key, const std::string& source) {
  if (auto v = n.as_integer()) return v->get();
  fail(source, "'" + key + "' must be an integer");
}

Eigen::VectorXd number_array(const toml::node& n, std::size_t len, const std::string& key, const std::string& source) {
  const toml::array* a = n.as_array();
  if (!a || a->size() != len) fail(source, "'" + key + "' must be an array of " + std::to_string(len) + " numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(len));
  for (std::size_t i = 0; i < len; ++i) v[static_cast<Eigen::Index>(i)] = number((*a)[i], key, source);
  return v;
}

const toml::table* section(const toml::table& root, const char* name, const std::string& source) {
  const toml::node* n = root.get(name);
  if (!n) return nullptr;
  if (!n->is_table()) fail(source, std::string("'") + name + "' must be a table");
  return n->as_table();
}

}  // namespace

BaselineConfig AppConfig::baseline() const {
  BaselineConfig b = gradient;
  b.iterations = tuner.iterations;
  b.runs = tuner.runs;
  b.bounds = tuner.bounds;
  b.weights = tuner.weights;
  b.seed = tuner.seed;
  return b;
}

AppConfig parse_config(const std::string& toml_text, const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(toml_text, source);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << e.description() << " at line " << e.source().begin.line;
    fail(source, os.str());
  }
  reject_unknown(root, {"bounds", "tuner", "system", "objective"}, "the top level", source);

  AppConfig cfg;
  if (const toml::table* b = section(root, "bounds", source)) {
    reject_unknown(*b, {"lower", "upper"}, "[bounds]", source);
    Eigen::VectorXd lo = cfg.tuner.bounds.lower;
    Eigen::VectorXd hi = cfg.tuner.bounds.upper;
    if (const toml::node* n = b->get("lower")) lo = number_array(*n, kLatentDim, "bounds.lower", source);
    if (const toml::node* n = b->get("upper")) hi = number_array(*n, kLatentDim, "bounds.upper", source);
    try {
      cfg.tuner.bounds = BoundsBox(lo, hi);
    } catch (const std::exception& e) {
      fail(source, e.what());
    }
  }

  if (const toml::table* t = section(root, "tuner", source)) {
    reject_unknown(*t,
                   {"iterations", "runs", "xi", "seed", "candidate_count", "refine_steps", "initial_design",
                    "step_size", "fd_epsilon", "adam_beta1", "adam_beta2", "adam_eps"},
                   "[tuner]", source);
    for (const auto& [k, node] : *t) {
      const std::string key(k.str());
      if (key == "iterations") cfg.tuner.iterations = static_cast<int>(integer(node, key, source));
      else if (key == "runs") cfg.tuner.runs = static_cast<int>(integer(node, key, source));
      else if (key == "xi") cfg.tuner.xi = number(node, key, source);
      else if (key == "seed") {
        const std::int64_t s = integer(node, key, source);
        if (s < 0) fail(source, "'seed' must be non-negative");
        cfg.tuner.seed = static_cast<std::uint64_t>(s);
      }
      else if (key == "candidate_count") cfg.tuner.candidate_count = static_cast<int>(integer(node, key, source));
      else if (key == "refine_steps") cfg.tuner.refine_steps = static_cast<int>(integer(node, key, source));
      else if (key == "initial_design") cfg.tuner.initial_design = static_cast<int>(integer(node, key, source));
      else if (key == "step_size") cfg.gradient.step_size = number(node, key, source);
      else if (key == "fd_epsilon") cfg.gradient.fd_epsilon = number(node, key, source);
      else if (key == "adam_beta1") cfg.gradient.adam_beta1 = number(node, key, source);
      else if (key == "adam_beta2") cfg.gradient.adam_beta2 = number(node, key, source);
      else if (key == "adam_eps") cfg.gradient.adam_eps = number(node, key, source);
    }
  }

  if (const toml::table* s = section(root, "system", source)) {
    reject_unknown(*s, {"asset_file"}, "[system]", source);
    if (const toml::node* n = s->get("asset_file")) {
      auto v = n->value<std::string>();
      if (!v) fail(source, "'asset_file' must be a string");
      cfg.asset_file = *v;
    }
  }

  if (const toml::table* o = section(root, "objective", source)) {
    reject_unknown(*o, {"weights"}, "[objective]", source);
    if (const toml::node* n = o->get("weights")) {
      if (auto name = n->value<std::string>()) {
        if (*name == "step") cfg.tuner.weights = Weights::step();
        else if (*name == "uniform") cfg.tuner.weights = Weights::uniform();
        else fail(source, "'weights' must be \"step\", \"uniform\" or an array of 48 numbers");
      } else {
        try {
          cfg.tuner.weights = Weights{number_array(*n, kModules, "objective.weights", source)};
        } catch (const std::invalid_argument& e) {
          fail(source, e.what());
        }
      }
    }
  }

  try {
    cfg.tuner.validate();
    cfg.baseline().validate();
  } catch (const std::invalid_argument& e) {
    fail(source, e.what());
  }
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

}  // namespace cbol
