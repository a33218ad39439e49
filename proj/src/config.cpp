#include "mac/io.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "mac/errors.hpp"
#include "mac/experiments.hpp"

namespace mac {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.is_null()) return "";
  return fmt::format(" (line {})", mark.line + 1);
}

void reject_unknown_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.contains(key)) {
      throw ConfigError(prefix + key, fmt::format("unknown key '{}{}'{}", prefix, key, where(kv.first)));
    }
  }
}

template <class T>
T read_value(const YAML::Node& parent, const std::string& key, const std::string& path) {
  const YAML::Node node = parent[key];
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path, fmt::format("'{}' has an invalid value{}", path, where(node)));
  }
}

template <class T>
T require(const YAML::Node& parent, const std::string& key, const std::string& path) {
  if (!parent[key]) throw ConfigError(path, fmt::format("missing required key '{}'", path));
  return read_value<T>(parent, key, path);
}

}  // namespace

std::vector<ConfigNotice> validate_config(const SimConfig& c) {
  auto fail = [](const char* field, std::string msg) { throw ConfigError(field, std::move(msg)); };
  if (c.grid.d < 1 || c.grid.d > 3) fail("grid.d", fmt::format("grid.d must be 1, 2 or 3 (got {})", c.grid.d));
  if (c.grid.n < 1) fail("grid.n", fmt::format("grid.n must be >= 1 (got {})", c.grid.n));
  if (c.m < 2 || c.m > kMaxMatrixDim) fail("m", fmt::format("m must be in [2, {}] (got {})", kMaxMatrixDim, c.m));
  if (!(c.epsilon > 0.0) || !std::isfinite(c.epsilon)) fail("epsilon", "epsilon must be positive");
  if (!(c.kappa > 0.0) || !std::isfinite(c.kappa)) fail("kappa", "kappa must be positive");
  if (!(c.tau > 0.0) || !std::isfinite(c.tau)) fail("tau", "tau must be positive");
  if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) fail("t_end", "t_end must be non-negative");
  if (c.monitor_stride < 1) fail("monitor_stride", "monitor_stride must be >= 1");
  for (double t : c.snapshot_times) {
    if (!(t >= 0.0) || t > c.t_end) {
      fail("snapshot_times", fmt::format("snapshot time {} outside [0, t_end = {}]", t, c.t_end));
    }
  }
  const ExampleInfo* info = nullptr;
  try {
    info = &find_example(c.initial_condition.name);
  } catch (const std::invalid_argument& e) {
    fail("initial_condition.name", e.what());
  }
  if (info->d != c.grid.d || info->m != c.m) {
    fail("initial_condition.name", fmt::format("{} needs d = {}, m = {} (config has d = {}, m = {})", info->name,
                                               info->d, info->m, c.grid.d, c.m));
  }
  for (const auto& [key, value] : c.initial_condition.params) {
    if (!info->params.contains(key)) {
      fail("initial_condition.params", fmt::format("{} has no parameter '{}'", info->name, key));
    }
    if (key == "r" && !(value > 0.0)) fail("initial_condition.params", "r must be positive");
  }

  std::vector<ConfigNotice> notices;
  const double mbp = mbp_kappa_threshold(c.m);
  const double energy = energy_kappa_threshold(c.m);
  if (c.kappa < mbp) {
    notices.push_back({"kappa", fmt::format("kappa = {} is below max(3m/2 - 1, 2) = {}; the maximum bound "
                                            "principle hypothesis is not met",
                                            c.kappa, mbp)});
  }
  if (c.kappa < energy) {
    notices.push_back({"kappa", fmt::format("kappa = {} is below 3m - 1 = {}; the energy dissipation "
                                            "hypothesis is not met",
                                            c.kappa, energy)});
  }
  return notices;
}

ParsedConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("", fmt::format("config parse error at line {}, column {}: {}", e.mark.line + 1,
                                      e.mark.column + 1, e.msg));
  }
  if (!root.IsMap()) throw ConfigError("", "config must be a mapping of keys to values");
  reject_unknown_keys(root,
                      {"grid", "m", "epsilon", "kappa", "tau", "t_end", "scheme", "initial_condition",
                       "monitor_stride", "snapshot_times", "output_dir"},
                      "");

  SimConfig c;
  const YAML::Node grid = root["grid"];
  if (!grid || !grid.IsMap()) throw ConfigError("grid", "missing required mapping 'grid' with key 'n'");
  reject_unknown_keys(grid, {"d", "n"}, "grid.");
  c.m = require<int>(root, "m", "m");
  c.grid.n = require<int>(grid, "n", "grid.n");
  c.grid.d = grid["d"] ? read_value<int>(grid, "d", "grid.d") : c.m;
  c.epsilon = require<double>(root, "epsilon", "epsilon");
  c.kappa = require<double>(root, "kappa", "kappa");
  c.tau = require<double>(root, "tau", "tau");
  c.t_end = require<double>(root, "t_end", "t_end");
  try {
    c.scheme = parse_scheme(require<std::string>(root, "scheme", "scheme"));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("scheme", e.what());
  }

  const YAML::Node ic = root["initial_condition"];
  if (!ic || !ic.IsMap()) throw ConfigError("initial_condition", "missing required mapping 'initial_condition'");
  reject_unknown_keys(ic, {"name", "params"}, "initial_condition.");
  c.initial_condition.name = require<std::string>(ic, "name", "initial_condition.name");
  if (const YAML::Node params = ic["params"]; params && !params.IsNull()) {
    if (!params.IsMap()) throw ConfigError("initial_condition.params", "initial_condition.params must be a mapping");
    for (const auto& kv : params) {
      const auto key = kv.first.as<std::string>();
      c.initial_condition.params[key] = read_value<double>(params, key, "initial_condition.params." + key);
    }
  }

  c.monitor_stride = root["monitor_stride"] ? read_value<int>(root, "monitor_stride", "monitor_stride") : 1;
  if (root["snapshot_times"]) {
    c.snapshot_times = read_value<std::vector<double>>(root, "snapshot_times", "snapshot_times");
  } else {
    c.snapshot_times = {0.0, c.t_end};
  }
  if (root["output_dir"]) c.output_dir = read_value<std::string>(root, "output_dir", "output_dir");

  ParsedConfig parsed{c, validate_config(c)};
  return parsed;
}

ParsedConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string(), fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const SimConfig& c) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << YAML::BeginMap;
  out << YAML::Key << "grid" << YAML::Value << YAML::BeginMap << YAML::Key << "d" << YAML::Value << c.grid.d
      << YAML::Key << "n" << YAML::Value << c.grid.n << YAML::EndMap;
  out << YAML::Key << "m" << YAML::Value << c.m;
  out << YAML::Key << "epsilon" << YAML::Value << c.epsilon;
  out << YAML::Key << "kappa" << YAML::Value << c.kappa;
  out << YAML::Key << "tau" << YAML::Value << c.tau;
  out << YAML::Key << "t_end" << YAML::Value << c.t_end;
  out << YAML::Key << "scheme" << YAML::Value << std::string(to_string(c.scheme));
  out << YAML::Key << "initial_condition" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << c.initial_condition.name;
  if (!c.initial_condition.params.empty()) {
    out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
    for (const auto& [k, v] : c.initial_condition.params) out << YAML::Key << k << YAML::Value << v;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  out << YAML::Key << "monitor_stride" << YAML::Value << c.monitor_stride;
  out << YAML::Key << "snapshot_times" << YAML::Value << YAML::Flow << c.snapshot_times;
  out << YAML::Key << "output_dir" << YAML::Value << c.output_dir.string();
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace mac
