#include "knnb/config.hpp"

#include <fstream>
#include <initializer_list>
#include <string_view>

namespace knnb {

namespace {

using nlohmann::json;

std::string join(std::string_view parent, std::string_view key) {
  if (parent.empty()) return std::string(key);
  return std::string(parent) + "." + std::string(key);
}

void require_object(const json& j, std::string_view path) {
  if (!j.is_object()) throw ConfigError(std::string(path), "expected an object");
}

void reject_unknown(const json& obj, std::string_view path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (std::string_view a : allowed)
      if (key == a) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(join(path, key), "unknown key");
  }
}

template <typename T>
T get_number(const json& obj, std::string_view path, std::string_view key, T fallback,
             bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(join(path, key), "missing required key");
    return fallback;
  }
  const json& v = obj.at(std::string(key));
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(join(path, key), "expected a number");
  } else {
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw ConfigError(join(path, key), "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw ConfigError(join(path, key), "expected a nonnegative integer");
    }
  }
  return v.get<T>();
}

std::string get_string(const json& obj, std::string_view path, std::string_view key,
                       std::string fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(join(path, key), "missing required key");
    return fallback;
  }
  const json& v = obj.at(std::string(key));
  if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
  return v.get<std::string>();
}

EnvironmentSpec parse_environment(const json& j) {
  require_object(j, "environment");
  reject_unknown(j, "environment", {"kind", "ambient_dim", "arms", "noise", "params"});

  EnvironmentSpec env;
  const std::string kind = get_string(j, "environment", "kind", "", true);
  if (kind == "flip_line")
    env.kind = EnvKind::FlipLine;
  else if (kind == "bump_cube")
    env.kind = EnvKind::BumpCube;
  else if (kind == "embedded_circle")
    env.kind = EnvKind::EmbeddedCircle;
  else
    throw ConfigError("environment.kind",
                      "expected flip_line | bump_cube | embedded_circle");

  const int default_dim = env.kind == EnvKind::EmbeddedCircle ? 2 : 1;
  env.ambient_dim = get_number<int>(j, "environment", "ambient_dim", default_dim);
  env.arm_count = get_number<int>(j, "environment", "arms", 2);

  const std::string noise = get_string(j, "environment", "noise", "bernoulli");
  if (noise == "bernoulli")
    env.noise = NoiseKind::Bernoulli;
  else if (noise == "gaussian_unit")
    env.noise = NoiseKind::GaussianUnit;
  else
    throw ConfigError("environment.noise", "expected bernoulli | gaussian_unit");

  if (j.contains("params")) {
    const json& p = j.at("params");
    require_object(p, "environment.params");
    if (env.kind != EnvKind::BumpCube)
      throw ConfigError("environment.params", "only bump_cube takes parameters");
    reject_unknown(p, "environment.params", {"base", "height", "width"});
    env.bump.base = get_number<double>(p, "environment.params", "base", env.bump.base);
    env.bump.height =
        get_number<double>(p, "environment.params", "height", env.bump.height);
    env.bump.width =
        get_number<double>(p, "environment.params", "width", env.bump.width);
  }

  try {
    env.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("environment", e.what());
  }
  return env;
}

PhiSpec parse_phi(const json& j) {
  require_object(j, "policy.phi");
  reject_unknown(j, "policy.phi", {"kind", "scale"});
  PhiSpec phi;
  const std::string kind = get_string(j, "policy.phi", "kind", "", true);
  if (kind == "const")
    phi.kind = PhiKind::Const;
  else if (kind == "log_scaled")
    phi.kind = PhiKind::LogScaled;
  else
    throw ConfigError("policy.phi.kind", "expected const | log_scaled");
  phi.scale = get_number<double>(j, "policy.phi", "scale", 1.0);
  try {
    phi.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("policy.phi", e.what());
  }
  return phi;
}

PolicySpec parse_policy(const json& j) {
  require_object(j, "policy");
  reject_unknown(j, "policy", {"kind", "theta", "phi", "klucb_tol"});

  PolicySpec pol;
  const std::string kind = get_string(j, "policy", "kind", "", true);
  const auto parsed = policy_kind_from(kind);
  if (!parsed)
    throw ConfigError("policy.kind",
                      "expected knn_ucb | knn_klucb | cf_ucb | cf_klucb | uniform | oracle");
  pol.kind = *parsed;
  pol.theta = get_number<double>(j, "policy", "theta", default_theta(pol.kind));
  pol.klucb_tol = get_number<double>(j, "policy", "klucb_tol", 1e-9);
  if (j.contains("phi")) pol.phi = parse_phi(j.at("phi"));

  try {
    pol.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("policy", e.what());
  }
  return pol;
}

OutputSpec parse_output(const json& j) {
  require_object(j, "output");
  reject_unknown(j, "output", {"dir", "formats"});
  OutputSpec out;
  out.dir = get_string(j, "output", "dir", out.dir);
  if (j.contains("formats")) {
    const json& f = j.at("formats");
    if (!f.is_array()) throw ConfigError("output.formats", "expected an array");
    out.csv = false;
    out.json = false;
    for (const json& v : f) {
      if (!v.is_string()) throw ConfigError("output.formats", "expected strings");
      const std::string s = v.get<std::string>();
      if (s == "csv")
        out.csv = true;
      else if (s == "json")
        out.json = true;
      else
        throw ConfigError("output.formats", "expected csv | json");
    }
  }
  return out;
}

}  // namespace

ConfigFile parse_config(const nlohmann::json& j) {
  require_object(j, "");
  reject_unknown(j, "", {"environment", "policy", "horizon", "replications",
                         "master_seed", "record_every", "threads", "output"});
  if (!j.contains("environment")) throw ConfigError("environment", "missing required key");
  if (!j.contains("policy")) throw ConfigError("policy", "missing required key");

  ConfigFile cfg;
  cfg.run.env = parse_environment(j.at("environment"));
  cfg.run.policy = parse_policy(j.at("policy"));
  cfg.run.horizon = get_number<std::int64_t>(j, "", "horizon", 0, true);
  cfg.run.replications = get_number<int>(j, "", "replications", 1);
  cfg.run.master_seed = get_number<std::uint64_t>(j, "", "master_seed", 0);
  cfg.run.record_every = get_number<std::int64_t>(j, "", "record_every", 1);
  cfg.run.threads = get_number<int>(j, "", "threads", 0);
  if (j.contains("output")) cfg.output = parse_output(j.at("output"));

  try {
    cfg.run.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("config", e.what());
  }
  return cfg;
}

ConfigFile load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(j);
}

nlohmann::ordered_json resolved_config_json(const RunConfig& run) {
  nlohmann::ordered_json env{
      {"kind", to_string(run.env.kind)},
      {"ambient_dim", run.env.ambient_dim},
      {"arms", run.env.arm_count},
      {"noise", to_string(run.env.noise)},
  };
  if (run.env.kind == EnvKind::BumpCube)
    env["params"] = {{"base", run.env.bump.base},
                     {"height", run.env.bump.height},
                     {"width", run.env.bump.width}};

  nlohmann::ordered_json policy{
      {"kind", to_string(run.policy.kind)},
      {"theta", run.policy.theta},
      {"phi", {{"kind", to_string(run.policy.phi.kind)}, {"scale", run.policy.phi.scale}}},
      {"klucb_tol", run.policy.klucb_tol},
  };

  return nlohmann::ordered_json{
      {"environment", env},
      {"policy", policy},
      {"horizon", run.horizon},
      {"replications", run.replications},
      {"master_seed", run.master_seed},
      {"record_every", run.record_every},
  };
}

}  // namespace knnb
