#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "knnb/simulator.hpp"

namespace knnb {

// Validation failure carrying the config field path ("policy.theta", ...).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& what)
      : std::runtime_error(path + ": " + what), path_(std::move(path)) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct OutputSpec {
  std::string dir = "out";
  bool csv = true;
  bool json = true;
};

struct ConfigFile {
  RunConfig run;
  OutputSpec output;
};

// Strict parse: unknown keys are rejected with their field path, and every
// numeric constraint of the owning modules is re-checked here.
ConfigFile parse_config(const nlohmann::json& j);

ConfigFile load_config(const std::string& path);  // throws ConfigError / runtime_error

// The fully resolved run parameters (defaults filled in), suitable for
// embedding into summary.json. Output location is deliberately left out so
// emitted bytes do not depend on where results are written.
nlohmann::ordered_json resolved_config_json(const RunConfig& run);

}  // namespace knnb
