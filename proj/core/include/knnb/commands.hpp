#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace knnb {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitChecksFailed = 1;  // concentration cells failed
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

// Output directory resolution order: --out flag, KNNB_OUTPUT_DIR, config.
std::string resolve_output_dir(const std::optional<std::string>& flag,
                               const std::string& from_config);

struct RunOptions {
  std::string config_path;
  std::optional<std::int64_t> horizon;  // overrides config
  std::optional<std::uint64_t> seed;
  std::optional<double> theta;
  std::optional<std::string> out_dir;
};

// Runs all replications and writes rounds_<rep>.csv plus summary.json.
int cmd_run(const RunOptions& opts, std::ostream& diag);

struct SweepOptions {
  std::string config_path;
  std::vector<std::int64_t> horizons;  // ascending
  std::vector<std::string> policies;   // empty = config's policy only
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
};

// One summary row per (horizon, policy) into sweep.csv.
int cmd_sweep(const SweepOptions& opts, std::ostream& diag);

struct ConcentrationOptions {
  std::string envelope = "gaussian";  // gaussian | bernoulli | quarter_square
  std::optional<double> xi_max;       // required for bernoulli
  std::optional<double> p;            // summand mean, defaults to xi_max
  std::int64_t n = 1000;
  std::vector<double> deltas;
  std::vector<std::string> schemes;  // empty = all four
  std::int64_t replications = 100000;
  std::uint64_t seed = 0;
  double coin_q = 0.5;
  std::optional<std::string> out_path;  // file; stdout when absent
};

// JSON array of violation reports; exit 0 iff every cell passes.
int cmd_concentration(const ConcentrationOptions& opts, std::ostream& out,
                      std::ostream& diag);

}  // namespace knnb
