#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "knnb/concentration.hpp"
#include "knnb/config.hpp"
#include "knnb/simulator.hpp"

namespace knnb {

inline constexpr std::string_view kArtifactName = "knnbandit";
inline constexpr std::string_view kArtifactVersion = "0.1.0";

// Locale-independent, 17-significant-digit rendering; the fixed float
// format of every CSV/JSON emitted by the tool.
std::string format_double(double v);

// rounds_<rep>.csv — columns, order and formatting are fixed
std::string rounds_csv(std::span<const RoundRecord> rounds);

struct SweepRow {
  std::int64_t horizon = 0;
  std::string policy;
  double mean_regret = 0.0;
  double std_error = 0.0;
  double mean_pseudo_regret = 0.0;
};

std::string sweep_csv(std::span<const SweepRow> rows);

// summary.json — resolved config, artifact version, seed derivation,
// per-replication finals, aggregates, and trajectory checkpoints
nlohmann::ordered_json summary_json(const RunConfig& run, const RunSummary& summary);

nlohmann::ordered_json concentration_json(std::span<const ViolationReport> reports);

}  // namespace knnb
