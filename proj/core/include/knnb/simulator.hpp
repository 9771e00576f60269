#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnb/env.hpp"
#include "knnb/policies.hpp"

namespace knnb {

struct RunConfig {
  EnvironmentSpec env;
  PolicySpec policy;
  std::int64_t horizon = 1000;
  std::uint64_t master_seed = 0;
  int replications = 1;
  std::int64_t record_every = 1;  // stride of emitted round records
  int threads = 0;                // 0 = hardware concurrency

  // throws std::invalid_argument before any round runs
  void validate() const;
};

// Decision trace of one recorded round. Cumulative sums are carried exactly
// across strided records; realized regret may dip below zero round to round
// while pseudo-regret never decreases.
struct RoundRecord {
  std::int64_t t = 0;
  int chosen_arm = 0;
  int k_chosen = 0;  // prefix size used by the chosen arm; 0 in the init phase
  double reward = 0.0;
  int oracle_arm = 0;
  double oracle_reward = 0.0;
  double regret = 0.0;         // instantaneous, realized
  double pseudo_regret = 0.0;  // instantaneous, mean-field
  double cum_regret = 0.0;
  double cum_pseudo_regret = 0.0;
};

struct ReplicationOutcome {
  int replication = 0;
  double final_regret = 0.0;
  double final_pseudo_regret = 0.0;
  std::vector<RoundRecord> rounds;  // strided; always includes t = horizon
};

struct RunSummary {
  std::vector<double> final_regret;         // per replication
  std::vector<double> final_pseudo_regret;  // per replication
  double mean_regret = 0.0;
  double stderr_regret = 0.0;
  double mean_pseudo_regret = 0.0;
  double stderr_pseudo_regret = 0.0;
  // trajectory checkpoints averaged across replications at the record stride
  std::vector<std::int64_t> checkpoint_t;
  std::vector<double> checkpoint_mean_regret;
  std::vector<double> checkpoint_mean_pseudo_regret;
};

// Rng stream ids used by replication r: 2r feeds the environment,
// 2r+1 feeds the policy. Fixed so runs reproduce byte-identically no matter
// how replications are scheduled.
inline constexpr std::uint64_t env_stream_id(int replication) {
  return 2 * static_cast<std::uint64_t>(replication);
}
inline constexpr std::uint64_t policy_stream_id(int replication) {
  return 2 * static_cast<std::uint64_t>(replication) + 1;
}

// One sequential pass of the interaction protocol. The policy is updated
// with the chosen arm's reward only; counterfactual rewards feed the regret
// accounting and never reach the policy.
ReplicationOutcome run_once(const RunConfig& config, int replication);

// All replications, parallel over independent streams, ordered by index.
std::vector<ReplicationOutcome> run_all(const RunConfig& config);

RunSummary summarize(std::span<const ReplicationOutcome> outcomes);

inline RunSummary run_replicated(const RunConfig& config) {
  const std::vector<ReplicationOutcome> outs = run_all(config);
  return summarize(outs);
}

}  // namespace knnb
