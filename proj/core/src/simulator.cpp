#include "knnb/simulator.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace knnb {

void RunConfig::validate() const {
  env.validate();
  policy.validate();
  if (policy.uses_klucb() && env.noise == NoiseKind::GaussianUnit)
    throw std::invalid_argument("KL-UCB requires bounded rewards");
  if (horizon < env.arm_count)
    throw std::invalid_argument("horizon: must be >= the arm count");
  if (replications < 1) throw std::invalid_argument("replications: must be >= 1");
  if (record_every < 1) throw std::invalid_argument("record_every: must be >= 1");
  if (threads < 0) throw std::invalid_argument("threads: must be >= 0");
}

ReplicationOutcome run_once(const RunConfig& config, int replication) {
  config.validate();
  if (replication < 0 || replication >= config.replications)
    throw std::invalid_argument("run_once: replication index out of range");

  auto env = std::make_shared<const Environment>(config.env);
  std::unique_ptr<Policy> policy =
      make_policy(config.policy, env->arm_count(), env);
  Rng env_rng = Rng::stream(config.master_seed, env_stream_id(replication));
  Rng policy_rng = Rng::stream(config.master_seed, policy_stream_id(replication));

  ReplicationOutcome out;
  out.replication = replication;
  if (config.record_every <= config.horizon)
    out.rounds.reserve(static_cast<std::size_t>(config.horizon / config.record_every) + 1);

  double cum_regret = 0.0;
  double cum_pseudo = 0.0;
  for (std::int64_t t = 1; t <= config.horizon; ++t) {
    const Round round = env->sample_round(env_rng);
    const DecisionTrace trace = policy->decide(round.x, policy_rng);
    const int arm = trace.chosen_arm;
    const double reward = round.rewards[arm];
    policy->update(round.x, arm, reward);

    const double oracle_reward = round.rewards[round.oracle_arm];
    const double regret = oracle_reward - reward;
    const double pseudo = round.oracle_mean - env->mean(arm, round.x);
    cum_regret += regret;
    cum_pseudo += pseudo;

    if (t % config.record_every == 0 || t == config.horizon) {
      RoundRecord rec;
      rec.t = t;
      rec.chosen_arm = arm;
      rec.k_chosen = trace.arms.empty() ? 0 : trace.arms[arm].k;
      rec.reward = reward;
      rec.oracle_arm = round.oracle_arm;
      rec.oracle_reward = oracle_reward;
      rec.regret = regret;
      rec.pseudo_regret = pseudo;
      rec.cum_regret = cum_regret;
      rec.cum_pseudo_regret = cum_pseudo;
      out.rounds.push_back(rec);
    }
  }
  out.final_regret = cum_regret;
  out.final_pseudo_regret = cum_pseudo;
  return out;
}

std::vector<ReplicationOutcome> run_all(const RunConfig& config) {
  config.validate();
  const int reps = config.replications;
  std::vector<ReplicationOutcome> outs(reps);

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int workers = static_cast<int>(
      std::min<std::int64_t>(config.threads > 0 ? config.threads : hw, reps));

  if (workers <= 1) {
    for (int r = 0; r < reps; ++r) outs[r] = run_once(config, r);
    return outs;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int r = next.fetch_add(1);
        if (r >= reps) return;
        try {
          outs[r] = run_once(config, r);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return outs;
}

namespace {

void mean_stderr(std::span<const double> xs, double& mean, double& se) {
  const std::size_t n = xs.size();
  double sum = 0.0;
  for (double v : xs) sum += v;
  mean = sum / static_cast<double>(n);
  if (n < 2) {
    se = 0.0;
    return;
  }
  double ss = 0.0;
  for (double v : xs) ss += (v - mean) * (v - mean);
  se = std::sqrt(ss / static_cast<double>(n - 1)) / std::sqrt(static_cast<double>(n));
}

}  // namespace

RunSummary summarize(std::span<const ReplicationOutcome> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("summarize: no outcomes");
  RunSummary s;
  s.final_regret.reserve(outcomes.size());
  s.final_pseudo_regret.reserve(outcomes.size());
  for (const ReplicationOutcome& o : outcomes) {
    s.final_regret.push_back(o.final_regret);
    s.final_pseudo_regret.push_back(o.final_pseudo_regret);
  }
  mean_stderr(s.final_regret, s.mean_regret, s.stderr_regret);
  mean_stderr(s.final_pseudo_regret, s.mean_pseudo_regret, s.stderr_pseudo_regret);

  // all replications share the record grid
  const std::size_t points = outcomes.front().rounds.size();
  s.checkpoint_t.reserve(points);
  s.checkpoint_mean_regret.assign(points, 0.0);
  s.checkpoint_mean_pseudo_regret.assign(points, 0.0);
  for (std::size_t i = 0; i < points; ++i)
    s.checkpoint_t.push_back(outcomes.front().rounds[i].t);
  for (const ReplicationOutcome& o : outcomes) {
    if (o.rounds.size() != points)
      throw std::invalid_argument("summarize: inconsistent record grids");
    for (std::size_t i = 0; i < points; ++i) {
      s.checkpoint_mean_regret[i] += o.rounds[i].cum_regret;
      s.checkpoint_mean_pseudo_regret[i] += o.rounds[i].cum_pseudo_regret;
    }
  }
  const double inv = 1.0 / static_cast<double>(outcomes.size());
  for (std::size_t i = 0; i < points; ++i) {
    s.checkpoint_mean_regret[i] *= inv;
    s.checkpoint_mean_pseudo_regret[i] *= inv;
  }
  return s;
}

}  // namespace knnb
