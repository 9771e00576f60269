#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "knnb/env.hpp"
#include "knnb/indices.hpp"
#include "knnb/knn_stats.hpp"

namespace knnb {

enum class Phase { Init, Index };

// Per-arm audit record of the decision chain: the selected prefix size, the
// statistics at it, the uncertainty and the resulting index value.
struct ArmTrace {
  int k = 0;
  std::int64_t pulls = 0;
  double mean = 0.0;
  double radius = 0.0;
  double uncertainty = 0.0;
  double index = 0.0;
};

struct DecisionTrace {
  Phase phase = Phase::Init;
  int chosen_arm = 0;
  std::vector<ArmTrace> arms;  // empty during the init phase
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string_view name() const = 0;
  virtual int arm_count() const = 0;
  // Pure in the policy state and x; rng is consumed only by randomized
  // policies. Does not record anything.
  virtual DecisionTrace decide(const Covariate& x, Rng& rng) = 0;
  // Append one observed (x, arm, reward) to the state.
  virtual void update(const Covariate& x, int arm, double reward) = 0;
};

// The generalized k-NN index strategy. Rounds 1..A pull each arm once
// (the covariate is still recorded so later neighbour queries can use those
// rounds); afterwards each arm picks its prefix size by minimizing the
// uncertainty and the configured index is maximized over arms, ties to the
// lowest arm.
class KnnPolicy final : public Policy {
 public:
  KnnPolicy(int arm_count, IndexParams params);

  std::string_view name() const override {
    return params_.kind == IndexKind::Ucb ? "knn_ucb" : "knn_klucb";
  }
  int arm_count() const override { return arms_; }
  std::int64_t round() const { return static_cast<std::int64_t>(history_.size()) + 1; }
  const std::vector<HistoryEntry>& history() const { return history_; }
  const IndexParams& params() const { return params_; }

  DecisionTrace decide(const Covariate& x, Rng& rng) override;
  void update(const Covariate& x, int arm, double reward) override;

 private:
  int arms_;
  IndexParams params_;
  std::vector<HistoryEntry> history_;
  // flat mirrors of the history for the distance loop
  int dim_ = 0;
  std::vector<double> coords_;
  std::vector<int> entry_arm_;
  std::vector<double> entry_reward_;
  std::vector<std::pair<double, int>> scratch_;  // (squared distance, index)
  std::vector<double> radii_;
  std::size_t sort_hint_ = 256;  // sorted-prefix size that covered the last round
};

// Context-free UCB / KL-UCB over global per-arm counts and means; the
// covariate is ignored. Shares theta with the k-NN policies so comparisons
// isolate the covariate mechanism.
class ContextFreePolicy final : public Policy {
 public:
  ContextFreePolicy(int arm_count, IndexKind kind, double theta,
                    double klucb_tol = 1e-9);

  std::string_view name() const override {
    return kind_ == IndexKind::Ucb ? "cf_ucb" : "cf_klucb";
  }
  int arm_count() const override { return static_cast<int>(pulls_.size()); }
  DecisionTrace decide(const Covariate& x, Rng& rng) override;
  void update(const Covariate& x, int arm, double reward) override;

 private:
  IndexKind kind_;
  double theta_;
  double tol_;
  std::int64_t t_ = 1;
  std::vector<std::int64_t> pulls_;
  std::vector<double> reward_sum_;
};

class UniformRandomPolicy final : public Policy {
 public:
  explicit UniformRandomPolicy(int arm_count) : arms_(arm_count) {}
  std::string_view name() const override { return "uniform"; }
  int arm_count() const override { return arms_; }
  DecisionTrace decide(const Covariate& x, Rng& rng) override;
  void update(const Covariate&, int, double) override {}

 private:
  int arms_;
};

// Plays argmax_a f^a(x); needs mean-field access, so it is a diagnostic
// comparator rather than a learner.
class OraclePolicy final : public Policy {
 public:
  explicit OraclePolicy(std::shared_ptr<const Environment> env);
  std::string_view name() const override { return "oracle"; }
  int arm_count() const override { return env_->arm_count(); }
  DecisionTrace decide(const Covariate& x, Rng& rng) override;
  void update(const Covariate&, int, double) override {}

 private:
  std::shared_ptr<const Environment> env_;
};

enum class PolicyKind { KnnUcb, KnnKlUcb, CfUcb, CfKlUcb, Uniform, Oracle };

std::string_view to_string(PolicyKind k);
std::optional<PolicyKind> policy_kind_from(std::string_view name);

struct PolicySpec {
  PolicyKind kind = PolicyKind::KnnUcb;
  double theta = 4.5;
  PhiSpec phi;
  double klucb_tol = 1e-9;

  void validate() const;
  bool uses_klucb() const {
    return kind == PolicyKind::KnnKlUcb || kind == PolicyKind::CfKlUcb;
  }
};

// default exploration scale per kind: 4.5 for UCB-style, 2.5 for KL-UCB
double default_theta(PolicyKind kind);

// env may be null except for the oracle policy, which requires it
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int arm_count,
                                    std::shared_ptr<const Environment> env);

// smallest t >= 1 with phi(t) >= lambda (doubling then bisection);
// nullopt when phi stays below lambda
std::optional<std::int64_t> phi_inverse(const PhiSpec& phi, double lambda);

}  // namespace knnb
