#include "knnb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace knnb {

KnnPolicy::KnnPolicy(int arm_count, IndexParams params)
    : arms_(arm_count), params_(params) {
  if (arm_count < 1) throw std::invalid_argument("KnnPolicy: arm_count must be >= 1");
  params_.validate();
}

void KnnPolicy::update(const Covariate& x, int arm, double reward) {
  if (arm < 0 || arm >= arms_) throw std::invalid_argument("KnnPolicy: arm out of range");
  if (dim_ == 0)
    dim_ = static_cast<int>(x.size());
  else if (static_cast<int>(x.size()) != dim_)
    throw std::invalid_argument("KnnPolicy: covariate dimension changed");
  history_.push_back(HistoryEntry{x, arm, reward});
  coords_.insert(coords_.end(), x.begin(), x.end());
  entry_arm_.push_back(arm);
  entry_reward_.push_back(reward);
}

DecisionTrace KnnPolicy::decide(const Covariate& x, Rng&) {
  DecisionTrace trace;
  const std::int64_t t = round();
  if (t <= arms_) {
    trace.phase = Phase::Init;
    trace.chosen_arm = static_cast<int>(t - 1);
    return trace;
  }

  trace.phase = Phase::Index;
  const std::size_t m = history_.size();  // t-1
  scratch_.resize(m);
  for (std::size_t s = 0; s < m; ++s) {
    const double* e = coords_.data() + s * dim_;
    double sq = 0.0;
    for (int d = 0; d < dim_; ++d) {
      const double diff = x[d] - e[d];
      sq += diff * diff;
    }
    scratch_[s] = {sq, static_cast<int>(s)};
  }

  // The per-arm scans below only ever touch a short prefix of the neighbour
  // order, so sort lazily: keep a sorted prefix and grow it geometrically on
  // demand. The (distance, index) pairs are totally ordered, so any prefix
  // of the unique sorted sequence matches a full sort exactly.
  radii_.resize(m);
  std::size_t sorted = 0;
  auto ensure_sorted = [&](std::size_t upto) {
    if (upto <= sorted) return;
    std::size_t k = std::max<std::size_t>(sort_hint_, 64);
    while (k < upto) k *= 2;
    if (k >= m / 2) {
      std::sort(scratch_.begin(), scratch_.end());
      k = m;
    } else {
      const auto kth = scratch_.begin() + static_cast<std::ptrdiff_t>(k);
      std::nth_element(scratch_.begin(), kth - 1, scratch_.end());
      std::sort(scratch_.begin(), kth);
    }
    for (std::size_t i = sorted; i < k; ++i) radii_[i] = std::sqrt(scratch_[i].first);
    sorted = k;
  };
  ensure_sorted(std::min(m, sort_hint_));

  const double theta_log_t = params_.theta * std::log(static_cast<double>(t));
  const double phi_t = params_.phi(t);

  trace.arms.resize(arms_);
  trace.chosen_arm = 0;
  std::size_t deepest_scan = 1;
  double best_index = -kInf;
  for (int a = 0; a < arms_; ++a) {
    ArmTrace& at = trace.arms[a];
    std::int64_t n = 0;
    double sum = 0.0;
    at.k = static_cast<int>(m);
    at.uncertainty = kInf;
    double radius_m = 0.0;
    for (std::size_t q = 0; q < m; ++q) {
      if (q >= sorted) ensure_sorted(q + 1);
      const int idx = scratch_[q].second;
      const double r = radii_[q];
      if (entry_arm_[idx] == a) {
        ++n;
        sum += entry_reward_[idx];
      }
      const double u = uncertainty_at(theta_log_t, phi_t, n, r);
      if (u < at.uncertainty) {
        at.uncertainty = u;
        at.k = static_cast<int>(q + 1);
        at.pulls = n;
        at.mean = n > 0 ? sum / static_cast<double>(n) : 0.0;
        at.radius = r;
      }
      radius_m = r;
      deepest_scan = std::max(deepest_scan, q + 1);
      // later prefixes only grow the radius, and the sqrt term stays > 0,
      // so nothing past this point can beat the current minimum
      if (at.uncertainty < kInf && phi_t * r >= at.uncertainty) break;
    }
    if (at.uncertainty == kInf) {  // arm absent from history
      ensure_sorted(m);
      at.k = static_cast<int>(m);
      at.pulls = 0;
      at.mean = 0.0;
      at.radius = radii_[m - 1];
    }
    at.index = params_.kind == IndexKind::Ucb
                   ? index_ucb(at.mean, at.uncertainty)
                   : klucb_sup(at.mean, at.pulls, theta_log_t, params_.klucb_tol) +
                         phi_t * at.radius;
    if (at.index > best_index) {
      best_index = at.index;
      trace.chosen_arm = a;
    }
  }
  sort_hint_ = std::max<std::size_t>(64, 2 * deepest_scan);
  return trace;
}

ContextFreePolicy::ContextFreePolicy(int arm_count, IndexKind kind, double theta,
                                     double klucb_tol)
    : kind_(kind), theta_(theta), tol_(klucb_tol) {
  if (arm_count < 1)
    throw std::invalid_argument("ContextFreePolicy: arm_count must be >= 1");
  if (theta <= 0.0) throw std::invalid_argument("ContextFreePolicy: theta must be > 0");
  pulls_.assign(arm_count, 0);
  reward_sum_.assign(arm_count, 0.0);
}

void ContextFreePolicy::update(const Covariate&, int arm, double reward) {
  if (arm < 0 || arm >= arm_count())
    throw std::invalid_argument("ContextFreePolicy: arm out of range");
  ++pulls_[arm];
  reward_sum_[arm] += reward;
  ++t_;
}

DecisionTrace ContextFreePolicy::decide(const Covariate&, Rng&) {
  DecisionTrace trace;
  const int arms = arm_count();
  if (t_ <= arms) {
    trace.phase = Phase::Init;
    trace.chosen_arm = static_cast<int>(t_ - 1);
    return trace;
  }
  trace.phase = Phase::Index;
  const double theta_log_t = theta_ * std::log(static_cast<double>(t_));
  trace.arms.resize(arms);
  double best_index = -kInf;
  trace.chosen_arm = 0;
  for (int a = 0; a < arms; ++a) {
    ArmTrace& at = trace.arms[a];
    at.pulls = pulls_[a];
    at.mean = pulls_[a] > 0 ? reward_sum_[a] / static_cast<double>(pulls_[a]) : 0.0;
    at.uncertainty = uncertainty_at(theta_log_t, 0.0, pulls_[a], 0.0);
    at.index = kind_ == IndexKind::Ucb
                   ? index_ucb(at.mean, at.uncertainty)
                   : klucb_sup(at.mean, at.pulls, theta_log_t, tol_);
    if (at.index > best_index) {
      best_index = at.index;
      trace.chosen_arm = a;
    }
  }
  return trace;
}

DecisionTrace UniformRandomPolicy::decide(const Covariate&, Rng& rng) {
  DecisionTrace trace;
  trace.phase = Phase::Index;
  trace.chosen_arm = static_cast<int>(rng.below(static_cast<std::uint64_t>(arms_)));
  return trace;
}

OraclePolicy::OraclePolicy(std::shared_ptr<const Environment> env)
    : env_(std::move(env)) {
  if (!env_)
    throw std::invalid_argument("oracle policy requires mean-field access");
}

DecisionTrace OraclePolicy::decide(const Covariate& x, Rng&) {
  DecisionTrace trace;
  trace.phase = Phase::Index;
  trace.arms.resize(env_->arm_count());
  double best = -kInf;
  for (int a = 0; a < env_->arm_count(); ++a) {
    trace.arms[a].mean = env_->mean(a, x);
    trace.arms[a].index = trace.arms[a].mean;
    if (trace.arms[a].index > best) {
      best = trace.arms[a].index;
      trace.chosen_arm = a;
    }
  }
  return trace;
}

std::string_view to_string(PolicyKind k) {
  switch (k) {
    case PolicyKind::KnnUcb: return "knn_ucb";
    case PolicyKind::KnnKlUcb: return "knn_klucb";
    case PolicyKind::CfUcb: return "cf_ucb";
    case PolicyKind::CfKlUcb: return "cf_klucb";
    case PolicyKind::Uniform: return "uniform";
    case PolicyKind::Oracle: return "oracle";
  }
  return "?";
}

std::optional<PolicyKind> policy_kind_from(std::string_view name) {
  for (PolicyKind k : {PolicyKind::KnnUcb, PolicyKind::KnnKlUcb, PolicyKind::CfUcb,
                       PolicyKind::CfKlUcb, PolicyKind::Uniform, PolicyKind::Oracle})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

double default_theta(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::KnnKlUcb:
    case PolicyKind::CfKlUcb:
      return 2.5;
    default:
      return 4.5;
  }
}

void PolicySpec::validate() const {
  if (theta <= 0.0) throw std::invalid_argument("policy.theta: must be > 0");
  if (klucb_tol <= 0.0) throw std::invalid_argument("policy.klucb_tol: must be > 0");
  phi.validate();
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, int arm_count,
                                    std::shared_ptr<const Environment> env) {
  spec.validate();
  switch (spec.kind) {
    case PolicyKind::KnnUcb:
    case PolicyKind::KnnKlUcb: {
      IndexParams p;
      p.theta = spec.theta;
      p.phi = spec.phi;
      p.kind = spec.kind == PolicyKind::KnnUcb ? IndexKind::Ucb : IndexKind::KlUcb;
      p.klucb_tol = spec.klucb_tol;
      return std::make_unique<KnnPolicy>(arm_count, p);
    }
    case PolicyKind::CfUcb:
      return std::make_unique<ContextFreePolicy>(arm_count, IndexKind::Ucb,
                                                 spec.theta, spec.klucb_tol);
    case PolicyKind::CfKlUcb:
      return std::make_unique<ContextFreePolicy>(arm_count, IndexKind::KlUcb,
                                                 spec.theta, spec.klucb_tol);
    case PolicyKind::Uniform:
      return std::make_unique<UniformRandomPolicy>(arm_count);
    case PolicyKind::Oracle:
      return std::make_unique<OraclePolicy>(std::move(env));
  }
  throw std::invalid_argument("policy.kind: unknown");
}

std::optional<std::int64_t> phi_inverse(const PhiSpec& phi, double lambda) {
  if (phi(1) >= lambda) return 1;
  constexpr std::int64_t kCap = std::int64_t{1} << 62;
  std::int64_t hi = 2;
  while (phi(hi) < lambda) {
    if (hi >= kCap) return std::nullopt;
    hi *= 2;
  }
  std::int64_t lo = hi / 2;  // phi(lo) < lambda <= phi(hi)
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (phi(mid) >= lambda)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

}  // namespace knnb
