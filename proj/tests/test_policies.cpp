#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "knnb/policies.hpp"

using namespace knnb;

namespace {

IndexParams ucb_params(double theta = 4.5) {
  IndexParams p;
  p.theta = theta;
  p.kind = IndexKind::Ucb;
  return p;
}

IndexParams klucb_params(double theta = 2.5) {
  IndexParams p;
  p.theta = theta;
  p.kind = IndexKind::KlUcb;
  return p;
}

// canonical composition of the published operations, used as the reference
// for the policy's fused decision path
DecisionTrace reference_decide(const IndexParams& params, int arms,
                               std::span<const HistoryEntry> history,
                               const Covariate& x) {
  DecisionTrace trace;
  const std::int64_t t = static_cast<std::int64_t>(history.size()) + 1;
  if (t <= arms) {
    trace.phase = Phase::Init;
    trace.chosen_arm = static_cast<int>(t - 1);
    return trace;
  }
  trace.phase = Phase::Index;
  trace.arms.resize(arms);
  const NeighbourOrder ord = order_neighbours(x, history);
  double best = -kInf;
  for (int a = 0; a < arms; ++a) {
    const PrefixStats stats = prefix_stats(ord, history, a);
    const KSelection sel = select_k(params.theta, params.phi, t, stats);
    ArmTrace& at = trace.arms[a];
    at.k = sel.k;
    at.uncertainty = sel.uncertainty;
    at.pulls = stats.pulls[sel.k - 1];
    at.mean = stats.mean[sel.k - 1];
    at.radius = stats.radius[sel.k - 1];
    at.index = params.kind == IndexKind::Ucb
                   ? index_ucb(at.mean, at.uncertainty)
                   : index_klucb(at.mean, at.pulls, params.theta, params.phi, t,
                                 at.radius, params.klucb_tol);
    if (at.index > best) {
      best = at.index;
      trace.chosen_arm = a;
    }
  }
  return trace;
}

}  // namespace

TEST_CASE("knn policy: initialization pulls each arm once") {
  KnnPolicy policy(2, ucb_params());
  Rng rng(1);
  const DecisionTrace first = policy.decide({0.7}, rng);
  CHECK(first.phase == Phase::Init);
  CHECK(first.chosen_arm == 0);
  policy.update({0.7}, 0, 1.0);
  const DecisionTrace second = policy.decide({0.2}, rng);
  CHECK(second.phase == Phase::Init);
  CHECK(second.chosen_arm == 1);
}

TEST_CASE("knn ucb: worked three-round trace") {
  KnnPolicy policy(2, ucb_params(4.5));
  Rng rng(2);
  policy.update({0.1}, 0, 1.0);
  policy.update({0.9}, 1, 0.0);

  const DecisionTrace trace = policy.decide({0.1}, rng);
  CHECK(trace.phase == Phase::Index);
  const double root = std::sqrt(4.5 * std::log(3.0));  // ~2.2234557111

  CHECK(trace.arms[0].k == 1);
  CHECK(trace.arms[0].pulls == 1);
  CHECK(trace.arms[0].mean == 1.0);
  CHECK(trace.arms[0].radius == 0.0);
  CHECK(trace.arms[0].index == doctest::Approx(1.0 + root).epsilon(1e-12));

  CHECK(trace.arms[1].k == 2);
  CHECK(trace.arms[1].pulls == 1);
  CHECK(trace.arms[1].mean == 0.0);
  CHECK(trace.arms[1].radius == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(trace.arms[1].index == doctest::Approx(root + 0.8).epsilon(1e-12));

  CHECK(trace.chosen_arm == 0);  // 3.2235 beats 3.0235
}

TEST_CASE("knn policy: exact index ties resolve to the lowest arm") {
  KnnPolicy policy(2, ucb_params());
  Rng rng(3);
  policy.update({0.4}, 0, 1.0);
  policy.update({0.6}, 1, 1.0);
  const DecisionTrace trace = policy.decide({0.5}, rng);
  CHECK(trace.arms[0].index == trace.arms[1].index);
  CHECK(trace.chosen_arm == 0);
}

TEST_CASE("knn policy: decide is pure and update is append-only") {
  KnnPolicy policy(3, klucb_params());
  Rng rng(4);
  Rng env_rng(5);
  for (int t = 0; t < 30; ++t) {
    const Covariate x = {env_rng.uniform(), env_rng.uniform()};
    const DecisionTrace trace = policy.decide(x, rng);
    policy.update(x, trace.chosen_arm, env_rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  CHECK(policy.history().size() == 30);

  const Covariate probe = {0.5, 0.5};
  const DecisionTrace a = policy.decide(probe, rng);
  const DecisionTrace b = policy.decide(probe, rng);
  CHECK(a.chosen_arm == b.chosen_arm);
  for (int arm = 0; arm < 3; ++arm) {
    CHECK(a.arms[arm].k == b.arms[arm].k);
    CHECK(a.arms[arm].index == b.arms[arm].index);
  }
  CHECK(policy.history().size() == 30);  // decide records nothing

  // replaying the same stream gives an identical state
  KnnPolicy replay(3, klucb_params());
  for (const HistoryEntry& e : policy.history()) replay.update(e.x, e.arm, e.reward);
  REQUIRE(replay.history().size() == policy.history().size());
  for (std::size_t i = 0; i < policy.history().size(); ++i) {
    CHECK(replay.history()[i].x == policy.history()[i].x);
    CHECK(replay.history()[i].arm == policy.history()[i].arm);
    CHECK(replay.history()[i].reward == policy.history()[i].reward);
  }
}

TEST_CASE("knn policy: fused path equals the canonical composition") {
  Rng rng(6);
  for (int rep = 0; rep < 200; ++rep) {
    const int arms = 1 + static_cast<int>(rng.below(4));
    const int dim = 1 + static_cast<int>(rng.below(3));
    const int len = arms + static_cast<int>(rng.below(60));
    const IndexParams params = rng.bernoulli(0.5) ? ucb_params(rng.uniform(0.5, 6.0))
                                                  : klucb_params(rng.uniform(0.5, 4.0));

    KnnPolicy policy(arms, params);
    for (int i = 0; i < len; ++i) {
      Covariate x(dim);
      for (auto& v : x) v = rng.uniform();
      const int arm = i < arms ? i : static_cast<int>(rng.below(arms));
      policy.update(x, arm, rng.bernoulli(0.5) ? 1.0 : 0.0);
    }
    Covariate q(dim);
    for (auto& v : q) v = rng.uniform();

    const DecisionTrace fused = policy.decide(q, rng);
    const DecisionTrace ref = reference_decide(params, arms, policy.history(), q);

    REQUIRE(fused.phase == ref.phase);
    REQUIRE(fused.chosen_arm == ref.chosen_arm);
    if (fused.phase == Phase::Index) {
      for (int a = 0; a < arms; ++a) {
        CHECK(fused.arms[a].k == ref.arms[a].k);
        CHECK(fused.arms[a].pulls == ref.arms[a].pulls);
        CHECK(fused.arms[a].mean == ref.arms[a].mean);
        CHECK(fused.arms[a].radius == ref.arms[a].radius);
        CHECK(fused.arms[a].uncertainty == ref.arms[a].uncertainty);
        CHECK(fused.arms[a].index == ref.arms[a].index);
      }
    }
  }
}

TEST_CASE("knn policy: after initialization every arm has finite uncertainty") {
  Rng rng(7);
  const int arms = 4;
  KnnPolicy policy(arms, ucb_params());
  for (int t = 1; t <= 12; ++t) {
    const Covariate x = {rng.uniform()};
    const DecisionTrace trace = policy.decide(x, rng);
    if (t <= arms) CHECK(trace.chosen_arm == t - 1);
    if (t > arms)
      for (int a = 0; a < arms; ++a) CHECK(trace.arms[a].uncertainty < kInf);
    policy.update(x, trace.chosen_arm, 1.0);
  }
}

TEST_CASE("knn ucb: raising theta never lowers an index") {
  Rng rng(8);
  KnnPolicy low(2, ucb_params(2.0));
  KnnPolicy high(2, ucb_params(4.0));
  for (int i = 0; i < 20; ++i) {
    const Covariate x = {rng.uniform()};
    const int arm = i < 2 ? i : static_cast<int>(rng.below(2));
    const double reward = rng.bernoulli(0.6) ? 1.0 : 0.0;
    low.update(x, arm, reward);
    high.update(x, arm, reward);
  }
  const Covariate q = {0.42};
  const DecisionTrace lo = low.decide(q, rng);
  const DecisionTrace hi = high.decide(q, rng);
  for (int a = 0; a < 2; ++a) CHECK(hi.arms[a].index >= lo.arms[a].index);
}

TEST_CASE("context-free ucb: worked trace after initialization") {
  ContextFreePolicy policy(2, IndexKind::Ucb, 4.5);
  Rng rng(9);
  policy.update({0.0}, 0, 1.0);
  policy.update({0.0}, 1, 0.0);
  const DecisionTrace trace = policy.decide({0.9}, rng);  // covariate ignored
  const double bonus = std::sqrt(4.5 * std::log(3.0));
  CHECK(trace.arms[0].index == doctest::Approx(1.0 + bonus).epsilon(1e-12));
  CHECK(trace.arms[1].index == doctest::Approx(bonus).epsilon(1e-12));
  CHECK(trace.chosen_arm == 0);
}

TEST_CASE("context-free klucb: inversion drives the index") {
  ContextFreePolicy policy(2, IndexKind::KlUcb, 2.5);
  Rng rng(10);
  policy.update({0.0}, 0, 1.0);
  policy.update({0.0}, 1, 0.0);
  const DecisionTrace trace = policy.decide({0.0}, rng);
  CHECK(trace.arms[0].index == 1.0);  // mean 1 pins the sup at the ceiling
  const double budget = 2.5 * std::log(3.0);
  CHECK(trace.arms[1].index == doctest::Approx(1.0 - std::exp(-budget)).epsilon(1e-6));
  CHECK(trace.chosen_arm == 0);
}

TEST_CASE("uniform policy: arm frequencies are balanced") {
  UniformRandomPolicy policy(2);
  Rng rng = Rng::stream(77, 1);
  const int rounds = 100000;
  int first = 0;
  for (int i = 0; i < rounds; ++i)
    first += policy.decide({0.0}, rng).chosen_arm == 0;
  const double freq = static_cast<double>(first) / rounds;
  CHECK(std::abs(freq - 0.5) <= 3.0 * std::sqrt(0.25 / rounds));
}

TEST_CASE("oracle policy: plays the argmax of the mean field") {
  auto env = std::make_shared<const Environment>([] {
    EnvironmentSpec s;
    s.kind = EnvKind::FlipLine;
    return s;
  }());
  OraclePolicy policy(env);
  Rng rng(11);
  CHECK(policy.decide({0.9}, rng).chosen_arm == 0);
  CHECK(policy.decide({0.1}, rng).chosen_arm == 1);

  PolicySpec spec;
  spec.kind = PolicyKind::Oracle;
  CHECK_THROWS_AS(make_policy(spec, 2, nullptr), std::invalid_argument);
}

TEST_CASE("phi_inverse: doubling-then-bisection with sentinel") {
  PhiSpec one;  // const 1
  CHECK(phi_inverse(one, 1.0) == 1);
  CHECK(phi_inverse(one, 0.5) == 1);
  CHECK(phi_inverse(one, 2.0) == std::nullopt);

  PhiSpec log1;
  log1.kind = PhiKind::LogScaled;
  log1.scale = 1.0;
  CHECK(phi_inverse(log1, 2.0) == 8);  // ln 7 < 2 <= ln 8
  CHECK(phi_inverse(log1, 1.0) == 1);

  PhiSpec log2;
  log2.kind = PhiKind::LogScaled;
  log2.scale = 2.0;
  const auto t = phi_inverse(log2, 5.0);
  REQUIRE(t.has_value());
  CHECK(log2(*t) >= 5.0);
  CHECK(log2(*t - 1) < 5.0);
}

TEST_CASE("knn klucb: conditional choice map converges on the flip line") {
  EnvironmentSpec spec;
  spec.kind = EnvKind::FlipLine;
  const Environment env(spec);

  IndexParams params = klucb_params(2.5);
  params.phi.kind = PhiKind::LogScaled;
  params.phi.scale = 1.0;
  KnnPolicy policy(2, params);

  Rng env_rng = Rng::stream(1234, 0);
  Rng pol_rng = Rng::stream(1234, 1);
  const int n = 20000;
  int late_right = 0;
  int late_right_arm0 = 0;
  for (int t = 1; t <= n; ++t) {
    const Round round = env.sample_round(env_rng);
    const DecisionTrace trace = policy.decide(round.x, pol_rng);
    policy.update(round.x, trace.chosen_arm, round.rewards[trace.chosen_arm]);
    if (t > 3 * n / 4 && round.x[0] > 0.6) {
      ++late_right;
      late_right_arm0 += trace.chosen_arm == 0;
    }
  }
  REQUIRE(late_right > 0);
  CHECK(static_cast<double>(late_right_arm0) / late_right > 0.9);
}

TEST_CASE("policy factory: kinds, names and default thetas") {
  CHECK(default_theta(PolicyKind::KnnUcb) == 4.5);
  CHECK(default_theta(PolicyKind::KnnKlUcb) == 2.5);
  CHECK(policy_kind_from("cf_klucb") == PolicyKind::CfKlUcb);
  CHECK(policy_kind_from("nonsense") == std::nullopt);

  for (PolicyKind kind : {PolicyKind::KnnUcb, PolicyKind::KnnKlUcb, PolicyKind::CfUcb,
                          PolicyKind::CfKlUcb, PolicyKind::Uniform}) {
    PolicySpec spec;
    spec.kind = kind;
    spec.theta = default_theta(kind);
    const auto policy = make_policy(spec, 3, nullptr);
    CHECK(policy->name() == to_string(kind));
    CHECK(policy->arm_count() == 3);
  }
}
