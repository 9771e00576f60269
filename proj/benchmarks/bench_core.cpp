#include <benchmark/benchmark.h>

#include "knnb/concentration.hpp"
#include "knnb/indices.hpp"
#include "knnb/policies.hpp"

using namespace knnb;

namespace {

KnnPolicy seeded_policy(int history_len, IndexKind kind) {
  IndexParams params;
  params.kind = kind;
  params.theta = kind == IndexKind::Ucb ? 4.5 : 2.5;
  params.phi.kind = PhiKind::LogScaled;
  KnnPolicy policy(2, params);
  Rng rng(1);
  for (int i = 0; i < history_len; ++i) {
    const int arm = i < 2 ? i : static_cast<int>(rng.below(2));
    policy.update({rng.uniform()}, arm, rng.bernoulli(0.5) ? 1.0 : 0.0);
  }
  return policy;
}

void BM_OrderNeighbours(benchmark::State& state) {
  const int len = static_cast<int>(state.range(0));
  Rng rng(2);
  std::vector<HistoryEntry> h;
  h.reserve(len);
  for (int i = 0; i < len; ++i) h.push_back({{rng.uniform()}, 0, 0.0});
  for (auto _ : state) {
    const NeighbourOrder ord = order_neighbours({rng.uniform()}, h);
    benchmark::DoNotOptimize(ord.dist.data());
  }
  state.SetItemsProcessed(state.iterations() * len);
}
BENCHMARK(BM_OrderNeighbours)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_KnnDecide(benchmark::State& state) {
  KnnPolicy policy = seeded_policy(static_cast<int>(state.range(0)), IndexKind::KlUcb);
  Rng rng(3);
  for (auto _ : state) {
    const DecisionTrace trace = policy.decide({rng.uniform()}, rng);
    benchmark::DoNotOptimize(trace.chosen_arm);
  }
}
BENCHMARK(BM_KnnDecide)->Arg(1000)->Arg(4000)->Arg(16000);

void BM_KlucbSup(benchmark::State& state) {
  Rng rng(4);
  for (auto _ : state) {
    const double v = klucb_sup(rng.uniform(), 1 + rng.below(500), rng.uniform(0.1, 3.0));
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_KlucbSup);

void BM_LegendreNumeric(benchmark::State& state) {
  const MgfBound bound = MgfBound::bernoulli_envelope(0.5);
  Rng rng(5);
  for (auto _ : state) {
    const double v = bound.legendre_numeric(rng.uniform(0.5, 0.999));
    benchmark::DoNotOptimize(v);
  }
}
BENCHMARK(BM_LegendreNumeric);

void BM_TrajectorySteps(benchmark::State& state) {
  AdaptedExperiment exp;
  exp.n = state.range(0);
  exp.z = ZDist::StandardNormal;
  exp.scheme = Scheme::AdaptiveCount;
  Rng rng(6);
  for (auto _ : state) {
    const Trajectory traj = simulate_trajectory(exp, rng);
    benchmark::DoNotOptimize(traj.sum);
  }
  state.SetItemsProcessed(state.iterations() * exp.n);
}
BENCHMARK(BM_TrajectorySteps)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
