#include "knnb/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "knnb/indices.hpp"

namespace knnb {

MgfBound MgfBound::bernoulli_envelope(double xi_max) {
  if (!(xi_max > 0.0 && xi_max < 1.0))
    throw std::invalid_argument("bernoulli_envelope: xi_max must lie in (0,1)");
  return MgfBound(Kind::BernoulliEnvelope, xi_max);
}

std::string_view MgfBound::name() const {
  switch (kind_) {
    case Kind::GaussianHalfSquare: return "gaussian_half_square";
    case Kind::BernoulliEnvelope: return "bernoulli_envelope";
    case Kind::QuarterSquare: return "quarter_square";
  }
  return "?";
}

double MgfBound::phi(double rho) const {
  switch (kind_) {
    case Kind::GaussianHalfSquare:
      return 0.5 * rho * rho;
    case Kind::QuarterSquare:
      return 0.25 * rho * rho;
    case Kind::BernoulliEnvelope:
      // log(1 + xi*(e^rho - 1)); shifted form avoids overflow at large rho
      if (rho < 30.0) return std::log1p(xi_max_ * std::expm1(rho));
      return rho + std::log(xi_max_ + (1.0 - xi_max_) * std::exp(-rho));
  }
  return 0.0;
}

double MgfBound::phi_prime(double rho) const {
  switch (kind_) {
    case Kind::GaussianHalfSquare:
      return rho;
    case Kind::QuarterSquare:
      return 0.5 * rho;
    case Kind::BernoulliEnvelope:
      return xi_max_ / (xi_max_ + (1.0 - xi_max_) * std::exp(-rho));
  }
  return 0.0;
}

double MgfBound::phi_prime_limit() const {
  return kind_ == Kind::BernoulliEnvelope ? 1.0 : kInf;
}

double MgfBound::legendre(double x) const {
  switch (kind_) {
    case Kind::GaussianHalfSquare:
      return x <= 0.0 ? 0.0 : 0.5 * x * x;
    case Kind::QuarterSquare:
      return x <= 0.0 ? 0.0 : x * x;
    case Kind::BernoulliEnvelope:
      if (x <= xi_max_) return 0.0;
      if (x > 1.0) return kInf;
      return kl_div(x, xi_max_);
  }
  return 0.0;
}

double MgfBound::legendre_numeric(double x) const {
  if (x <= phi_prime(0.0)) return 0.0;  // supremum at rho = 0
  const double limit = phi_prime_limit();
  if (x > limit) return kInf;
  if (x == limit) {
    // finite limiting value, converged to machine precision by rho = 64
    const double rho = 64.0;
    return rho * x - phi(rho);
  }
  double hi = 1.0;
  while (phi_prime(hi) < x) hi *= 2.0;
  double lo = 0.0;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (phi_prime(mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  const double rho = 0.5 * (lo + hi);
  return rho * x - phi(rho);
}

double legendre_identity_residual(const MgfBound& bound, double rho) {
  if (rho <= 0.0)
    throw std::invalid_argument("legendre_identity_residual: rho must be > 0");
  const double lhs = bound.legendre(bound.phi_prime(rho));
  const double rhs = rho * bound.phi_prime(rho) - bound.phi(rho);
  return std::abs(lhs - rhs);
}

double tail_bound(double delta, std::int64_t n) {
  if (!(delta > 1.0))
    throw std::invalid_argument("peeling constant gamma=delta/(delta-1) undefined");
  if (n < 2) throw std::invalid_argument("tail_bound: n must be >= 2");
  const double value = std::numbers::e *
                       std::ceil(delta * std::log(static_cast<double>(n))) *
                       std::exp(-delta);
  return std::min(1.0, value);
}

std::string_view to_string(ZDist z) {
  return z == ZDist::StandardNormal ? "standard_normal" : "bernoulli";
}

std::string_view to_string(Scheme s) {
  switch (s) {
    case Scheme::AlwaysOn: return "always_on";
    case Scheme::IidCoin: return "iid_coin";
    case Scheme::AdaptiveSign: return "adaptive_sign";
    case Scheme::AdaptiveCount: return "adaptive_count";
  }
  return "?";
}

void AdaptedExperiment::validate() const {
  if (n < 1) throw std::invalid_argument("n: must be >= 1");
  if (z == ZDist::Bernoulli && !(bernoulli_p >= 0.0 && bernoulli_p <= 1.0))
    throw std::invalid_argument("bernoulli_p: must lie in [0,1]");
  if (scheme == Scheme::IidCoin && !(coin_q >= 0.0 && coin_q <= 1.0))
    throw std::invalid_argument("coin_q: must lie in [0,1]");
}

bool compatible(const AdaptedExperiment& exp, const MgfBound& bound) {
  switch (bound.kind()) {
    case MgfBound::Kind::GaussianHalfSquare:
      return exp.z == ZDist::StandardNormal;
    case MgfBound::Kind::BernoulliEnvelope:
      return exp.z == ZDist::Bernoulli && exp.bernoulli_p <= bound.xi_max();
    case MgfBound::Kind::QuarterSquare:
      return false;
  }
  return false;
}

Trajectory simulate_trajectory(const AdaptedExperiment& exp, Rng& rng) {
  Trajectory traj;
  for (std::int64_t t = 1; t <= exp.n; ++t) {
    // the inclusion decision is fixed before the summand exists
    bool include = false;
    switch (exp.scheme) {
      case Scheme::AlwaysOn:
        include = true;
        break;
      case Scheme::IidCoin:
        include = rng.bernoulli(exp.coin_q);
        break;
      case Scheme::AdaptiveSign:
        include = traj.sum <= 0.0;
        break;
      case Scheme::AdaptiveCount:
        include = 2 * traj.count < t;
        break;
    }
    if (!include) continue;
    const double z = exp.z == ZDist::StandardNormal
                         ? rng.normal()
                         : (rng.bernoulli(exp.bernoulli_p) ? 1.0 : 0.0);
    traj.sum += z;
    ++traj.count;
  }
  return traj;
}

namespace {

ExperimentResult result_from(const Trajectory& traj, const MgfBound& bound,
                             double delta) {
  ExperimentResult res;
  res.count = traj.count;
  res.sum = traj.sum;
  res.xi_hat = traj.count > 0 ? traj.sum / static_cast<double>(traj.count) : 0.0;
  res.statistic =
      traj.count > 0 ? static_cast<double>(traj.count) * bound.legendre(res.xi_hat)
                     : 0.0;
  res.violated = res.statistic > delta;
  return res;
}

void check_pairing(const AdaptedExperiment& exp, const MgfBound& bound,
                   bool enforce) {
  exp.validate();
  if (enforce && !compatible(exp, bound))
    throw std::invalid_argument(
        "incompatible (summand, envelope) pairing; the envelope does not "
        "dominate the summand's log-MGF");
}

// parallel loop over replications; worker w handles r in steps of stride
void parallel_reps(std::int64_t replications, int threads,
                   const std::function<void(std::int64_t)>& body) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const int workers = static_cast<int>(std::min<std::int64_t>(
      threads > 0 ? threads : static_cast<int>(hw), replications));
  if (workers <= 1) {
    for (std::int64_t r = 0; r < replications; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::int64_t r = w; r < replications; r += workers) body(r);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

ExperimentResult run_adapted_experiment(const AdaptedExperiment& exp,
                                        const MgfBound& bound, double delta,
                                        Rng& rng, bool enforce_pairing) {
  check_pairing(exp, bound, enforce_pairing);
  return result_from(simulate_trajectory(exp, rng), bound, delta);
}

TrajectoryStats collect_trajectories(const AdaptedExperiment& exp,
                                     const MgfBound& bound,
                                     std::int64_t replications,
                                     std::uint64_t seed, int threads,
                                     bool enforce_pairing) {
  check_pairing(exp, bound, enforce_pairing);
  if (replications < 1)
    throw std::invalid_argument("collect_trajectories: replications must be >= 1");

  TrajectoryStats stats;
  stats.count.resize(replications);
  stats.sum.resize(replications);
  stats.statistic.resize(replications);
  parallel_reps(replications, threads, [&](std::int64_t r) {
    Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(r));
    const Trajectory traj = simulate_trajectory(exp, rng);
    const ExperimentResult res = result_from(traj, bound, 0.0);
    stats.count[r] = res.count;
    stats.sum[r] = res.sum;
    stats.statistic[r] = res.statistic;
  });
  return stats;
}

std::vector<ViolationReport> reports_from(const TrajectoryStats& stats,
                                          const AdaptedExperiment& exp,
                                          const MgfBound& bound,
                                          std::span<const double> deltas) {
  const std::int64_t reps = static_cast<std::int64_t>(stats.statistic.size());
  std::vector<ViolationReport> out;
  out.reserve(deltas.size());
  for (double delta : deltas) {
    ViolationReport rep;
    rep.envelope = bound.name();
    rep.z_dist = to_string(exp.z);
    rep.scheme = to_string(exp.scheme);
    rep.delta = delta;
    rep.n = exp.n;
    rep.replications = reps;
    rep.bound = tail_bound(delta, exp.n);
    for (double s : stats.statistic)
      if (s > delta) ++rep.violations;
    rep.rate = static_cast<double>(rep.violations) / static_cast<double>(reps);
    rep.three_sigma =
        3.0 * std::sqrt(rep.bound * (1.0 - rep.bound) / static_cast<double>(reps));
    rep.pass = rep.rate <= rep.bound + rep.three_sigma;
    out.push_back(rep);
  }
  return out;
}

std::vector<ViolationReport> verify_bound(const AdaptedExperiment& base,
                                          std::span<const Scheme> schemes,
                                          const MgfBound& bound,
                                          std::span<const double> deltas,
                                          std::int64_t replications,
                                          std::uint64_t seed, int threads,
                                          bool enforce_pairing) {
  for (double d : deltas) (void)tail_bound(d, base.n);  // reject delta <= 1 up front
  std::vector<ViolationReport> out;
  out.reserve(schemes.size() * deltas.size());
  for (std::size_t si = 0; si < schemes.size(); ++si) {
    AdaptedExperiment exp = base;
    exp.scheme = schemes[si];
    const std::uint64_t scheme_seed = mix64(seed ^ (si + 1));
    const TrajectoryStats stats = collect_trajectories(
        exp, bound, replications, scheme_seed, threads, enforce_pairing);
    const std::vector<ViolationReport> reps = reports_from(stats, exp, bound, deltas);
    out.insert(out.end(), reps.begin(), reps.end());
  }
  return out;
}

std::vector<SupermartingaleReport> supermartingale_check(
    const MgfBound& bound, const AdaptedExperiment& exp,
    std::span<const double> rhos, std::int64_t replications, std::uint64_t seed,
    int threads, bool enforce_pairing) {
  check_pairing(exp, bound, enforce_pairing);
  if (replications < 2)
    throw std::invalid_argument("supermartingale_check: replications must be >= 2");

  std::vector<SupermartingaleReport> out;
  out.reserve(rhos.size());
  for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
    const double rho = rhos[ri];
    const double phi_rho = bound.phi(rho);
    std::vector<double> w(replications);
    const std::uint64_t rho_seed = mix64(seed ^ (ri + 1));
    parallel_reps(replications, threads, [&](std::int64_t r) {
      Rng rng = Rng::stream(rho_seed, static_cast<std::uint64_t>(r));
      const Trajectory traj = simulate_trajectory(exp, rng);
      w[r] = std::exp(rho * traj.sum - static_cast<double>(traj.count) * phi_rho);
    });
    SupermartingaleReport rep;
    rep.rho = rho;
    double sum = 0.0;
    for (double v : w) sum += v;
    rep.mean = sum / static_cast<double>(replications);
    double ss = 0.0;
    for (double v : w) ss += (v - rep.mean) * (v - rep.mean);
    rep.std_error = std::sqrt(ss / static_cast<double>(replications - 1)) /
                    std::sqrt(static_cast<double>(replications));
    rep.threshold = 1.0 + 3.0 * rep.std_error;
    rep.pass = rep.mean <= rep.threshold;
    out.push_back(rep);
  }
  return out;
}

}  // namespace knnb
