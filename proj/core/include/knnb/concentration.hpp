#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "knnb/rng.hpp"

namespace knnb {

// Log-MGF envelope phi with phi(0) = 0, phi'' > 0 on (0, inf), together
// with its Legendre transform phi*(x) = sup_{rho >= 0} (rho*x - phi(rho)).
//
//   GaussianHalfSquare — rho^2/2, dominates any standard-normal summand
//   BernoulliEnvelope  — log(1 + xi_max*(e^rho - 1)), dominates any [0,1]
//                        summand with mean <= xi_max
//   QuarterSquare      — rho^2/4; too small for a standard normal, kept as
//                        a deliberately broken envelope for sensitivity
//                        checks of the harness
class MgfBound {
 public:
  enum class Kind { GaussianHalfSquare, BernoulliEnvelope, QuarterSquare };

  static MgfBound gaussian_half_square() { return MgfBound(Kind::GaussianHalfSquare, 0.0); }
  static MgfBound bernoulli_envelope(double xi_max);
  static MgfBound quarter_square() { return MgfBound(Kind::QuarterSquare, 0.0); }

  Kind kind() const { return kind_; }
  double xi_max() const { return xi_max_; }
  std::string_view name() const;

  double phi(double rho) const;
  double phi_prime(double rho) const;
  double phi_prime_limit() const;  // lim_{rho->inf} phi'(rho)

  double legendre(double x) const;          // closed form
  double legendre_numeric(double x) const;  // doubling bracket + bisection

 private:
  MgfBound(Kind k, double xi) : kind_(k), xi_max_(xi) {}
  Kind kind_;
  double xi_max_;
};

// |phi*(phi'(rho)) - (rho*phi'(rho) - phi(rho))|; equals zero analytically
double legendre_identity_residual(const MgfBound& bound, double rho);

// e * ceil(delta * ln n) * exp(-delta), capped at 1 for reporting.
// Requires delta > 1: the peeling constant gamma = delta/(delta-1) behind
// the bound is undefined otherwise (and the bound exceeds 1 anyway).
double tail_bound(double delta, std::int64_t n);

enum class ZDist { StandardNormal, Bernoulli };
enum class Scheme { AlwaysOn, IidCoin, AdaptiveSign, AdaptiveCount };

std::string_view to_string(ZDist z);
std::string_view to_string(Scheme s);

// One adapted sampling experiment: n rounds, a summand distribution, and a
// predictable selection rule epsilon_t computed strictly from the past.
//   AlwaysOn      — include every round
//   IidCoin       — independent coin with probability coin_q, flipped
//                   before the summand is drawn
//   AdaptiveSign  — include round t iff the running sum S(t-1) <= 0
//   AdaptiveCount — include round t iff the running count N(t-1) < t/2
struct AdaptedExperiment {
  std::int64_t n = 1000;
  ZDist z = ZDist::StandardNormal;
  double bernoulli_p = 0.5;  // summand mean when z == Bernoulli
  Scheme scheme = Scheme::AlwaysOn;
  double coin_q = 0.5;

  void validate() const;
};

// the two blessed pairings: StandardNormal with GaussianHalfSquare, and
// Bernoulli(p <= xi_max) with BernoulliEnvelope(xi_max)
bool compatible(const AdaptedExperiment& exp, const MgfBound& bound);

struct Trajectory {
  std::int64_t count = 0;  // N(n)
  double sum = 0.0;        // S(n)
};

Trajectory simulate_trajectory(const AdaptedExperiment& exp, Rng& rng);

struct ExperimentResult {
  std::int64_t count = 0;
  double sum = 0.0;
  double xi_hat = 0.0;     // sum/count with 0/0 := 0
  double statistic = 0.0;  // count * phi*(xi_hat)
  bool violated = false;   // statistic > delta
};

// enforce_pairing = false lets deliberately mismatched pairs run (the point
// of the QuarterSquare envelope)
ExperimentResult run_adapted_experiment(const AdaptedExperiment& exp,
                                        const MgfBound& bound, double delta,
                                        Rng& rng, bool enforce_pairing = true);

// Replicated trajectories with per-replication statistics; stream r of the
// seed drives replication r, so results are independent of thread count.
struct TrajectoryStats {
  std::vector<std::int64_t> count;
  std::vector<double> sum;
  std::vector<double> statistic;
};

TrajectoryStats collect_trajectories(const AdaptedExperiment& exp,
                                     const MgfBound& bound,
                                     std::int64_t replications,
                                     std::uint64_t seed, int threads = 0,
                                     bool enforce_pairing = true);

struct ViolationReport {
  std::string_view envelope;
  std::string_view z_dist;
  std::string_view scheme;
  double delta = 0.0;
  std::int64_t n = 0;
  std::int64_t replications = 0;
  std::int64_t violations = 0;
  double rate = 0.0;
  double bound = 0.0;        // tail_bound(delta, n)
  double three_sigma = 0.0;  // binomial 3-sigma half width at the bound
  bool pass = false;         // rate <= bound + three_sigma
};

std::vector<ViolationReport> reports_from(const TrajectoryStats& stats,
                                          const AdaptedExperiment& exp,
                                          const MgfBound& bound,
                                          std::span<const double> deltas);

// Monte Carlo falsification harness for the tail bound: one report per
// (scheme, delta). A report fails only when the empirical rate exceeds the
// bound by more than the one-sided 3-sigma band.
std::vector<ViolationReport> verify_bound(const AdaptedExperiment& base,
                                          std::span<const Scheme> schemes,
                                          const MgfBound& bound,
                                          std::span<const double> deltas,
                                          std::int64_t replications,
                                          std::uint64_t seed, int threads = 0,
                                          bool enforce_pairing = true);

// Monte Carlo check that W_n = exp(rho*S(n) - N(n)*phi(rho)) has mean <= 1
// (it starts at 1 and is a supermartingale under a valid envelope).
struct SupermartingaleReport {
  double rho = 0.0;
  double mean = 0.0;
  double std_error = 0.0;
  double threshold = 0.0;  // 1 + 3 * std_error
  bool pass = false;
};

std::vector<SupermartingaleReport> supermartingale_check(
    const MgfBound& bound, const AdaptedExperiment& exp,
    std::span<const double> rhos, std::int64_t replications, std::uint64_t seed,
    int threads = 0, bool enforce_pairing = true);

}  // namespace knnb
