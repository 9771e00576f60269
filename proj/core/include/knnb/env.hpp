#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "knnb/rng.hpp"

namespace knnb {

// Feature vector observed before each decision. Length equals the
// environment's ambient dimension; entries are always finite.
using Covariate = std::vector<double>;

double euclidean(const Covariate& a, const Covariate& b);

enum class EnvKind { FlipLine, BumpCube, EmbeddedCircle };
enum class NoiseKind { Bernoulli, GaussianUnit };

std::string_view to_string(EnvKind k);
std::string_view to_string(NoiseKind k);

// Shape of the BumpCube mean field: arm a has a tent bump of the given
// height over a base level, centred on the cube diagonal. Lipschitz
// constant is height/width.
struct BumpParams {
  double base = 0.2;
  double height = 0.6;
  double width = 0.3;
};

struct EnvironmentSpec {
  EnvKind kind = EnvKind::FlipLine;
  int ambient_dim = 1;
  int arm_count = 2;
  NoiseKind noise = NoiseKind::Bernoulli;
  BumpParams bump;

  // throws std::invalid_argument on a malformed spec
  void validate() const;
};

// One interaction round. The full reward vector is realized (the regret
// definition needs the oracle arm's realized reward); the simulator only
// ever reveals the chosen arm's entry to the policy.
struct Round {
  Covariate x;
  std::vector<double> rewards;  // one realized reward per arm
  int oracle_arm = 0;           // lowest-index argmax of the mean field
  double oracle_mean = 0.0;
};

// Synthetic contextual-bandit environment on a metric space. Immutable
// after construction; all sampling goes through a caller-owned Rng, so
// concurrent replications never share state.
class Environment {
 public:
  explicit Environment(EnvironmentSpec spec);

  const EnvironmentSpec& spec() const { return spec_; }
  int arm_count() const { return spec_.arm_count; }
  int ambient_dim() const { return spec_.ambient_dim; }

  // Lipschitz constant the mean field is guaranteed to satisfy
  double declared_lipschitz() const;

  double mean(int arm, const Covariate& x) const;  // f^a(x), always in [0,1]
  std::vector<double> means(const Covariate& x) const;

  Covariate sample_covariate(Rng& rng) const;
  Round sample_round(Rng& rng) const;
  // realize rewards at a forced covariate (diagnostics and tests)
  Round sample_round_at(const Covariate& x, Rng& rng) const;

 private:
  EnvironmentSpec spec_;
};

// Suboptimality gaps at x: per_arm[a] = max_b f^b(x) - f^a(x), and the
// smallest strictly positive entry (0 when all arms are tied).
struct GapResult {
  std::vector<double> per_arm;
  double min_positive = 0.0;
};

GapResult gap(const Environment& env, const Covariate& x);

// Monte Carlo estimate of mu{ 0 < gap(X) < delta }; certifies a declared
// margin exponent.
double margin_mass_estimate(const Environment& env, double delta,
                            std::int64_t samples, Rng& rng);

// Monte Carlo estimate of mu(B(x, r)); certifies a declared intrinsic
// dimension.
double ball_mass_estimate(const Environment& env, const Covariate& x, double r,
                          std::int64_t samples, Rng& rng);

}  // namespace knnb
