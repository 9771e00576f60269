#include "knnb/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace knnb {

namespace {

constexpr double kCircleRadius = 0.5;

[[noreturn]] void fail(const std::string& what) { throw std::invalid_argument(what); }

}  // namespace

double euclidean(const Covariate& a, const Covariate& b) {
  if (a.size() != b.size()) fail("euclidean: dimension mismatch");
  double sq = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) {
    const double diff = a[d] - b[d];
    sq += diff * diff;
  }
  return std::sqrt(sq);
}

std::string_view to_string(EnvKind k) {
  switch (k) {
    case EnvKind::FlipLine: return "flip_line";
    case EnvKind::BumpCube: return "bump_cube";
    case EnvKind::EmbeddedCircle: return "embedded_circle";
  }
  return "?";
}

std::string_view to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::Bernoulli: return "bernoulli";
    case NoiseKind::GaussianUnit: return "gaussian_unit";
  }
  return "?";
}

void EnvironmentSpec::validate() const {
  if (arm_count < 1) fail("environment.arms: must be >= 1");
  if (ambient_dim < 1) fail("environment.ambient_dim: must be >= 1");
  switch (kind) {
    case EnvKind::FlipLine:
      if (ambient_dim != 1) fail("environment.ambient_dim: flip_line requires 1");
      if (arm_count != 2) fail("environment.arms: flip_line requires 2");
      break;
    case EnvKind::BumpCube:
      if (bump.base < 0.0 || bump.height <= 0.0 || bump.width <= 0.0 ||
          bump.base + bump.height > 1.0)
        fail("environment.params: bump mean field must stay inside [0,1]");
      break;
    case EnvKind::EmbeddedCircle:
      if (ambient_dim < 2) fail("environment.ambient_dim: embedded_circle requires >= 2");
      break;
  }
}

Environment::Environment(EnvironmentSpec spec) : spec_(spec) { spec_.validate(); }

double Environment::declared_lipschitz() const {
  switch (spec_.kind) {
    case EnvKind::FlipLine:
      return 1.0;
    case EnvKind::BumpCube:
      return spec_.bump.height / spec_.bump.width;
    case EnvKind::EmbeddedCircle:
      // angular slope 0.4/radius, times the arc-over-chord factor pi/2
      return (0.4 / kCircleRadius) * (std::numbers::pi / 2.0);
  }
  return 0.0;
}

double Environment::mean(int arm, const Covariate& x) const {
  switch (spec_.kind) {
    case EnvKind::FlipLine:
      return arm == 0 ? x[0] : 1.0 - x[0];
    case EnvKind::BumpCube: {
      // arm centres spread along the cube diagonal
      const double c = (arm + 0.5) / spec_.arm_count;
      double sq = 0.0;
      for (int d = 0; d < spec_.ambient_dim; ++d) {
        const double diff = x[d] - c;
        sq += diff * diff;
      }
      const double dist = std::sqrt(sq);
      return spec_.bump.base +
             spec_.bump.height * std::max(0.0, 1.0 - dist / spec_.bump.width);
    }
    case EnvKind::EmbeddedCircle: {
      const double angle = std::atan2(x[1], x[0]);
      const double offset = 2.0 * std::numbers::pi * arm / spec_.arm_count;
      return 0.5 + 0.4 * std::cos(angle - offset);
    }
  }
  return 0.0;
}

std::vector<double> Environment::means(const Covariate& x) const {
  std::vector<double> out(spec_.arm_count);
  for (int a = 0; a < spec_.arm_count; ++a) out[a] = mean(a, x);
  return out;
}

Covariate Environment::sample_covariate(Rng& rng) const {
  switch (spec_.kind) {
    case EnvKind::FlipLine:
      return {rng.uniform()};
    case EnvKind::BumpCube: {
      Covariate x(spec_.ambient_dim);
      for (auto& v : x) v = rng.uniform();
      return x;
    }
    case EnvKind::EmbeddedCircle: {
      Covariate x(spec_.ambient_dim, 0.0);
      const double angle = 2.0 * std::numbers::pi * rng.uniform();
      x[0] = kCircleRadius * std::cos(angle);
      x[1] = kCircleRadius * std::sin(angle);
      return x;
    }
  }
  return {};
}

Round Environment::sample_round_at(const Covariate& x, Rng& rng) const {
  Round round;
  round.x = x;
  round.rewards.resize(spec_.arm_count);
  round.oracle_arm = 0;
  round.oracle_mean = mean(0, x);
  for (int a = 0; a < spec_.arm_count; ++a) {
    const double m = mean(a, x);
    if (m > round.oracle_mean) {
      round.oracle_mean = m;
      round.oracle_arm = a;
    }
    switch (spec_.noise) {
      case NoiseKind::Bernoulli:
        round.rewards[a] = rng.bernoulli(m) ? 1.0 : 0.0;
        break;
      case NoiseKind::GaussianUnit:
        round.rewards[a] = m + rng.normal();
        break;
    }
  }
  return round;
}

Round Environment::sample_round(Rng& rng) const {
  return sample_round_at(sample_covariate(rng), rng);
}

GapResult gap(const Environment& env, const Covariate& x) {
  GapResult out;
  out.per_arm.resize(env.arm_count());
  const std::vector<double> f = env.means(x);
  const double best = *std::max_element(f.begin(), f.end());
  out.min_positive = 0.0;
  for (int a = 0; a < env.arm_count(); ++a) {
    out.per_arm[a] = best - f[a];
    if (out.per_arm[a] > 0.0 &&
        (out.min_positive == 0.0 || out.per_arm[a] < out.min_positive))
      out.min_positive = out.per_arm[a];
  }
  return out;
}

double margin_mass_estimate(const Environment& env, double delta,
                            std::int64_t samples, Rng& rng) {
  if (delta <= 0.0) fail("margin_mass_estimate: delta must be > 0");
  if (samples < 1) fail("margin_mass_estimate: samples must be >= 1");
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const Covariate x = env.sample_covariate(rng);
    const double g = gap(env, x).min_positive;
    if (g > 0.0 && g < delta) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

double ball_mass_estimate(const Environment& env, const Covariate& x, double r,
                          std::int64_t samples, Rng& rng) {
  if (r <= 0.0) fail("ball_mass_estimate: r must be > 0");
  if (samples < 1) fail("ball_mass_estimate: samples must be >= 1");
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    if (euclidean(env.sample_covariate(rng), x) < r) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace knnb
