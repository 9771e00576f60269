#pragma once

#include <cstdint>
#include <limits>
#include <string_view>

#include "knnb/knn_stats.hpp"

namespace knnb {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class IndexKind { Ucb, KlUcb };

std::string_view to_string(IndexKind k);

// Nondecreasing bias schedule t -> [1, inf).
enum class PhiKind { Const, LogScaled };

struct PhiSpec {
  PhiKind kind = PhiKind::Const;
  double scale = 1.0;

  double operator()(std::int64_t t) const {
    if (kind == PhiKind::Const) return scale;
    return std::max(1.0, scale * std::log(static_cast<double>(t)));
  }

  void validate() const;  // Const needs scale >= 1, LogScaled scale > 0
};

std::string_view to_string(PhiKind k);

struct IndexParams {
  double theta = 4.5;  // exploration scale; 4.5 suits UCB, 2.5 suits KL-UCB
  PhiSpec phi;
  IndexKind kind = IndexKind::Ucb;
  double klucb_tol = 1e-9;

  void validate() const;
};

// Bernoulli KL divergence d(p,q) with the usual conventions:
// 0*log(0/.) = 0, d(p,0) = +inf for p > 0, d(p,1) = +inf for p < 1.
// Arguments outside [0,1] are rejected.
double kl_div(double p, double q);

// sqrt(theta*log(t)/N) + phi(t)*r, with +inf when the arm has no pulls in
// the prefix. The overload on precomputed (theta*log t, phi(t)) is the hot
// path; both produce identical doubles.
double uncertainty(double theta, const PhiSpec& phi, std::int64_t t,
                   std::int64_t pulls, double radius);

inline double uncertainty_at(double theta_log_t, double phi_t,
                             std::int64_t pulls, double radius) {
  if (pulls <= 0) return kInf;
  return std::sqrt(theta_log_t / static_cast<double>(pulls)) + phi_t * radius;
}

// argmin of the uncertainty over prefix sizes, ties to the smallest k.
// When every value is +inf (arm absent from the history) falls back to the
// whole history, k = t-1.
struct KSelection {
  int k = 0;               // 1-based prefix size
  double uncertainty = 0;  // value at k
};

KSelection select_k(double theta, const PhiSpec& phi, std::int64_t t,
                    const PrefixStats& stats);

inline double index_ucb(double mean_k, double uncertainty_k) {
  return mean_k + uncertainty_k;
}

// sup{ w in [0,1] : N * d(mean, w) <= theta_log_t }, by monotone bisection
// on [mean, 1]. N = 0 and mean = 1 make the constraint vacuous (-> 1).
// Result is within tol below the true supremum.
double klucb_sup(double mean_k, std::int64_t pulls, double theta_log_t,
                 double tol = 1e-9);

// the KL-UCB index: sup term plus the phi(t)*r bias
double index_klucb(double mean_k, std::int64_t pulls, double theta,
                   const PhiSpec& phi, std::int64_t t, double radius,
                   double tol = 1e-9);

}  // namespace knnb
