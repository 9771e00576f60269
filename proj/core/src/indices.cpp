#include "knnb/indices.hpp"

#include <cmath>
#include <stdexcept>

namespace knnb {

std::string_view to_string(IndexKind k) {
  return k == IndexKind::Ucb ? "ucb" : "klucb";
}

std::string_view to_string(PhiKind k) {
  return k == PhiKind::Const ? "const" : "log_scaled";
}

void PhiSpec::validate() const {
  if (kind == PhiKind::Const) {
    if (scale < 1.0) throw std::invalid_argument("phi.scale: const phi needs scale >= 1");
  } else {
    if (scale <= 0.0) throw std::invalid_argument("phi.scale: log_scaled phi needs scale > 0");
  }
}

void IndexParams::validate() const {
  if (theta <= 0.0) throw std::invalid_argument("theta: must be > 0");
  if (klucb_tol <= 0.0) throw std::invalid_argument("klucb_tol: must be > 0");
  phi.validate();
}

double kl_div(double p, double q) {
  if (!(p >= 0.0 && p <= 1.0) || !(q >= 0.0 && q <= 1.0))
    throw std::invalid_argument("kl_div: arguments must lie in [0,1]");
  if (p == q) return 0.0;
  double out = 0.0;
  if (p > 0.0) {
    if (q == 0.0) return kInf;
    out += p * std::log(p / q);
  }
  if (p < 1.0) {
    if (q == 1.0) return kInf;
    out += (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
  }
  // rounding can leave a ~1e-17 negative residue when q is within a few ulp
  // of p; the divergence itself is never negative
  return std::max(0.0, out);
}

double uncertainty(double theta, const PhiSpec& phi, std::int64_t t,
                   std::int64_t pulls, double radius) {
  if (t < 2) throw std::invalid_argument("uncertainty: t must be >= 2");
  if (pulls < 0) throw std::invalid_argument("uncertainty: negative pull count");
  if (radius < 0.0) throw std::invalid_argument("uncertainty: negative radius");
  const double theta_log_t = theta * std::log(static_cast<double>(t));
  return uncertainty_at(theta_log_t, phi(t), pulls, radius);
}

KSelection select_k(double theta, const PhiSpec& phi, std::int64_t t,
                    const PrefixStats& stats) {
  const std::size_t m = stats.pulls.size();
  if (m == 0) throw std::invalid_argument("select_k: empty stats");
  const double theta_log_t = theta * std::log(static_cast<double>(t));
  const double phi_t = phi(t);

  KSelection best{1, kInf};
  for (std::size_t q = 0; q < m; ++q) {
    const double u = uncertainty_at(theta_log_t, phi_t, stats.pulls[q], stats.radius[q]);
    if (u < best.uncertainty) {
      best.uncertainty = u;
      best.k = static_cast<int>(q + 1);
    }
  }
  if (best.uncertainty == kInf) best.k = static_cast<int>(m);
  return best;
}

double klucb_sup(double mean_k, std::int64_t pulls, double theta_log_t,
                 double tol) {
  if (!(mean_k >= 0.0 && mean_k <= 1.0))
    throw std::invalid_argument("KL-UCB requires bounded rewards");
  if (tol <= 0.0) throw std::invalid_argument("klucb_sup: tol must be > 0");
  if (pulls <= 0) return 1.0;  // constraint vacuous
  if (mean_k >= 1.0) return 1.0;
  if (theta_log_t <= 0.0) return mean_k;  // zero budget pins the sup at the mean
  const double n = static_cast<double>(pulls);
  if (n * kl_div(mean_k, 1.0) <= theta_log_t) return 1.0;

  // d(mean, .) is strictly increasing on [mean, 1]; keep lo feasible
  double lo = mean_k;
  double hi = 1.0;
  for (int iter = 0; iter < 100 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (n * kl_div(mean_k, mid) <= theta_log_t)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double index_klucb(double mean_k, std::int64_t pulls, double theta,
                   const PhiSpec& phi, std::int64_t t, double radius,
                   double tol) {
  const double theta_log_t = theta * std::log(static_cast<double>(t));
  return klucb_sup(mean_k, pulls, theta_log_t, tol) + phi(t) * radius;
}

}  // namespace knnb
