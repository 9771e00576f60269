#include "knnb/knn_stats.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace knnb {

NeighbourOrder order_neighbours(const Covariate& x,
                                std::span<const HistoryEntry> history) {
  if (history.empty()) throw std::invalid_argument("order_neighbours: no history");
  std::vector<std::pair<double, int>> by_dist;
  by_dist.reserve(history.size());
  for (std::size_t s = 0; s < history.size(); ++s)
    by_dist.emplace_back(euclidean(x, history[s].x), static_cast<int>(s));
  std::sort(by_dist.begin(), by_dist.end());

  NeighbourOrder out;
  out.order.reserve(by_dist.size());
  out.dist.reserve(by_dist.size());
  for (const auto& [d, s] : by_dist) {
    out.order.push_back(s);
    out.dist.push_back(d);
  }
  return out;
}

PrefixStats prefix_stats(const NeighbourOrder& order,
                         std::span<const HistoryEntry> history, int arm) {
  if (order.order.size() != history.size())
    throw std::invalid_argument("prefix_stats: order/history length mismatch");
  if (arm < 0) throw std::invalid_argument("prefix_stats: arm index out of range");
  for (const HistoryEntry& e : history)
    if (e.arm < 0) throw std::invalid_argument("prefix_stats: negative arm in history");

  const std::size_t m = history.size();
  PrefixStats out;
  out.arm = arm;
  out.pulls.resize(m);
  out.reward_sum.resize(m);
  out.radius.resize(m);
  out.mean.resize(m);

  std::int64_t n = 0;
  double s = 0.0;
  for (std::size_t q = 0; q < m; ++q) {
    const HistoryEntry& e = history[order.order[q]];
    if (e.arm == arm) {
      ++n;
      s += e.reward;
    }
    out.pulls[q] = n;
    out.reward_sum[q] = s;
    out.radius[q] = order.dist[q];
    out.mean[q] = n > 0 ? s / static_cast<double>(n) : 0.0;
  }
  return out;
}

NaiveStats naive_stats(const Covariate& x, std::span<const HistoryEntry> history,
                       int arm, int k) {
  if (history.empty()) throw std::invalid_argument("naive_stats: no history");
  if (k < 1 || static_cast<std::size_t>(k) > history.size())
    throw std::invalid_argument("naive_stats: k out of range");
  if (arm < 0) throw std::invalid_argument("naive_stats: arm index out of range");

  // full re-sort from scratch, deliberately not sharing code with
  // order_neighbours: stable sort on distance alone gives the same
  // earlier-index-first tie rule
  std::vector<int> idx(history.size());
  for (std::size_t s = 0; s < idx.size(); ++s) idx[s] = static_cast<int>(s);
  std::vector<double> dist(history.size());
  for (std::size_t s = 0; s < history.size(); ++s)
    dist[s] = euclidean(x, history[s].x);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](int a, int b) { return dist[a] < dist[b]; });

  NaiveStats out;
  for (int q = 0; q < k; ++q) {
    const HistoryEntry& e = history[idx[q]];
    if (e.arm == arm) {
      ++out.pulls;
      out.reward_sum += e.reward;
    }
  }
  out.radius = dist[idx[k - 1]];
  out.mean = out.pulls > 0 ? out.reward_sum / static_cast<double>(out.pulls) : 0.0;
  return out;
}

}  // namespace knnb
