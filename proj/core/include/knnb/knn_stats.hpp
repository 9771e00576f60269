#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnb/env.hpp"

namespace knnb {

// One observed (covariate, pulled arm, realized reward) triple. History is
// append-only; entries are never modified once recorded.
struct HistoryEntry {
  Covariate x;
  int arm = 0;
  double reward = 0.0;
};

// Distance-sorted enumeration of the history relative to a query point.
// order[q] is a 0-based history index; dist[q] = distance to that entry,
// nondecreasing in q. Equal distances resolve to the earlier history index.
struct NeighbourOrder {
  std::vector<int> order;
  std::vector<double> dist;
};

// Cumulative per-arm statistics over the neighbour prefixes. Index q holds
// the values for the prefix of size k = q+1:
//   pulls[q]      — pulls of the arm among the k nearest neighbours
//   reward_sum[q] — their reward sum
//   radius[q]     — distance to the k-th nearest neighbour
//   mean[q]       — reward_sum/pulls with 0/0 := 0
struct PrefixStats {
  int arm = 0;
  std::vector<std::int64_t> pulls;
  std::vector<double> reward_sum;
  std::vector<double> radius;
  std::vector<double> mean;
};

// Sort the history by distance to x (stable in the history index).
// One call is O(t log t) time and O(t) memory; a full horizon-n simulation
// that re-sorts every round is O(n^2 log n).
NeighbourOrder order_neighbours(const Covariate& x,
                                std::span<const HistoryEntry> history);

// One linear pass producing the statistics for every prefix size at once.
PrefixStats prefix_stats(const NeighbourOrder& order,
                         std::span<const HistoryEntry> history, int arm);

// Reference recomputation of the size-k prefix statistics straight from the
// definitions (independent re-sort, direct sums). Test oracle; accumulates
// left-to-right over the sorted prefix so results match prefix_stats
// bit-for-bit.
struct NaiveStats {
  std::int64_t pulls = 0;
  double reward_sum = 0.0;
  double radius = 0.0;
  double mean = 0.0;
};

NaiveStats naive_stats(const Covariate& x, std::span<const HistoryEntry> history,
                       int arm, int k);

}  // namespace knnb
