#pragma once

// Weekly friendship snapshots: a classified friend pair is an edge of week w
// iff the pair co-occurs in at least one bin falling in that week.

#include <algorithm>
#include <cstdint>
#include <span>
#include <tuple>
#include <vector>

#include "tienet/core.hpp"
#include "tienet/graph.hpp"
#include "tienet/ingest.hpp"
#include "tienet/pairs.hpp"

namespace tienet {

inline constexpr int kDefaultWeeks = 44;

struct Snapshot {
  int week = 0;
  Graph graph;  // vertices are the endpoints of the week's edges
};

struct SnapshotSet {
  std::vector<Snapshot> weeks;
  Graph cumulative;
  std::size_t excluded_cooccurrences = 0;  // falling at or beyond n_weeks
};

inline int week_of_bin(std::int64_t bin, std::int64_t bin_width) {
  return static_cast<int>((bin * bin_width) / kSecondsPerWeek);
}

inline SnapshotSet build_snapshots(std::span<const BinnedCooccurrence> cooccurrences,
                                   std::span<const PairKey> friend_pairs, std::int64_t bin_width,
                                   int n_weeks = kDefaultWeeks) {
  if (bin_width <= 0) throw ConfigError("bin width must be positive");
  if (n_weeks < 1) throw ConfigError("n_weeks must be >= 1");
  std::vector<PairKey> friends(friend_pairs.begin(), friend_pairs.end());
  std::sort(friends.begin(), friends.end());

  SnapshotSet out;
  std::vector<std::vector<PairKey>> weekly(static_cast<std::size_t>(n_weeks));
  for (const auto& c : cooccurrences) {
    if (c.bin < 0) throw DataError("negative co-occurrence bin");
    int w = week_of_bin(c.bin, bin_width);
    if (w >= n_weeks) {
      ++out.excluded_cooccurrences;
      continue;
    }
    if (std::binary_search(friends.begin(), friends.end(), c.pair))
      weekly[static_cast<std::size_t>(w)].push_back(c.pair);
  }

  std::vector<PairKey> all;
  out.weeks.reserve(weekly.size());
  for (int w = 0; w < n_weeks; ++w) {
    auto& edges = weekly[static_cast<std::size_t>(w)];
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    all.insert(all.end(), edges.begin(), edges.end());
    out.weeks.push_back({w, Graph::from_pairs(edges)});
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  out.cumulative = Graph::from_pairs(all);
  return out;
}

inline SnapshotSet build_snapshots(std::span<const BinnedCooccurrence> cooccurrences,
                                   std::span<const TieScore> friend_edges, std::int64_t bin_width,
                                   int n_weeks = kDefaultWeeks) {
  std::vector<PairKey> pairs;
  pairs.reserve(friend_edges.size());
  for (const auto& e : friend_edges) pairs.push_back(e.pair);
  return build_snapshots(cooccurrences, std::span<const PairKey>(pairs), bin_width, n_weeks);
}

}  // namespace tienet
