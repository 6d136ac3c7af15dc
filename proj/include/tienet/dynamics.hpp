#pragma once

// Cross-snapshot analyses: per-week metric table, turnover curves,
// densification regressions and the clustering/engagement relation.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "tienet/core.hpp"
#include "tienet/graph.hpp"
#include "tienet/snapshots.hpp"
#include "tienet/stats.hpp"

namespace tienet {

struct WeeklyMetricRow {
  int week = 0;
  std::size_t vertices = 0;
  std::size_t edges = 0;
  std::optional<double> mean_degree;      // empty week: unset
  std::optional<double> mean_clustering;  // empty week: unset
  std::size_t giant_size = 0;
  std::optional<GeodesicEstimate> geodesic;  // unset when giant component < 2 vertices
};

inline std::vector<WeeklyMetricRow> weekly_metrics(std::span<const Snapshot> snapshots,
                                                   std::size_t n_pairs, std::uint64_t seed,
                                                   unsigned threads = 1) {
  std::vector<WeeklyMetricRow> rows(snapshots.size());
  parallel_for(snapshots.size(), threads, [&](std::size_t i) {
    const auto& s = snapshots[i];
    WeeklyMetricRow row;
    row.week = s.week;
    row.vertices = s.graph.vertex_count();
    row.edges = s.graph.edge_count();
    if (!s.graph.empty()) {
      row.mean_degree = mean_degree(s.graph);
      row.mean_clustering = mean_clustering(s.graph);
      Graph giant = giant_component(s.graph);
      row.giant_size = giant.vertex_count();
      if (giant.vertex_count() >= 2)
        row.geodesic = mean_geodesic_sampled(giant, n_pairs,
                                             derive_seed(seed, 0x9e0, static_cast<std::uint64_t>(s.week)));
    }
    rows[i] = std::move(row);
  });
  return rows;
}

// Sorted player labels present in each week.
using Presence = std::vector<std::vector<PlayerIdx>>;

inline Presence presence_of(std::span<const Snapshot> snapshots) {
  Presence presence;
  presence.reserve(snapshots.size());
  for (const auto& s : snapshots) presence.push_back(s.graph.labels());
  return presence;
}

namespace detail {

struct Span {
  std::size_t first = 0;
  std::size_t last = 0;
};

inline std::map<PlayerIdx, Span> appearance_spans(const Presence& presence) {
  std::map<PlayerIdx, Span> spans;
  for (std::size_t w = 0; w < presence.size(); ++w)
    for (auto p : presence[w]) {
      auto [it, inserted] = spans.try_emplace(p, Span{w, w});
      if (!inserted) it->second.last = w;
    }
  return spans;
}

}  // namespace detail

// Fraction of all ever-observed players first seen at or before each week.
// All zeros when nobody is ever observed.
inline std::vector<double> cumulative_appearance(const Presence& presence) {
  std::vector<double> out(presence.size(), 0.0);
  auto spans = detail::appearance_spans(presence);
  if (spans.empty()) return out;
  std::vector<std::size_t> first_at(presence.size(), 0);
  for (const auto& [p, s] : spans) ++first_at[s.first];
  std::size_t running = 0;
  for (std::size_t w = 0; w < presence.size(); ++w) {
    running += first_at[w];
    out[w] = static_cast<double>(running) / static_cast<double>(spans.size());
  }
  return out;
}

// Fraction of all ever-observed players whose last appearance is at or after
// each week.
inline std::vector<double> survival_after(const Presence& presence) {
  std::vector<double> out(presence.size(), 0.0);
  auto spans = detail::appearance_spans(presence);
  if (spans.empty()) return out;
  std::vector<std::size_t> last_at(presence.size(), 0);
  for (const auto& [p, s] : spans) ++last_at[s.last];
  std::size_t running = 0;
  for (std::size_t w = presence.size(); w-- > 0;) {
    running += last_at[w];
    out[w] = static_cast<double>(running) / static_cast<double>(spans.size());
  }
  return out;
}

inline std::vector<double> cumulative_appearance(std::span<const Snapshot> snapshots) {
  return cumulative_appearance(presence_of(snapshots));
}

inline std::vector<double> survival_after(std::span<const Snapshot> snapshots) {
  return survival_after(presence_of(snapshots));
}

// Longest run of consecutive week indices.
inline int max_consecutive_weeks(std::span<const int> weeks) {
  if (weeks.empty()) throw DataError("max_consecutive_weeks of an empty week set");
  std::vector<int> w(weeks.begin(), weeks.end());
  std::sort(w.begin(), w.end());
  w.erase(std::unique(w.begin(), w.end()), w.end());
  int best = 1, run = 1;
  for (std::size_t i = 1; i < w.size(); ++i) {
    run = w[i] == w[i - 1] + 1 ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

struct VertexEdgeCount {
  double vertices = 0;
  double edges = 0;
};

inline std::vector<VertexEdgeCount> vertex_edge_counts(std::span<const Snapshot> snapshots) {
  std::vector<VertexEdgeCount> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots)
    out.push_back({static_cast<double>(s.graph.vertex_count()), static_cast<double>(s.graph.edge_count())});
  return out;
}

struct DensificationFit {
  FitResult fit;
  std::size_t excluded_empty = 0;  // weeks with zero vertices left out
};

// E on V by least squares. Weeks with no vertices are excluded and counted.
inline DensificationFit densification_fit(std::span<const VertexEdgeCount> points) {
  std::vector<double> x, y;
  DensificationFit out;
  for (const auto& p : points) {
    if (p.vertices <= 0) {
      ++out.excluded_empty;
      continue;
    }
    x.push_back(p.vertices);
    y.push_back(p.edges);
  }
  out.fit = linear_fit(x, y);
  return out;
}

// log E on log V; the slope is the densification exponent.
inline FitResult loglog_exponent(std::span<const VertexEdgeCount> points) {
  std::vector<double> x, y;
  for (const auto& p : points) {
    if (p.vertices <= 0 || p.edges <= 0) throw DataError("log-log fit needs positive coordinates");
    x.push_back(std::log(p.vertices));
    y.push_back(std::log(p.edges));
  }
  return linear_fit(x, y);
}

inline std::vector<std::optional<double>> mean_clustering_series(std::span<const Snapshot> snapshots) {
  std::vector<std::optional<double>> out;
  out.reserve(snapshots.size());
  for (const auto& s : snapshots)
    out.push_back(s.graph.empty() ? std::nullopt : std::optional<double>(mean_clustering(s.graph)));
  return out;
}

struct EngagementRow {
  int c = 0;  // max consecutive weeks present
  double mean_clustering = 0.0;
  std::size_t cohort_size = 0;
  std::optional<double> mean_cumulative_clustering;  // same cohort, cumulative-graph C_i
};

struct EngagementResult {
  std::vector<EngagementRow> rows;  // ascending c
  FitResult fit;                    // mean_clustering on c, rows weighted equally
};

// Per player: c from the weeks the player appears in; clustering is the mean
// of the player's weekly C_i over those weeks. Players weigh equally within a
// cohort.
inline EngagementResult clustering_vs_engagement(std::span<const Snapshot> snapshots,
                                                 const Graph* cumulative = nullptr) {
  struct Track {
    std::vector<int> weeks;
    double clustering_sum = 0.0;
  };
  std::map<PlayerIdx, Track> players;
  for (const auto& s : snapshots)
    for (Vertex v = 0; v < s.graph.vertex_count(); ++v) {
      auto& t = players[s.graph.label(v)];
      t.weeks.push_back(s.week);
      t.clustering_sum += local_clustering(s.graph, v);
    }

  struct Cohort {
    double sum = 0.0;
    double cumulative_sum = 0.0;
    std::size_t size = 0;
  };
  std::map<int, Cohort> cohorts;
  for (const auto& [label, t] : players) {
    auto& c = cohorts[max_consecutive_weeks(t.weeks)];
    c.sum += t.clustering_sum / static_cast<double>(t.weeks.size());
    ++c.size;
    if (cumulative) {
      auto v = cumulative->find(label);
      if (!v) throw InvariantError("snapshot player missing from cumulative graph");
      c.cumulative_sum += local_clustering(*cumulative, *v);
    }
  }
  if (cohorts.size() < 2) throw DataError("engagement fit needs at least two distinct c values");

  EngagementResult out;
  std::vector<double> x, y;
  for (const auto& [c, cohort] : cohorts) {
    EngagementRow row{c, cohort.sum / static_cast<double>(cohort.size), cohort.size, std::nullopt};
    if (cumulative) row.mean_cumulative_clustering = cohort.cumulative_sum / static_cast<double>(cohort.size);
    out.rows.push_back(row);
    x.push_back(c);
    y.push_back(row.mean_clustering);
  }
  out.fit = linear_fit(x, y, 2);
  return out;
}

}  // namespace tienet
