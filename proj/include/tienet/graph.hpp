#pragma once

// Immutable simple undirected graph in CSR form plus the static metric suite:
// degree CCDF, local clustering, components, mean degree, sampled geodesics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <unordered_set>
#include <utility>
#include <vector>

#include "tienet/core.hpp"

namespace tienet {

using Vertex = std::uint32_t;
using LocalEdge = std::pair<Vertex, Vertex>;

class Graph {
 public:
  Graph() : offsets_(1, 0) {}

  // Graph on vertices 0..n-1. Self-loops are rejected, duplicates collapse.
  Graph(std::size_t n, std::span<const LocalEdge> edges) : labels_(n) {
    std::iota(labels_.begin(), labels_.end(), PlayerIdx{0});
    build(edges);
  }

  // Vertex set is the set of edge endpoints; vertex v carries player label(v).
  static Graph from_pairs(std::span<const PairKey> pairs) {
    std::vector<PlayerIdx> labels;
    labels.reserve(pairs.size() * 2);
    for (const auto& p : pairs) {
      labels.push_back(p.lo);
      labels.push_back(p.hi);
    }
    std::sort(labels.begin(), labels.end());
    labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
    return with_labels(std::move(labels), pairs);
  }

  // Graph on an explicit sorted label set (isolated vertices allowed).
  static Graph with_labels(std::vector<PlayerIdx> labels, std::span<const PairKey> pairs) {
    if (!std::is_sorted(labels.begin(), labels.end()) ||
        std::adjacent_find(labels.begin(), labels.end()) != labels.end())
      throw InvariantError("graph labels must be sorted and unique");
    std::vector<LocalEdge> edges;
    edges.reserve(pairs.size());
    auto local = [&](PlayerIdx label) {
      auto it = std::lower_bound(labels.begin(), labels.end(), label);
      if (it == labels.end() || *it != label) throw InvariantError("edge endpoint not in vertex set");
      return static_cast<Vertex>(it - labels.begin());
    };
    for (const auto& p : pairs) edges.emplace_back(local(p.lo), local(p.hi));
    Graph g;
    g.labels_ = std::move(labels);
    g.build(edges);
    return g;
  }

  std::size_t vertex_count() const { return labels_.size(); }
  std::size_t edge_count() const { return nbrs_.size() / 2; }
  bool empty() const { return labels_.empty(); }

  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {nbrs_.data() + offsets_[v], degree(v)};
  }

  bool has_edge(Vertex u, Vertex v) const {
    auto n = neighbors(u);
    return std::binary_search(n.begin(), n.end(), v);
  }

  PlayerIdx label(Vertex v) const { return labels_[v]; }
  const std::vector<PlayerIdx>& labels() const { return labels_; }

  std::optional<Vertex> find(PlayerIdx label) const {
    auto it = std::lower_bound(labels_.begin(), labels_.end(), label);
    if (it == labels_.end() || *it != label) return std::nullopt;
    return static_cast<Vertex>(it - labels_.begin());
  }

  // Edges as (u, v) with u < v in lexicographic order.
  std::vector<LocalEdge> edges() const {
    std::vector<LocalEdge> out;
    out.reserve(edge_count());
    for (Vertex u = 0; u < vertex_count(); ++u)
      for (Vertex v : neighbors(u))
        if (u < v) out.emplace_back(u, v);
    return out;
  }

  // Edges as labelled player pairs, sorted.
  std::vector<PairKey> label_pairs() const {
    std::vector<PairKey> out;
    out.reserve(edge_count());
    for (auto [u, v] : edges()) out.push_back(PairKey{labels_[u], labels_[v]});
    return out;
  }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(vertex_count());
    for (Vertex v = 0; v < vertex_count(); ++v) d[v] = degree(v);
    return d;
  }

  // Subgraph induced by `vertices`; labels are carried over.
  Graph induced(std::span<const Vertex> vertices) const {
    std::vector<Vertex> keep(vertices.begin(), vertices.end());
    std::sort(keep.begin(), keep.end());
    keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
    std::vector<std::int64_t> remap(vertex_count(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) remap[keep[i]] = static_cast<std::int64_t>(i);
    std::vector<LocalEdge> sub;
    for (Vertex u : keep)
      for (Vertex v : neighbors(u))
        if (u < v && remap[v] >= 0)
          sub.emplace_back(static_cast<Vertex>(remap[u]), static_cast<Vertex>(remap[v]));
    Graph g;
    g.labels_.reserve(keep.size());
    for (Vertex u : keep) g.labels_.push_back(labels_[u]);
    g.build(sub);
    return g;
  }

 private:
  void build(std::span<const LocalEdge> edges) {
    const std::size_t n = labels_.size();
    std::vector<LocalEdge> directed;
    directed.reserve(edges.size() * 2);
    for (auto [u, v] : edges) {
      if (u >= n || v >= n) throw InvariantError("edge endpoint out of range");
      if (u == v) throw InvariantError("self-loop in simple graph");
      directed.emplace_back(u, v);
      directed.emplace_back(v, u);
    }
    std::sort(directed.begin(), directed.end());
    directed.erase(std::unique(directed.begin(), directed.end()), directed.end());
    offsets_.assign(n + 1, 0);
    for (auto [u, v] : directed) ++offsets_[u + 1];
    for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] += offsets_[i];
    nbrs_.resize(directed.size());
    for (std::size_t i = 0; i < directed.size(); ++i) nbrs_[i] = directed[i].second;
  }

  std::vector<PlayerIdx> labels_;
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> nbrs_;
};

// ccdf[k] = fraction of vertices with degree >= k, for k = 0..max_degree+1.
inline std::vector<double> degree_ccdf(const Graph& g) {
  if (g.empty()) throw DataError("degree CCDF of an empty graph");
  std::size_t max_deg = 0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) max_deg = std::max(max_deg, g.degree(v));
  std::vector<std::size_t> at_least(max_deg + 2, 0);
  for (Vertex v = 0; v < g.vertex_count(); ++v) ++at_least[g.degree(v)];
  for (std::size_t k = max_deg; k-- > 0;) at_least[k] += at_least[k + 1];
  std::vector<double> ccdf(max_deg + 2);
  const double n = static_cast<double>(g.vertex_count());
  for (std::size_t k = 0; k < ccdf.size(); ++k) ccdf[k] = static_cast<double>(at_least[k]) / n;
  return ccdf;
}

// Number of edges among the neighbours of v (triangles through v).
inline std::size_t triangles_at(const Graph& g, Vertex v) {
  auto nv = g.neighbors(v);
  std::size_t total = 0;
  for (std::size_t i = 0; i < nv.size(); ++i) {
    // neighbours w of v with w > nv[i] that are also adjacent to nv[i]
    auto ni = g.neighbors(nv[i]);
    auto a = nv.begin() + static_cast<std::ptrdiff_t>(i) + 1;
    auto b = std::upper_bound(ni.begin(), ni.end(), nv[i]);
    while (a != nv.end() && b != ni.end()) {
      if (*a < *b) ++a;
      else if (*b < *a) ++b;
      else { ++total; ++a; ++b; }
    }
  }
  return total;
}

// Connected neighbour pairs over possible neighbour pairs; 0 when degree < 2.
inline double local_clustering(const Graph& g, Vertex v) {
  if (v >= g.vertex_count()) throw DataError("vertex not in graph");
  const std::size_t d = g.degree(v);
  if (d < 2) return 0.0;
  return static_cast<double>(2 * triangles_at(g, v)) / static_cast<double>(d * (d - 1));
}

inline double mean_clustering(const Graph& g) {
  if (g.empty()) throw DataError("mean clustering of an empty graph");
  double sum = 0.0;
  for (Vertex v = 0; v < g.vertex_count(); ++v) sum += local_clustering(g, v);
  return sum / static_cast<double>(g.vertex_count());
}

struct ClusteringHistogram {
  // counts[b] covers (b/bins, (b+1)/bins], with bin 0 closed at 0.
  std::vector<std::size_t> counts;
  std::size_t low_degree = 0;  // vertices with degree < 2, reported apart
};

inline ClusteringHistogram clustering_histogram(const Graph& g, std::size_t bins = 10) {
  if (g.empty()) throw DataError("clustering histogram of an empty graph");
  if (bins == 0) throw ConfigError("histogram needs at least one bin");
  ClusteringHistogram h{std::vector<std::size_t>(bins, 0), 0};
  for (Vertex v = 0; v < g.vertex_count(); ++v) {
    const std::size_t d = g.degree(v);
    if (d < 2) {
      ++h.low_degree;
      continue;
    }
    // C = t / p exactly; bin = ceil(bins * t / p) - 1, clamped at 0
    const std::size_t t = triangles_at(g, v);
    const std::size_t p = d * (d - 1) / 2;
    std::size_t b = (bins * t + p - 1) / p;
    ++h.counts[b == 0 ? 0 : b - 1];
  }
  return h;
}

struct ComponentSummary {
  std::vector<std::uint32_t> component_of;  // ids ordered by smallest member vertex
  std::vector<std::size_t> sizes;           // indexed by component id
  std::uint32_t giant = 0;                  // largest; ties go to the smallest id

  std::size_t count() const { return sizes.size(); }
  std::size_t giant_size() const { return sizes.empty() ? 0 : sizes[giant]; }

  std::vector<std::size_t> sorted_sizes() const {
    auto s = sizes;
    std::sort(s.begin(), s.end(), std::greater<>());
    return s;
  }

  // component size -> number of components of that size
  std::map<std::size_t, std::size_t> size_distribution() const {
    std::map<std::size_t, std::size_t> dist;
    for (auto s : sizes) ++dist[s];
    return dist;
  }

  std::vector<Vertex> members(std::uint32_t id) const {
    std::vector<Vertex> out;
    for (Vertex v = 0; v < component_of.size(); ++v)
      if (component_of[v] == id) out.push_back(v);
    return out;
  }
};

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), rank_(n, 0) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
  }

  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (rank_[a] < rank_[b]) std::swap(a, b);
    parent_[b] = a;
    if (rank_[a] == rank_[b]) ++rank_[a];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::uint8_t> rank_;
};

inline ComponentSummary connected_components(const Graph& g) {
  const std::size_t n = g.vertex_count();
  DisjointSets sets(n);
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v : g.neighbors(u))
      if (u < v) sets.unite(u, v);
  ComponentSummary summary;
  summary.component_of.assign(n, 0);
  std::vector<std::int64_t> id_of_root(n, -1);
  for (Vertex v = 0; v < n; ++v) {
    auto root = sets.find(v);
    if (id_of_root[root] < 0) {
      id_of_root[root] = static_cast<std::int64_t>(summary.sizes.size());
      summary.sizes.push_back(0);
    }
    auto id = static_cast<std::uint32_t>(id_of_root[root]);
    summary.component_of[v] = id;
    ++summary.sizes[id];
  }
  for (std::uint32_t c = 0; c < summary.sizes.size(); ++c)
    if (summary.sizes[c] > summary.sizes[summary.giant]) summary.giant = c;
  return summary;
}

inline Graph giant_component(const Graph& g) {
  if (g.empty()) return Graph{};
  auto summary = connected_components(g);
  return g.induced(summary.members(summary.giant));
}

inline double mean_degree(const Graph& g) {
  if (g.empty()) throw DataError("mean degree of an empty vertex set");
  return 2.0 * static_cast<double>(g.edge_count()) / static_cast<double>(g.vertex_count());
}

struct GeodesicEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t pairs = 0;
  bool exact = false;
};

namespace detail {

// Single-source hop distances; unreachable vertices get -1.
inline std::vector<std::int64_t> bfs_distances(const Graph& g, Vertex source) {
  std::vector<std::int64_t> dist(g.vertex_count(), -1);
  std::vector<Vertex> queue{source};
  dist[source] = 0;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex v : g.neighbors(u))
      if (dist[v] < 0) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

// Bidirectional BFS with stamp-based visitation, reusable across queries.
class PairDistance {
 public:
  explicit PairDistance(const Graph& g)
      : g_(g), stamp_(g.vertex_count(), 0), side_(g.vertex_count(), 0), dist_(g.vertex_count(), 0) {}

  // Hop distance between s and t, or -1 when disconnected.
  std::int64_t operator()(Vertex s, Vertex t) {
    if (s == t) return 0;
    ++epoch_;
    std::vector<Vertex> front[2] = {{s}, {t}};
    mark(s, 0, 0);
    mark(t, 1, 0);
    std::int64_t depth[2] = {0, 0};
    while (!front[0].empty() && !front[1].empty()) {
      int side = front[0].size() <= front[1].size() ? 0 : 1;
      std::vector<Vertex> next;
      std::int64_t best = -1;
      for (Vertex u : front[side]) {
        for (Vertex v : g_.neighbors(u)) {
          if (stamp_[v] == epoch_) {
            if (side_[v] != side) {
              std::int64_t d = depth[side] + 1 + dist_[v];
              if (best < 0 || d < best) best = d;
            }
            continue;
          }
          mark(v, side, depth[side] + 1);
          next.push_back(v);
        }
      }
      if (best >= 0) return best;
      ++depth[side];
      front[side] = std::move(next);
    }
    return -1;
  }

 private:
  void mark(Vertex v, int side, std::int64_t d) {
    stamp_[v] = epoch_;
    side_[v] = static_cast<std::uint8_t>(side);
    dist_[v] = d;
  }

  const Graph& g_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::uint8_t> side_;
  std::vector<std::int64_t> dist_;
  std::uint64_t epoch_ = 0;
};

inline void require_connected(const Graph& g) {
  if (g.vertex_count() < 2) throw DataError("geodesic estimate needs at least 2 vertices");
  if (connected_components(g).count() != 1)
    throw DataError("geodesic estimate requires a connected graph (pass the giant component)");
}

// Unordered pair index k in [0, n(n-1)/2) -> (i, j) with j < i, k = i(i-1)/2 + j.
inline LocalEdge decode_pair(std::uint64_t k) {
  auto i = static_cast<std::uint64_t>((1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(k))) / 2.0);
  while (i * (i - 1) / 2 > k) --i;
  while ((i + 1) * i / 2 <= k) ++i;
  return {static_cast<Vertex>(i), static_cast<Vertex>(k - i * (i - 1) / 2)};
}

}  // namespace detail

// Exact mean hop distance over all unordered pairs of a connected graph.
inline GeodesicEstimate all_pairs_mean_geodesic(const Graph& g) {
  detail::require_connected(g);
  std::uint64_t total = 0;
  std::uint64_t pairs = 0;
  for (Vertex s = 0; s < g.vertex_count(); ++s) {
    auto dist = detail::bfs_distances(g, s);
    for (Vertex t = s + 1; t < g.vertex_count(); ++t) {
      total += static_cast<std::uint64_t>(dist[t]);
      ++pairs;
    }
  }
  return {static_cast<double>(total) / static_cast<double>(pairs), 0.0, pairs, true};
}

// Mean hop distance over n_pairs distinct unordered pairs drawn uniformly
// without replacement. Falls back to the exact mean when n_pairs covers
// every pair. The standard error includes the finite-population correction.
inline GeodesicEstimate mean_geodesic_sampled(const Graph& g, std::size_t n_pairs,
                                              std::uint64_t seed) {
  detail::require_connected(g);
  if (n_pairs == 0) throw ConfigError("n_pairs must be positive");
  const std::uint64_t n = g.vertex_count();
  const std::uint64_t population = n * (n - 1) / 2;
  if (n_pairs >= population) return all_pairs_mean_geodesic(g);

  // Floyd's subset sampling over pair indices
  std::mt19937_64 rng(seed);
  std::unordered_set<std::uint64_t> chosen;
  chosen.reserve(n_pairs * 2);
  for (std::uint64_t j = population - n_pairs; j < population; ++j) {
    std::uniform_int_distribution<std::uint64_t> pick(0, j);
    std::uint64_t t = pick(rng);
    if (!chosen.insert(t).second) chosen.insert(j);
  }
  std::vector<std::uint64_t> indices(chosen.begin(), chosen.end());
  std::sort(indices.begin(), indices.end());

  detail::PairDistance distance(g);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (auto k : indices) {
    auto [i, j] = detail::decode_pair(k);
    auto d = static_cast<double>(distance(i, j));
    if (d < 0) throw InvariantError("disconnected pair in connected graph");
    sum += d;
    sum_sq += d * d;
  }
  const auto m = static_cast<double>(n_pairs);
  const double mean = sum / m;
  double variance = m > 1 ? (sum_sq - m * mean * mean) / (m - 1) : 0.0;
  variance = std::max(variance, 0.0);
  const double fpc = 1.0 - m / static_cast<double>(population);
  return {mean, std::sqrt(variance / m * fpc), n_pairs, false};
}

}  // namespace tienet
