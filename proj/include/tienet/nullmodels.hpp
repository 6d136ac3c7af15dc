#pragma once

// Erased configuration model and the observed-vs-null comparison.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tienet/core.hpp"
#include "tienet/graph.hpp"

namespace tienet {

inline constexpr std::size_t kDefaultNullSamples = 20;
inline constexpr std::size_t kDefaultGeodesicPairs = 1000;

struct ConfigurationSample {
  Graph graph;
  std::size_t self_loops = 0;   // stub pairs erased as self-loops
  std::size_t multi_edges = 0;  // stub pairs erased as repeats
  double erased_stub_fraction = 0.0;

  std::size_t erased_edges() const { return self_loops + multi_edges; }
};

// Uniform stub matching, then deletion of self-loops and repeated edges.
// Vertex v of the result has requested degree degrees[v].
inline ConfigurationSample configuration_model(std::span<const std::size_t> degrees,
                                               std::uint64_t seed) {
  std::size_t total = 0;
  for (auto d : degrees) total += d;
  if (total % 2 != 0) throw DataError("degree sequence has an odd sum");

  std::vector<Vertex> stubs;
  stubs.reserve(total);
  for (Vertex v = 0; v < degrees.size(); ++v) stubs.insert(stubs.end(), degrees[v], v);
  std::mt19937_64 rng(seed);
  std::shuffle(stubs.begin(), stubs.end(), rng);

  ConfigurationSample out;
  std::vector<LocalEdge> edges;
  edges.reserve(total / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    Vertex a = stubs[i], b = stubs[i + 1];
    if (a == b) {
      ++out.self_loops;
      continue;
    }
    edges.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(edges.begin(), edges.end());
  auto last = std::unique(edges.begin(), edges.end());
  out.multi_edges = static_cast<std::size_t>(edges.end() - last);
  edges.erase(last, edges.end());
  out.graph = Graph(degrees.size(), edges);
  out.erased_stub_fraction = total == 0 ? 0.0 : 2.0 * static_cast<double>(out.erased_edges()) / static_cast<double>(total);
  return out;
}

struct NullMetrics {
  std::size_t gc_size = 0;
  std::optional<double> mean_geodesic;  // unset when the giant component has < 2 vertices
  double mean_clustering = 0.0;
  double erased_stub_fraction = 0.0;    // zero for the observed graph
};

struct NullComparisonReport {
  NullMetrics observed;
  std::vector<NullMetrics> samples;
  double mean_gc_size = 0.0;
  std::optional<double> mean_geodesic;  // over samples that have one
  double mean_clustering = 0.0;
};

// Metrics shared by the observed graph and each null sample.
inline NullMetrics graph_null_metrics(const Graph& g, std::size_t n_pairs, std::uint64_t seed) {
  NullMetrics m;
  if (g.empty()) return m;
  Graph giant = giant_component(g);
  m.gc_size = giant.vertex_count();
  if (giant.vertex_count() >= 2) m.mean_geodesic = mean_geodesic_sampled(giant, n_pairs, seed).mean;
  m.mean_clustering = mean_clustering(g);
  return m;
}

inline NullComparisonReport null_comparison(const Graph& snapshot, std::size_t n_samples,
                                            std::size_t n_pairs, std::uint64_t seed,
                                            unsigned threads = 1) {
  if (snapshot.empty()) throw DataError("null comparison of an empty snapshot");
  if (n_samples < 1) throw ConfigError("null comparison needs at least one sample");
  NullComparisonReport report;
  report.observed = graph_null_metrics(snapshot, n_pairs, derive_seed(seed, 0x0b5));
  const auto degrees = snapshot.degrees();
  report.samples.resize(n_samples);
  parallel_for(n_samples, threads, [&](std::size_t s) {
    auto sample = configuration_model(degrees, derive_seed(seed, 0xc0f, s));
    auto m = graph_null_metrics(sample.graph, n_pairs, derive_seed(seed, 0x9e0, s));
    m.erased_stub_fraction = sample.erased_stub_fraction;
    report.samples[s] = m;
  });
  double geo_sum = 0.0;
  std::size_t geo_n = 0;
  for (const auto& m : report.samples) {
    report.mean_gc_size += static_cast<double>(m.gc_size);
    report.mean_clustering += m.mean_clustering;
    if (m.mean_geodesic) {
      geo_sum += *m.mean_geodesic;
      ++geo_n;
    }
  }
  report.mean_gc_size /= static_cast<double>(n_samples);
  report.mean_clustering /= static_cast<double>(n_samples);
  if (geo_n > 0) report.mean_geodesic = geo_sum / static_cast<double>(geo_n);
  return report;
}

}  // namespace tienet
