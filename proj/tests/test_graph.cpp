#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tienet/graph.hpp"

using namespace tienet;

namespace {

Graph make(std::size_t n, std::vector<LocalEdge> edges) { return Graph(n, edges); }

Graph make(const oracle::EdgeList& e) {
  std::vector<LocalEdge> edges(e.edges.begin(), e.edges.end());
  return Graph(e.n, edges);
}

Graph triangle() { return make(3, {{0, 1}, {1, 2}, {0, 2}}); }
Graph star4() { return make(4, {{0, 1}, {0, 2}, {0, 3}}); }
Graph path(std::size_t n) {
  std::vector<LocalEdge> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return make(n, e);
}

}  // namespace

TEST(GraphBuild, CollapsesDuplicatesAndRejectsLoops) {
  auto g = make(3, {{0, 1}, {1, 0}, {0, 1}, {1, 2}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_TRUE(g.has_edge(1, 0));
  EXPECT_FALSE(g.has_edge(0, 2));
  EXPECT_ANY_THROW(make(2, {{1, 1}}));
}

TEST(GraphBuild, LabelsAndInvariants) {
  std::vector<PairKey> pairs{{7, 30}, {3, 7}, {3, 30}, {30, 41}};
  auto g = Graph::from_pairs(pairs);
  EXPECT_EQ(g.labels(), (std::vector<PlayerIdx>{3, 7, 30, 41}));
  EXPECT_EQ(g.edge_count(), 4u);
  ASSERT_TRUE(g.find(30).has_value());
  EXPECT_EQ(g.degree(*g.find(30)), 3u);
  EXPECT_FALSE(g.find(5).has_value());
  auto lp = g.label_pairs();
  std::sort(lp.begin(), lp.end());
  auto expected = pairs;
  std::sort(expected.begin(), expected.end());
  EXPECT_EQ(lp, expected);

  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = oracle::random_graph(rng, 40, 0.1);
    auto h = make(e);
    std::size_t sum = 0;
    for (auto d : h.degrees()) sum += d;
    EXPECT_EQ(sum, 2 * e.edges.size());
    for (Vertex v = 0; v < h.vertex_count(); ++v) {
      auto nb = h.neighbors(v);
      EXPECT_TRUE(std::is_sorted(nb.begin(), nb.end()));
      EXPECT_TRUE(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (auto w : nb) EXPECT_NE(w, v);
    }
  }
}

TEST(GraphBuild, IsolatedLabelsKept) {
  std::vector<PairKey> pairs{{1, 2}};
  auto g = Graph::with_labels({0, 1, 2, 5}, pairs);
  EXPECT_EQ(g.vertex_count(), 4u);
  EXPECT_EQ(g.degree(*g.find(5)), 0u);
  EXPECT_EQ(g.degree(*g.find(1)), 1u);
}

TEST(DegreeCcdf, HandExamples) {
  EXPECT_EQ(degree_ccdf(triangle()), (std::vector<double>{1.0, 1.0, 1.0, 0.0}));
  auto s = degree_ccdf(star4());
  ASSERT_EQ(s.size(), 5u);
  EXPECT_DOUBLE_EQ(s[0], 1.0);
  EXPECT_DOUBLE_EQ(s[1], 1.0);
  EXPECT_DOUBLE_EQ(s[2], 0.25);
  EXPECT_DOUBLE_EQ(s[3], 0.25);
  EXPECT_DOUBLE_EQ(s[4], 0.0);
  EXPECT_THROW(degree_ccdf(Graph{}), DataError);
}

TEST(DegreeCcdf, MatchesCountingOracle) {
  std::mt19937_64 rng(5);
  auto e = oracle::random_graph(rng, 50, 0.12);
  auto g = make(e);
  auto ccdf = degree_ccdf(g);
  auto adj = oracle::adjacency(e);
  for (std::size_t k = 0; k < ccdf.size(); ++k) {
    std::size_t at_least = 0;
    for (auto& a : adj) at_least += a.size() >= k;
    EXPECT_DOUBLE_EQ(ccdf[k], static_cast<double>(at_least) / 50.0);
  }
  for (std::size_t k = 1; k < ccdf.size(); ++k) EXPECT_LE(ccdf[k], ccdf[k - 1]);
  EXPECT_DOUBLE_EQ(ccdf.front(), 1.0);
  EXPECT_DOUBLE_EQ(ccdf.back(), 0.0);
}

TEST(Clustering, HandExamples) {
  auto t = triangle();
  for (Vertex v = 0; v < 3; ++v) EXPECT_DOUBLE_EQ(local_clustering(t, v), 1.0);
  auto s = star4();
  EXPECT_DOUBLE_EQ(local_clustering(s, 0), 0.0);
  EXPECT_DOUBLE_EQ(local_clustering(s, 1), 0.0);
  // 4-cycle with one chord
  auto c = make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
  EXPECT_DOUBLE_EQ(local_clustering(c, 0), 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(local_clustering(c, 1), 1.0);
  EXPECT_DOUBLE_EQ(mean_clustering(t), 1.0);
  EXPECT_THROW(mean_clustering(Graph{}), DataError);
}

TEST(Clustering, MatchesTriangleOracle) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    auto e = oracle::random_graph(rng, 30, 0.25);
    auto g = make(e);
    auto m = oracle::matrix(e);
    for (Vertex v = 0; v < 30; ++v) {
      EXPECT_EQ(triangles_at(g, v), oracle::brute_triangles(m, v));
      EXPECT_NEAR(local_clustering(g, v), oracle::brute_clustering(m, v), 1e-12);
      EXPECT_GE(local_clustering(g, v), 0.0);
      EXPECT_LE(local_clustering(g, v), 1.0);
    }
  }
}

TEST(ClusteringHistogram, Binning) {
  auto h = clustering_histogram(triangle());
  EXPECT_EQ(h.counts.back(), 3u);
  EXPECT_EQ(h.low_degree, 0u);
  auto s = clustering_histogram(star4());
  EXPECT_EQ(s.counts.front(), 1u);
  EXPECT_EQ(s.low_degree, 3u);
  // C = 2/3 falls in (0.6, 0.7]; C = 1 in (0.9, 1.0]
  auto c = clustering_histogram(make(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}}));
  EXPECT_EQ(c.counts[6], 2u);
  EXPECT_EQ(c.counts[9], 2u);
  EXPECT_THROW(clustering_histogram(Graph{}), DataError);
  EXPECT_THROW(clustering_histogram(triangle(), 0), ConfigError);
}

TEST(Components, HandExamples) {
  auto two = make(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}});
  auto cs = connected_components(two);
  EXPECT_EQ(cs.sorted_sizes(), (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(cs.giant, 0u);
  auto p = connected_components(path(5));
  EXPECT_EQ(p.count(), 1u);
  EXPECT_EQ(p.giant_size(), 5u);
  auto gc = giant_component(make(5, {{3, 4}, {0, 1}, {1, 2}}));
  EXPECT_EQ(gc.vertex_count(), 3u);
  EXPECT_EQ(gc.edge_count(), 2u);
}

TEST(Components, MatchesBfsOracle) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    auto e = oracle::random_graph(rng, 60, 0.02);
    auto cs = connected_components(make(e));
    auto labels = oracle::bfs_labels(e);
    std::size_t total = 0;
    for (auto s : cs.sizes) total += s;
    EXPECT_EQ(total, 60u);
    for (std::size_t u = 0; u < 60; ++u)
      for (std::size_t v = u + 1; v < 60; ++v)
        EXPECT_EQ(cs.component_of[u] == cs.component_of[v], labels[u] == labels[v]);
    // both label schemes order components by smallest member
    for (std::size_t v = 0; v < 60; ++v) EXPECT_EQ(static_cast<int>(cs.component_of[v]), labels[v]);
  }
}

TEST(MeanDegree, HandExamples) {
  EXPECT_DOUBLE_EQ(mean_degree(triangle()), 2.0);
  EXPECT_DOUBLE_EQ(mean_degree(star4()), 1.5);
  EXPECT_THROW(mean_degree(Graph{}), DataError);
}

TEST(Geodesic, ExactHandExamples) {
  auto k4 = make(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
  EXPECT_DOUBLE_EQ(all_pairs_mean_geodesic(k4).mean, 1.0);
  EXPECT_DOUBLE_EQ(all_pairs_mean_geodesic(path(3)).mean, 4.0 / 3.0);
  EXPECT_THROW(all_pairs_mean_geodesic(make(4, {{0, 1}, {2, 3}})), DataError);
  EXPECT_THROW(mean_geodesic_sampled(make(4, {{0, 1}, {2, 3}}), 3, 1), DataError);
  EXPECT_THROW(mean_geodesic_sampled(k4, 0, 1), ConfigError);
  // requesting every pair gives the exact mean
  auto est = mean_geodesic_sampled(path(3), 10, 1);
  EXPECT_TRUE(est.exact);
  EXPECT_DOUBLE_EQ(est.mean, 4.0 / 3.0);
}

TEST(Geodesic, PairDistanceMatchesFloyd) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto e = oracle::random_graph(rng, 40, 0.06);
    auto g = make(e);
    auto d = oracle::floyd(e);
    detail::PairDistance dist(g);
    for (Vertex s = 0; s < 40; ++s)
      for (Vertex t = 0; t < 40; ++t) EXPECT_EQ(dist(s, t), d[s][t]);
  }
}

TEST(Geodesic, DecodePairCoversAllPairs) {
  std::uint64_t k = 0;
  for (std::uint64_t i = 1; i < 200; ++i)
    for (std::uint64_t j = 0; j < i; ++j, ++k) {
      auto [a, b] = detail::decode_pair(k);
      ASSERT_EQ(a, i);
      ASSERT_EQ(b, j);
    }
}

TEST(Geodesic, SampledEstimateIsUnbiased) {
  std::mt19937_64 rng(41);
  auto e = oracle::ring_with_chords(rng, 300, 30);
  auto g = make(e);
  std::vector<std::size_t> all(300);
  std::iota(all.begin(), all.end(), 0);
  const double exact = oracle::mean_distance(oracle::floyd(e), all);
  EXPECT_NEAR(all_pairs_mean_geodesic(g).mean, exact, 1e-12);

  double sum = 0.0, se_sum = 0.0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    auto est = mean_geodesic_sampled(g, 500, static_cast<std::uint64_t>(s) + 1);
    EXPECT_FALSE(est.exact);
    EXPECT_EQ(est.pairs, 500u);
    sum += est.mean;
    se_sum += est.standard_error;
  }
  // mean of independent estimates has standard error ~ se / sqrt(seeds)
  const double mean_se = se_sum / seeds / std::sqrt(static_cast<double>(seeds));
  EXPECT_LT(std::abs(sum / seeds - exact), 3.0 * mean_se);
}

TEST(Geodesic, SampledIsDeterministicPerSeed) {
  std::mt19937_64 rng(43);
  auto g = make(oracle::ring_with_chords(rng, 200, 20));
  auto a = mean_geodesic_sampled(g, 300, 9);
  auto b = mean_geodesic_sampled(g, 300, 9);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.standard_error, b.standard_error);
}
