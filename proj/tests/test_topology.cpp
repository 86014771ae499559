#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <utility>
#include <vector>

#include "hetbandit/topology.hpp"
#include "oracles.hpp"

using namespace hetbandit;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> valid_shapes() {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t K = 1; K <= 40; ++K)
    for (std::size_t m = 1; m <= K; ++m)
      if ((K - m) % m == 0) out.emplace_back(K, m);
  return out;
}

}  // namespace

TEST(MultiStar, ThirtySixAgentsTwoCentersHasCenterDegree18) {
  const auto g = build_multi_star(36, 2);
  EXPECT_EQ(g.center_degree(), 18u);
  EXPECT_EQ(g.graph().degree(0), 18u);
  EXPECT_EQ(g.graph().degree(1), 18u);
  EXPECT_TRUE(g.graph().adjacent(0, 1));
  for (AgentIndex k = 2; k < 36; ++k) EXPECT_EQ(g.graph().degree(k), 1u);
}

TEST(MultiStar, AllCentersIsComplete) {
  const auto g = build_multi_star(4, 4);
  for (AgentIndex k = 0; k < 4; ++k) EXPECT_EQ(g.graph().degree(k), 3u);
}

TEST(MultiStar, Star) {
  const auto g = build_multi_star(5, 1);
  EXPECT_EQ(g.graph().degree(0), 4u);
  for (AgentIndex k = 1; k < 5; ++k) EXPECT_EQ(g.graph().degree(k), 1u);
}

TEST(MultiStar, PeripheralsInContiguousBlocks) {
  const auto g = build_multi_star(36, 3);
  for (AgentIndex k = 3; k < 36; ++k) EXPECT_EQ(g.center_of(k), (k - 3) / 11);
}

TEST(MultiStar, RejectsIndivisibleShapeNamingRemainder) {
  try {
    build_multi_star(10, 3);
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("K=10"), std::string::npos);
    EXPECT_NE(msg.find("m=3"), std::string::npos);
    EXPECT_NE(msg.find("remainder 1"), std::string::npos);
  }
}

TEST(MultiStar, RejectsCenterCountOutOfRange) {
  EXPECT_THROW(build_multi_star(5, 0), DomainError);
  EXPECT_THROW(build_multi_star(5, 6), DomainError);
}

TEST(MultiStar, InvariantsHoldForEveryValidShape) {
  for (auto [K, m] : valid_shapes()) {
    const auto g = build_multi_star(K, m);
    const auto& G = g.graph();
    std::size_t degree_sum = 0;
    for (AgentIndex k = 0; k < K; ++k) {
      EXPECT_FALSE(G.adjacent(k, k));
      degree_sum += G.degree(k);
      for (AgentIndex j : G.neighbors(k)) EXPECT_TRUE(G.adjacent(j, k));
      if (k < m) {
        EXPECT_EQ(G.degree(k), g.center_degree()) << K << "," << m;
        for (AgentIndex j = 0; j < m; ++j) {
          if (j != k) {
            EXPECT_TRUE(G.adjacent(k, j));
          }
        }
      } else {
        ASSERT_EQ(G.degree(k), 1u);
        EXPECT_LT(G.neighbors(k).front(), m);
      }
    }
    EXPECT_EQ(G.num_edges(), m * (m - 1) / 2 + (K - m));
    EXPECT_EQ(degree_sum, 2 * G.num_edges());
  }
}

TEST(DegreeStats, ThirtySixAgentsTwoCenters) {
  const auto s = degree_stats(build_multi_star(36, 2));
  EXPECT_DOUBLE_EQ(s.network_avg, 70.0 / 36.0);
  EXPECT_DOUBLE_EQ(s.neighbor_avg[0], 35.0 / 18.0);
  EXPECT_DOUBLE_EQ(s.neighbor_avg[5], 18.0);
}

TEST(DegreeStats, RegularGraph) {
  const auto s = degree_stats(build_multi_star(7, 7));
  for (AgentIndex k = 0; k < 7; ++k) {
    EXPECT_EQ(s.degree[k], 6u);
    EXPECT_DOUBLE_EQ(s.neighbor_avg[k], 6.0);
  }
}

TEST(DegreeStats, MatchesDenseOracleEverywhere) {
  for (auto [K, m] : valid_shapes()) {
    const auto s = degree_stats(build_multi_star(K, m));
    const auto o = oracle::degrees(oracle::multi_star_matrix(K, m));
    EXPECT_NEAR(s.network_avg, static_cast<double>(o.network_avg), 1e-12);
    for (AgentIndex k = 0; k < K; ++k) {
      EXPECT_EQ(static_cast<long double>(s.degree[k]), o.degree[k]);
      EXPECT_NEAR(s.neighbor_avg[k], static_cast<double>(o.neighbor_avg[k]), 1e-12);
      if (k >= m && K > 1) {
        EXPECT_DOUBLE_EQ(s.neighbor_avg[k], static_cast<double>(s.degree[0]));
      }
      if (k < m && K > 2) {
        EXPECT_LE(s.neighbor_avg[k], static_cast<double>(s.degree[k]));
      }
    }
  }
}

TEST(ExplorationBias, StarRatio) {
  for (std::size_t K = 3; K <= 30; ++K) {
    const auto g = build_multi_star(K, 1);
    const auto s = degree_stats(g);
    // p = 1 makes p^(1-p) = 1, leaving the degree ratio.
    EXPECT_NEAR(exploration_bias(g, s, 0, 1.0), (K - 2.0) / (K - 1.0), 1e-15);
  }
}

TEST(ExplorationBias, ZeroAtNoBroadcastAndOnRegularGraphs) {
  const auto g = build_multi_star(36, 2);
  const auto s = degree_stats(g);
  EXPECT_EQ(exploration_bias(g, s, 0, 0.0), 0.0);
  const auto reg = build_multi_star(6, 6);
  const auto rs = degree_stats(reg);
  for (AgentIndex k = 0; k < 6; ++k) EXPECT_EQ(exploration_bias(reg, rs, k, 0.7), 0.0);
}

TEST(ExplorationBias, ThirtySixAgentsAtP08) {
  const auto g = build_multi_star(36, 2);
  const auto s = degree_stats(g);
  // 30-digit evaluation of 0.8^0.2 (18 - 35/18) / 18
  EXPECT_NEAR(exploration_bias(g, s, 0, 0.8), 0.853042816170742866887, 1e-14);
  EXPECT_DOUBLE_EQ(exploration_bias(g, s, 1, 0.8), exploration_bias(g, s, 0, 0.8));
  for (AgentIndex k = 2; k < 36; ++k) EXPECT_EQ(exploration_bias(g, s, k, 0.8), 0.0);
}

TEST(ExplorationBias, RejectsProbabilityOutsideUnitInterval) {
  const auto g = build_multi_star(5, 1);
  const auto s = degree_stats(g);
  EXPECT_THROW(exploration_bias(g, s, 0, -0.1), DomainError);
  EXPECT_THROW(exploration_bias(g, s, 0, 1.5), DomainError);
}

TEST(ExplorationBias, DegenerateTinyGraphsHaveZeroBias) {
  for (auto [K, m] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 2}}) {
    const auto g = build_multi_star(K, m);
    for (double b : exploration_biases(g, 0.6)) EXPECT_EQ(b, 0.0);
  }
}

TEST(ExplorationBias, MatchesOracleAndIsMonotoneInP) {
  for (auto [K, m] : valid_shapes()) {
    const auto g = build_multi_star(K, m);
    const auto s = degree_stats(g);
    const auto o = oracle::degrees(oracle::multi_star_matrix(K, m));
    double prev = 0.0;
    for (int step = 0; step <= 100; ++step) {
      const double p = step / 100.0;
      const double a = exploration_bias(g, s, 0, p);
      EXPECT_NEAR(a, static_cast<double>(oracle::alpha(o, 0, m, p)), 1e-13);
      EXPECT_GE(a, 0.0);
      EXPECT_GE(a, prev - 1e-15) << "K=" << K << " m=" << m << " p=" << p;
      prev = a;
    }
  }
}

TEST(ExplorationBias, GrowsWithIrregularity) {
  // Valid m divide K; K = 25 admits m in {1, 5, 25}.
  for (double p : {0.2, 0.5, 0.9}) {
    const double star = exploration_biases(build_multi_star(25, 1), p)[0];
    const double five = exploration_biases(build_multi_star(25, 5), p)[0];
    const double full = exploration_biases(build_multi_star(25, 25), p)[0];
    EXPECT_GT(star, five);
    EXPECT_GT(five, full);
    EXPECT_EQ(full, 0.0);
  }
  for (double p : {0.3, 0.8}) {
    double prev = exploration_biases(build_multi_star(36, 1), p)[0];
    for (std::size_t m : {2, 3, 4, 6, 9, 12, 18}) {
      const double a = exploration_biases(build_multi_star(36, m), p)[0];
      EXPECT_GT(prev, a) << "m=" << m;
      prev = a;
    }
  }
}

TEST(ExplorationBias, InvariantUnderRelabeling) {
  // Build the K=15, m=3 multi-star on a permuted labeling and compare the
  // multiset of degree statistics and biases per role.
  const std::size_t K = 15, m = 3;
  const auto base = build_multi_star(K, m);
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (AgentIndex a = 0; a < K; ++a)
    for (AgentIndex b : base.neighbors(a))
      if (a < b) edges.emplace_back(a, b);
  std::vector<std::size_t> perm(K);
  for (std::size_t i = 0; i < K; ++i) perm[i] = i;
  std::mt19937 shuffle_rng(7);
  std::shuffle(perm.begin(), perm.begin() + m, shuffle_rng);
  std::shuffle(perm.begin() + m, perm.end(), shuffle_rng);
  for (auto& [a, b] : edges) {
    a = perm[a];
    b = perm[b];
  }
  const auto relabeled = Graph::from_edges(K, edges);
  const auto s0 = degree_stats(base.graph());
  const auto s1 = degree_stats(relabeled);
  EXPECT_DOUBLE_EQ(s0.network_avg, s1.network_avg);
  for (AgentIndex k = 0; k < K; ++k) {
    EXPECT_EQ(s0.degree[k], s1.degree[perm[k]]);
    EXPECT_DOUBLE_EQ(s0.neighbor_avg[k], s1.neighbor_avg[perm[k]]);
    EXPECT_DOUBLE_EQ(exploration_bias(base.graph(), s0, k, 0.7, m),
                     exploration_bias(relabeled, s1, perm[k], 0.7, m));
  }
}

TEST(Graph, RejectsSelfEdgesAndOutOfRange) {
  std::vector<std::pair<std::size_t, std::size_t>> self{{1, 1}};
  EXPECT_THROW(Graph::from_edges(3, self), DomainError);
  std::vector<std::pair<std::size_t, std::size_t>> out_of_range{{0, 3}};
  EXPECT_THROW(Graph::from_edges(3, out_of_range), DomainError);
}

TEST(Graph, AdjacencyText) {
  EXPECT_EQ(build_multi_star(4, 2).graph().to_adjacency_text(), "0: 1 2\n1: 0 3\n2: 0\n3: 1\n");
}

TEST(Graph, GeneralGraphBiasIsClampedAtZero) {
  // Path 0-1-2-3 with agent 0 declared a center: d_0 = 1 < d_0^avg = 2.
  std::vector<std::pair<std::size_t, std::size_t>> edges{{0, 1}, {1, 2}, {2, 3}};
  const auto g = Graph::from_edges(4, edges);
  const auto s = degree_stats(g);
  EXPECT_EQ(exploration_bias(g, s, 0, 0.5, 1), 0.0);
  // Agent 1 as center: d = 2, neighbor average 1.5.
  EXPECT_NEAR(exploration_bias(g, s, 1, 1.0, 2), 0.25, 1e-15);
}
