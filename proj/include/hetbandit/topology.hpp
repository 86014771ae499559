#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hetbandit/errors.hpp"

namespace hetbandit {

using AgentIndex = std::size_t;

/// Undirected simple graph over agents 0..K-1 stored as sorted adjacency lists.
class Graph {
 public:
  Graph() = default;

  // Rejects self-edges and out-of-range endpoints; duplicate edges collapse.
  static Graph from_edges(std::size_t num_agents,
                          std::span<const std::pair<AgentIndex, AgentIndex>> edges) {
    if (num_agents == 0) throw DomainError("graph needs at least one agent");
    Graph g;
    g.adjacency_.resize(num_agents);
    for (auto [a, b] : edges) {
      if (a >= num_agents || b >= num_agents) {
        throw DomainError("edge (" + std::to_string(a) + ", " + std::to_string(b) +
                          ") references an agent outside 0.." +
                          std::to_string(num_agents - 1));
      }
      if (a == b) throw DomainError("self-edge on agent " + std::to_string(a));
      g.adjacency_[a].push_back(b);
      g.adjacency_[b].push_back(a);
    }
    for (auto& nbrs : g.adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
    return g;
  }

  std::size_t num_agents() const noexcept { return adjacency_.size(); }

  std::span<const AgentIndex> neighbors(AgentIndex k) const { return adjacency_.at(k); }

  std::size_t degree(AgentIndex k) const { return adjacency_.at(k).size(); }

  bool adjacent(AgentIndex a, AgentIndex b) const {
    const auto& nbrs = adjacency_.at(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
  }

  std::size_t num_edges() const noexcept {
    std::size_t twice = 0;
    for (const auto& nbrs : adjacency_) twice += nbrs.size();
    return twice / 2;
  }

  // One line per agent, "k: j1 j2 ...". Debug output only.
  std::string to_adjacency_text() const {
    std::ostringstream out;
    for (AgentIndex k = 0; k < adjacency_.size(); ++k) {
      out << k << ':';
      for (AgentIndex j : adjacency_[k]) out << ' ' << j;
      out << '\n';
    }
    return out.str();
  }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::vector<AgentIndex>> adjacency_;
};

/// Symmetric multi-star: centers 0..m-1 form a clique, and each center owns
/// a contiguous block of (K-m)/m degree-1 peripheral agents.
class MultiStarGraph {
 public:
  MultiStarGraph(std::size_t num_agents, std::size_t num_centers) {
    if (num_centers < 1 || num_centers > num_agents) {
      throw DomainError("multi-star needs 1 <= m <= K, got K=" + std::to_string(num_agents) +
                        ", m=" + std::to_string(num_centers));
    }
    const std::size_t remainder = (num_agents - num_centers) % num_centers;
    if (remainder != 0) {
      throw DomainError("symmetric multi-star needs (K-m) divisible by m, got K=" +
                        std::to_string(num_agents) + ", m=" + std::to_string(num_centers) +
                        ", remainder " + std::to_string(remainder));
    }
    num_centers_ = num_centers;
    const std::size_t block = (num_agents - num_centers) / num_centers;
    std::vector<std::pair<AgentIndex, AgentIndex>> edges;
    for (AgentIndex a = 0; a < num_centers; ++a) {
      for (AgentIndex b = a + 1; b < num_centers; ++b) edges.emplace_back(a, b);
    }
    for (AgentIndex k = num_centers; k < num_agents; ++k) {
      edges.emplace_back((k - num_centers) / block, k);
    }
    graph_ = Graph::from_edges(num_agents, edges);
  }

  const Graph& graph() const noexcept { return graph_; }
  std::size_t num_agents() const noexcept { return graph_.num_agents(); }
  std::size_t num_centers() const noexcept { return num_centers_; }
  std::size_t num_peripherals() const noexcept { return num_agents() - num_centers_; }
  bool is_center(AgentIndex k) const noexcept { return k < num_centers_; }

  // (K-m)/m + m - 1
  std::size_t center_degree() const noexcept {
    return num_peripherals() / num_centers_ + num_centers_ - 1;
  }

  // Center serving peripheral agent k.
  AgentIndex center_of(AgentIndex k) const {
    if (is_center(k)) throw DomainError("agent " + std::to_string(k) + " is a center");
    return graph_.neighbors(k).front();
  }

  std::span<const AgentIndex> neighbors(AgentIndex k) const { return graph_.neighbors(k); }

  friend bool operator==(const MultiStarGraph&, const MultiStarGraph&) = default;

 private:
  Graph graph_;
  std::size_t num_centers_ = 0;
};

inline MultiStarGraph build_multi_star(std::size_t num_agents, std::size_t num_centers) {
  return MultiStarGraph(num_agents, num_centers);
}

struct DegreeStats {
  std::vector<std::size_t> degree;
  double network_avg = 0.0;
  // Average degree of each agent's neighbors; 0 for an isolated agent.
  std::vector<double> neighbor_avg;
};

inline DegreeStats degree_stats(const Graph& g) {
  DegreeStats s;
  const std::size_t n = g.num_agents();
  s.degree.resize(n);
  s.neighbor_avg.resize(n);
  std::size_t total = 0;
  for (AgentIndex k = 0; k < n; ++k) {
    s.degree[k] = g.degree(k);
    total += s.degree[k];
  }
  s.network_avg = static_cast<double>(total) / static_cast<double>(n);
  for (AgentIndex k = 0; k < n; ++k) {
    if (s.degree[k] == 0) continue;
    std::size_t sum = 0;
    for (AgentIndex j : g.neighbors(k)) sum += s.degree[j];
    s.neighbor_avg[k] = static_cast<double>(sum) / static_cast<double>(s.degree[k]);
  }
  return s;
}

inline DegreeStats degree_stats(const MultiStarGraph& g) { return degree_stats(g.graph()); }

// p^(1-p) with the p = 0 endpoint taken as 0.
inline double broadcast_weight(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("p must lie in [0, 1], got " + std::to_string(p));
  }
  return p == 0.0 ? 0.0 : std::pow(p, 1.0 - p);
}

/// Exploration bias of agent k on a general graph whose centers are agents
/// 0..num_centers-1:
///
///   alpha_k = p^(1-p) (d_k - d_k^avg) / d_k   for centers, 0 otherwise.
///
/// Clamped at 0 from below; on a symmetric multi-star the ratio is already
/// nonnegative, but arbitrary graphs can have d_k^avg > d_k.
inline double exploration_bias(const Graph& g, const DegreeStats& stats, AgentIndex k,
                               double p, std::size_t num_centers) {
  const double weight = broadcast_weight(p);
  if (k >= g.num_agents()) {
    throw DomainError("agent index " + std::to_string(k) + " outside graph of " +
                      std::to_string(g.num_agents()) + " agents");
  }
  if (k >= num_centers || stats.degree[k] == 0) return 0.0;
  const double d = static_cast<double>(stats.degree[k]);
  return std::max(0.0, weight * (d - stats.neighbor_avg[k]) / d);
}

inline double exploration_bias(const MultiStarGraph& g, const DegreeStats& stats, AgentIndex k,
                               double p) {
  return exploration_bias(g.graph(), stats, k, p, g.num_centers());
}

// Bias for every agent of a multi-star.
inline std::vector<double> exploration_biases(const MultiStarGraph& g, double p) {
  const DegreeStats stats = degree_stats(g);
  std::vector<double> out(g.num_agents());
  for (AgentIndex k = 0; k < out.size(); ++k) out[k] = exploration_bias(g, stats, k, p);
  return out;
}

}  // namespace hetbandit
