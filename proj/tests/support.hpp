#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "discycle/graph.hpp"
#include "discycle/sem.hpp"
#include "discycle/tensor.hpp"

namespace testkit {

using discycle::DirectedGraph;
using discycle::Edge;
using discycle::SemParameters;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Weight with |w| in (lo, hi) and a random sign.
inline double signed_weight(std::mt19937_64& rng, double lo = 0.5, double hi = 0.8) {
  double w = uniform(rng, lo, hi);
  return std::bernoulli_distribution(0.5)(rng) ? w : -w;
}

struct RandomModelOptions {
  int p = 6;
  int min_cycle = 2;
  int max_cycle = 4;
  double cycle_prob = 0.6;  // chance that a block becomes a cycle
  double edge_prob = 0.4;   // chance of each forward edge between blocks
};

// Random cycle-disjoint graph: vertices are shuffled, cut into blocks that
// are either singletons or directed cycles, and blocks are joined by
// forward edges in a random block order.
inline DirectedGraph random_cycle_disjoint_graph(std::mt19937_64& rng, const RandomModelOptions& o) {
  std::vector<int> perm(o.p);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<int>> blocks;
  int at = 0;
  while (at < o.p) {
    int left = o.p - at;
    bool cyc = left >= o.min_cycle && std::bernoulli_distribution(o.cycle_prob)(rng);
    int len = 1;
    if (cyc) len = std::uniform_int_distribution<int>(o.min_cycle, std::min(o.max_cycle, left))(rng);
    blocks.emplace_back(perm.begin() + at, perm.begin() + at + len);
    at += len;
  }
  std::vector<Edge> edges;
  for (const auto& b : blocks)
    if (b.size() > 1)
      for (std::size_t i = 0; i < b.size(); ++i) edges.push_back({b[i], b[(i + 1) % b.size()]});
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      for (int u : blocks[i])
        for (int v : blocks[j])
          if (std::bernoulli_distribution(o.edge_prob)(rng)) edges.push_back({u, v});
  return DirectedGraph(o.p, edges);
}

inline SemParameters random_parameters(std::mt19937_64& rng, const DirectedGraph& g, double lo = 0.5,
                                       double hi = 0.8) {
  std::vector<double> w;
  for (std::size_t i = 0; i < g.edges().size(); ++i) w.push_back(signed_weight(rng, lo, hi));
  Eigen::VectorXd o2(g.size()), o3(g.size());
  for (int v = 0; v < g.size(); ++v) {
    o2(v) = uniform(rng, 0.5, 1.5);
    o3(v) = signed_weight(rng, 0.5, 2.0);
  }
  return discycle::make_parameters(g, w, o2, o3);
}

inline SemParameters random_model(std::mt19937_64& rng, const RandomModelOptions& o) {
  return random_parameters(rng, random_cycle_disjoint_graph(rng, o));
}

// Every simple directed path from `from` to `to` as a vertex list.
inline std::vector<std::vector<int>> simple_paths(const DirectedGraph& g, int from, int to) {
  std::vector<std::vector<int>> out;
  std::vector<int> path{from};
  std::vector<bool> on(g.size(), false);
  on[from] = true;
  std::function<void(int)> walk = [&](int v) {
    if (v == to) {
      out.push_back(path);
      return;
    }
    for (int c : g.children(v)) {
      if (on[c]) continue;
      on[c] = true;
      path.push_back(c);
      walk(c);
      path.pop_back();
      on[c] = false;
    }
  };
  walk(from);
  return out;
}

// Brute-force trek checks over simple paths. A trek between u and v is a
// pair of paths from a common top; loops can always be cut out of either
// side without changing which vertices the other side must avoid.
inline bool d2_zero_by_treks(const DirectedGraph& g, int u, int v) {
  for (int top = 0; top < g.size(); ++top) {
    auto pu = simple_paths(g, top, u);
    if (pu.empty()) continue;
    for (const auto& pv : simple_paths(g, top, v))
      if (std::find(pv.begin(), pv.end(), u) == pv.end()) return false;
  }
  return true;
}

inline bool d3_zero_by_treks(const DirectedGraph& g, int u, int v) {
  for (int top = 0; top < g.size(); ++top) {
    if (top == u || top == v) continue;
    for (const auto& pu : simple_paths(g, top, u))
      for (const auto& pv : simple_paths(g, top, v)) {
        bool shared = false;
        for (std::size_t i = 1; i < pu.size() && !shared; ++i)
          shared = std::find(pv.begin() + 1, pv.end(), pu[i]) != pv.end();
        if (!shared) return false;
      }
  }
  return true;
}

// Moments of an acyclic model by explicit trek sums: for every top a the
// total path weight a -> i is accumulated over all directed paths.
inline discycle::MomentPair dag_moments_by_paths(const SemParameters& params) {
  const int p = params.graph.size();
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(p, p);  // w(a, i): sum over a -> i paths
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < p; ++i)
      for (const auto& path : simple_paths(params.graph, a, i)) {
        double prod = 1.0;
        for (std::size_t k = 0; k + 1 < path.size(); ++k) prod *= params.lambda(path[k], path[k + 1]);
        w(a, i) += prod;
      }
  discycle::MomentPair m{Eigen::MatrixXd::Zero(p, p), discycle::SymTensor3(p)};
  for (int a = 0; a < p; ++a)
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) m.s(i, j) += params.omega2(a) * w(a, i) * w(a, j);
      for (int j = i; j < p; ++j)
        for (int k = j; k < p; ++k) m.t(i, j, k) += params.omega3(a) * w(a, i) * w(a, j) * w(a, k);
    }
  return m;
}

// Graph of the edges of a plain cycle order[0] -> order[1] -> ... -> order[0].
inline std::vector<Edge> cycle_edges(const std::vector<int>& order) {
  std::vector<Edge> e;
  for (std::size_t i = 0; i < order.size(); ++i) e.push_back({order[i], order[(i + 1) % order.size()]});
  return e;
}

struct WeightedEdge {
  int from;  // 1-based
  int to;
  double weight;
};

// Model from 1-based weighted edges, as the examples are written.
inline SemParameters model_1based(int p, const std::vector<WeightedEdge>& edges, Eigen::VectorXd omega2,
                                  Eigen::VectorXd omega3) {
  std::vector<Edge> e;
  for (const auto& w : edges) e.push_back({w.from - 1, w.to - 1});
  SemParameters params{DirectedGraph(p, e), Eigen::MatrixXd::Zero(p, p), std::move(omega2), std::move(omega3)};
  for (const auto& w : edges) params.lambda(w.from - 1, w.to - 1) = w.weight;
  params.validate();
  return params;
}

inline Eigen::VectorXd constant(int p, double v) { return Eigen::VectorXd::Constant(p, v); }

inline std::string data_path(const std::string& name) { return std::string(DISCYCLE_TEST_DATA) + "/" + name; }

}  // namespace testkit
