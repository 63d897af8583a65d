#include "discycle/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "discycle/errors.hpp"

namespace discycle {

FactoringPermutation::FactoringPermutation(const DirectedGraph& g,
                                           std::vector<std::vector<Vertex>> cycles) {
  std::vector<bool> used(g.size(), false);
  for (const auto& cyc : cycles) {
    if (cyc.size() < 2) throw InvalidArgument("permutation cycles need at least two vertices");
    for (std::size_t i = 0; i < cyc.size(); ++i) {
      g.check_vertex(cyc[i]);
      if (used[cyc[i]])
        throw InvalidArgument("permutation cycles overlap at vertex " + std::to_string(cyc[i] + 1));
      used[cyc[i]] = true;
      Vertex next = cyc[(i + 1) % cyc.size()];
      if (!g.has_edge(cyc[i], next))
        throw InvalidArgument("edge " + std::to_string(cyc[i] + 1) + "->" + std::to_string(next + 1) +
                              " of the permutation cycle is missing from the graph");
    }
  }
  cycles_ = std::move(cycles);
}

std::vector<Vertex> FactoringPermutation::image(int p) const {
  std::vector<Vertex> pi(p);
  for (int v = 0; v < p; ++v) pi[v] = v;
  for (const auto& cyc : cycles_)
    for (std::size_t i = 0; i < cyc.size(); ++i) pi[cyc[i]] = cyc[(i + 1) % cyc.size()];
  return pi;
}

FactoringPermutation FactoringPermutation::inverse() const {
  FactoringPermutation inv;
  for (auto cyc : cycles_) {
    std::reverse(cyc.begin(), cyc.end());
    inv.cycles_.push_back(std::move(cyc));
  }
  return inv;
}

std::vector<FactoringPermutation> factoring_permutations(const DirectedGraph& g) {
  std::vector<std::vector<Vertex>> cycles;
  if (is_cycle_disjoint(g)) {
    cycles = disjoint_cycles(g);
  } else {
    auto found = simple_cycles(g, kMaxEnumeratedCycles);
    if (!found)
      throw ExponentialBlowup("more than " + std::to_string(kMaxEnumeratedCycles) +
                              " directed cycles; class enumeration refused");
    cycles = std::move(*found);
  }
  std::vector<FactoringPermutation> out;
  std::vector<std::vector<Vertex>> chosen;
  std::vector<bool> used(g.size(), false);
  std::function<void(std::size_t)> walk = [&](std::size_t next) {
    if (next == cycles.size()) {
      out.emplace_back(g, chosen);
      return;
    }
    walk(next + 1);
    const auto& cyc = cycles[next];
    if (std::any_of(cyc.begin(), cyc.end(), [&](Vertex v) { return used[v]; })) return;
    for (Vertex v : cyc) used[v] = true;
    chosen.push_back(cyc);
    walk(next + 1);
    chosen.pop_back();
    for (Vertex v : cyc) used[v] = false;
  };
  walk(0);
  return out;
}

DirectedGraph apply_permutation(const DirectedGraph& g, const FactoringPermutation& pi) {
  const int p = g.size();
  auto img = pi.image(p);
  std::vector<Edge> edges;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) {
      if (i == j) continue;
      if (i == img[j] || g.has_edge(i, img[j])) edges.push_back({i, j});
    }
  return DirectedGraph(p, std::move(edges));
}

namespace {

// Diagonal scaling D_j of the transformed system, one entry per vertex.
Eigen::VectorXd dilation(const Eigen::MatrixXd& lambda, const std::vector<Vertex>& img) {
  const auto p = lambda.rows();
  Eigen::VectorXd d = Eigen::VectorXd::Ones(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    if (img[j] == j) continue;
    double l = lambda(j, img[j]);
    if (l == 0.0)
      throw ZeroDivisor("lambda(" + std::to_string(j + 1) + "," + std::to_string(img[j] + 1) +
                        ") is zero; the equations cannot be rearranged");
    d(j) = -1.0 / l;
  }
  return d;
}

}  // namespace

Eigen::MatrixXd transform_lambda(const Eigen::MatrixXd& lambda, const FactoringPermutation& pi) {
  const auto p = lambda.rows();
  auto img = pi.image(static_cast<int>(p));
  Eigen::VectorXd d = dilation(lambda, img);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p) - lambda;
  Eigen::MatrixXd mp(p, p);
  for (Eigen::Index j = 0; j < p; ++j) mp.col(j) = m.col(img[j]) * d(j);
  Eigen::MatrixXd out = Eigen::MatrixXd::Identity(p, p) - mp;
  out.diagonal().setZero();
  return out;
}

SemParameters transform_parameters(const SemParameters& params, const FactoringPermutation& pi) {
  const int p = params.graph.size();
  auto img = pi.image(p);
  Eigen::VectorXd d = dilation(params.lambda, img);
  SemParameters out;
  out.graph = apply_permutation(params.graph, pi);
  out.lambda = transform_lambda(params.lambda, pi);
  out.omega2.resize(p);
  out.omega3.resize(p);
  for (int j = 0; j < p; ++j) {
    out.omega2(j) = d(j) * d(j) * params.omega2(img[j]);
    out.omega3(j) = d(j) * d(j) * d(j) * params.omega3(img[j]);
  }
  return out;
}

std::vector<DirectedGraph> equivalence_class(const DirectedGraph& g) {
  std::vector<DirectedGraph> out;
  for (const auto& pi : factoring_permutations(g)) out.push_back(apply_permutation(g, pi));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

bool in_equivalence_class(const DirectedGraph& g, const DirectedGraph& candidate) {
  if (g.size() != candidate.size()) return false;
  auto cls = equivalence_class(g);
  return std::binary_search(cls.begin(), cls.end(), candidate);
}

WeightedGraph stable_representative(const DirectedGraph& g, const Eigen::MatrixXd& lambda, double tol) {
  std::vector<std::vector<Vertex>> reverse;
  for (const auto& cyc : disjoint_cycles(g)) {
    double prod = 1.0;
    for (std::size_t i = 0; i < cyc.size(); ++i) prod *= lambda(cyc[i], cyc[(i + 1) % cyc.size()]);
    if (std::abs(std::abs(prod) - 1.0) <= tol)
      throw UnstableBothWays("cycle through vertex " + std::to_string(cyc[0] + 1) +
                             " has |edge-weight product| = 1");
    if (std::abs(prod) > 1.0) reverse.push_back(cyc);
  }
  FactoringPermutation pi(g, std::move(reverse));
  return {apply_permutation(g, pi), transform_lambda(lambda, pi)};
}

namespace {

WeightedGraph normalized(const WeightedGraph& w) {
  try {
    return stable_representative(w.graph, w.lambda);
  } catch (const Error&) {
    return w;
  }
}

int pair_class(const DirectedGraph& g, Vertex u, Vertex v) {
  return (g.has_edge(u, v) ? 1 : 0) + (g.has_edge(v, u) ? 2 : 0);
}

}  // namespace

double correct_pairs(const WeightedGraph& truth, const WeightedGraph& estimate) {
  const int p = truth.graph.size();
  if (estimate.graph.size() != p) throw InvalidArgument("graphs differ in size");
  if (p < 2) return 1.0;
  auto a = normalized(truth), b = normalized(estimate);
  long agree = 0, total = 0;
  for (int u = 0; u < p; ++u)
    for (int v = u + 1; v < p; ++v, ++total)
      agree += pair_class(a.graph, u, v) == pair_class(b.graph, u, v);
  return static_cast<double>(agree) / static_cast<double>(total);
}

}  // namespace discycle
