#pragma once

#include <Eigen/Dense>
#include <vector>

#include "discycle/graph.hpp"
#include "discycle/sem.hpp"

namespace discycle {

/// Permutation whose nontrivial disjoint cycles (i1 i2 ... is) are directed
/// cycles i1 -> i2 -> ... -> is -> i1 of a host graph.
class FactoringPermutation {
 public:
  FactoringPermutation() = default;
  // Validates that the cycles are vertex-disjoint directed cycles of g.
  FactoringPermutation(const DirectedGraph& g, std::vector<std::vector<Vertex>> cycles);

  const std::vector<std::vector<Vertex>>& cycles() const noexcept { return cycles_; }
  bool is_identity() const noexcept { return cycles_.empty(); }
  // pi(v) for v in 0..p-1.
  std::vector<Vertex> image(int p) const;
  // The inverse, which factors in apply_permutation(g, *this).
  FactoringPermutation inverse() const;

 private:
  std::vector<std::vector<Vertex>> cycles_;
};

constexpr std::size_t kMaxEnumeratedCycles = 20;

/// Identity plus every combination of vertex-disjoint directed cycles. For
/// graphs that are not cycle-disjoint, more than kMaxEnumeratedCycles
/// directed cycles raise ExponentialBlowup.
std::vector<FactoringPermutation> factoring_permutations(const DirectedGraph& g);

DirectedGraph apply_permutation(const DirectedGraph& g, const FactoringPermutation& pi);

/// Lambda' = I - (I - Lambda) P D with D_j = -1/lambda_{j pi(j)} on moved
/// vertices; throws ZeroDivisor when a required lambda vanishes.
Eigen::MatrixXd transform_lambda(const Eigen::MatrixXd& lambda, const FactoringPermutation& pi);
SemParameters transform_parameters(const SemParameters& params, const FactoringPermutation& pi);

// Images of g under all factoring permutations, sorted and de-duplicated.
std::vector<DirectedGraph> equivalence_class(const DirectedGraph& g);

bool in_equivalence_class(const DirectedGraph& g, const DirectedGraph& candidate);

struct WeightedGraph {
  DirectedGraph graph;
  Eigen::MatrixXd lambda;
};

/// Reverses every cycle of a cycle-disjoint graph whose |product| exceeds 1.
/// Throws UnstableBothWays when | |product| - 1 | <= tol.
WeightedGraph stable_representative(const DirectedGraph& g, const Eigen::MatrixXd& lambda,
                                    double tol = 1e-9);

/// Fraction of unordered pairs classified alike (none, u->v, v->u, both)
/// after both inputs are replaced by their stable representatives.
double correct_pairs(const WeightedGraph& truth, const WeightedGraph& estimate);

}  // namespace discycle
