#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "discycle/graph.hpp"
#include "discycle/moments.hpp"
#include "discycle/sem.hpp"
#include "discycle/stat_tests.hpp"

namespace discycle {

/// A singleton vertex, or an oriented cycle vertices[0] -> vertices[1] ->
/// ... -> vertices[0] with weights[i] on the edge leaving vertices[i].
struct Component {
  std::vector<int> vertices;
  std::vector<double> weights;

  bool is_cycle() const { return vertices.size() > 1; }
};
using Layer = std::vector<Component>;

enum class DiscoveryStatus { Complete, HaltedNoSimpleCycle };
std::string status_name(DiscoveryStatus s);

struct DiscoveryResult {
  DiscoveryStatus status = DiscoveryStatus::Complete;
  std::vector<Layer> layers;
  Eigen::MatrixXd lambda_hat;  // lambda_hat(i, j): weight of i -> j
  PValueTable diagnostics;
  VertexSet remaining;  // vertices left unexplained when halted
  std::vector<std::string> notes;

  DirectedGraph graph() const;
};

/// Variables still in play during part 1: moments (always), the residualized
/// sample (sample mode only) and the original vertex id of every column.
struct WorkingSet {
  MomentPair m;
  Eigen::MatrixXd x;
  std::vector<int> ids;

  int size() const { return static_cast<int>(ids.size()); }
};

WorkingSet make_working_set(const Dataset& data, bool center);
WorkingSet make_working_set(const MomentPair& m);

// Residualizes the working variables on the local columns in c_set and drops them.
void peel(WorkingSet& ws, const VertexSet& c_set, Mode mode);

/// Adjusted p-values for H0: d2(u, v) = 0 over all ordered pairs of the
/// working set, corrected as one family. Entry (u, v); diagonal set to 1.
Eigen::MatrixXd d2_adjusted_pvalues(const WorkingSet& ws, const TestConfig& cfg, PValueTable& diag);

// Local indices r with d2(r, u) = 0 not rejected for every u != r.
VertexSet find_root_nodes(const Eigen::MatrixXd& d2_adj, const TestConfig& cfg);

/// Maximal cliques (local indices) of the pair graph: d3 = 0 not rejected,
/// d2 = 0 rejected in both directions. Empty-set fallbacks applied.
std::vector<VertexSet> find_candidate_cycles(const WorkingSet& ws, const Eigen::MatrixXd& d2_adj,
                                             const TestConfig& cfg, PValueTable& diag);

/// Keeps candidates passing the root-cycle test against the other
/// candidates; falls back to the union when all fail and merges
/// intersecting survivors. `used_union` reports the fallback.
std::vector<VertexSet> prune_root_cycles(const WorkingSet& ws, const std::vector<VertexSet>& cands,
                                         const TestConfig& cfg, PValueTable& diag, bool& used_union);

/// Greedy undirected cycle through all rows of s (a covariance or
/// correlation matrix) built from the largest |inverse| entries. Returned
/// as a vertex order starting at 0, continuing to its smaller neighbour.
std::vector<int> greedy_cycle_order(const Eigen::MatrixXd& s);

struct OrientedCycle {
  std::vector<int> order;  // local indices
  std::vector<double> weights;
  bool stable = true;  // false when both orientations have |product| >= 1
};

/// Orders and orients the cycle on local indices c_set of m. In sample
/// mode complex two-cycle roots are replaced by the real part.
OrientedCycle orient_cycle(const MomentPair& m, const VertexSet& c_set, Mode mode);

// Exact-moment check that c_set carries a simple cycle with the given weights.
bool cycle_fits(const MomentPair& m, const OrientedCycle& cyc, double tol);

struct Part1Result {
  std::vector<Layer> layers;
  DiscoveryStatus status = DiscoveryStatus::Complete;
  VertexSet remaining;
  PValueTable diagnostics;
  std::vector<std::string> notes;
};

Part1Result part1(WorkingSet ws, const TestConfig& cfg);

/// Inter-component edges. `original` holds moments (and in sample mode
/// rows) of all p variables.
DiscoveryResult part2(Part1Result p1, const WorkingSet& original, const TestConfig& cfg);

DiscoveryResult discover(const Dataset& data, const TestConfig& cfg);
DiscoveryResult discover(const MomentPair& m, const TestConfig& cfg);

}  // namespace discycle
