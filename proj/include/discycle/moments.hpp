#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "discycle/graph.hpp"
#include "discycle/sem.hpp"
#include "discycle/tensor.hpp"

namespace discycle {

/// Raw moment E[x_i x_j] (order 2) or E[x_i x_j x_k] (order 3).
struct MomentCoord {
  int order;
  std::array<int, 3> idx;

  double evaluate(const MomentPair& m) const {
    return order == 2 ? m.s(idx[0], idx[1]) : m.t(idx[0], idx[1], idx[2]);
  }
  // Per-sample monomial whose mean is this moment.
  double monomial(const Eigen::Ref<const Eigen::RowVectorXd>& row) const {
    double v = row(idx[0]) * row(idx[1]);
    return order == 2 ? v : v * row(idx[2]);
  }
};

/// Determinant statistic with its gradient over the distinct moment
/// coordinates it depends on (4 for d2, 7 for d3).
struct DeterminantStat {
  double value = 0.0;
  std::vector<double> gradient;
  std::vector<MomentCoord> coords;
};

struct RegressionCoefficients {
  Eigen::MatrixXd coef;  // rows: targets D, columns: regressors C
  double condition = 1.0;
};

constexpr double kMaxCondition = 1e10;

// Raw (non-central) sample moments. With center = true the columns are
// first shifted to mean zero.
MomentPair sample_moments(const Dataset& data, bool center = false);
Dataset center_columns(Dataset data);

DeterminantStat d2(const MomentPair& m, int u, int v);
DeterminantStat d3(const MomentPair& m, int u, int v);

/// R_{D,C} = S_{D,C} S_{C,C}^{-1}. Throws IllConditioned when the condition
/// number of S_{C,C} exceeds max_condition.
RegressionCoefficients regress(const MomentPair& m, const VertexSet& d_set, const VertexSet& c_set,
                               double max_condition = kMaxCondition);

/// Least-squares residuals of the columns outside c_set on the columns in
/// c_set; the result keeps only the non-C columns (labels preserved).
Dataset residualize(const Dataset& data, const VertexSet& c_set, double max_condition = kMaxCondition);

/// Population counterpart of residualize: moments of X_{V\C} - R X_C.
MomentPair residualize_moments(const MomentPair& m, const VertexSet& c_set,
                               double max_condition = kMaxCondition);

// The complement of c_set in 0..p-1.
VertexSet complement(int p, const VertexSet& c_set);

/// Pairs (i < j) whose inverse-covariance entry is below tol in absolute
/// value: non-adjacent pairs of a root cycle's skeleton.
std::vector<std::pair<int, int>> cycle_skeleton(const Eigen::MatrixXd& s_cc, double tol);

// Same characterization through the minors det S_{C\j, C\i}.
std::vector<std::pair<int, int>> cycle_skeleton_by_minors(const Eigen::MatrixXd& s_cc, double tol);

/// Coefficients of p(s,t) * lambda_uv = q(s,t) for consecutive u -> v -> w
/// on a root cycle of length >= 3.
struct TripleEquation {
  double p;
  double q;
};
TripleEquation triple_equation(const MomentPair& m, int u, int v, int w);

// q/p; throws DegenerateDenominator when |p| <= tol.
double lambda_from_triple(const MomentPair& m, int u, int v, int w, double tol = 1e-12);

/// Coefficients (a, b, c) of a*l^2 + b*l + c = 0 for lambda_uv of a
/// two-cycle u <-> v.
std::array<double, 3> two_cycle_quadratic(const MomentPair& m, int u, int v);

/// Both real roots for lambda_uv, smaller magnitude first. Throws
/// DegenerateDenominator when the leading coefficient is ~0 and ComplexRoots
/// when the discriminant is clearly negative.
std::pair<double, double> lambda_two_cycle(const MomentPair& m, int u, int v, double tol = 1e-12);

/// Lambda_{C,D} = R_{D,C}^T (I - Lambda_{D,D}).
Eigen::MatrixXd inter_cycle_weights(const Eigen::MatrixXd& r_dc, const Eigen::MatrixXd& lambda_dd);

/// A2 (4x3) and A3 (4x5) whose ranks are at most 2 and 3 on a root cycle.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rank_matrices(const MomentPair& m, int u, int v, int w,
                                                          double lambda_uv);

}  // namespace discycle
