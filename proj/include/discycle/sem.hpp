#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "discycle/graph.hpp"
#include "discycle/tensor.hpp"

namespace discycle {

/// Linear SEM X = Lambda^T X + eps with independent noise. lambda(i, j) is
/// the weight of edge i -> j; omega2 and omega3 are the noise second and
/// third moments.
struct SemParameters {
  DirectedGraph graph;
  Eigen::MatrixXd lambda;
  Eigen::VectorXd omega2;
  Eigen::VectorXd omega3;

  // Throws InvalidArgument / SingularSystem when an invariant fails.
  void validate() const;
};

// Build parameters from a graph and the weights of its edges (in edge order).
SemParameters make_parameters(const DirectedGraph& g, const std::vector<double>& weights,
                              Eigen::VectorXd omega2, Eigen::VectorXd omega3);

// (I - Lambda)^{-1}; throws SingularSystem when |det(I - Lambda)| <= 1e-12.
Eigen::MatrixXd path_matrix(const Eigen::MatrixXd& lambda);

/// S = (I-L)^{-T} Omega2 (I-L)^{-1}, t_ijk = sum_a M_ai M_aj M_ak omega3_a.
MomentPair population_moments(const SemParameters& params);

struct TruncatedMoments {
  MomentPair moments;
  // Largest entry change contributed by paths of the maximal length.
  double last_increment = 0.0;
  // Spectral radius of |Lambda|; the trek series only converges below 1.
  double spectral_radius = 0.0;
  bool converged = true;
};

/// Trek-rule evaluation restricted to treks whose paths have length at most
/// max_len. Independent of population_moments: only matrix powers of Lambda
/// are used, never an inverse.
TruncatedMoments trek_moments_truncated(const SemParameters& params, int max_len,
                                        double tolerance = 1e-10);

enum class NoiseKind { MixtureNormal, Gamma, CustomTable };

/// Raw noise law; each draw is centered analytically and rescaled so that
/// eps_v has standard deviation scales[v].
struct NoiseSpec {
  NoiseKind kind = NoiseKind::MixtureNormal;
  std::vector<double> scales;  // empty: use sqrt(omega2) of the model
  // CustomTable: discrete law on `table_values` with `table_weights`.
  std::vector<double> table_values;
  std::vector<double> table_weights;

  double raw_mean() const;
  double raw_sd() const;
  // Third central moment of the standardized law (the skewness).
  double standardized_skewness() const;
};

NoiseKind parse_noise_kind(const std::string& name);
std::string noise_kind_name(NoiseKind kind);

/// n x p sample matrix with column labels X1..Xp by default.
struct Dataset {
  Eigen::MatrixXd values;
  std::vector<std::string> labels;

  int n() const { return static_cast<int>(values.rows()); }
  int p() const { return static_cast<int>(values.cols()); }
};

std::vector<std::string> default_labels(int p);

/// Draws n i.i.d. rows of X = (I - Lambda)^{-T} eps. Deterministic in seed.
Dataset sample(const SemParameters& params, const NoiseSpec& noise, int n, std::uint64_t seed);

// Noise moments implied by a noise law and per-variable sd targets.
void noise_moments(const NoiseSpec& noise, const std::vector<double>& scales,
                   Eigen::VectorXd& omega2, Eigen::VectorXd& omega3);

}  // namespace discycle
