#include "discycle/sem.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <random>

#include "discycle/errors.hpp"

namespace discycle {

void SemParameters::validate() const {
  const int p = graph.size();
  if (lambda.rows() != p || lambda.cols() != p)
    throw InvalidArgument("lambda must be " + std::to_string(p) + "x" + std::to_string(p));
  if (omega2.size() != p || omega3.size() != p)
    throw InvalidArgument("omega2 and omega3 need " + std::to_string(p) + " entries");
  for (int i = 0; i < p; ++i) {
    if (!(omega2(i) > 0.0))
      throw InvalidArgument("omega2[" + std::to_string(i + 1) + "] must be positive");
    for (int j = 0; j < p; ++j) {
      if (!std::isfinite(lambda(i, j))) throw InvalidArgument("lambda has a non-finite entry");
      if (lambda(i, j) != 0.0 && (i == j || !graph.has_edge(i, j)))
        throw InvalidArgument("lambda(" + std::to_string(i + 1) + "," + std::to_string(j + 1) +
                              ") is nonzero but the edge is absent");
    }
  }
  path_matrix(lambda);
}

SemParameters make_parameters(const DirectedGraph& g, const std::vector<double>& weights,
                              Eigen::VectorXd omega2, Eigen::VectorXd omega3) {
  if (weights.size() != g.edges().size())
    throw InvalidArgument("expected one weight per edge");
  SemParameters params{g, Eigen::MatrixXd::Zero(g.size(), g.size()), std::move(omega2),
                       std::move(omega3)};
  for (std::size_t e = 0; e < weights.size(); ++e)
    params.lambda(g.edges()[e].from, g.edges()[e].to) = weights[e];
  params.validate();
  return params;
}

Eigen::MatrixXd path_matrix(const Eigen::MatrixXd& lambda) {
  const auto p = lambda.rows();
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(p, p) - lambda;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  double det = lu.determinant();
  if (!(std::abs(det) > 1e-12))
    throw SingularSystem("I - Lambda is singular (|det| = " + std::to_string(std::abs(det)) + ")");
  return lu.inverse();
}

namespace {

MomentPair moments_from_paths(const Eigen::MatrixXd& m, const Eigen::VectorXd& omega2,
                              const Eigen::VectorXd& omega3) {
  const int p = static_cast<int>(m.rows());
  MomentPair out;
  out.s = m.transpose() * omega2.asDiagonal() * m;
  out.s = 0.5 * (out.s + out.s.transpose());
  out.t = SymTensor3(p);
  for (int k = 0; k < p; ++k)
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i) {
        double acc = 0.0;
        for (int a = 0; a < p; ++a) acc += m(a, i) * m(a, j) * m(a, k) * omega3(a);
        out.t(i, j, k) = acc;
      }
  return out;
}

}  // namespace

MomentPair population_moments(const SemParameters& params) {
  params.validate();
  return moments_from_paths(path_matrix(params.lambda), params.omega2, params.omega3);
}

TruncatedMoments trek_moments_truncated(const SemParameters& params, int max_len,
                                        double tolerance) {
  if (max_len < 1) throw InvalidArgument("max_len must be at least 1");
  const auto p = params.lambda.rows();
  // Summed walk weights lambda^{a->i} over walks of length <= max_len.
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(p, p);
  Eigen::MatrixXd sum = power;
  Eigen::MatrixXd previous;
  for (int len = 1; len <= max_len; ++len) {
    power = power * params.lambda;
    if (len == max_len) previous = sum;
    sum += power;
  }
  TruncatedMoments out;
  out.moments = moments_from_paths(sum, params.omega2, params.omega3);
  auto shorter = moments_from_paths(previous, params.omega2, params.omega3);
  out.last_increment = max_abs_difference(out.moments, shorter);
  Eigen::EigenSolver<Eigen::MatrixXd> es(params.lambda.cwiseAbs(), false);
  out.spectral_radius = es.eigenvalues().cwiseAbs().maxCoeff();
  out.converged = out.spectral_radius < 1.0 && out.last_increment <= tolerance;
  return out;
}

// Mixture: weight .9 on N(-2, .1^2), weight .1 on N(2, .1^2).
namespace mixture {
constexpr double w_low = 0.9, mu_low = -2.0, mu_high = 2.0, sd = 0.1;
}

double NoiseSpec::raw_mean() const {
  switch (kind) {
    case NoiseKind::MixtureNormal:
      return mixture::w_low * mixture::mu_low + (1 - mixture::w_low) * mixture::mu_high;
    case NoiseKind::Gamma:
      return 1.0;
    case NoiseKind::CustomTable: {
      double tw = std::accumulate(table_weights.begin(), table_weights.end(), 0.0);
      double acc = 0.0;
      for (std::size_t i = 0; i < table_values.size(); ++i) acc += table_weights[i] * table_values[i];
      return acc / tw;
    }
  }
  return 0.0;
}

namespace {

double central_moment(const NoiseSpec& spec, int order) {
  const double mu = spec.raw_mean();
  switch (spec.kind) {
    case NoiseKind::MixtureNormal: {
      using namespace mixture;
      double acc = 0.0;
      for (auto [w, m] : {std::pair{w_low, mu_low}, std::pair{1 - w_low, mu_high}}) {
        double d = m - mu;
        acc += w * (order == 2 ? d * d + sd * sd : d * d * d + 3 * d * sd * sd);
      }
      return acc;
    }
    case NoiseKind::Gamma:
      return order == 2 ? 1.0 : 2.0;
    case NoiseKind::CustomTable: {
      double tw = std::accumulate(spec.table_weights.begin(), spec.table_weights.end(), 0.0);
      double acc = 0.0;
      for (std::size_t i = 0; i < spec.table_values.size(); ++i)
        acc += spec.table_weights[i] * std::pow(spec.table_values[i] - mu, order);
      return acc / tw;
    }
  }
  return 0.0;
}

void check_table(const NoiseSpec& spec) {
  if (spec.kind != NoiseKind::CustomTable) return;
  if (spec.table_values.size() < 2 || spec.table_values.size() != spec.table_weights.size())
    throw InvalidArgument("custom noise table needs matching values and weights (>= 2)");
  for (double w : spec.table_weights)
    if (!(w >= 0.0)) throw InvalidArgument("custom noise weights must be non-negative");
  if (!(central_moment(spec, 2) > 0.0)) throw InvalidArgument("custom noise table is degenerate");
}

}  // namespace

double NoiseSpec::raw_sd() const { return std::sqrt(central_moment(*this, 2)); }

double NoiseSpec::standardized_skewness() const {
  return central_moment(*this, 3) / std::pow(central_moment(*this, 2), 1.5);
}

NoiseKind parse_noise_kind(const std::string& name) {
  if (name == "mixnorm" || name == "mixture_normal") return NoiseKind::MixtureNormal;
  if (name == "gamma") return NoiseKind::Gamma;
  if (name == "custom_table" || name == "custom") return NoiseKind::CustomTable;
  throw InvalidArgument("unknown noise distribution '" + name + "'");
}

std::string noise_kind_name(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::MixtureNormal: return "mixnorm";
    case NoiseKind::Gamma: return "gamma";
    case NoiseKind::CustomTable: return "custom_table";
  }
  return "?";
}

std::vector<std::string> default_labels(int p) {
  std::vector<std::string> labels;
  for (int i = 1; i <= p; ++i) labels.push_back("X" + std::to_string(i));
  return labels;
}

void noise_moments(const NoiseSpec& noise, const std::vector<double>& scales,
                   Eigen::VectorXd& omega2, Eigen::VectorXd& omega3) {
  check_table(noise);
  const double skew = noise.standardized_skewness();
  omega2.resize(static_cast<Eigen::Index>(scales.size()));
  omega3.resize(static_cast<Eigen::Index>(scales.size()));
  for (std::size_t v = 0; v < scales.size(); ++v) {
    omega2(v) = scales[v] * scales[v];
    omega3(v) = scales[v] * scales[v] * scales[v] * skew;
  }
}

Dataset sample(const SemParameters& params, const NoiseSpec& noise, int n, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("sample size must be at least 1");
  params.validate();
  check_table(noise);
  const int p = params.graph.size();
  std::vector<double> scales = noise.scales;
  if (scales.empty())
    for (int v = 0; v < p; ++v) scales.push_back(std::sqrt(params.omega2(v)));
  if (static_cast<int>(scales.size()) != p)
    throw InvalidArgument("noise needs one scale per variable");

  const Eigen::MatrixXd m = path_matrix(params.lambda);
  const double mu = noise.raw_mean(), sd = noise.raw_sd();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::gamma_distribution<double> gamma(1.0, 1.0);
  std::discrete_distribution<std::size_t> table(noise.table_weights.begin(),
                                                noise.table_weights.end());
  auto draw = [&]() -> double {
    switch (noise.kind) {
      case NoiseKind::MixtureNormal: {
        double centre = unit(rng) < mixture::w_low ? mixture::mu_low : mixture::mu_high;
        return centre + mixture::sd * normal(rng);
      }
      case NoiseKind::Gamma:
        return gamma(rng);
      case NoiseKind::CustomTable:
        return noise.table_values[table(rng)];
    }
    return 0.0;
  };

  Eigen::MatrixXd eps(n, p);
  for (int r = 0; r < n; ++r)
    for (int v = 0; v < p; ++v) eps(r, v) = (draw() - mu) / sd * scales[v];

  Dataset data;
  data.values = eps * m;
  data.labels = default_labels(p);
  return data;
}

}  // namespace discycle
