#include "discycle/stat_tests.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <numeric>

#include "discycle/errors.hpp"

namespace discycle {

Correction parse_correction(const std::string& name) {
  if (name == "none") return Correction::None;
  if (name == "holm") return Correction::Holm;
  if (name == "bh") return Correction::Bh;
  throw InvalidArgument("unknown correction '" + name + "' (expected none, holm or bh)");
}

std::string correction_name(Correction c) {
  switch (c) {
    case Correction::None: return "none";
    case Correction::Holm: return "holm";
    case Correction::Bh: return "bh";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "sample") return Mode::Sample;
  if (name == "population") return Mode::Population;
  throw InvalidArgument("unknown mode '" + name + "' (expected sample or population)");
}

std::string mode_name(Mode m) { return m == Mode::Sample ? "sample" : "population"; }

void TestConfig::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
}

namespace {

std::vector<std::size_t> ascending_order(const std::vector<double>& p) {
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("p-values must lie in [0, 1]");
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return p[a] < p[b]; });
  return idx;
}

}  // namespace

std::vector<double> holm(const std::vector<double>& pvals) {
  auto idx = ascending_order(pvals);
  const double m = static_cast<double>(pvals.size());
  std::vector<double> out(pvals.size());
  double running = 0.0;
  for (std::size_t r = 0; r < idx.size(); ++r) {
    running = std::max(running, std::min(1.0, (m - r) * pvals[idx[r]]));
    out[idx[r]] = running;
  }
  return out;
}

std::vector<double> bh(const std::vector<double>& pvals) {
  auto idx = ascending_order(pvals);
  const double m = static_cast<double>(pvals.size());
  std::vector<double> out(pvals.size());
  double running = 1.0;
  for (std::size_t r = idx.size(); r-- > 0;) {
    running = std::min(running, std::min(1.0, m / (r + 1) * pvals[idx[r]]));
    out[idx[r]] = running;
  }
  return out;
}

std::vector<double> adjust_pvalues(const std::vector<double>& pvals, Correction c) {
  switch (c) {
    case Correction::Holm: return holm(pvals);
    case Correction::Bh: return bh(pvals);
    case Correction::None: break;
  }
  ascending_order(pvals);
  return pvals;
}

void adjust_family(PValueTable& records, std::size_t first, Correction c) {
  std::vector<double> raw;
  for (std::size_t i = first; i < records.size(); ++i) raw.push_back(records[i].raw_p);
  auto adj = adjust_pvalues(raw, c);
  for (std::size_t i = first; i < records.size(); ++i) records[i].adjusted_p = adj[i - first];
}

TestOutcome delta_test(const Eigen::MatrixXd& x, const DeterminantStat& stat) {
  const auto n = x.rows();
  if (n < kMinSampleSize)
    throw InvalidArgument("delta-method test needs at least " + std::to_string(kMinSampleSize) +
                          " samples");
  Eigen::ArrayXd psi = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd size = Eigen::ArrayXd::Zero(n);
  for (std::size_t k = 0; k < stat.coords.size(); ++k) {
    const auto& c = stat.coords[k];
    Eigen::ArrayXd mono = x.col(c.idx[0]).array() * x.col(c.idx[1]).array();
    if (c.order == 3) mono *= x.col(c.idx[2]).array();
    psi += stat.gradient[k] * mono;
    size += std::abs(stat.gradient[k]) * mono.abs();
  }
  const double mean = psi.mean();
  const double var = (psi - mean).square().sum() / static_cast<double>(n - 1);
  const double scale = size.square().mean();
  if (!(var > 1e-20 * scale))
    throw DegenerateVariance("plug-in variance of the determinant is " + std::to_string(var));
  TestOutcome out;
  out.statistic = stat.value / std::sqrt(var / static_cast<double>(n));
  out.p_value = std::erfc(std::abs(out.statistic) / std::sqrt(2.0));
  return out;
}

TestOutcome delta_test_determinant(const Dataset& data, DeterminantKind kind, int u, int v,
                                   bool center) {
  Dataset work = center ? center_columns(data) : data;
  auto m = sample_moments(work);
  return delta_test(work.values, kind == DeterminantKind::D2 ? d2(m, u, v) : d3(m, u, v));
}

namespace {

// Owen's pseudo-logarithm: log above eps, quadratic continuation below.
struct PseudoLog {
  double eps;
  double value(double z) const {
    if (z >= eps) return std::log(z);
    double r = z / eps;
    return std::log(eps) - 1.5 + 2.0 * r - 0.5 * r * r;
  }
  double d1(double z) const { return z >= eps ? 1.0 / z : 2.0 / eps - z / (eps * eps); }
  double d2(double z) const { return z >= eps ? -1.0 / (z * z) : -1.0 / (eps * eps); }
};

}  // namespace

ElResult el_mean_zero_test(const Eigen::MatrixXd& g_in) {
  const auto n = g_in.rows();
  if (g_in.cols() < 1 || n <= g_in.cols())
    throw InvalidArgument("empirical likelihood needs k >= 1 and n > k");

  // Columns that vanish identically satisfy the constraint; the rest are
  // scaled to unit root-mean-square.
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < g_in.cols(); ++j)
    if (g_in.col(j).squaredNorm() > 0.0) keep.push_back(j);
  ElResult out;
  if (keep.empty()) return out;
  const auto k = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd g(n, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    g.col(j) = g_in.col(keep[j]);
    g.col(j) /= std::sqrt(g.col(j).squaredNorm() / static_cast<double>(n));
  }
  for (Eigen::Index j = 0; j < k; ++j)
    if (g.col(j).minCoeff() > 0.0 || g.col(j).maxCoeff() < 0.0) {
      out.p_value = 0.0;
      out.statistic = std::numeric_limits<double>::infinity();
      out.outside_hull = true;
      return out;
    }

  const PseudoLog plog{1.0 / static_cast<double>(n)};
  auto objective = [&](const Eigen::VectorXd& lam) {
    Eigen::VectorXd z = (g * lam).array() + 1.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) acc += plog.value(z(i));
    return acc;
  };

  Eigen::VectorXd lam = Eigen::VectorXd::Zero(k);
  Eigen::VectorXd z = Eigen::VectorXd::Ones(n);
  double current = objective(lam);
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    Eigen::VectorXd w1(n), w2(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      w1(i) = plog.d1(z(i));
      w2(i) = -plog.d2(z(i));
    }
    Eigen::VectorXd grad = g.transpose() * w1;
    out.iterations = it;
    if (grad.norm() / static_cast<double>(n) < 1e-10) {
      converged = true;
      break;
    }
    Eigen::MatrixXd h = g.transpose() * w2.asDiagonal() * g;
    Eigen::VectorXd step = h.ldlt().solve(grad);
    // Half the Newton decrement bounds the remaining gain in the objective.
    if (grad.dot(step) < 1e-12 * std::max(1.0, std::abs(current))) {
      converged = true;
      break;
    }
    double t = 1.0;
    Eigen::VectorXd trial = lam + step;
    double next = objective(trial);
    while (!(next >= current) && t > 1e-12) {
      t *= 0.5;
      trial = lam + t * step;
      next = objective(trial);
    }
    if (!(next >= current)) break;
    lam = trial;
    current = next;
    z = (g * lam).array() + 1.0;
  }
  if (!converged)
    throw NonConvergence("empirical-likelihood dual did not converge in 100 Newton steps");

  if (z.minCoeff() < plog.eps * (1.0 - 1e-6)) {
    out.p_value = 0.0;
    out.statistic = std::numeric_limits<double>::infinity();
    out.outside_hull = true;
    return out;
  }
  double stat = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) stat += std::log(z(i));
  out.statistic = std::max(0.0, 2.0 * stat);
  out.p_value = boost::math::gamma_q(0.5 * static_cast<double>(k), 0.5 * out.statistic);
  return out;
}

namespace {

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const VertexSet& idx) {
  Eigen::MatrixXd out(x.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a) out.col(a) = x.col(idx[a]);
  return out;
}

void check_disjoint(const VertexSet& c_set, const VertexSet& d_set, int p) {
  if (c_set.empty() || d_set.empty()) throw InvalidArgument("root-cycle test needs non-empty sets");
  for (int v : c_set) {
    if (v < 0 || v >= p) throw InvalidArgument("root-cycle test index out of range");
    if (std::find(d_set.begin(), d_set.end(), v) != d_set.end())
      throw InvalidArgument("root-cycle test sets must be disjoint");
  }
  for (int v : d_set)
    if (v < 0 || v >= p) throw InvalidArgument("root-cycle test index out of range");
}

}  // namespace

ElResult root_cycle_test(const Eigen::MatrixXd& x, const VertexSet& c_set, const VertexSet& d_set) {
  check_disjoint(c_set, d_set, static_cast<int>(x.cols()));
  Eigen::MatrixXd xc = columns(x, c_set), xd = columns(x, d_set);
  Eigen::MatrixXd scc = xc.transpose() * xc, scd = xc.transpose() * xd;
  Eigen::MatrixXd resid = xd - xc * scc.ldlt().solve(scd);
  Eigen::MatrixXd g(x.rows(), static_cast<Eigen::Index>(c_set.size() * d_set.size()));
  Eigen::Index col = 0;
  for (Eigen::Index c = 0; c < xc.cols(); ++c) {
    Eigen::ArrayXd sq = xc.col(c).array().square();
    for (Eigen::Index d = 0; d < resid.cols(); ++d) g.col(col++) = (sq * resid.col(d).array()).matrix();
  }
  return el_mean_zero_test(g);
}

double root_cycle_statistic(const MomentPair& m, const VertexSet& c_set, const VertexSet& d_set) {
  check_disjoint(c_set, d_set, m.size());
  auto r = regress(m, d_set, c_set);
  const auto nc = static_cast<Eigen::Index>(c_set.size()), nd = static_cast<Eigen::Index>(d_set.size());
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(nc + nd, m.size());
  for (Eigen::Index a = 0; a < nc; ++a) b(a, c_set[a]) = 1.0;
  for (Eigen::Index a = 0; a < nd; ++a) {
    b(nc + a, d_set[a]) = 1.0;
    for (Eigen::Index c = 0; c < nc; ++c) b(nc + a, c_set[c]) -= r.coef(a, c);
  }
  auto t = transform_moments(m, b);
  double worst = 0.0;
  for (int c = 0; c < nc; ++c)
    for (int d = 0; d < nd; ++d) worst = std::max(worst, std::abs(t.t(c, c, static_cast<int>(nc) + d)));
  return worst;
}

namespace {

Eigen::VectorXd restricted_residual(const Eigen::MatrixXd& y, const EdgeTestInput& in) {
  const int p = static_cast<int>(y.cols());
  auto in_range = [p](int v) { return v >= 0 && v < p; };
  if (!in_range(in.d) || !in_range(in.c)) throw InvalidArgument("edge test vertex out of range");
  if (in.parents.size() != in.coef.size())
    throw InvalidArgument("edge test needs one coefficient per candidate parent");
  if (std::find(in.parents.begin(), in.parents.end(), in.c) == in.parents.end())
    throw InvalidArgument("tested parent must be among the candidate parents");
  if (in.cycle_parent && !in_range(*in.cycle_parent))
    throw InvalidArgument("cycle parent out of range");
  Eigen::VectorXd eps = y.col(in.d);
  for (std::size_t k = 0; k < in.parents.size(); ++k) {
    if (!in_range(in.parents[k])) throw InvalidArgument("candidate parent out of range");
    if (in.parents[k] != in.c) eps -= in.coef[k] * y.col(in.parents[k]);
  }
  if (in.cycle_parent) eps -= in.cycle_coef * y.col(*in.cycle_parent);
  return eps;
}

}  // namespace

ElResult edge_test(const Eigen::MatrixXd& y, const EdgeTestInput& in) {
  const Eigen::VectorXd eps = restricted_residual(y, in);
  const auto n = y.rows();
  const double inv_n = 1.0 / static_cast<double>(n);

  // Coefficients in column order: lambda_cd, the other candidate parents,
  // then the cycle parent. Equations: eps * Y_r^2 for the candidate parents
  // r (c first), then eps^2 * Y_c for the cycle parent.
  std::vector<int> regs{in.c};
  for (int v : in.parents)
    if (v != in.c) regs.push_back(v);
  const auto linear = static_cast<Eigen::Index>(regs.size());
  if (in.cycle_parent) regs.push_back(*in.cycle_parent);
  const auto q = static_cast<Eigen::Index>(regs.size());

  Eigen::MatrixXd m(n, q), a(q, q);
  const Eigen::ArrayXd e = eps.array();
  const Eigen::ArrayXd yc = y.col(in.c).array();
  for (Eigen::Index j = 0; j < q; ++j) {
    Eigen::ArrayXd w;
    if (j < linear) {
      w = y.col(regs[j]).array().square();
      m.col(j) = (e * w).matrix();
    } else {
      w = 2.0 * e * yc;
      m.col(j) = (e.square() * yc).matrix();
    }
    for (Eigen::Index l = 0; l < q; ++l) a(j, l) = -(y.col(regs[l]).array() * w).sum() * inv_n;
  }
  if (q == 1) return el_mean_zero_test(m);

  Eigen::MatrixXd a_nuis = a.bottomRightCorner(q - 1, q - 1);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a_nuis);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) > 1e-12 * sv(0)))
    throw IllConditioned("nuisance Jacobian of the edge test is numerically singular");
  Eigen::VectorXd proj = a_nuis.transpose().fullPivLu().solve(a.row(0).tail(q - 1).transpose());
  Eigen::MatrixXd g = m.col(0) - m.rightCols(q - 1) * proj;
  return el_mean_zero_test(g);
}

ElResult edge_test_naive(const Eigen::MatrixXd& y, const EdgeTestInput& in) {
  Eigen::MatrixXd g = (restricted_residual(y, in).array() * y.col(in.c).array().square()).matrix();
  return el_mean_zero_test(g);
}

}  // namespace discycle
