#include "discycle/moments.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "discycle/errors.hpp"

namespace discycle {

MomentPair transform_moments(const MomentPair& m, const Eigen::MatrixXd& b) {
  const int p = m.size();
  const int q = static_cast<int>(b.rows());
  if (b.cols() != p) throw InvalidArgument("linear map has the wrong number of columns");
  MomentPair out;
  out.s = b * m.s * b.transpose();
  out.s = 0.5 * (out.s + out.s.transpose());
  out.t = SymTensor3(q);
  // U_k = B T(:,:,k) B^T, then contract the last index.
  std::vector<Eigen::MatrixXd> u(p);
  Eigen::MatrixXd slice(p, p);
  for (int k = 0; k < p; ++k) {
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) slice(i, j) = m.t(i, j, k);
    u[k] = b * slice * b.transpose();
  }
  for (int c = 0; c < q; ++c)
    for (int bb = 0; bb <= c; ++bb)
      for (int a = 0; a <= bb; ++a) {
        double acc = 0.0;
        for (int k = 0; k < p; ++k) acc += b(c, k) * u[k](a, bb);
        out.t(a, bb, c) = acc;
      }
  return out;
}

MomentPair restrict_moments(const MomentPair& m, const std::vector<int>& idx) {
  const int q = static_cast<int>(idx.size());
  MomentPair out;
  out.s.resize(q, q);
  out.t = SymTensor3(q);
  for (int a = 0; a < q; ++a)
    for (int b = 0; b < q; ++b) out.s(a, b) = m.s(idx[a], idx[b]);
  for (int c = 0; c < q; ++c)
    for (int b = 0; b <= c; ++b)
      for (int a = 0; a <= b; ++a) out.t(a, b, c) = m.t(idx[a], idx[b], idx[c]);
  return out;
}

double max_abs_difference(const MomentPair& a, const MomentPair& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double d = (a.s - b.s).cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < a.t.data().size(); ++i)
    d = std::max(d, std::abs(a.t.data()[i] - b.t.data()[i]));
  return d;
}

Dataset center_columns(Dataset data) {
  Eigen::RowVectorXd mean = data.values.colwise().mean();
  data.values.rowwise() -= mean;
  return data;
}

MomentPair sample_moments(const Dataset& data, bool center) {
  if (center) return sample_moments(center_columns(data), false);
  const int n = data.n(), p = data.p();
  if (n < 1) throw InvalidArgument("sample moments need at least one row");
  const Eigen::MatrixXd& x = data.values;
  MomentPair out;
  out.s = (x.transpose() * x) / n;
  out.t = SymTensor3(p);
  for (int k = 0; k < p; ++k) {
    Eigen::MatrixXd weighted = x.leftCols(k + 1).array().colwise() * x.col(k).array();
    Eigen::MatrixXd block = (x.leftCols(k + 1).transpose() * weighted) / n;
    for (int j = 0; j <= k; ++j)
      for (int i = 0; i <= j; ++i) out.t(i, j, k) = block(i, j);
  }
  return out;
}

namespace {

MomentCoord s_coord(int i, int j) { return {2, {i, j, 0}}; }
MomentCoord t_coord(int i, int j, int k) { return {3, {i, j, k}}; }

void check_pair(const MomentPair& m, int u, int v) {
  if (u < 0 || v < 0 || u >= m.size() || v >= m.size())
    throw InvalidArgument("vertex index outside the moment dimension");
  if (u == v) throw InvalidArgument("determinant statistics need distinct vertices");
}

}  // namespace

DeterminantStat d2(const MomentPair& m, int u, int v) {
  check_pair(m, u, v);
  const double suu = m.s(u, u), suv = m.s(u, v), tuuu = m.t(u, u, u), tuuv = m.t(u, u, v);
  DeterminantStat out;
  out.value = suu * tuuv - suv * tuuu;
  out.coords = {s_coord(u, u), s_coord(u, v), t_coord(u, u, u), t_coord(u, u, v)};
  out.gradient = {tuuv, -tuuu, -suv, suu};
  return out;
}

DeterminantStat d3(const MomentPair& m, int u, int v) {
  check_pair(m, u, v);
  Eigen::Matrix3d a;
  a << m.s(u, u), m.s(u, v), m.s(v, v),  //
      m.t(u, u, u), m.t(u, u, v), m.t(u, v, v),  //
      m.t(u, u, v), m.t(u, v, v), m.t(v, v, v);
  auto cof = [&](int r, int c) {
    int r0 = r == 0 ? 1 : 0, r1 = r == 2 ? 1 : 2;
    int c0 = c == 0 ? 1 : 0, c1 = c == 2 ? 1 : 2;
    double minor = a(r0, c0) * a(r1, c1) - a(r0, c1) * a(r1, c0);
    return ((r + c) % 2 == 0 ? 1.0 : -1.0) * minor;
  };
  DeterminantStat out;
  out.value = a.determinant();
  out.coords = {s_coord(u, u),    s_coord(u, v),    s_coord(v, v),   t_coord(u, u, u),
                t_coord(u, u, v), t_coord(u, v, v), t_coord(v, v, v)};
  out.gradient = {cof(0, 0), cof(0, 1),             cof(0, 2),           cof(1, 0),
                  cof(1, 1) + cof(2, 0), cof(1, 2) + cof(2, 1), cof(2, 2)};
  return out;
}

namespace {

Eigen::MatrixXd sub(const Eigen::MatrixXd& s, const VertexSet& rows, const VertexSet& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b) out(a, b) = s(rows[a], cols[b]);
  return out;
}

double condition_number(const Eigen::MatrixXd& s) {
  if (s.rows() == 0) return 1.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s, Eigen::EigenvaluesOnly);
  double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

void check_set(const VertexSet& set, int p) {
  for (int v : set)
    if (v < 0 || v >= p) throw InvalidArgument("vertex " + std::to_string(v + 1) + " out of range");
}

}  // namespace

RegressionCoefficients regress(const MomentPair& m, const VertexSet& d_set, const VertexSet& c_set,
                               double max_condition) {
  check_set(d_set, m.size());
  check_set(c_set, m.size());
  RegressionCoefficients out;
  if (c_set.empty()) {
    out.coef = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d_set.size()), 0);
    return out;
  }
  Eigen::MatrixXd scc = sub(m.s, c_set, c_set);
  out.condition = condition_number(scc);
  if (!(out.condition <= max_condition))
    throw IllConditioned("S_CC has condition number " + std::to_string(out.condition));
  Eigen::MatrixXd scd = sub(m.s, c_set, d_set);
  out.coef = scc.ldlt().solve(scd).transpose();
  return out;
}

VertexSet complement(int p, const VertexSet& c_set) {
  VertexSet rest;
  for (int v = 0; v < p; ++v)
    if (!std::binary_search(c_set.begin(), c_set.end(), v)) rest.push_back(v);
  return rest;
}

Dataset residualize(const Dataset& data, const VertexSet& c_set, double max_condition) {
  check_set(c_set, data.p());
  VertexSet rest = complement(data.p(), c_set);
  Dataset out;
  out.values.resize(data.n(), static_cast<Eigen::Index>(rest.size()));
  for (std::size_t a = 0; a < rest.size(); ++a) {
    out.values.col(a) = data.values.col(rest[a]);
    out.labels.push_back(data.labels.empty() ? "X" + std::to_string(rest[a] + 1) : data.labels[rest[a]]);
  }
  if (c_set.empty() || rest.empty()) return out;
  Eigen::MatrixXd xc(data.n(), static_cast<Eigen::Index>(c_set.size()));
  for (std::size_t a = 0; a < c_set.size(); ++a) xc.col(a) = data.values.col(c_set[a]);
  MomentPair second;
  second.s = (data.values.transpose() * data.values) / data.n();
  auto r = regress(second, rest, c_set, max_condition);
  out.values -= xc * r.coef.transpose();
  return out;
}

MomentPair residualize_moments(const MomentPair& m, const VertexSet& c_set, double max_condition) {
  check_set(c_set, m.size());
  VertexSet rest = complement(m.size(), c_set);
  auto r = regress(m, rest, c_set, max_condition);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rest.size()), m.size());
  for (std::size_t a = 0; a < rest.size(); ++a) {
    b(a, rest[a]) = 1.0;
    for (std::size_t c = 0; c < c_set.size(); ++c) b(a, c_set[c]) = -r.coef(a, c);
  }
  return transform_moments(m, b);
}

std::vector<std::pair<int, int>> cycle_skeleton(const Eigen::MatrixXd& s_cc, double tol) {
  if (!(condition_number(s_cc) <= kMaxCondition))
    throw IllConditioned("cycle covariance is ill-conditioned");
  Eigen::MatrixXd inv = s_cc.ldlt().solve(Eigen::MatrixXd::Identity(s_cc.rows(), s_cc.cols()));
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < s_cc.rows(); ++i)
    for (int j = i + 1; j < s_cc.cols(); ++j)
      if (std::abs(inv(i, j)) < tol) pairs.emplace_back(i, j);
  return pairs;
}

std::vector<std::pair<int, int>> cycle_skeleton_by_minors(const Eigen::MatrixXd& s_cc, double tol) {
  const int k = static_cast<int>(s_cc.rows());
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      VertexSet rows, cols;
      for (int a = 0; a < k; ++a) {
        if (a != j) rows.push_back(a);
        if (a != i) cols.push_back(a);
      }
      if (std::abs(sub(s_cc, rows, cols).determinant()) < tol) pairs.emplace_back(i, j);
    }
  return pairs;
}

TripleEquation triple_equation(const MomentPair& m, int u, int v, int w) {
  const int p = m.size();
  for (int x : {u, v, w})
    if (x < 0 || x >= p) throw InvalidArgument("triple vertex out of range");
  if (u == v || v == w || u == w) throw InvalidArgument("triple needs three distinct vertices");
  const double suu = m.s(u, u), suv = m.s(u, v), suw = m.s(u, w), svw = m.s(v, w);
  const double tuuu = m.t(u, u, u), tuuv = m.t(u, u, v), tuvv = m.t(u, v, v);
  const double tuuw = m.t(u, u, w), tuvw = m.t(u, v, w), tvvw = m.t(v, v, w);
  // p = det(A1 A4 A5), q = det(A2 A4 A5) with the columns of the 3x5 block
  // [s_uu s_uv s_vv s_uw s_vw; t_uuu t_uuv t_uvv t_uuw t_uvw; t_uuv t_uvv t_vvv t_uvw t_vvw].
  const double minor45 = tuuw * tvvw - tuvw * tuvw;
  TripleEquation eq;
  eq.p = suu * minor45 - suw * (tuuu * tvvw - tuuv * tuvw) + svw * (tuuu * tuvw - tuuv * tuuw);
  eq.q = suv * minor45 - suw * (tuuv * tvvw - tuvv * tuvw) + svw * (tuuv * tuvw - tuvv * tuuw);
  return eq;
}

double lambda_from_triple(const MomentPair& m, int u, int v, int w, double tol) {
  auto eq = triple_equation(m, u, v, w);
  if (!(std::abs(eq.p) > tol))
    throw DegenerateDenominator("p(s,t) = " + std::to_string(eq.p) + " for triple (" +
                                std::to_string(u + 1) + "," + std::to_string(v + 1) + "," +
                                std::to_string(w + 1) + ")");
  return eq.q / eq.p;
}

std::array<double, 3> two_cycle_quadratic(const MomentPair& m, int u, int v) {
  const double suu = m.s(u, u), suv = m.s(u, v), svv = m.s(v, v);
  const double tuuu = m.t(u, u, u), tuuv = m.t(u, u, v), tuvv = m.t(u, v, v);
  return {suu * tuuv - suv * tuuu, svv * tuuu - suu * tuvv, suv * tuvv - svv * tuuv};
}

std::pair<double, double> lambda_two_cycle(const MomentPair& m, int u, int v, double tol) {
  if (u == v || u < 0 || v < 0 || u >= m.size() || v >= m.size())
    throw InvalidArgument("two-cycle needs two distinct vertices in range");
  auto [a, b, c] = two_cycle_quadratic(m, u, v);
  if (!(std::abs(a) > tol))
    throw DegenerateDenominator("leading coefficient of the two-cycle quadratic vanishes");
  double disc = b * b - 4 * a * c;
  if (disc < 0) {
    if (disc < -1e-9 * (b * b + 4 * std::abs(a * c)))
      throw ComplexRoots("two-cycle quadratic has complex roots (discriminant " +
                         std::to_string(disc) + ")");
    disc = 0;
  }
  double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (std::abs(r2) < std::abs(r1)) std::swap(r1, r2);
  return {r1, r2};
}

Eigen::MatrixXd inter_cycle_weights(const Eigen::MatrixXd& r_dc, const Eigen::MatrixXd& lambda_dd) {
  if (lambda_dd.rows() != r_dc.rows() || lambda_dd.cols() != r_dc.rows())
    throw InvalidArgument("cycle weight block does not match the regression targets");
  Eigen::MatrixXd id = Eigen::MatrixXd::Identity(lambda_dd.rows(), lambda_dd.cols());
  return r_dc.transpose() * (id - lambda_dd);
}

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> rank_matrices(const MomentPair& m, int u, int v, int w,
                                                          double l) {
  Eigen::MatrixXd a2(4, 3), a3(4, 5);
  a2 << 1, l, l * l,  //
      m.s(u, u), m.s(u, v), m.s(v, v),  //
      m.t(u, u, u), m.t(u, u, v), m.t(u, v, v),  //
      m.t(u, u, v), m.t(u, v, v), m.t(v, v, v);
  a3 << 1, l, l * l, l * l, l * l * l,  //
      m.s(u, u), m.s(u, v), m.s(v, v), m.s(u, w), m.s(v, w),  //
      m.t(u, u, u), m.t(u, u, v), m.t(u, v, v), m.t(u, u, w), m.t(u, v, w),  //
      m.t(u, u, v), m.t(u, v, v), m.t(v, v, v), m.t(u, v, w), m.t(v, v, w);
  return {a2, a3};
}

}  // namespace discycle
