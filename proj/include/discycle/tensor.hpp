#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cstddef>
#include <vector>

namespace discycle {

/// Fully symmetric order-3 tensor stored as its p(p+1)(p+2)/6 distinct
/// entries. Any index permutation addresses the same slot.
class SymTensor3 {
 public:
  SymTensor3() = default;
  explicit SymTensor3(int p) : p_(p), data_(distinct_count(p), 0.0) {}

  static std::size_t distinct_count(int p) {
    auto n = static_cast<std::size_t>(p);
    return n * (n + 1) * (n + 2) / 6;
  }

  // Slot of the sorted triple i <= j <= k in the combinatorial number system.
  static std::size_t slot(int i, int j, int k) {
    if (i > j) std::swap(i, j);
    if (j > k) std::swap(j, k);
    if (i > j) std::swap(i, j);
    auto K = static_cast<std::size_t>(k), J = static_cast<std::size_t>(j);
    return K * (K + 1) * (K + 2) / 6 + J * (J + 1) / 2 + static_cast<std::size_t>(i);
  }

  int size() const noexcept { return p_; }
  double operator()(int i, int j, int k) const { return data_[slot(i, j, k)]; }
  double& operator()(int i, int j, int k) { return data_[slot(i, j, k)]; }

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

 private:
  int p_ = 0;
  std::vector<double> data_;
};

/// Second-moment matrix S and third-moment tensor T of a random vector.
struct MomentPair {
  Eigen::MatrixXd s;
  SymTensor3 t;

  int size() const { return static_cast<int>(s.rows()); }
};

// Moments of B X given moments of X, for a linear map B (q x p).
MomentPair transform_moments(const MomentPair& m, const Eigen::MatrixXd& b);

// Restriction of the moments to the listed coordinates, in that order.
MomentPair restrict_moments(const MomentPair& m, const std::vector<int>& idx);

double max_abs_difference(const MomentPair& a, const MomentPair& b);

}  // namespace discycle
