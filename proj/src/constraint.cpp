#include "repsc/constraint.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace repsc {

namespace {

// counts(i, k) = sum_{j in C_k} R_ij
Matrix representative_counts(const Matrix& r, const ClusterAssignment& a) {
  require(r.rows() == a.size() && r.cols() == a.size(), ErrorCode::SizeMismatch,
          "representation graph and assignment sizes differ");
  return r * a.indicator();
}

}  // namespace

BalanceReport node_balance(const BinarySymmetricGraph& r, const ClusterAssignment& a) {
  require(a.k() >= 2, ErrorCode::InvalidParameter, "balance needs k >= 2");
  const Matrix counts = representative_counts(r.adjacency(), a);
  BalanceReport report;
  report.per_node_balance.resize(static_cast<std::size_t>(counts.rows()));
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    const double hi = counts.row(i).maxCoeff();
    const double lo = counts.row(i).minCoeff();
    report.per_node_balance[static_cast<std::size_t>(i)] = hi == 0.0 ? 1.0 : lo / hi;
  }
  const auto& b = report.per_node_balance;
  report.average_balance = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(b.size());
  report.min_balance = *std::min_element(b.begin(), b.end());
  return report;
}

Matrix representation_residual(const Matrix& r, const ClusterAssignment& a) {
  const Matrix counts = representative_counts(r, a);
  const std::vector<int> sizes = a.cluster_sizes();
  const double n = static_cast<double>(a.size());
  const Vector reps = r.rowwise().sum();

  Matrix residual(counts.rows(), counts.cols());
  for (Eigen::Index k = 0; k < counts.cols(); ++k) {
    const int size = sizes[static_cast<std::size_t>(k)];
    require(size > 0, ErrorCode::EmptyCluster, "cluster " + std::to_string(k) + " is empty");
    residual.col(k) = counts.col(k) / static_cast<double>(size) - reps / n;
  }
  return residual;
}

double max_representation_residual(const Matrix& r, const ClusterAssignment& a) {
  return representation_residual(r, a).cwiseAbs().maxCoeff();
}

double lemma31_condition(const Matrix& h, const Matrix& r) {
  require(h.rows() == r.rows() && r.rows() == r.cols(), ErrorCode::SizeMismatch,
          "H must have one row per node of R");
  // R (I - 11^T/N) H = R H - (R 1)(1^T H)/N, without forming the N x N product.
  const double n = static_cast<double>(r.rows());
  const Matrix rh = r * h;
  const Matrix correction = (r.rowwise().sum() / n) * h.colwise().sum();
  return (rh - correction).norm();
}

Matrix build_indicator_h(const ClusterAssignment& a) {
  const std::vector<int> sizes = a.cluster_sizes();
  Matrix h = Matrix::Zero(a.size(), a.k());
  for (int i = 0; i < a.size(); ++i) {
    const int c = a[static_cast<std::size_t>(i)];
    h(i, c) = 1.0 / std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(c)]));
  }
  return h;
}

Matrix build_indicator_t(const ClusterAssignment& a, const Vector& degrees) {
  require(degrees.size() == a.size(), ErrorCode::SizeMismatch, "one degree per node required");
  Vector volume = Vector::Zero(a.k());
  for (int i = 0; i < a.size(); ++i) volume(a[static_cast<std::size_t>(i)]) += degrees(i);
  for (int c = 0; c < a.k(); ++c)
    require(volume(c) > 0.0, ErrorCode::ZeroVolumeCluster,
            "cluster " + std::to_string(c) + " has zero volume");

  Matrix t = Matrix::Zero(a.size(), a.k());
  for (int i = 0; i < a.size(); ++i) {
    const int c = a[static_cast<std::size_t>(i)];
    t(i, c) = 1.0 / std::sqrt(volume(c));
  }
  return t;
}

}  // namespace repsc
