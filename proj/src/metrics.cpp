#include "repsc/metrics.hpp"

#include <cmath>
#include <limits>

#include "repsc/clustering.hpp"
#include "repsc/constraint.hpp"

namespace repsc {

namespace {

void check_sizes(const Matrix& adjacency, const ClusterAssignment& a) {
  require(adjacency.rows() == a.size() && adjacency.cols() == a.size(), ErrorCode::SizeMismatch,
          "graph and assignment sizes differ");
}

// out(k) = sum_{i in C_k, j not in C_k} A_ij
Vector boundary_weight(const Matrix& adjacency, const ClusterAssignment& a) {
  Vector cut = Vector::Zero(a.k());
  for (Eigen::Index j = 0; j < adjacency.cols(); ++j) {
    const int cj = a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < adjacency.rows(); ++i) {
      const int ci = a[static_cast<std::size_t>(i)];
      if (ci != cj) cut(ci) += adjacency(i, j);
    }
  }
  return cut;
}

}  // namespace

double ratio_cut(const Matrix& adjacency, const ClusterAssignment& a) {
  check_sizes(adjacency, a);
  const Vector cut = boundary_weight(adjacency, a);
  const std::vector<int> sizes = a.cluster_sizes();
  double total = 0.0;
  for (int k = 0; k < a.k(); ++k) total += cut(k) / static_cast<double>(sizes[static_cast<std::size_t>(k)]);
  return total;
}

double ratio_cut_trace(const Matrix& adjacency, const ClusterAssignment& a) {
  check_sizes(adjacency, a);
  const Matrix h = build_indicator_h(a);
  return (h.transpose() * laplacian(adjacency) * h).trace();
}

double normalized_cut(const Matrix& adjacency, const ClusterAssignment& a) {
  check_sizes(adjacency, a);
  const Vector cut = boundary_weight(adjacency, a);
  Vector volume = Vector::Zero(a.k());
  const Vector deg = adjacency.rowwise().sum();
  for (int i = 0; i < a.size(); ++i) volume(a[static_cast<std::size_t>(i)]) += deg(i);
  double total = 0.0;
  for (int k = 0; k < a.k(); ++k) {
    require(volume(k) > 0.0, ErrorCode::ZeroVolumeCluster, "cluster " + std::to_string(k) + " has zero volume");
    total += cut(k) / volume(k);
  }
  return total;
}

double normalized_cut_trace(const Matrix& adjacency, const ClusterAssignment& a) {
  check_sizes(adjacency, a);
  const Matrix t = build_indicator_t(a, adjacency.rowwise().sum());
  return (t.transpose() * laplacian(adjacency) * t).trace();
}

Matrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted, int k) {
  require(truth.size() == predicted.size(), ErrorCode::SizeMismatch, "label vectors differ in length");
  require(!truth.empty(), ErrorCode::SizeMismatch, "label vectors are empty");
  Matrix c = Matrix::Zero(k, k);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    require(truth[i] >= 0 && truth[i] < k && predicted[i] >= 0 && predicted[i] < k,
            ErrorCode::IndexOutOfRange, "label outside [0," + std::to_string(k) + ")");
    c(truth[i], predicted[i]) += 1.0;
  }
  return c;
}

std::vector<int> max_weight_assignment(const Matrix& weights) {
  require(weights.rows() == weights.cols(), ErrorCode::NonSquare, "assignment needs a square matrix");
  // Shortest augmenting path form of the Hungarian method on cost = -weight,
  // 1-based potentials u (rows) and v (columns).
  const int n = static_cast<int>(weights.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(static_cast<std::size_t>(n + 1), 0.0), v(static_cast<std::size_t>(n + 1), 0.0);
  std::vector<int> owner(static_cast<std::size_t>(n + 1), 0), way(static_cast<std::size_t>(n + 1), 0);
  auto cost = [&](int i, int j) { return -weights(i - 1, j - 1); };

  for (int i = 1; i <= n; ++i) {
    owner[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n + 1), inf);
    std::vector<char> used(static_cast<std::size_t>(n + 1), 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = owner[static_cast<std::size_t>(j0)];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur = cost(i0, j) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (owner[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      owner[static_cast<std::size_t>(j0)] = owner[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> row_to_col(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) row_to_col[static_cast<std::size_t>(owner[static_cast<std::size_t>(j)] - 1)] = j - 1;
  return row_to_col;
}

int matched_nodes(std::span<const int> truth, std::span<const int> predicted, int k) {
  const Matrix c = confusion_matrix(truth, predicted, k);
  const std::vector<int> match = max_weight_assignment(c);
  double total = 0.0;
  for (int t = 0; t < k; ++t) total += c(t, match[static_cast<std::size_t>(t)]);
  return static_cast<int>(std::lround(total));
}

double mistake_fraction(std::span<const int> truth, std::span<const int> predicted, int k) {
  const int n = static_cast<int>(truth.size());
  const int matched = matched_nodes(truth, predicted, k);
  return 2.0 * static_cast<double>(n - matched) / static_cast<double>(n);
}

double mistake_fraction(const ClusterAssignment& truth, const ClusterAssignment& predicted) {
  require(truth.size() == predicted.size(), ErrorCode::SizeMismatch, "assignments differ in length");
  require(truth.k() == predicted.k(), ErrorCode::SizeMismatch, "assignments differ in cluster count");
  return mistake_fraction(truth.labels(), predicted.labels(), truth.k());
}

double accuracy_nodes(const ClusterAssignment& truth, const ClusterAssignment& predicted) {
  require(truth.size() == predicted.size(), ErrorCode::SizeMismatch, "assignments differ in length");
  require(truth.k() == predicted.k(), ErrorCode::SizeMismatch, "assignments differ in cluster count");
  return static_cast<double>(matched_nodes(truth.labels(), predicted.labels(), truth.k())) /
         static_cast<double>(truth.size());
}

PartitionScore score_partition(const Matrix& adjacency, const BinarySymmetricGraph& r,
                               const ClusterAssignment* truth, const ClusterAssignment& predicted) {
  require(adjacency.rows() == r.n() && adjacency.rows() == predicted.size(), ErrorCode::SizeMismatch,
          "graphs and assignment sizes differ");
  PartitionScore score;
  score.rcut = ratio_cut(adjacency, predicted);
  try {
    score.ncut = normalized_cut(adjacency, predicted);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ZeroVolumeCluster) throw;
  }
  if (truth != nullptr) {
    score.mistake_fraction = mistake_fraction(*truth, predicted);
    score.accuracy = accuracy_nodes(*truth, predicted);
  }
  const BalanceReport balance = node_balance(r, predicted);
  score.avg_balance = balance.average_balance;
  score.min_balance = balance.min_balance;
  score.max_representation_residual = max_representation_residual(r, predicted);
  if (score.rcut > 0.0) score.balance_over_rcut = score.avg_balance / score.rcut;
  return score;
}

}  // namespace repsc
