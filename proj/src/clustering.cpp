#include "repsc/clustering.hpp"

#include <cmath>
#include <sstream>

namespace repsc {

namespace {

constexpr double kDegenerateGap = 1e-10;

void check_adjacency(const Matrix& adjacency, const char* who) {
  require(adjacency.rows() == adjacency.cols(), ErrorCode::NonSquare,
          std::string(who) + ": adjacency must be square");
  require_finite(adjacency, who);
  require(max_asymmetry(adjacency) <= 1e-10, ErrorCode::NotSymmetric,
          std::string(who) + ": adjacency must be symmetric");
}

void check_k(int k, Eigen::Index n, const char* who) {
  require(k >= 2, ErrorCode::InvalidParameter, std::string(who) + ": k must be >= 2");
  require(k <= n, ErrorCode::KTooLarge, std::string(who) + ": k exceeds node count");
}

Matrix symmetrized(const Matrix& m) { return (m + m.transpose()) * 0.5; }

Vector positive_degrees(const Matrix& adjacency, const char* who) {
  const Vector deg = adjacency.rowwise().sum();
  for (Eigen::Index i = 0; i < deg.size(); ++i)
    require(deg(i) > 0.0, ErrorCode::IsolatedNode,
            std::string(who) + ": node " + std::to_string(i) + " has degree " + std::to_string(deg(i)));
  return deg;
}

// The k smallest eigenpairs, with a warning when the k-th and (k+1)-th
// eigenvalues coincide and the subspace is not uniquely determined.
struct Leading {
  Matrix vectors;
  Vector values;
  std::vector<std::string> warnings;
};

Leading smallest_eigenpairs(const Matrix& m, int k) {
  const auto eig = sym_eig(m);
  Leading out{eig.vectors.leftCols(k), eig.values.head(k), {}};
  if (eig.values.size() > k && eig.values(k) - eig.values(k - 1) <= kDegenerateGap) {
    std::ostringstream os;
    os << "degenerate eigengap: mu_" << k << "=" << eig.values(k - 1) << " mu_" << k + 1 << "="
       << eig.values(k);
    out.warnings.push_back(os.str());
  }
  return out;
}

ClusteringResult cluster_rows(Matrix embedding, Leading leading, const KMeansConfig& base, int k) {
  KMeansConfig cfg = base;
  cfg.k = k;
  KMeansResult km = kmeans(embedding, cfg);
  return ClusteringResult{ClusterAssignment(std::move(km.labels), k), std::move(embedding), km.inertia,
                          std::move(leading.values), std::move(leading.warnings)};
}

Matrix constrained_basis(const Matrix& rep, Eigen::Index n, int k, const char* who) {
  require(rep.rows() == n && rep.cols() == n, ErrorCode::SizeMismatch,
          std::string(who) + ": representation graph size differs from similarity graph");
  require_finite(rep, who);
  Matrix y = null_space_basis(right_center(rep));
  require(y.cols() >= k, ErrorCode::NullSpaceTooSmall,
          std::string(who) + ": null space of R(I - 11^T/N) has dimension " + std::to_string(y.cols()) +
              " < k=" + std::to_string(k) + "; use the rank-approximated variant");
  return y;
}

Matrix approximate_rep(const Matrix& rep, int k, int rank, const char* who) {
  require(rank >= 1, ErrorCode::InvalidParameter, std::string(who) + ": rank must be >= 1");
  require(rank <= rep.rows() - k, ErrorCode::RankTooLarge,
          std::string(who) + ": rank " + std::to_string(rank) + " exceeds N - k = " +
              std::to_string(rep.rows() - k));
  return low_rank_approx(rep, rank);
}

}  // namespace

Matrix laplacian(const Matrix& adjacency) {
  Matrix l = -adjacency;
  l.diagonal() += adjacency.rowwise().sum();
  return l;
}

ClusteringResult usc(const Matrix& adjacency, int k, const KMeansConfig& cfg) {
  check_adjacency(adjacency, "usc");
  check_k(k, adjacency.rows(), "usc");
  Leading leading = smallest_eigenpairs(laplacian(adjacency), k);
  Matrix embedding = leading.vectors;
  return cluster_rows(std::move(embedding), std::move(leading), cfg, k);
}

ClusteringResult nsc(const Matrix& adjacency, int k, const KMeansConfig& cfg) {
  check_adjacency(adjacency, "nsc");
  check_k(k, adjacency.rows(), "nsc");
  const Vector inv_sqrt_deg = positive_degrees(adjacency, "nsc").cwiseSqrt().cwiseInverse();
  const Eigen::Index n = adjacency.rows();
  Matrix l_norm = -(inv_sqrt_deg.asDiagonal() * adjacency * inv_sqrt_deg.asDiagonal());
  l_norm.diagonal().array() += 1.0;

  Leading leading = smallest_eigenpairs(symmetrized(l_norm), k);
  Matrix embedding = leading.vectors;
  int zero_rows = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = embedding.row(i).norm();
    if (norm > 0.0)
      embedding.row(i) /= norm;
    else
      ++zero_rows;
  }
  if (zero_rows > 0)
    leading.warnings.push_back(std::to_string(zero_rows) + " zero embedding rows left unnormalized");
  return cluster_rows(std::move(embedding), std::move(leading), cfg, k);
}

ClusteringResult urepsc(const Matrix& adjacency, const Matrix& rep, int k, const KMeansConfig& cfg) {
  check_adjacency(adjacency, "urepsc");
  check_k(k, adjacency.rows(), "urepsc");
  const Matrix y = constrained_basis(rep, adjacency.rows(), k, "urepsc");
  const Matrix reduced = y.transpose() * (laplacian(adjacency) * y);
  Leading leading = smallest_eigenpairs(symmetrized(reduced), k);
  Matrix embedding = y * leading.vectors;
  return cluster_rows(std::move(embedding), std::move(leading), cfg, k);
}

ClusteringResult nrepsc(const Matrix& adjacency, const Matrix& rep, int k, const KMeansConfig& cfg) {
  check_adjacency(adjacency, "nrepsc");
  check_k(k, adjacency.rows(), "nrepsc");
  const Vector deg = positive_degrees(adjacency, "nrepsc");
  const Matrix y = constrained_basis(rep, adjacency.rows(), k, "nrepsc");

  const Matrix ydy = symmetrized(y.transpose() * deg.asDiagonal() * y);
  SqrtPair<double> q;
  try {
    q = sqrt_and_inv_sqrt(ydy);
  } catch (const Error& e) {
    fail(ErrorCode::IsolatedNode, std::string("nrepsc: Y^T D Y is not invertible (") + e.what() + ")");
  }
  const Matrix reduced = q.inv_sqrt * (y.transpose() * (laplacian(adjacency) * y)) * q.inv_sqrt;
  Leading leading = smallest_eigenpairs(symmetrized(reduced), k);
  Matrix embedding = y * (q.inv_sqrt * leading.vectors);
  return cluster_rows(std::move(embedding), std::move(leading), cfg, k);
}

ClusteringResult urepsc_approx(const Matrix& adjacency, const Matrix& rep, int k, int rank,
                               const KMeansConfig& cfg) {
  return urepsc(adjacency, approximate_rep(rep, k, rank, "urepsc_approx"), k, cfg);
}

ClusteringResult nrepsc_approx(const Matrix& adjacency, const Matrix& rep, int k, int rank,
                               const KMeansConfig& cfg) {
  return nrepsc(adjacency, approximate_rep(rep, k, rank, "nrepsc_approx"), k, cfg);
}

}  // namespace repsc
