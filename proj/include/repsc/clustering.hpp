#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "repsc/graph.hpp"

namespace repsc {

struct KMeansConfig {
  int k = 2;
  int restarts = 10;
  int max_iters = 300;
  double rel_tol = 1e-8;
  std::uint64_t seed = 0;

  void validate() const;
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;  ///< k x dim
  double inertia = 0.0;
  int empty_cluster_repairs = 0;  ///< summed over all restarts
};

/// k-means++ seeding followed by Lloyd iterations, best of `restarts` runs.
///
/// A cluster that empties out is re-seeded at the point farthest from its
/// current centroid. Iteration stops once the relative inertia improvement
/// drops below rel_tol or after max_iters rounds.
KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg);

struct ClusteringResult {
  ClusterAssignment assignment;
  Matrix embedding;          ///< rows handed to k-means
  double kmeans_inertia = 0.0;
  Vector spectrum_used;      ///< eigenvalues behind the embedding columns
  std::vector<std::string> warnings;
};

/// L = D - A for a (possibly real-valued) symmetric adjacency.
Matrix laplacian(const Matrix& adjacency);

// Every algorithm accepts a real-valued symmetric adjacency so that
// expected-case matrices and approximated representation graphs go through
// the same code path as sampled graphs.

/// Unnormalized spectral clustering.
ClusteringResult usc(const Matrix& adjacency, int k, const KMeansConfig& cfg);
/// Normalized spectral clustering on I - D^{-1/2} A D^{-1/2} with unit-length rows.
ClusteringResult nsc(const Matrix& adjacency, int k, const KMeansConfig& cfg);
/// Spectral clustering restricted to the null space of R (I - 11^T/N).
ClusteringResult urepsc(const Matrix& adjacency, const Matrix& rep, int k, const KMeansConfig& cfg);
/// Normalized variant: Q = sqrt(Y^T D Y), embedding T = Y Q^{-1} V.
ClusteringResult nrepsc(const Matrix& adjacency, const Matrix& rep, int k, const KMeansConfig& cfg);
/// As urepsc / nrepsc with R replaced by its best rank-`rank` approximation.
ClusteringResult urepsc_approx(const Matrix& adjacency, const Matrix& rep, int k, int rank,
                               const KMeansConfig& cfg);
ClusteringResult nrepsc_approx(const Matrix& adjacency, const Matrix& rep, int k, int rank,
                               const KMeansConfig& cfg);

inline ClusteringResult usc(const BinarySymmetricGraph& g, int k, const KMeansConfig& cfg) {
  return usc(g.adjacency(), k, cfg);
}
inline ClusteringResult nsc(const BinarySymmetricGraph& g, int k, const KMeansConfig& cfg) {
  return nsc(g.adjacency(), k, cfg);
}
inline ClusteringResult urepsc(const BinarySymmetricGraph& g, const BinarySymmetricGraph& r, int k,
                               const KMeansConfig& cfg) {
  return urepsc(g.adjacency(), r.adjacency(), k, cfg);
}
inline ClusteringResult nrepsc(const BinarySymmetricGraph& g, const BinarySymmetricGraph& r, int k,
                               const KMeansConfig& cfg) {
  return nrepsc(g.adjacency(), r.adjacency(), k, cfg);
}

}  // namespace repsc
