#pragma once

#include <optional>
#include <span>
#include <vector>

#include "repsc/graph.hpp"

namespace repsc {

// Cut(C, V \ C) is the total adjacency weight leaving C, so that
// RCut = trace(H^T L H) and NCut = trace(T^T L T) hold exactly.

double ratio_cut(const Matrix& adjacency, const ClusterAssignment& a);
/// trace(H^T L H) with H the size-normalized indicator.
double ratio_cut_trace(const Matrix& adjacency, const ClusterAssignment& a);

double normalized_cut(const Matrix& adjacency, const ClusterAssignment& a);
/// trace(T^T L T) with T the volume-normalized indicator.
double normalized_cut_trace(const Matrix& adjacency, const ClusterAssignment& a);

/// K x K counts: (t, p) = #{i : truth_i = t, predicted_i = p}.
Matrix confusion_matrix(std::span<const int> truth, std::span<const int> predicted, int k);

/// Maximum-weight perfect matching on a square matrix (Hungarian method).
/// Returns column index assigned to each row.
std::vector<int> max_weight_assignment(const Matrix& weights);

/// Largest number of nodes whose labels agree under one relabeling of the
/// prediction.
int matched_nodes(std::span<const int> truth, std::span<const int> predicted, int k);

/// min_J (1/N) ||Theta - Theta_hat J||_0 over K x K permutations J. Each
/// misplaced node flips two indicator entries, so the range is [0, 2].
double mistake_fraction(std::span<const int> truth, std::span<const int> predicted, int k);
double mistake_fraction(const ClusterAssignment& truth, const ClusterAssignment& predicted);

/// matched_nodes / N.
double accuracy_nodes(const ClusterAssignment& truth, const ClusterAssignment& predicted);

struct PartitionScore {
  double rcut = 0.0;
  std::optional<double> ncut;  ///< unset when some cluster has zero volume
  std::optional<double> mistake_fraction;
  std::optional<double> accuracy;
  double avg_balance = 0.0;
  double min_balance = 0.0;
  double max_representation_residual = 0.0;
  std::optional<double> balance_over_rcut;  ///< unset when rcut == 0
};

/// Scores `predicted` on a similarity adjacency (binary or real-valued) and
/// representation graph; `truth` may be null when no ground truth exists.
PartitionScore score_partition(const Matrix& adjacency, const BinarySymmetricGraph& r,
                               const ClusterAssignment* truth, const ClusterAssignment& predicted);
inline PartitionScore score_partition(const BinarySymmetricGraph& g, const BinarySymmetricGraph& r,
                                      const ClusterAssignment* truth, const ClusterAssignment& predicted) {
  return score_partition(g.adjacency(), r, truth, predicted);
}

}  // namespace repsc
