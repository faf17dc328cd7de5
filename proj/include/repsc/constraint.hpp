#pragma once

#include <vector>

#include "repsc/graph.hpp"

namespace repsc {

struct BalanceReport {
  std::vector<double> per_node_balance;
  double average_balance = 0.0;
  double min_balance = 0.0;
};

/// Per-node balance rho_i: the smallest ratio between the node's
/// representative counts in any two clusters. 0/0 counts as 1, so a node
/// without representatives is perfectly balanced; a positive count against
/// a zero count gives 0.
BalanceReport node_balance(const BinarySymmetricGraph& r, const ClusterAssignment& a);

/// N x K matrix with entry (i, k) = |C_k ∩ N_R(i)| / |C_k| - |N_R(i)| / N.
/// All zeros iff the clusters satisfy the representation constraint.
Matrix representation_residual(const Matrix& r, const ClusterAssignment& a);
inline Matrix representation_residual(const BinarySymmetricGraph& r, const ClusterAssignment& a) {
  return representation_residual(r.adjacency(), a);
}

double max_representation_residual(const Matrix& r, const ClusterAssignment& a);
inline double max_representation_residual(const BinarySymmetricGraph& r, const ClusterAssignment& a) {
  return max_representation_residual(r.adjacency(), a);
}

/// ||R (I - 11^T/N) H||_F. Zero for an indicator-form H implies the
/// representation constraint; the converse does not hold.
double lemma31_condition(const Matrix& h, const Matrix& r);
inline double lemma31_condition(const Matrix& h, const BinarySymmetricGraph& r) {
  return lemma31_condition(h, r.adjacency());
}

/// H_ij = 1/sqrt(|C_j|) for v_i in C_j, else 0.
Matrix build_indicator_h(const ClusterAssignment& a);

/// T_ij = 1/sqrt(Vol(C_j)) for v_i in C_j, else 0, with Vol the sum of
/// `degrees` across the cluster.
Matrix build_indicator_t(const ClusterAssignment& a, const Vector& degrees);

}  // namespace repsc
