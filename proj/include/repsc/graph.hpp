#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "repsc/linalg.hpp"

namespace repsc {

/// Undirected 0/1 graph stored as a dense adjacency matrix.
///
/// Similarity graphs carry no self-loops; representation graphs usually do
/// (every node represents itself), which is what `allows_self_loops` records.
class BinarySymmetricGraph {
 public:
  BinarySymmetricGraph(Matrix adjacency, bool allows_self_loops);

  static BinarySymmetricGraph empty(Eigen::Index n, bool allows_self_loops);
  static BinarySymmetricGraph from_edges(Eigen::Index n,
                                         const std::vector<std::pair<int, int>>& edges,
                                         bool allows_self_loops);

  Eigen::Index n() const noexcept { return adjacency_.rows(); }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  bool allows_self_loops() const noexcept { return allows_self_loops_; }

  bool has_edge(Eigen::Index i, Eigen::Index j) const { return adjacency_(i, j) != 0.0; }
  /// Row sum, self-loop included when present.
  double degree(Eigen::Index i) const { return adjacency_.row(i).sum(); }
  /// Undirected edges i < j (self-loops not counted).
  std::size_t edge_count() const;
  std::vector<std::pair<int, int>> edges() const;

  friend bool operator==(const BinarySymmetricGraph& a, const BinarySymmetricGraph& b) {
    return a.allows_self_loops_ == b.allows_self_loops_ && a.adjacency_ == b.adjacency_;
  }

 private:
  Matrix adjacency_;
  bool allows_self_loops_;
};

/// Node -> cluster labels in [0, k). Every label occurs at least once.
class ClusterAssignment {
 public:
  ClusterAssignment(std::vector<int> labels, int k);

  /// pi(v_i) = floor(i / (n / k)): the contiguous equal-size ground truth.
  static ClusterAssignment contiguous(int n, int k);

  int k() const noexcept { return k_; }
  int size() const noexcept { return static_cast<int>(labels_.size()); }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }
  std::vector<int> cluster_sizes() const;
  /// N x K 0/1 indicator (Theta).
  Matrix indicator() const;

  friend bool operator==(const ClusterAssignment&, const ClusterAssignment&) = default;

 private:
  std::vector<int> labels_;
  int k_;
};

/// (pi, R, p, q, r, s): cluster ground truth, representation graph and the
/// four edge probabilities of the representation-aware planted partition.
struct RppParams {
  ClusterAssignment assignment;
  BinarySymmetricGraph rep_graph;
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;
  double s = 0.0;

  /// Throws InvalidParameter unless 1 >= p >= q >= r >= s >= 0 and sizes agree.
  void validate() const;
  /// Probability that (i, j), i != j, is an edge.
  double edge_probability(Eigen::Index i, Eigen::Index j) const;
};

struct RepGraphInstance {
  BinarySymmetricGraph graph;
  ClusterAssignment assignment;
};

/// d-regular representation graph where each node has d/k representatives
/// (self-loop included) in every cluster, plus the contiguous ground truth.
///
/// With m = n/k and w = d/k, every cluster-pair block is an m x m circulant:
/// node i of cluster a links to nodes (i + o) mod m of cluster b for o in a
/// per-pair offset set of size w, mirrored for b < a. Diagonal blocks share a
/// symmetric offset set containing 0 (plus m/2 when w is even). The offsets
/// come from a fixed candidate list: the windows {0, ..., w-1} with diagonal
/// offsets {0, +-1, ..., +-h}, then seeded scattered sets. The chosen design
/// has rank(R) <= n - k when any candidate allows it, and among those the
/// smallest largest eigenvalue of R outside the cluster-constant vectors.
/// Throws DegreeOutOfRange when w is even and m is odd, since no symmetric
/// block with a full diagonal exists then.
RepGraphInstance build_d_regular_rep_graph(int n, int k, int d);

struct NodeViolation {
  int node = 0;
  int degree = 0;
  bool missing_self_loop = false;
  std::vector<int> per_cluster;  ///< representatives of `node` in each cluster
};

struct AssumptionReport {
  bool regular = false;
  int degree = 0;  ///< modal degree (self-loop counted)
  bool full_diagonal = false;
  bool balanced_per_cluster = false;
  std::vector<NodeViolation> violations;

  bool ok() const noexcept { return regular && full_diagonal && balanced_per_cluster; }
  std::string summary() const;
};

/// Checks d-regularity, the self-loop diagonal and the d/k-per-cluster
/// requirement. Never throws on a violation; offending nodes are listed.
AssumptionReport validate_assumption_41(const BinarySymmetricGraph& r, const ClusterAssignment& a);

/// Samples a similarity graph: each pair i < j independently, probability
/// chosen by (same cluster?, R_ij). Row-major draws from a seeded mt19937_64.
BinarySymmetricGraph sample_rpp(const RppParams& params, std::uint64_t seed);

/// Classic planted partition over `groups` contiguous equal groups, with
/// the diagonal forced to 1.
RepGraphInstance sample_planted_partition_rep_graph(int n, int groups, double p_in, double p_out,
                                                    std::uint64_t seed);

/// E[A] = q R + s(11^T - R) + (p - q) sum_k G_k R G_k + (r - s) sum_k G_k(11^T - R)G_k - p I,
/// with the diagonal pinned to zero (sampled graphs are loop-free).
Matrix expected_adjacency(const RppParams& params);

/// Relabels nodes: node i of the result is node perm[i] of the input.
BinarySymmetricGraph permute_nodes(const BinarySymmetricGraph& g, std::span<const int> perm);
ClusterAssignment permute_nodes(const ClusterAssignment& a, std::span<const int> perm);

// Edge-list format:
//   n=<N> diag=<0|1>
//   i j          (0-based, i <= j, one line per undirected edge; i == j is a self-loop)
void write_edge_list(std::ostream& out, const BinarySymmetricGraph& g);
BinarySymmetricGraph read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const BinarySymmetricGraph& g);
BinarySymmetricGraph load_edge_list(const std::string& path);

// Assignment format: one integer label per line, k = max label + 1.
void write_assignment(std::ostream& out, const ClusterAssignment& a);
ClusterAssignment read_assignment(std::istream& in);

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
inline double unit_draw(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

}  // namespace repsc
