#pragma once

// Independent reference implementations used as test oracles.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include <doctest.h>

#include "repsc/error.hpp"
#include "repsc/graph.hpp"

namespace repsc::test {

/// Error code thrown by fn; fails the current test when nothing is thrown.
inline ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an exception");
  return ErrorCode::Io;
}

/// n x k matrix with orthonormal columns drawn from a seeded Gaussian.
inline Matrix random_orthonormal(int n, int k, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix m(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = dist(gen);
  return Eigen::HouseholderQR<Matrix>(m).householderQ() * Matrix::Identity(n, k);
}

inline Matrix random_symmetric(int n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> dist;
  Matrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = dist(gen);
  return m;
}

inline Matrix random_binary_graph(int n, double density, std::uint64_t seed, bool loops = false) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(density);
  Matrix a = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = coin(gen) ? 1.0 : 0.0;
  if (loops) a.diagonal().setOnes();
  return a;
}

/// min over all label permutations of (1/N) * #disagreeing indicator entries.
inline double brute_force_mistake_fraction(const std::vector<int>& truth, const std::vector<int>& pred, int k) {
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  const std::size_t n = truth.size();
  std::size_t best = 2 * n + 1;
  do {
    std::size_t flips = 0;
    for (std::size_t i = 0; i < n; ++i) {
      // Row i of Theta has a one at truth[i]; row i of Theta_hat J at perm[pred[i]].
      for (int c = 0; c < k; ++c) {
        const int lhs = truth[i] == c;
        const int rhs = perm[static_cast<std::size_t>(pred[i])] == c;
        flips += lhs != rhs;
      }
    }
    best = std::min(best, flips);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(n);
}

/// Same partition up to a relabeling.
inline bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return false;
  std::vector<int> ab(a.size() + 1, -1), ba(a.size() + 1, -1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto x = static_cast<std::size_t>(a[i]), y = static_cast<std::size_t>(b[i]);
    if (ab[x] == -1 && ba[y] == -1) {
      ab[x] = b[i];
      ba[y] = a[i];
    } else if (ab[x] != b[i] || ba[y] != a[i]) {
      return false;
    }
  }
  return true;
}

/// Case probability by direct lookup of (same cluster?, R_ij).
inline double case_probability(const RppParams& p, int i, int j) {
  const bool same = p.assignment[static_cast<std::size_t>(i)] == p.assignment[static_cast<std::size_t>(j)];
  const bool linked = p.rep_graph.adjacency()(i, j) == 1.0;
  if (same && linked) return p.p;
  if (!same && linked) return p.q;
  if (same) return p.r;
  return p.s;
}

inline Matrix projection_onto(const Matrix& basis) { return basis * basis.transpose(); }

/// ||x - P_span(basis) x|| for orthonormal basis columns.
inline double span_residual(const Matrix& basis, const Vector& x) {
  return (x - basis * (basis.transpose() * x)).norm();
}

}  // namespace repsc::test
