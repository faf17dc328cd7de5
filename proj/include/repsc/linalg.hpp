#pragma once

// Dense kernels shared by every clustering routine. All functions are
// templated on the Eigen expression type so they accept blocks, maps and
// products without forcing a copy at the call site.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "repsc/error.hpp"

namespace repsc {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = MatrixX<double>;
using Vector = VectorX<double>;

/// Eigenpairs of a symmetric matrix. `values` ascending; column i of
/// `vectors` belongs to values(i).
template <typename Scalar>
struct EigenDecomposition {
  VectorX<Scalar> values;
  MatrixX<Scalar> vectors;
};

template <typename Scalar>
struct SqrtPair {
  MatrixX<Scalar> sqrt;
  MatrixX<Scalar> inv_sqrt;
};

namespace detail {

template <typename Scalar>
constexpr Scalar sign_threshold() {
  return Scalar(1e-12);
}

}  // namespace detail

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  require(m.rows() >= 1 && m.cols() >= 1, ErrorCode::EmptyMatrix, what);
  require(m.allFinite(), ErrorCode::NonFinite, what);
}

/// Flips each column so that its first entry with magnitude above 1e-12 is
/// positive. Columns that are numerically zero are left alone.
template <typename Derived>
void apply_sign_convention(Eigen::MatrixBase<Derived>& columns) {
  using Scalar = typename Derived::Scalar;
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    for (Eigen::Index r = 0; r < columns.rows(); ++r) {
      const Scalar v = columns(r, c);
      if (std::abs(v) > detail::sign_threshold<Scalar>()) {
        if (v < Scalar(0)) columns.col(c) = -columns.col(c);
        break;
      }
    }
  }
}

template <typename Derived>
typename Derived::Scalar max_asymmetry(const Eigen::MatrixBase<Derived>& m) {
  return (m - m.transpose()).cwiseAbs().maxCoeff();
}

/// Full symmetric eigendecomposition, eigenvalues ascending.
///
/// The input may deviate from exact symmetry by at most 1e-10 per entry; it
/// is averaged with its transpose before factorization. Eigenvectors follow
/// the first-significant-entry-positive sign convention so results are
/// stable across runs.
template <typename Derived>
EigenDecomposition<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  require(m.rows() == m.cols(), ErrorCode::NonSquare,
          "sym_eig: matrix is " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  require_finite(m, "sym_eig");
  const Scalar asym = max_asymmetry(m);
  require(asym <= Scalar(1e-10), ErrorCode::NotSymmetric,
          "sym_eig: max |m - m^T| = " + std::to_string(static_cast<double>(asym)));

  const MatrixX<Scalar> sym = (m + m.transpose()) * Scalar(0.5);
  Eigen::SelfAdjointEigenSolver<MatrixX<Scalar>> solver(sym);
  require(solver.info() == Eigen::Success, ErrorCode::NoConvergence, "sym_eig: QR iteration failed");

  EigenDecomposition<Scalar> out{solver.eigenvalues(), solver.eigenvectors()};
  apply_sign_convention(out.vectors);
  return out;
}

/// Threshold below which a singular value counts as zero:
/// rel_tol * sigma_max * max(rows, cols).
template <typename Scalar>
Scalar rank_threshold(const VectorX<Scalar>& singular_values, Eigen::Index rows, Eigen::Index cols,
                      Scalar rel_tol) {
  const Scalar sigma_max = singular_values.size() > 0 ? singular_values.maxCoeff() : Scalar(0);
  return rel_tol * sigma_max * static_cast<Scalar>(std::max(rows, cols));
}

template <typename Derived>
Eigen::Index numerical_rank(const Eigen::MatrixBase<Derived>& m,
                            typename Derived::Scalar rel_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "numerical_rank");
  require(rel_tol > Scalar(0), ErrorCode::InvalidParameter, "numerical_rank: rel_tol must be > 0");
  Eigen::BDCSVD<MatrixX<Scalar>> svd(m.eval());
  const VectorX<Scalar> sv = svd.singularValues();
  const Scalar thresh = rank_threshold<Scalar>(sv, m.rows(), m.cols(), rel_tol);
  return static_cast<Eigen::Index>((sv.array() > thresh).count());
}

/// Orthonormal basis of the right null space of `m`.
///
/// Computed from the right singular vectors of an SVD. Columns are ordered
/// by ascending singular value (directions beyond min(rows, cols) count as
/// exact zeros and come first) and follow the eigenvector sign convention.
/// A full-rank input yields a matrix with zero columns.
///
/// The divide-and-conquer SVD occasionally returns inaccurate trailing
/// singular vectors, so the basis is verified against `m`. A failed check
/// recomputes the basis as the orthogonal complement of range(m^T) from a
/// column-pivoted Householder QR of m^T, keeping the SVD's rank.
template <typename Derived>
MatrixX<typename Derived::Scalar> null_space_basis(const Eigen::MatrixBase<Derived>& m,
                                                   typename Derived::Scalar rel_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "null_space_basis");
  require(rel_tol > Scalar(0), ErrorCode::InvalidParameter, "null_space_basis: rel_tol must be > 0");

  const MatrixX<Scalar> dense = m.eval();
  const Eigen::Index cols = dense.cols();
  Eigen::BDCSVD<MatrixX<Scalar>> svd(dense, Eigen::ComputeFullV);
  require(svd.info() == Eigen::Success, ErrorCode::NoConvergence, "null_space_basis: SVD failed");

  const VectorX<Scalar> sv = svd.singularValues();
  const Scalar thresh = rank_threshold<Scalar>(sv, dense.rows(), cols, rel_tol);
  const Eigen::Index rank = static_cast<Eigen::Index>((sv.array() > thresh).count());
  const Eigen::Index nullity = cols - rank;

  const auto accurate = [&](const MatrixX<Scalar>& b) {
    if (b.cols() == 0) return true;
    const Scalar tol = std::sqrt(static_cast<Scalar>(b.cols())) * std::max(thresh, Scalar(1e-300));
    const Scalar ortho = (b.transpose() * b - MatrixX<Scalar>::Identity(b.cols(), b.cols())).norm();
    return (dense * b).norm() <= tol && ortho <= Scalar(1e-8);
  };

  // Singular values are descending, so V's trailing columns are the null
  // directions; reversing them gives ascending order.
  const MatrixX<Scalar>& v = svd.matrixV();
  MatrixX<Scalar> basis(cols, nullity);
  for (Eigen::Index c = 0; c < nullity; ++c) basis.col(c) = v.col(cols - 1 - c);

  if (!accurate(basis)) {
    const MatrixX<Scalar> mt = dense.transpose();
    Eigen::ColPivHouseholderQR<MatrixX<Scalar>> qr(mt);
    const MatrixX<Scalar> q = qr.householderQ();
    basis = q.rightCols(nullity);
    require(accurate(basis), ErrorCode::NoConvergence, "null_space_basis: basis failed verification");
  }
  apply_sign_convention(basis);
  return basis;
}

/// Symmetric positive-definite square root and its inverse from one
/// eigendecomposition.
template <typename Derived>
SqrtPair<typename Derived::Scalar> sqrt_and_inv_sqrt(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto eig = sym_eig(m);
  const Scalar largest = eig.values(eig.values.size() - 1);
  const Scalar smallest = eig.values(0);
  require(largest > Scalar(0) && smallest > Scalar(1e-12) * largest, ErrorCode::NotPositiveDefinite,
          "sqrt_and_inv_sqrt: eigenvalue range [" + std::to_string(static_cast<double>(smallest)) +
              ", " + std::to_string(static_cast<double>(largest)) + "]");

  const VectorX<Scalar> root = eig.values.cwiseSqrt();
  SqrtPair<Scalar> out;
  out.sqrt = eig.vectors * root.asDiagonal() * eig.vectors.transpose();
  out.inv_sqrt = eig.vectors * root.cwiseInverse().asDiagonal() * eig.vectors.transpose();
  return out;
}

/// Best rank-`rank` symmetric approximation: keeps the eigenpairs of
/// largest |lambda|. Entries stay real-valued; nothing is re-binarized.
template <typename Derived>
MatrixX<typename Derived::Scalar> low_rank_approx(const Eigen::MatrixBase<Derived>& m,
                                                  Eigen::Index rank) {
  using Scalar = typename Derived::Scalar;
  require(rank >= 0 && rank <= m.rows(), ErrorCode::RankTooLarge,
          "low_rank_approx: rank " + std::to_string(rank) + " exceeds dimension " +
              std::to_string(m.rows()));
  const auto eig = sym_eig(m);
  const Eigen::Index n = eig.values.size();

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return std::abs(eig.values(a)) > std::abs(eig.values(b));
  });

  MatrixX<Scalar> kept(n, rank);
  VectorX<Scalar> lambdas(rank);
  for (Eigen::Index i = 0; i < rank; ++i) {
    kept.col(i) = eig.vectors.col(order[static_cast<std::size_t>(i)]);
    lambdas(i) = eig.values(order[static_cast<std::size_t>(i)]);
  }
  MatrixX<Scalar> out = kept * lambdas.asDiagonal() * kept.transpose();
  return (out + out.transpose()) * Scalar(0.5);
}

/// R (I - 11^T / N): subtracts each row's mean from that row.
template <typename Derived>
MatrixX<typename Derived::Scalar> right_center(const Eigen::MatrixBase<Derived>& r) {
  using Scalar = typename Derived::Scalar;
  const Scalar n = static_cast<Scalar>(r.cols());
  const VectorX<Scalar> row_means = r.rowwise().sum() / n;
  return r - row_means.replicate(1, r.cols());
}

/// M^T M ≈ I check helper used by tests and invariants.
template <typename Derived>
typename Derived::Scalar orthonormality_error(const Eigen::MatrixBase<Derived>& q) {
  using Scalar = typename Derived::Scalar;
  if (q.cols() == 0) return Scalar(0);
  return (q.transpose() * q - MatrixX<Scalar>::Identity(q.cols(), q.cols())).cwiseAbs().maxCoeff();
}

}  // namespace repsc
