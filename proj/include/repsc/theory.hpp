#pragma once

// Closed-form expected-case quantities for the representation-aware planted
// partition with a d-regular representation graph and equal clusters.

#include "repsc/graph.hpp"

namespace repsc {

struct ClosedFormEigenvalues {
  double lambda1 = 0.0;      ///< eigenvalue of E[A] + pI along the all-ones vector
  double lambda_rest = 0.0;  ///< shared eigenvalue along the K-1 cluster contrasts
};

/// lambda1 = qd + s(N - d) + (p - q)d/K + (r - s)(N - d)/K,
/// lambda_rest = (p - q)d/K + (r - s)(N - d)/K.
/// Throws AssumptionViolated unless R is d-regular with d/K representatives
/// per cluster and all clusters have the same size.
ClosedFormEigenvalues closed_form_eigenvalues(const RppParams& params);

/// u_k (k < K): 1 on C_k and -1/(K-1) elsewhere, as N x (K-1) columns.
Matrix cluster_contrast_vectors(const ClusterAssignment& a);

/// Orthonormal N x K basis of span(1, u_1, ..., u_{K-1}) for the contiguous
/// ground truth: column 0 is 1/sqrt(N), column k is the Gram-Schmidt image
/// of u_k with scale 1/sqrt((N/K)(K-k)(K-k+1)).
Matrix canonical_y_vectors(int n, int k);

/// E[L] = E[D] - E[A].
Matrix expected_laplacian(const RppParams& params);

struct ExpectedSpectrum {
  double lambda1 = 0.0;
  double lambda_rest = 0.0;
  double gamma = 0.0;             ///< mu[K] - mu[K-1]
  Vector mu;                      ///< eigenvalues of Y^T E[L] Y, ascending
  double lambda_bar = 0.0;        ///< smallest eigenvalue of E[A] + pI
  double gamma_normalized = 0.0;
  Vector mu_normalized;           ///< eigenvalues of Q^{-1} Y^T E[L] Y Q^{-1}
  bool degenerate_gap = false;    ///< gamma <= 1e-10
  /// mu[0..K) equals {0, lambda1 - lambda_rest (K-1 times)} to 1e-7 relative.
  bool matches_closed_form = false;
};

/// Spectrum of the constrained expected Laplacian. Y comes from the same
/// null-space routine the algorithms use; the normalized spectrum uses
/// Q = sqrt(Y^T E[D] Y), which is the scalar sqrt(lambda1 - p) I here.
ExpectedSpectrum expected_spectrum(const RppParams& params);

struct BoundShape {
  double unnormalized = 0.0;  ///< (2 + eps) p N ln N / gamma^2
  double normalized = 0.0;    ///< 32 (2 + eps) [8 sqrt(K)/gamma_n + 1]^2 p N ln N / (lambda1 - p)^2
  double growth_ratio = 0.0;  ///< sqrt(p N ln N) / (lambda1 - p)
};

/// Mistake-bound shapes with every unknown universal constant set to 1.
/// Diagnostic only: these are not certified bounds. Throws ZeroGap when
/// either eigengap is <= 1e-10.
BoundShape theorem_bound_shape(const RppParams& params, const ExpectedSpectrum& spectrum, double epsilon);
BoundShape theorem_bound_shape(const RppParams& params, double epsilon);

}  // namespace repsc
