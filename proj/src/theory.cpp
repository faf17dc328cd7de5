#include "repsc/theory.hpp"

#include <cmath>

#include "repsc/clustering.hpp"

namespace repsc {

namespace {

constexpr double kDegenerateGap = 1e-10;

int require_assumption(const RppParams& params) {
  params.validate();
  const AssumptionReport report = validate_assumption_41(params.rep_graph, params.assignment);
  require(report.ok(), ErrorCode::AssumptionViolated, report.summary());
  const std::vector<int> sizes = params.assignment.cluster_sizes();
  for (int s : sizes)
    require(s == sizes.front(), ErrorCode::AssumptionViolated, "clusters must have equal sizes");
  return report.degree;
}

Matrix symmetrized(const Matrix& m) { return (m + m.transpose()) * 0.5; }

}  // namespace

ClosedFormEigenvalues closed_form_eigenvalues(const RppParams& params) {
  const double d = require_assumption(params);
  const double n = static_cast<double>(params.assignment.size());
  const double k = params.assignment.k();
  const double shared = (params.p - params.q) * d / k + (params.r - params.s) * (n - d) / k;
  return {params.q * d + params.s * (n - d) + shared, shared};
}

Matrix cluster_contrast_vectors(const ClusterAssignment& a) {
  require(a.k() >= 2, ErrorCode::InvalidParameter, "contrast vectors need k >= 2");
  const double off = -1.0 / static_cast<double>(a.k() - 1);
  Matrix u(a.size(), a.k() - 1);
  for (int i = 0; i < a.size(); ++i)
    for (int c = 0; c + 1 < a.k(); ++c) u(i, c) = a[static_cast<std::size_t>(i)] == c ? 1.0 : off;
  return u;
}

Matrix canonical_y_vectors(int n, int k) {
  require(n > 0 && k >= 1, ErrorCode::InvalidParameter, "canonical vectors need n > 0 and k >= 1");
  require(n % k == 0, ErrorCode::DivisibilityViolated,
          "k=" + std::to_string(k) + " does not divide n=" + std::to_string(n));
  const int m = n / k;
  Matrix y = Matrix::Zero(n, k);
  y.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  for (int c = 1; c < k; ++c) {
    // Column c is built from cluster c - 1 (0-based), with K - k = k - c + 1 in 1-based terms.
    const double rest = static_cast<double>(k - c);
    const double qk = 1.0 / std::sqrt(static_cast<double>(m) * rest * (rest + 1.0));
    for (int i = 0; i < n; ++i) {
      const int cluster = i / m;
      if (cluster < c - 1)
        y(i, c) = 0.0;
      else if (cluster == c - 1)
        y(i, c) = rest * qk;
      else
        y(i, c) = -qk;
    }
  }
  return y;
}

Matrix expected_laplacian(const RppParams& params) { return laplacian(expected_adjacency(params)); }

ExpectedSpectrum expected_spectrum(const RppParams& params) {
  const ClosedFormEigenvalues closed = closed_form_eigenvalues(params);
  const int k = params.assignment.k();
  const Matrix adj = expected_adjacency(params);
  const Matrix lap = laplacian(adj);
  const Vector deg = adj.rowwise().sum();

  ExpectedSpectrum out;
  out.lambda1 = closed.lambda1;
  out.lambda_rest = closed.lambda_rest;

  Matrix tilde = adj;
  tilde.diagonal().array() += params.p;
  out.lambda_bar = sym_eig(tilde).values.minCoeff();

  const Matrix y = null_space_basis(right_center(params.rep_graph.adjacency()));
  require(y.cols() > k, ErrorCode::NullSpaceTooSmall,
          "null space of dimension " + std::to_string(y.cols()) + " leaves no eigengap for k=" +
              std::to_string(k));
  const Matrix reduced = symmetrized(y.transpose() * (lap * y));
  out.mu = sym_eig(reduced).values;
  out.gamma = out.mu(k) - out.mu(k - 1);
  out.degenerate_gap = out.gamma <= kDegenerateGap;

  const SqrtPair<double> q = sqrt_and_inv_sqrt(symmetrized(y.transpose() * deg.asDiagonal() * y));
  out.mu_normalized = sym_eig(symmetrized(q.inv_sqrt * reduced * q.inv_sqrt)).values;
  out.gamma_normalized = out.mu_normalized(k) - out.mu_normalized(k - 1);

  const double scale = std::max(1.0, std::abs(closed.lambda1));
  const double gap = closed.lambda1 - closed.lambda_rest;
  bool match = std::abs(out.mu(0)) <= 1e-7 * scale;
  for (int c = 1; c < k; ++c) match = match && std::abs(out.mu(c) - gap) <= 1e-7 * scale;
  out.matches_closed_form = match;
  return out;
}

BoundShape theorem_bound_shape(const RppParams& params, const ExpectedSpectrum& spectrum, double epsilon) {
  require(epsilon >= 0.0, ErrorCode::InvalidParameter, "epsilon must be >= 0");
  require(spectrum.gamma > kDegenerateGap, ErrorCode::ZeroGap,
          "eigengap gamma=" + std::to_string(spectrum.gamma) + " is not positive");
  require(spectrum.gamma_normalized > kDegenerateGap, ErrorCode::ZeroGap,
          "normalized eigengap=" + std::to_string(spectrum.gamma_normalized) + " is not positive");
  const double n = static_cast<double>(params.assignment.size());
  const double k = params.assignment.k();
  const double base = params.p * n * std::log(n);
  const double degree = spectrum.lambda1 - params.p;
  require(degree > 0.0, ErrorCode::ZeroGap, "expected degree lambda1 - p must be positive");

  BoundShape shape;
  shape.unnormalized = (2.0 + epsilon) * base / (spectrum.gamma * spectrum.gamma);
  const double factor = 8.0 * std::sqrt(k) / spectrum.gamma_normalized + 1.0;
  shape.normalized = 32.0 * (2.0 + epsilon) * factor * factor * base / (degree * degree);
  shape.growth_ratio = std::sqrt(base) / degree;
  return shape;
}

BoundShape theorem_bound_shape(const RppParams& params, double epsilon) {
  return theorem_bound_shape(params, expected_spectrum(params), epsilon);
}

}  // namespace repsc
