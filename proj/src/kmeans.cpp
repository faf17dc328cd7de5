#include <limits>
#include <random>

#include "repsc/clustering.hpp"

namespace repsc {

void KMeansConfig::validate() const {
  require(k >= 1, ErrorCode::InvalidParameter, "kmeans: k must be >= 1");
  require(restarts >= 1, ErrorCode::InvalidParameter, "kmeans: restarts must be >= 1");
  require(max_iters >= 1, ErrorCode::InvalidParameter, "kmeans: max_iters must be >= 1");
  require(rel_tol > 0.0, ErrorCode::InvalidParameter, "kmeans: rel_tol must be > 0");
}

namespace {

struct Run {
  std::vector<int> labels;
  Matrix centroids;
  double inertia = 0.0;
  int repairs = 0;
};

Eigen::Index uniform_index(std::mt19937_64& gen, Eigen::Index n) {
  const auto i = static_cast<Eigen::Index>(unit_draw(gen()) * static_cast<double>(n));
  return std::min(i, n - 1);
}

// Squared distances point x centroid via ||x||^2 - 2 x.c + ||c||^2, clamped at 0.
Matrix squared_distances(const Matrix& points, const Vector& point_norms, const Matrix& centroids) {
  Matrix d = -2.0 * points * centroids.transpose();
  d.colwise() += point_norms;
  d.rowwise() += centroids.rowwise().squaredNorm().transpose();
  return d.cwiseMax(0.0);
}

Matrix plus_plus_seeding(const Matrix& points, int k, std::mt19937_64& gen) {
  const Eigen::Index n = points.rows();
  Matrix centroids(k, points.cols());
  centroids.row(0) = points.row(uniform_index(gen, n));
  Vector best = (points.rowwise() - centroids.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = best.sum();
    Eigen::Index pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(gen, n);
    } else {
      const double target = unit_draw(gen()) * total;
      double acc = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        acc += best(i);
        if (acc > target) {
          pick = i;
          break;
        }
      }
    }
    centroids.row(c) = points.row(pick);
    best = best.cwiseMin((points.rowwise() - centroids.row(c)).rowwise().squaredNorm());
  }
  return centroids;
}

Run lloyd(const Matrix& points, const Vector& point_norms, Matrix centroids, const KMeansConfig& cfg) {
  const Eigen::Index n = points.rows();
  const int k = cfg.k;
  Run run;
  run.labels.assign(static_cast<std::size_t>(n), 0);
  double previous = std::numeric_limits<double>::infinity();

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const Matrix dist = squared_distances(points, point_norms, centroids);
    std::vector<int> sizes(static_cast<std::size_t>(k), 0);
    Vector own(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index best = 0;
      own(i) = dist.row(i).minCoeff(&best);
      run.labels[static_cast<std::size_t>(i)] = static_cast<int>(best);
      ++sizes[static_cast<std::size_t>(best)];
    }

    for (int c = 0; c < k; ++c) {
      if (sizes[static_cast<std::size_t>(c)] != 0) continue;
      Eigen::Index far = -1;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(i)])] < 2) continue;
        if (far < 0 || own(i) > own(far)) far = i;
      }
      if (far < 0) break;
      --sizes[static_cast<std::size_t>(run.labels[static_cast<std::size_t>(far)])];
      run.labels[static_cast<std::size_t>(far)] = c;
      sizes[static_cast<std::size_t>(c)] = 1;
      own(far) = 0.0;
      ++run.repairs;
    }

    centroids.setZero();
    for (Eigen::Index i = 0; i < n; ++i) centroids.row(run.labels[static_cast<std::size_t>(i)]) += points.row(i);
    for (int c = 0; c < k; ++c)
      if (sizes[static_cast<std::size_t>(c)] > 0) centroids.row(c) /= static_cast<double>(sizes[static_cast<std::size_t>(c)]);

    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
      inertia += (points.row(i) - centroids.row(run.labels[static_cast<std::size_t>(i)])).squaredNorm();
    run.inertia = inertia;

    if (inertia == 0.0 || (iter > 0 && previous - inertia <= cfg.rel_tol * previous)) break;
    previous = inertia;
  }
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, const KMeansConfig& cfg) {
  cfg.validate();
  require_finite(points, "kmeans");
  require(cfg.k <= points.rows(), ErrorCode::KTooLarge,
          "kmeans: k=" + std::to_string(cfg.k) + " exceeds " + std::to_string(points.rows()) + " points");

  std::mt19937_64 gen(cfg.seed);
  const Vector norms = points.rowwise().squaredNorm();
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  int repairs = 0;
  for (int restart = 0; restart < cfg.restarts; ++restart) {
    Run run = lloyd(points, norms, plus_plus_seeding(points, cfg.k, gen), cfg);
    repairs += run.repairs;
    if (run.inertia < best.inertia) {
      best.labels = std::move(run.labels);
      best.centroids = std::move(run.centroids);
      best.inertia = run.inertia;
    }
  }
  best.empty_cluster_repairs = repairs;
  return best;
}

}  // namespace repsc
