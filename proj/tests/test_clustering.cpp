#include <doctest.h>

#include <limits>
#include <random>

#include "repsc/clustering.hpp"
#include "repsc/constraint.hpp"
#include "repsc/graph.hpp"
#include "repsc/linalg.hpp"
#include "support.hpp"

using namespace repsc;
using test::code_of;

namespace {

KMeansConfig km(std::uint64_t seed = 0, int restarts = 10) {
  KMeansConfig cfg;
  cfg.seed = seed;
  cfg.restarts = restarts;
  return cfg;
}

Matrix disjoint_cliques(int cliques, int size) {
  Matrix a = Matrix::Zero(cliques * size, cliques * size);
  for (int c = 0; c < cliques; ++c) a.block(c * size, c * size, size, size).setOnes();
  a.diagonal().setZero();
  return a;
}

// Plain Lloyd from uniformly drawn distinct starting points; lowest inertia over all restarts.
double naive_best_inertia(const Matrix& x, int k, int restarts, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  const int n = static_cast<int>(x.rows());
  double best = std::numeric_limits<double>::infinity();
  for (int t = 0; t < restarts; ++t) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), gen);
    Matrix c(k, x.cols());
    for (int j = 0; j < k; ++j) c.row(j) = x.row(idx[static_cast<std::size_t>(j)]);
    std::vector<int> label(static_cast<std::size_t>(n), -1);
    double inertia = 0.0;
    for (int iter = 0; iter < 200; ++iter) {
      bool changed = false;
      inertia = 0.0;
      for (int i = 0; i < n; ++i) {
        int arg = 0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int j = 0; j < k; ++j) {
          const double dist = (x.row(i) - c.row(j)).squaredNorm();
          if (dist < dmin) {
            dmin = dist;
            arg = j;
          }
        }
        inertia += dmin;
        changed |= label[static_cast<std::size_t>(i)] != arg;
        label[static_cast<std::size_t>(i)] = arg;
      }
      if (!changed) break;
      Matrix sum = Matrix::Zero(k, x.cols());
      std::vector<int> count(static_cast<std::size_t>(k), 0);
      for (int i = 0; i < n; ++i) {
        sum.row(label[static_cast<std::size_t>(i)]) += x.row(i);
        ++count[static_cast<std::size_t>(label[static_cast<std::size_t>(i)])];
      }
      for (int j = 0; j < k; ++j)
        if (count[static_cast<std::size_t>(j)] > 0) c.row(j) = sum.row(j) / count[static_cast<std::size_t>(j)];
    }
    best = std::min(best, inertia);
  }
  return best;
}

// Regular graph with K clusters of size m: a ring of offsets +-1..+-3 inside each
// cluster plus one cross edge i <-> i + m (mod N) per node.
Matrix regular_clustered_graph(int n, int k) {
  const int m = n / k;
  Matrix a = Matrix::Zero(n, n);
  for (int c = 0; c < k; ++c)
    for (int i = 0; i < m; ++i)
      for (int o = 1; o <= 3; ++o) {
        const int u = c * m + i, v = c * m + (i + o) % m;
        a(u, v) = a(v, u) = 1.0;
      }
  for (int i = 0; i < n; ++i) {
    const int j = (i + m) % n;
    a(i, j) = a(j, i) = 1.0;
  }
  return a;
}

}  // namespace

TEST_SUITE("clustering") {
  TEST_CASE("kmeans recovers well-separated clouds") {
    std::mt19937_64 gen(4);
    std::uniform_real_distribution<double> jitter(-0.5, 0.5);
    const double centres[3][2] = {{0, 0}, {100, 0}, {0, 100}};
    Matrix x(60, 2);
    for (int i = 0; i < 60; ++i) {
      x(i, 0) = centres[i / 20][0] + jitter(gen);
      x(i, 1) = centres[i / 20][1] + jitter(gen);
    }
    KMeansConfig cfg = km(1);
    cfg.k = 3;
    const KMeansResult res = kmeans(x, cfg);
    std::vector<int> truth(60);
    for (int i = 0; i < 60; ++i) truth[static_cast<std::size_t>(i)] = i / 20;
    CHECK(test::same_partition(res.labels, truth));
    double within = 0.0;
    for (int c = 0; c < 3; ++c) {
      const Matrix block = x.middleRows(20 * c, 20);
      within += (block.rowwise() - block.colwise().mean()).squaredNorm();
    }
    CHECK(res.inertia == doctest::Approx(within).epsilon(1e-10));
  }

  TEST_CASE("kmeans on identical points repairs an empty cluster") {
    KMeansConfig cfg = km(0, 1);
    cfg.k = 2;
    const KMeansResult res = kmeans(Matrix::Ones(10, 3), cfg);
    CHECK(res.inertia == 0.0);
    CHECK(res.empty_cluster_repairs >= 1);
    std::vector<int> seen(2, 0);
    for (int l : res.labels) seen[static_cast<std::size_t>(l)] = 1;
    CHECK(seen[0] + seen[1] == 2);
  }

  TEST_CASE("kmeans matches a 1000-restart reference on Gaussian blobs") {
    std::mt19937_64 gen(8);
    std::normal_distribution<double> noise(0.0, 1.0);
    const double centres[3][2] = {{0, 0}, {4, 1}, {1, 4}};
    Matrix x(150, 2);
    for (int i = 0; i < 150; ++i) {
      x(i, 0) = centres[i % 3][0] + noise(gen);
      x(i, 1) = centres[i % 3][1] + noise(gen);
    }
    KMeansConfig cfg = km(3);
    cfg.k = 3;
    const double ours = kmeans(x, cfg).inertia;
    const double reference = naive_best_inertia(x, 3, 1000, 99);
    CHECK(ours / reference <= 1.05);
  }

  TEST_CASE("kmeans errors and determinism") {
    KMeansConfig cfg = km();
    cfg.k = 5;
    CHECK(code_of([&] { kmeans(Matrix::Zero(3, 2), cfg); }) == ErrorCode::KTooLarge);
    cfg.restarts = 0;
    CHECK(code_of([&] { kmeans(Matrix::Zero(8, 2), cfg); }) == ErrorCode::InvalidParameter);
    cfg = km(12);
    cfg.k = 4;
    const Matrix x = test::random_symmetric(40, 2).leftCols(3);
    const KMeansResult a = kmeans(x, cfg), b = kmeans(x, cfg);
    CHECK(a.labels == b.labels);
    CHECK(a.inertia == b.inertia);
  }

  TEST_CASE("usc and nsc split disjoint cliques") {
    const Matrix a = disjoint_cliques(2, 6);
    const std::vector<int> truth{0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1};
    const ClusteringResult u = usc(a, 2, km());
    CHECK(test::same_partition(u.assignment.labels(), truth));
    CHECK(std::abs(u.spectrum_used(0)) <= 1e-10);
    CHECK(std::abs(u.spectrum_used(1)) <= 1e-10);
    const ClusteringResult v = nsc(a, 2, km());
    CHECK(test::same_partition(v.assignment.labels(), truth));
    for (Eigen::Index i = 0; i < v.embedding.rows(); ++i) CHECK(v.embedding.row(i).norm() == doctest::Approx(1.0));
  }

  TEST_CASE("degenerate eigengap attaches a warning") {
    const ClusteringResult u = usc(disjoint_cliques(3, 4), 2, km());
    CHECK_FALSE(u.warnings.empty());
    CHECK(usc(disjoint_cliques(2, 4), 2, km()).warnings.empty());
  }

  TEST_CASE("usc and nsc on an expected adjacency with plain block structure") {
    const ClusterAssignment truth = ClusterAssignment::contiguous(60, 3);
    Matrix e(60, 60);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j) e(i, j) = i == j ? 0.0 : (truth[static_cast<std::size_t>(i)] == truth[static_cast<std::size_t>(j)] ? 0.4 : 0.1);
    CHECK(test::same_partition(usc(e, 3, km()).assignment.labels(), truth.labels()));
    CHECK(test::same_partition(nsc(e, 3, km()).assignment.labels(), truth.labels()));
  }

  TEST_CASE("urepsc and nrepsc recover the ground truth from expected adjacencies") {
    for (auto [n, k, d] : {std::tuple{24, 2, 6}, std::tuple{60, 3, 9}, std::tuple{120, 4, 16}, std::tuple{200, 5, 20}}) {
      const RepGraphInstance inst = build_d_regular_rep_graph(n, k, d);
      const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
      const Matrix e = expected_adjacency(params);
      CAPTURE(n);
      CHECK(test::same_partition(urepsc(e, inst.graph.adjacency(), k, km()).assignment.labels(),
                                 inst.assignment.labels()));
      CHECK(test::same_partition(nrepsc(e, inst.graph.adjacency(), k, km()).assignment.labels(),
                                 inst.assignment.labels()));
    }
  }

  TEST_CASE("urepsc with an all-ones R matches usc") {
    const ClusterAssignment truth = ClusterAssignment::contiguous(90, 3);
    const BinarySymmetricGraph ones(Matrix::Ones(90, 90), true);
    const RppParams params{truth, ones, 0.5, 0.08, 0.08, 0.08};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const BinarySymmetricGraph g = sample_rpp(params, seed);
      const ClusteringResult u = usc(g, 3, km(seed));
      const ClusteringResult r = urepsc(g, ones, 3, km(seed));
      CHECK(test::same_partition(u.assignment.labels(), r.assignment.labels()));
    }
  }

  TEST_CASE("nrepsc equals urepsc on a regular similarity graph") {
    const RepGraphInstance inst = build_d_regular_rep_graph(48, 2, 8);
    const Matrix g = regular_clustered_graph(48, 2);
    REQUIRE((g.rowwise().sum().array() == 7.0).all());
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const ClusteringResult u = urepsc(g, inst.graph.adjacency(), 2, km(seed));
      const ClusteringResult v = nrepsc(g, inst.graph.adjacency(), 2, km(seed));
      CHECK(test::same_partition(u.assignment.labels(), v.assignment.labels()));
    }
  }

  TEST_CASE("urepsc embedding lies in the constrained subspace and minimizes the trace") {
    const RepGraphInstance inst = build_d_regular_rep_graph(120, 3, 18);
    const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
    const Matrix g = sample_rpp(params, 9).adjacency();
    const Matrix& r = inst.graph.adjacency();
    const ClusteringResult res = urepsc(g, r, 3, km());
    CHECK(lemma31_condition(res.embedding, r) <= 1e-7 * (1.0 + r.norm()));
    CHECK(orthonormality_error(res.embedding) <= 1e-8);

    const Matrix y = null_space_basis(right_center(r));
    const Matrix reduced = y.transpose() * laplacian(g) * y;
    const double ours = res.spectrum_used.sum();
    CHECK(ours == doctest::Approx((res.embedding.transpose() * laplacian(g) * res.embedding).trace()));
    for (int t = 0; t < 100; ++t) {
      const Matrix w = test::random_orthonormal(static_cast<int>(y.cols()), 3, 1000 + t);
      CHECK(ours <= (w.transpose() * reduced * w).trace() + 1e-9);
    }
  }

  TEST_CASE("nrepsc embedding is D-orthonormal") {
    const RepGraphInstance inst = build_d_regular_rep_graph(120, 3, 18);
    const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
    const Matrix g = sample_rpp(params, 21).adjacency();
    const ClusteringResult res = nrepsc(g, inst.graph.adjacency(), 3, km());
    const Vector deg = g.rowwise().sum();
    const Matrix tdt = res.embedding.transpose() * deg.asDiagonal() * res.embedding;
    CHECK((tdt - Matrix::Identity(3, 3)).norm() <= 1e-7);
    CHECK(lemma31_condition(res.embedding, inst.graph) <= 1e-7 * (1.0 + inst.graph.adjacency().norm()));
  }

  TEST_CASE("pipelines are deterministic given the seed") {
    const RepGraphInstance inst = build_d_regular_rep_graph(60, 3, 9);
    const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
    const Matrix g = sample_rpp(params, 2).adjacency();
    const Matrix& r = inst.graph.adjacency();
    CHECK(usc(g, 3, km(5)).assignment == usc(g, 3, km(5)).assignment);
    CHECK(nsc(g, 3, km(5)).assignment == nsc(g, 3, km(5)).assignment);
    const ClusteringResult a = urepsc(g, r, 3, km(5)), b = urepsc(g, r, 3, km(5));
    CHECK(a.assignment == b.assignment);
    CHECK(a.embedding == b.embedding);
    CHECK(nrepsc(g, r, 3, km(5)).assignment == nrepsc(g, r, 3, km(5)).assignment);
  }

  TEST_CASE("node relabeling permutes the recovered partition") {
    const RepGraphInstance inst = build_d_regular_rep_graph(60, 3, 9);
    const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
    const Matrix e = expected_adjacency(params);
    std::vector<int> perm(60);
    for (int i = 0; i < 60; ++i) perm[static_cast<std::size_t>(i)] = (13 * i + 7) % 60;
    Matrix ep(60, 60);
    for (int i = 0; i < 60; ++i)
      for (int j = 0; j < 60; ++j) ep(i, j) = e(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    const BinarySymmetricGraph rp = permute_nodes(inst.graph, perm);
    const ClusterAssignment truth = permute_nodes(inst.assignment, perm);
    CHECK(test::same_partition(urepsc(ep, rp.adjacency(), 3, km()).assignment.labels(), truth.labels()));
    CHECK(test::same_partition(nrepsc(ep, rp.adjacency(), 3, km()).assignment.labels(), truth.labels()));
  }

  TEST_CASE("approximate variants are lossless at the true rank") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const RepGraphInstance rep = sample_planted_partition_rep_graph(60, 3, 1.0, 0.0, seed);
      const int rank = numerical_rank(rep.graph.adjacency());
      CHECK(rank == 3);
      const ClusterAssignment truth = ClusterAssignment::contiguous(60, 2);
      const RppParams params{truth, rep.graph, 0.5, 0.4, 0.2, 0.1};
      const Matrix g = sample_rpp(params, seed + 50).adjacency();
      const Matrix& r = rep.graph.adjacency();
      CHECK(test::same_partition(urepsc_approx(g, r, 2, rank, km(seed)).assignment.labels(),
                                 urepsc(g, r, 2, km(seed)).assignment.labels()));
      CHECK(test::same_partition(nrepsc_approx(g, r, 2, rank, km(seed)).assignment.labels(),
                                 nrepsc(g, r, 2, km(seed)).assignment.labels()));
    }
  }

  TEST_CASE("clustering errors") {
    const Matrix g = disjoint_cliques(2, 4);
    Matrix isolated = g;
    isolated.row(0).setZero();
    isolated.col(0).setZero();
    CHECK(code_of([&] { nsc(isolated, 2, km()); }) == ErrorCode::IsolatedNode);
    CHECK(code_of([&] { nrepsc(isolated, Matrix::Ones(8, 8), 2, km()); }) == ErrorCode::IsolatedNode);
    CHECK(code_of([&] { urepsc(g, Matrix::Identity(8, 8), 2, km()); }) == ErrorCode::NullSpaceTooSmall);
    CHECK(code_of([&] { urepsc_approx(g, Matrix::Ones(8, 8), 2, 0, km()); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([&] { urepsc_approx(g, Matrix::Ones(8, 8), 2, 7, km()); }) == ErrorCode::RankTooLarge);
    CHECK(code_of([&] { nrepsc_approx(g, Matrix::Ones(8, 8), 2, 7, km()); }) == ErrorCode::RankTooLarge);
    CHECK(code_of([&] { usc(g, 9, km()); }) == ErrorCode::KTooLarge);
    CHECK(code_of([&] { usc(g, 1, km()); }) == ErrorCode::InvalidParameter);
    CHECK(code_of([&] { urepsc(g, Matrix::Ones(6, 6), 2, km()); }) == ErrorCode::SizeMismatch);
  }
}
