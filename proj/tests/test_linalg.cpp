#include <doctest.h>

#include "repsc/graph.hpp"
#include "repsc/linalg.hpp"
#include "support.hpp"

using namespace repsc;
using test::code_of;

TEST_SUITE("linalg") {
  TEST_CASE("sym_eig on the 2x2 identity") {
    const auto eig = sym_eig(Matrix::Identity(2, 2));
    CHECK(eig.values(0) == doctest::Approx(1.0));
    CHECK(eig.values(1) == doctest::Approx(1.0));
    CHECK(orthonormality_error(eig.vectors) <= 1e-12);
  }

  TEST_CASE("sym_eig on the 2x2 swap matrix") {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    const auto eig = sym_eig(m);
    CHECK(eig.values(0) == doctest::Approx(-1.0));
    CHECK(eig.values(1) == doctest::Approx(1.0));
    const double h = 1.0 / std::sqrt(2.0);
    CHECK(eig.vectors(0, 0) == doctest::Approx(h));
    CHECK(eig.vectors(1, 0) == doctest::Approx(-h));
    CHECK(eig.vectors(0, 1) == doctest::Approx(h));
    CHECK(eig.vectors(1, 1) == doctest::Approx(h));
  }

  TEST_CASE("sym_eig reconstructs a seeded random symmetric matrix") {
    const Matrix m = test::random_symmetric(5, 7);
    const auto eig = sym_eig(m);
    const Matrix rebuilt = eig.vectors * eig.values.asDiagonal() * eig.vectors.transpose();
    CHECK((rebuilt - m).norm() <= 1e-8);
    for (Eigen::Index i = 0; i + 1 < eig.values.size(); ++i) CHECK(eig.values(i) <= eig.values(i + 1));
    for (Eigen::Index i = 0; i < eig.values.size(); ++i)
      CHECK((m * eig.vectors.col(i) - eig.values(i) * eig.vectors.col(i)).norm() <= 1e-7 * (1 + m.norm()));
    CHECK(std::abs(eig.values.sum() - m.trace()) <= 1e-7 * (1 + std::abs(m.trace())));
    CHECK(std::abs(eig.values.squaredNorm() - m.squaredNorm()) <= 1e-7 * m.squaredNorm());
  }

  TEST_CASE("sym_eig sign convention and determinism") {
    const Matrix m = test::random_symmetric(12, 3);
    const auto a = sym_eig(m);
    const auto b = sym_eig(m);
    CHECK(a.vectors == b.vectors);
    CHECK(a.values == b.values);
    for (Eigen::Index c = 0; c < a.vectors.cols(); ++c) {
      Eigen::Index first = 0;
      while (std::abs(a.vectors(first, c)) <= 1e-12) ++first;
      CHECK(a.vectors(first, c) > 0.0);
    }
  }

  TEST_CASE("sym_eig works for single precision") {
    Eigen::MatrixXf m(2, 2);
    m << 2.0f, 0.0f, 0.0f, 3.0f;
    const auto eig = sym_eig(m);
    CHECK(eig.values(0) == doctest::Approx(2.0f));
    CHECK(eig.values(1) == doctest::Approx(3.0f));
  }

  TEST_CASE("sym_eig rejects bad input") {
    CHECK(code_of([] { sym_eig(Matrix::Zero(2, 3)); }) == ErrorCode::NonSquare);
    Matrix asym(2, 2);
    asym << 0, 1, 0, 0;
    CHECK(code_of([&] { sym_eig(asym); }) == ErrorCode::NotSymmetric);
    Matrix nan = Matrix::Zero(2, 2);
    nan(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK(code_of([&] { sym_eig(nan); }) == ErrorCode::NonFinite);
    Matrix tiny(2, 2);
    tiny << 0, 1, 1 + 1e-12, 0;
    CHECK_NOTHROW(sym_eig(tiny));
  }

  TEST_CASE("null_space_basis of zero and identity") {
    const Matrix y0 = null_space_basis(Matrix::Zero(3, 3));
    CHECK(y0.cols() == 3);
    CHECK(orthonormality_error(y0) <= 1e-12);
    CHECK(null_space_basis(Matrix::Identity(3, 3)).cols() == 0);
  }

  TEST_CASE("null_space_basis on the centred 24-node toy representation graph") {
    const RepGraphInstance inst = build_d_regular_rep_graph(24, 2, 6);
    const Matrix m = right_center(inst.graph.adjacency());
    const Matrix y = null_space_basis(m);
    REQUIRE(y.cols() >= 2);
    CHECK(orthonormality_error(y) <= 1e-8);
    CHECK((m * y).norm() <= 1e-7 * (1 + m.norm()));
    CHECK(y.cols() + numerical_rank(m) == m.cols());

    const Vector ones = Vector::Constant(24, 1.0 / std::sqrt(24.0));
    Vector u1(24);
    for (int i = 0; i < 24; ++i) u1(i) = i < 12 ? 1.0 : -1.0;
    CHECK(test::span_residual(y, ones) <= 1e-8);
    CHECK(test::span_residual(y, u1 / u1.norm()) <= 1e-8);
  }

  TEST_CASE("null_space_basis on rectangular input and column order") {
    Matrix m = Matrix::Zero(2, 4);
    m(0, 0) = 1.0;
    m(1, 1) = 2.0;
    const Matrix y = null_space_basis(m);
    CHECK(y.cols() == 2);
    CHECK((m * y).norm() <= 1e-12);
    CHECK(null_space_basis(m) == y);
  }

  TEST_CASE("sqrt_and_inv_sqrt on scalar and diagonal matrices") {
    const auto s = sqrt_and_inv_sqrt(Matrix(4.0 * Matrix::Identity(2, 2)));
    CHECK((s.sqrt - 2.0 * Matrix::Identity(2, 2)).norm() <= 1e-12);
    CHECK((s.inv_sqrt - 0.5 * Matrix::Identity(2, 2)).norm() <= 1e-12);
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    d(1, 1) = 9.0;
    const auto t = sqrt_and_inv_sqrt(d);
    CHECK(t.sqrt(0, 0) == doctest::Approx(1.0));
    CHECK(t.sqrt(1, 1) == doctest::Approx(3.0));
    CHECK(std::abs(t.sqrt(0, 1)) <= 1e-12);
  }

  TEST_CASE("sqrt_and_inv_sqrt of Y^T D Y for a sampled graph") {
    const RepGraphInstance inst = build_d_regular_rep_graph(60, 3, 9);
    const RppParams params{inst.assignment, inst.graph, 0.4, 0.3, 0.2, 0.1};
    const BinarySymmetricGraph g = sample_rpp(params, 11);
    const Matrix y = null_space_basis(right_center(inst.graph.adjacency()));
    const Vector deg = g.adjacency().rowwise().sum();
    Matrix ydy = y.transpose() * deg.asDiagonal() * y;
    ydy = (ydy + ydy.transpose()) * 0.5;
    const auto s = sqrt_and_inv_sqrt(ydy);
    CHECK((s.sqrt * s.sqrt - ydy).norm() <= 1e-7 * (1 + ydy.norm()));
    CHECK((s.sqrt * s.inv_sqrt - Matrix::Identity(ydy.rows(), ydy.cols())).norm() <= 1e-7);
  }

  TEST_CASE("sqrt_and_inv_sqrt rejects singular input") {
    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 1.0;
    CHECK(code_of([&] { sqrt_and_inv_sqrt(d); }) == ErrorCode::NotPositiveDefinite);
    CHECK(code_of([] { sqrt_and_inv_sqrt(Matrix(-Matrix::Identity(2, 2))); }) == ErrorCode::NotPositiveDefinite);
  }

  TEST_CASE("low_rank_approx examples") {
    const Matrix m = test::random_symmetric(6, 5);
    CHECK((low_rank_approx(m, 6) - m).norm() <= 1e-8);

    Matrix d = Matrix::Zero(2, 2);
    d(0, 0) = 2.0;
    d(1, 1) = 1.0;
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = 2.0;
    CHECK((low_rank_approx(d, 1) - expect).norm() <= 1e-12);

    Matrix blocks = Matrix::Zero(6, 6);
    for (int b = 0; b < 3; ++b) blocks.block(2 * b, 2 * b, 2, 2).setOnes();
    CHECK((low_rank_approx(blocks, 2) - blocks).norm() == doctest::Approx(2.0));
  }

  TEST_CASE("low_rank_approx keeps the largest magnitudes, is idempotent and rejects big ranks") {
    Matrix d = Matrix::Zero(3, 3);
    d(0, 0) = 1.0;
    d(1, 1) = -5.0;
    d(2, 2) = 2.0;
    const Matrix a = low_rank_approx(d, 1);
    CHECK(a(1, 1) == doctest::Approx(-5.0));
    CHECK(std::abs(a(0, 0)) + std::abs(a(2, 2)) <= 1e-12);

    const Matrix m = test::random_symmetric(8, 9);
    const Matrix once = low_rank_approx(m, 3);
    CHECK((low_rank_approx(once, 3) - once).norm() <= 1e-10);
    CHECK((once - once.transpose()).norm() == 0.0);
    CHECK(code_of([&] { low_rank_approx(m, 9); }) == ErrorCode::RankTooLarge);
  }

  TEST_CASE("right_center equals R (I - 11^T/N)") {
    const Matrix r = test::random_binary_graph(9, 0.4, 2, true);
    const Matrix centre = Matrix::Identity(9, 9) - Matrix::Constant(9, 9, 1.0 / 9.0);
    CHECK((right_center(r) - r * centre).norm() <= 1e-12);
  }
}
