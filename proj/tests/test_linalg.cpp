#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rbki/linalg.hpp"

#include <algorithm>
#include <cmath>

using namespace rbki;

namespace {

double orthonormality_defect(const Matrix& q) {
  return (q.transpose() * q - Matrix::Identity(q.cols(), q.cols())).norm();
}

// Power iteration with Hotelling deflation on the Gram matrix; independent
// route to the leading singular values.
Vector power_method_singular_values(const Matrix& m, Index count) {
  Matrix g = m * m.transpose();
  Vector out(count);
  for (Index k = 0; k < count; ++k) {
    Vector v = gaussian_vector(g.rows(), RngSeed{900 + static_cast<std::uint64_t>(k)});
    v.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 2000; ++it) {
      Vector w = g * v;
      const double nw = w.norm();
      if (nw == 0.0) break;
      w /= nw;
      const double next = w.dot(g * w);
      if (std::abs(next - lambda) <= 1e-13 * std::max(1.0, std::abs(next)) && it > 5) {
        v = w;
        lambda = next;
        break;
      }
      v = w;
      lambda = next;
    }
    out(k) = std::sqrt(std::max(0.0, lambda));
    g -= lambda * v * v.transpose();  // deflate
  }
  return out;
}

}  // namespace

TEST_CASE("economical_qr spans an already-orthonormal input") {
  const Matrix q0 = economical_qr(gaussian_matrix(20, 6, RngSeed{1}));
  REQUIRE(q0.cols() == 6);
  const Matrix q = economical_qr(q0);
  REQUIRE(q.cols() == 6);
  CHECK((q0 - q * (q.transpose() * q0)).norm() <= 1e-10);
}

TEST_CASE("economical_qr detects duplicate columns") {
  Matrix m = Matrix::Zero(5, 2);
  m(0, 0) = 1.0;
  m(0, 1) = 1.0;
  const Matrix q = economical_qr(m);
  CHECK(q.cols() == 1);
}

TEST_CASE("economical_qr on a random tall matrix") {
  const Matrix m = gaussian_matrix(50, 8, RngSeed{2});
  const Matrix q = economical_qr(m);
  REQUIRE(q.cols() == 8);
  CHECK(orthonormality_defect(q) <= 1e-10);
  CHECK((m - q * (q.transpose() * m)).norm() <= 1e-10 * m.norm());
}

TEST_CASE("economical_qr of a zero matrix has zero columns") {
  const Matrix q = economical_qr(Matrix::Zero(4, 3));
  CHECK(q.rows() == 4);
  CHECK(q.cols() == 0);
}

TEST_CASE("qr projector is idempotent") {
  const Matrix m = gaussian_matrix(30, 5, RngSeed{3});
  const Matrix q = economical_qr(m);
  const Matrix p = q * q.transpose();
  CHECK((p * p - p).norm() <= 1e-10);
}

TEST_CASE("sym_eig of a diagonal matrix sorts the diagonal") {
  Matrix d = Matrix::Zero(4, 4);
  d.diagonal() << 3.0, -1.0, 7.0, 0.5;
  const EigenPairs ep = sym_eig(d);
  CHECK(ep.values(0) == doctest::Approx(7.0));
  CHECK(ep.values(1) == doctest::Approx(3.0));
  CHECK(ep.values(2) == doctest::Approx(0.5));
  CHECK(ep.values(3) == doctest::Approx(-1.0));
  // vectors are a signed permutation of the identity
  for (Index j = 0; j < 4; ++j) {
    Index nonzero = 0;
    for (Index i = 0; i < 4; ++i)
      if (std::abs(ep.vectors(i, j)) > 1e-12) ++nonzero;
    CHECK(nonzero == 1);
  }
}

TEST_CASE("sym_eig of identity") {
  const EigenPairs ep = sym_eig(Matrix::Identity(5, 5));
  for (Index i = 0; i < 5; ++i) CHECK(ep.values(i) == doctest::Approx(1.0));
}

TEST_CASE("sym_eig reconstructs a random symmetric matrix") {
  Matrix a = gaussian_matrix(12, 12, RngSeed{4});
  a = Matrix(0.5 * (a + a.transpose()));
  const EigenPairs ep = sym_eig(a);
  const Matrix back = ep.vectors * ep.values.asDiagonal() * ep.vectors.transpose();
  CHECK((a - back).norm() <= 1e-9 * a.norm());
  CHECK(orthonormality_defect(ep.vectors) <= 1e-10);
  for (Index i = 1; i < ep.values.size(); ++i) CHECK(ep.values(i - 1) >= ep.values(i));
}

TEST_CASE("sym_eig preserves the trace") {
  Matrix a = gaussian_matrix(9, 9, RngSeed{5});
  a = Matrix(0.5 * (a + a.transpose()));
  const EigenPairs ep = sym_eig(a);
  CHECK(ep.values.sum() == doctest::Approx(a.trace()).epsilon(1e-9));
}

TEST_CASE("sym_eig rejects non-square and non-symmetric input") {
  CHECK_THROWS_AS((void)sym_eig(Matrix::Zero(2, 3)), std::invalid_argument);
  Matrix a = Matrix::Zero(3, 3);
  a(0, 1) = 1.0;  // strictly asymmetric
  CHECK_THROWS_AS((void)sym_eig(a), std::invalid_argument);
}

TEST_CASE("truncated_left_singular of a rank-1 matrix") {
  const Vector u = gaussian_vector(6, RngSeed{6});
  const Vector v = gaussian_vector(9, RngSeed{7});
  const Matrix m = u * v.transpose();
  const Matrix u1 = truncated_left_singular(m, 1);
  REQUIRE(u1.cols() == 1);
  const Vector unit = u / u.norm();
  CHECK(std::abs(std::abs(u1.col(0).dot(unit)) - 1.0) <= 1e-10);
  // sign convention: largest-magnitude entry positive
  Index imax;
  u1.col(0).cwiseAbs().maxCoeff(&imax);
  CHECK(u1(imax, 0) > 0.0);
}

TEST_CASE("truncated_left_singular with full rank gives a full projector") {
  const Matrix q = economical_qr(gaussian_matrix(5, 5, RngSeed{8}));
  const Matrix u = truncated_left_singular(q, 5);
  CHECK((u * u.transpose() - Matrix::Identity(5, 5)).norm() <= 1e-9);
}

TEST_CASE("truncated_left_singular residual matches the tail spectrum") {
  const Matrix m = gaussian_matrix(20, 30, RngSeed{9});
  const Index k = 5;
  const Matrix uk = truncated_left_singular(m, k);
  const double res = (m - uk * (uk.transpose() * m)).squaredNorm();
  // independent tail from the full Gram spectrum
  Matrix gram = m * m.transpose();
  const EigenPairs ep = sym_eig(gram);
  double tail = 0.0;
  for (Index i = k; i < ep.values.size(); ++i) tail += std::max(0.0, ep.values(i));
  CHECK(res == doctest::Approx(tail).epsilon(1e-8));
}

TEST_CASE("truncated_left_singular rejects out-of-range k") {
  const Matrix m = gaussian_matrix(4, 6, RngSeed{10});
  CHECK_THROWS_AS((void)truncated_left_singular(m, 0), std::out_of_range);
  CHECK_THROWS_AS((void)truncated_left_singular(m, 5), std::out_of_range);
}

TEST_CASE("gram-route singular values match the power-method oracle") {
  const Matrix m = gaussian_matrix(8, 8, RngSeed{11});
  const Vector sv = singular_values(m);
  const Vector oracle = power_method_singular_values(m, 4);
  for (Index i = 0; i < 4; ++i)
    CHECK(sv(i) == doctest::Approx(oracle(i)).epsilon(1e-6));
}

TEST_CASE("eckart-young: truncation beats random projections") {
  const Matrix m = gaussian_matrix(15, 25, RngSeed{12});
  const Index k = 4;
  const Matrix uk = truncated_left_singular(m, k);
  const double best = (m - uk * (uk.transpose() * m)).norm();
  for (int trial = 0; trial < 100; ++trial) {
    const Matrix p =
        economical_qr(gaussian_matrix(15, k, RngSeed{1000 + static_cast<std::uint64_t>(trial)}));
    const double res = (m - p * (p.transpose() * m)).norm();
    CHECK(best <= res + 1e-8);
  }
}

TEST_CASE("gaussian_matrix is deterministic and seed-sensitive") {
  const Matrix a = gaussian_matrix(7, 5, RngSeed{13});
  const Matrix b = gaussian_matrix(7, 5, RngSeed{13});
  CHECK((a - b).norm() == 0.0);
  const Matrix c = gaussian_matrix(7, 5, RngSeed{14});
  CHECK((a - c).norm() > 0.0);
}

TEST_CASE("gaussian_matrix sample statistics") {
  const Matrix m = gaussian_matrix(1000, 100, RngSeed{15});
  const double mean = m.mean();
  const double var = (m.array() - mean).square().sum() / (m.size() - 1.0);
  CHECK(std::abs(mean) <= 0.02);
  CHECK(std::abs(var - 1.0) <= 0.05);
}

TEST_CASE("sample_columns basics") {
  const Matrix m = gaussian_matrix(4, 10, RngSeed{16});
  const Matrix all = sample_columns(m, 1.0, RngSeed{17});
  CHECK((all - m).norm() == 0.0);

  const Matrix half = sample_columns(m, 0.5, RngSeed{17});
  REQUIRE(half.cols() == 5);
  // every sampled column is one of m's columns, in increasing original order
  Index last = -1;
  for (Index j = 0; j < half.cols(); ++j) {
    Index found = -1;
    for (Index c = last + 1; c < m.cols(); ++c) {
      if ((half.col(j) - m.col(c)).norm() == 0.0) {
        found = c;
        break;
      }
    }
    REQUIRE(found >= 0);
    CHECK(found > last);
    last = found;
  }

  const Matrix again = sample_columns(m, 0.5, RngSeed{17});
  CHECK((half - again).norm() == 0.0);
}

TEST_CASE("sample_columns rejects bad rates") {
  const Matrix m = gaussian_matrix(3, 4, RngSeed{18});
  CHECK_THROWS_AS((void)sample_columns(m, 0.0, RngSeed{0}), std::invalid_argument);
  CHECK_THROWS_AS((void)sample_columns(m, 1.5, RngSeed{0}), std::invalid_argument);
}

TEST_CASE("derive_seed and mode_seed are stable") {
  CHECK(derive_seed(RngSeed{1}, 2).value == derive_seed(RngSeed{1}, 2).value);
  CHECK(derive_seed(RngSeed{1}, 2).value != derive_seed(RngSeed{1}, 3).value);
  CHECK(mode_seed(RngSeed{8}, 3).value == (8ULL ^ 3ULL));
}
