#include "rbki/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace rbki {

RngSeed derive_seed(RngSeed base, std::uint64_t tag) {
  std::uint64_t z = base.value ^ tag;
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return RngSeed{z ^ (z >> 31)};
}

namespace {

// Normal deviates via Box-Muller over mt19937_64, so streams do not depend
// on the standard library's distribution internals.
class NormalStream {
public:
  explicit NormalStream(RngSeed seed) : eng_(seed.value) {}

  double next() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(eng_() >> 11) * 0x1.0p-53;          // [0,1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Unbiased integer in [0, n) by rejection.
  std::uint64_t bounded(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      const std::uint64_t x = eng_();
      if (x >= threshold) return x % n;
    }
  }

private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

void normalize_column_signs(Matrix& u) {
  for (Index j = 0; j < u.cols(); ++j) {
    Index best = 0;
    double mag = -1.0;
    for (Index i = 0; i < u.rows(); ++i) {
      const double m = std::abs(u(i, j));
      if (m > mag) {
        mag = m;
        best = i;
      }
    }
    if (u(best, j) < 0.0) u.col(j) = -u.col(j);
  }
}

}  // namespace

Matrix economical_qr(const Matrix& m) { return economical_qr(m, 1e-12 * m.norm()); }

Matrix economical_qr(const Matrix& m, double abs_tol) {
  if (m.rows() < 1) throw std::invalid_argument("economical_qr: matrix must have rows >= 1");
  if (m.cols() == 0 || m.norm() == 0.0) return Matrix(m.rows(), 0);

  Eigen::ColPivHouseholderQR<Matrix> qr(m);
  const Vector diag = qr.matrixQR().diagonal().cwiseAbs();
  const Index kmax = std::min(m.rows(), m.cols());
  Index rank = 0;
  while (rank < kmax && diag(rank) > abs_tol) ++rank;
  if (rank == 0) return Matrix(m.rows(), 0);
  return qr.householderQ() * Matrix::Identity(m.rows(), rank);
}

EigenPairs sym_eig(const Matrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("sym_eig: matrix must be square");
  const double scale = a.norm();
  if (scale > 0.0 && (a - a.transpose()).norm() > 1e-8 * scale)
    throw std::invalid_argument("sym_eig: matrix is not symmetric");

  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym);
  if (es.info() != Eigen::Success) throw std::runtime_error("sym_eig: eigensolver failed");

  const Index n = a.rows();
  EigenPairs out;
  out.values = es.eigenvalues().reverse();
  out.vectors = es.eigenvectors().rowwise().reverse();
  normalize_column_signs(out.vectors);
  return out;
}

Matrix truncated_left_singular(const Matrix& m, Index k) {
  const Index kmax = std::min(m.rows(), m.cols());
  if (k < 1 || k > kmax)
    throw std::out_of_range("truncated_left_singular: k = " + std::to_string(k) +
                            " out of range 1.." + std::to_string(kmax));
  Matrix gram = Matrix::Zero(m.rows(), m.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(m);
  gram = gram.selfadjointView<Eigen::Lower>();
  EigenPairs ep = sym_eig(gram);
  Matrix u = ep.vectors.leftCols(k);
  normalize_column_signs(u);
  return u;
}

Vector singular_values(const Matrix& m) {
  const Matrix s = m.rows() <= m.cols() ? m : Matrix(m.transpose());
  Matrix gram = Matrix::Zero(s.rows(), s.rows());
  gram.selfadjointView<Eigen::Lower>().rankUpdate(s);
  gram = gram.selfadjointView<Eigen::Lower>();
  EigenPairs ep = sym_eig(gram);
  return ep.values.cwiseMax(0.0).cwiseSqrt();
}

Matrix gaussian_matrix(Index rows, Index cols, RngSeed seed) {
  if (rows < 1 || cols < 1)
    throw std::invalid_argument("gaussian_matrix: dimensions must be >= 1");
  NormalStream stream(seed);
  Matrix m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = stream.next();
  return m;
}

Vector gaussian_vector(Index n, RngSeed seed) {
  if (n < 1) throw std::invalid_argument("gaussian_vector: length must be >= 1");
  NormalStream stream(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = stream.next();
  return v;
}

Matrix sample_columns(const Matrix& m, double omega, RngSeed seed) {
  if (!(omega > 0.0) || omega > 1.0)
    throw std::invalid_argument("sample_columns: omega must be in (0, 1]");
  if (omega == 1.0) return m;

  const Index cols = m.cols();
  const Index keep = std::min<Index>(
      cols, static_cast<Index>(std::ceil(omega * static_cast<double>(cols))));
  std::vector<Index> idx(static_cast<std::size_t>(cols));
  std::iota(idx.begin(), idx.end(), Index{0});

  NormalStream stream(seed);
  for (Index i = 0; i < keep; ++i) {
    const Index j = i + static_cast<Index>(stream.bounded(static_cast<std::uint64_t>(cols - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  std::sort(idx.begin(), idx.begin() + keep);

  Matrix out(m.rows(), keep);
  for (Index j = 0; j < keep; ++j) out.col(j) = m.col(idx[static_cast<std::size_t>(j)]);
  return out;
}

}  // namespace rbki
