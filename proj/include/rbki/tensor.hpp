#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace rbki {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;  // column-major, the only matrix type used here
using Vector = Eigen::VectorXd;

/// Dense N-way tensor over doubles.
///
/// Entries are stored flat in canonical order: the first index varies
/// fastest, i.e. entry (i_1,...,i_N) sits at offset
///   i_1 + I_1*(i_2 + I_2*(i_3 + ...))          (0-based indices).
/// Modes are numbered 1..N throughout the public API; element indices are
/// 0-based.
class DenseTensor {
public:
  DenseTensor() = default;

  /// Zero-filled tensor of the given shape. Every dimension must be >= 1.
  explicit DenseTensor(std::vector<Index> shape);

  /// Wraps an existing flat buffer; data.size() must equal the shape product.
  DenseTensor(std::vector<Index> shape, Vector data);

  Index order() const { return static_cast<Index>(shape_.size()); }
  const std::vector<Index>& shape() const { return shape_; }
  /// Size of the given mode (1-based).
  Index dim(Index mode) const;
  Index numel() const { return data_.size(); }

  Vector& vec() { return data_; }
  const Vector& vec() const { return data_; }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  /// Element access by 0-based multi-index; bounds-checked.
  double at(std::span<const Index> idx) const;
  double& at(std::span<const Index> idx);
  double at(std::initializer_list<Index> idx) const;
  double& at(std::initializer_list<Index> idx);

private:
  std::vector<Index> shape_;
  Vector data_;
};

/// Product of all dimensions; throws on overflow or empty/invalid shape.
Index shape_numel(std::span<const Index> shape);

/// Mode-n matricization. The result has I_n rows and prod_{p != n} I_p
/// columns; tensor entry (i_1,...,i_N) maps to row i_n and column
///   sum_{k != n} i_k * J_k,   J_k = prod_{m < k, m != n} I_m
/// (0-based form of the usual unfolding index rule). Mode is 1-based.
Matrix unfold(const DenseTensor& x, Index mode);

/// Inverse of unfold: exact (bitwise) reconstruction of the tensor with the
/// given shape from its mode-n matricization.
DenseTensor fold(const Matrix& m, Index mode, std::span<const Index> shape);

/// Mode-n product x x_n u. Requires u.cols() == I_n; the result replaces
/// I_n by u.rows() and satisfies unfold(result, n) = u * unfold(x, n).
DenseTensor mode_product(const DenseTensor& x, const Matrix& u, Index mode);

/// Successive mode products g x_1 U[0] x_2 U[1] ... in ascending mode order.
/// Requires factors.size() == g.order() and factors[n].cols() == g.shape[n].
DenseTensor multi_mode_product(const DenseTensor& g,
                               const std::vector<Matrix>& factors);

double frobenius_norm(const DenseTensor& x);

/// Kronecker product, dims multiply. Intended for verification; algorithm
/// code works with mode products and never materializes this.
Matrix kronecker(const Matrix& a, const Matrix& b);

}  // namespace rbki
