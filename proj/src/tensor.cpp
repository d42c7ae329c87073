#include "rbki/tensor.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>

namespace rbki {

Index shape_numel(std::span<const Index> shape) {
  if (shape.empty()) throw std::invalid_argument("tensor shape must have order >= 1");
  Index n = 1;
  for (Index d : shape) {
    if (d < 1) throw std::invalid_argument("tensor dimensions must be >= 1");
    if (n > std::numeric_limits<Index>::max() / d)
      throw std::invalid_argument("tensor shape overflows index range");
    n *= d;
  }
  return n;
}

DenseTensor::DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
  data_ = Vector::Zero(shape_numel(shape_));
}

DenseTensor::DenseTensor(std::vector<Index> shape, Vector data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (data_.size() != shape_numel(shape_))
    throw std::invalid_argument("tensor data length does not match shape product");
}

Index DenseTensor::dim(Index mode) const {
  if (mode < 1 || mode > order())
    throw std::out_of_range("mode " + std::to_string(mode) + " out of range 1.." +
                            std::to_string(order()));
  return shape_[static_cast<std::size_t>(mode - 1)];
}

namespace {

Index flat_offset(const std::vector<Index>& shape, std::span<const Index> idx) {
  if (idx.size() != shape.size())
    throw std::out_of_range("multi-index order does not match tensor order");
  Index off = 0;
  Index stride = 1;
  for (std::size_t k = 0; k < shape.size(); ++k) {
    if (idx[k] < 0 || idx[k] >= shape[k]) throw std::out_of_range("tensor index out of bounds");
    off += idx[k] * stride;
    stride *= shape[k];
  }
  return off;
}

}  // namespace

double DenseTensor::at(std::span<const Index> idx) const {
  return data_[flat_offset(shape_, idx)];
}
double& DenseTensor::at(std::span<const Index> idx) {
  return data_[flat_offset(shape_, idx)];
}
double DenseTensor::at(std::initializer_list<Index> idx) const {
  return at(std::span<const Index>(idx.begin(), idx.size()));
}
double& DenseTensor::at(std::initializer_list<Index> idx) {
  return at(std::span<const Index>(idx.begin(), idx.size()));
}

namespace {

// leading = prod of dims before `mode`, trailing = prod after. The flat
// offset of (l, i, t) in this split is l + leading*(i + I_n*t) and the
// unfolding column is l + leading*t.
void mode_split(const std::vector<Index>& shape, Index mode, Index& leading, Index& in,
                Index& trailing) {
  leading = 1;
  trailing = 1;
  const auto m = static_cast<std::size_t>(mode - 1);
  for (std::size_t k = 0; k < m; ++k) leading *= shape[k];
  in = shape[m];
  for (std::size_t k = m + 1; k < shape.size(); ++k) trailing *= shape[k];
}

}  // namespace

Matrix unfold(const DenseTensor& x, Index mode) {
  if (mode < 1 || mode > x.order())
    throw std::out_of_range("unfold: mode " + std::to_string(mode) + " out of range");
  Index leading, in, trailing;
  mode_split(x.shape(), mode, leading, in, trailing);

  Matrix m(in, leading * trailing);
  const double* src = x.data();
  if (leading == 1) {
    // mode 1: the canonical layout is already the matricization
    std::memcpy(m.data(), src, sizeof(double) * static_cast<std::size_t>(x.numel()));
    return m;
  }
  for (Index t = 0; t < trailing; ++t) {
    const double* block = src + leading * in * t;
    for (Index l = 0; l < leading; ++l) {
      double* col = m.data() + in * (l + leading * t);
      const double* s = block + l;
      for (Index i = 0; i < in; ++i) col[i] = s[leading * i];
    }
  }
  return m;
}

DenseTensor fold(const Matrix& m, Index mode, std::span<const Index> shape) {
  std::vector<Index> sh(shape.begin(), shape.end());
  const Index total = shape_numel(sh);
  if (mode < 1 || mode > static_cast<Index>(sh.size()))
    throw std::out_of_range("fold: mode " + std::to_string(mode) + " out of range");
  Index leading, in, trailing;
  mode_split(sh, mode, leading, in, trailing);
  if (m.rows() != in || m.cols() != leading * trailing)
    throw std::invalid_argument("fold: matrix dimensions inconsistent with target shape");

  Vector data(total);
  double* dst = data.data();
  if (leading == 1) {
    std::memcpy(dst, m.data(), sizeof(double) * static_cast<std::size_t>(total));
    return DenseTensor(std::move(sh), std::move(data));
  }
  for (Index t = 0; t < trailing; ++t) {
    double* block = dst + leading * in * t;
    for (Index l = 0; l < leading; ++l) {
      const double* col = m.data() + in * (l + leading * t);
      double* d = block + l;
      for (Index i = 0; i < in; ++i) d[leading * i] = col[i];
    }
  }
  return DenseTensor(std::move(sh), std::move(data));
}

DenseTensor mode_product(const DenseTensor& x, const Matrix& u, Index mode) {
  if (mode < 1 || mode > x.order())
    throw std::out_of_range("mode_product: mode " + std::to_string(mode) + " out of range");
  if (u.cols() != x.dim(mode))
    throw std::invalid_argument("mode_product: factor has " + std::to_string(u.cols()) +
                                " columns, mode " + std::to_string(mode) + " has size " +
                                std::to_string(x.dim(mode)));
  if (u.rows() < 1) throw std::invalid_argument("mode_product: factor must have rows >= 1");
  Matrix prod = u * unfold(x, mode);
  std::vector<Index> sh = x.shape();
  sh[static_cast<std::size_t>(mode - 1)] = u.rows();
  return fold(prod, mode, sh);
}

DenseTensor multi_mode_product(const DenseTensor& g, const std::vector<Matrix>& factors) {
  if (static_cast<Index>(factors.size()) != g.order())
    throw std::invalid_argument("multi_mode_product: expected one factor per mode");
  DenseTensor acc = g;
  for (Index n = 1; n <= g.order(); ++n)
    acc = mode_product(acc, factors[static_cast<std::size_t>(n - 1)], n);
  return acc;
}

double frobenius_norm(const DenseTensor& x) { return x.vec().norm(); }

Matrix kronecker(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i)
      c.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return c;
}

}  // namespace rbki
