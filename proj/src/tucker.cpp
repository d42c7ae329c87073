#include "rbki/tucker.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rbki {

namespace {

void validate_rank(const DenseTensor& x, const MultilinearRank& rank) {
  if (static_cast<Index>(rank.ranks.size()) != x.order())
    throw std::invalid_argument("tucker: rank list must have one entry per mode");
  for (Index n = 1; n <= x.order(); ++n) {
    const Index r = rank.ranks[static_cast<std::size_t>(n - 1)];
    if (r < 1 || r > x.dim(n))
      throw std::invalid_argument("tucker: rank R_" + std::to_string(n) + " = " +
                                  std::to_string(r) + " out of range 1.." +
                                  std::to_string(x.dim(n)));
  }
}

Index other_dims_product(const DenseTensor& x, Index mode) {
  Index p = 1;
  for (Index n = 1; n <= x.order(); ++n)
    if (n != mode) p *= x.dim(n);
  return p;
}

DenseTensor core_from_factors(const DenseTensor& x, const std::vector<Matrix>& factors) {
  DenseTensor acc = x;
  for (Index n = 1; n <= x.order(); ++n) {
    const Matrix ut = factors[static_cast<std::size_t>(n - 1)].transpose();
    acc = mode_product(acc, ut, n);
  }
  return acc;
}

}  // namespace

std::vector<Index> default_sketch_sizes(const std::vector<Index>& dims,
                                        const std::vector<Index>& ranks, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("default_sketch_sizes: gamma must be > 0");
  if (dims.size() != ranks.size())
    throw std::invalid_argument("default_sketch_sizes: dims/ranks size mismatch");
  const Index overlap = static_cast<Index>(std::ceil(1.0 / gamma));
  std::vector<Index> sizes(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  for (std::size_t n = 0; n < dims.size(); ++n) {
    const Index cap = std::min(dims[n], total / dims[n]);
    sizes[n] = std::min(ranks[n] + overlap, cap);
    sizes[n] = std::max(sizes[n], ranks[n]);  // never below the target rank
  }
  return sizes;
}

TuckerFactors randomized_hosvd(const DenseTensor& x, const std::vector<Index>& sketch_sizes,
                               const MultilinearRank& rank, SketchMethod method, int q,
                               double omega, RngSeed seed) {
  validate_rank(x, rank);
  if (static_cast<Index>(sketch_sizes.size()) != x.order())
    throw std::invalid_argument("tucker: sketch size list must have one entry per mode");

  const Index order = x.order();
  std::vector<Matrix> factors(static_cast<std::size_t>(order));
  for (Index n = 1; n <= order; ++n) {
    const Index in = x.dim(n);
    const Index rn = rank.ranks[static_cast<std::size_t>(n - 1)];
    if (rn == in) {
      // full-rank mode, nothing to estimate
      factors[static_cast<std::size_t>(n - 1)] = Matrix::Identity(in, in);
      continue;
    }
    const Index sn = sketch_sizes[static_cast<std::size_t>(n - 1)];
    const Index cap = std::min(in, other_dims_product(x, n));
    if (sn < rn || sn > cap)
      throw std::invalid_argument("tucker: sketch size S_" + std::to_string(n) + " = " +
                                  std::to_string(sn) + " must satisfy " + std::to_string(rn) +
                                  " <= S <= " + std::to_string(cap));

    const Matrix x_unf = unfold(x, n);
    SketchConfig cfg{sn, q, omega, mode_seed(seed, n)};
    Matrix basis;
    switch (method) {
      case SketchMethod::RBKI: basis = rbki_basis(x_unf, cfg); break;
      case SketchMethod::RRF: basis = rrf_basis(x_unf, cfg); break;
      case SketchMethod::PowerIteration: basis = power_iter_basis(x_unf, cfg); break;
    }
    if (basis.cols() < rn)
      throw std::runtime_error("tucker: sketch basis for mode " + std::to_string(n) +
                               " has rank " + std::to_string(basis.cols()) +
                               " below the target rank " + std::to_string(rn));

    // Z = Q' (X X') Q, formed as B B' with B = Q' X to avoid the full Gram.
    const Matrix b = basis.transpose() * x_unf;
    Matrix z = Matrix::Zero(b.rows(), b.rows());
    z.selfadjointView<Eigen::Lower>().rankUpdate(b);
    z = z.selfadjointView<Eigen::Lower>();
    const EigenPairs ep = sym_eig(z);
    factors[static_cast<std::size_t>(n - 1)] = basis * ep.vectors.leftCols(rn);
  }

  TuckerFactors tf;
  tf.factors = std::move(factors);
  tf.core = core_from_factors(x, tf.factors);
  return tf;
}

TuckerFactors rbki_tucker(const DenseTensor& x, const std::vector<Index>& sketch_sizes,
                          const MultilinearRank& rank, int q, double omega, RngSeed seed) {
  return randomized_hosvd(x, sketch_sizes, rank, SketchMethod::RBKI, q, omega, seed);
}

TuckerFactors truncated_hosvd(const DenseTensor& x, const MultilinearRank& rank) {
  validate_rank(x, rank);
  TuckerFactors tf;
  tf.factors.resize(static_cast<std::size_t>(x.order()));
  for (Index n = 1; n <= x.order(); ++n) {
    const Index rn = rank.ranks[static_cast<std::size_t>(n - 1)];
    tf.factors[static_cast<std::size_t>(n - 1)] = truncated_left_singular(unfold(x, n), rn);
  }
  tf.core = core_from_factors(x, tf.factors);
  return tf;
}

DenseTensor tucker_reconstruct(const TuckerFactors& tf) {
  return multi_mode_product(tf.core, tf.factors);
}

SketchErrorBounds sketch_error_bounds_check(const DenseTensor& x, const TuckerFactors& sketch,
                                            const MultilinearRank& rank) {
  validate_rank(x, rank);
  if (static_cast<Index>(sketch.factors.size()) != x.order())
    throw std::invalid_argument("sketch_error_bounds_check: factor count mismatch");

  SketchErrorBounds out;
  const DenseTensor x_tilde = tucker_reconstruct(sketch);
  out.alpha = (x.vec() - x_tilde.vec()).norm();

  const DenseTensor x_opt = tucker_reconstruct(truncated_hosvd(x, rank));
  out.beta = (x.vec() - x_opt.vec()).norm();

  const DenseTensor x_tilde_k = tucker_reconstruct(truncated_hosvd(x_tilde, rank));
  out.achieved = (x.vec() - x_tilde_k.vec()).norm();

  out.sandwich_holds = (out.beta - 1e-9 <= out.achieved) &&
                       (out.achieved <= 2.0 * out.alpha + out.beta + 1e-9);

  out.mode_residual_sq_sum = 0.0;
  for (Index n = 1; n <= x.order(); ++n) {
    const Matrix& qn = sketch.factors[static_cast<std::size_t>(n - 1)];
    const Matrix x_unf = unfold(x, n);
    const double res = (x_unf - qn * (qn.transpose() * x_unf)).norm();
    out.mode_residual_sq_sum += res * res;
  }
  const double scale = std::max(1.0, out.mode_residual_sq_sum);
  out.pythagorean_holds = out.alpha * out.alpha <= out.mode_residual_sq_sum + 1e-9 * scale;
  return out;
}

}  // namespace rbki
