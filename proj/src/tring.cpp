#include "rbki/tring.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rbki {

std::vector<Index> TRFactors::dims() const {
  std::vector<Index> d(cores.size());
  for (std::size_t n = 0; n < cores.size(); ++n) d[n] = cores[n].shape()[1];
  return d;
}

std::vector<Index> TRFactors::ranks() const {
  std::vector<Index> r(cores.size());
  for (std::size_t n = 0; n < cores.size(); ++n) r[n] = cores[n].shape()[2];
  return r;
}

void validate_ring(const TRFactors& f) {
  const Index n = f.order();
  if (n < 2) throw std::invalid_argument("tensor ring: need at least 2 cores");
  for (Index k = 0; k < n; ++k) {
    const auto& core = f.cores[static_cast<std::size_t>(k)];
    if (core.order() != 3)
      throw std::invalid_argument("tensor ring: core " + std::to_string(k + 1) +
                                  " must be third-order");
    const auto& next = f.cores[static_cast<std::size_t>((k + 1) % n)];
    if (core.shape()[2] != next.shape()[0])
      throw std::invalid_argument("tensor ring: rank mismatch between cores " +
                                  std::to_string(k + 1) + " and " +
                                  std::to_string((k + 1) % n + 1));
  }
}

Matrix tr_unfold(const DenseTensor& x, Index mode) {
  if (mode < 1 || mode > x.order())
    throw std::out_of_range("tr_unfold: mode " + std::to_string(mode) + " out of range");
  const Index order = x.order();
  const auto& shape = x.shape();
  const Index m0 = mode - 1;  // 0-based
  const Index rows = shape[static_cast<std::size_t>(m0)];
  const Index total = x.numel();
  Matrix m(rows, total / rows);

  // column stride of each non-target mode under the cyclic ordering
  std::vector<Index> cstride(static_cast<std::size_t>(order), 0);
  Index c = 1;
  for (Index t = 1; t < order; ++t) {
    const Index id = (m0 + t) % order;
    cstride[static_cast<std::size_t>(id)] = c;
    c *= shape[static_cast<std::size_t>(id)];
  }

  std::vector<Index> idx(static_cast<std::size_t>(order), 0);
  const double* src = x.data();
  Index row = 0, col = 0;
  for (Index f = 0; f < total; ++f) {
    m(row, col) = src[f];
    for (Index k = 0; k < order; ++k) {
      auto& ik = idx[static_cast<std::size_t>(k)];
      ++ik;
      if (k == m0)
        ++row;
      else
        col += cstride[static_cast<std::size_t>(k)];
      if (ik < shape[static_cast<std::size_t>(k)]) break;
      ik = 0;
      if (k == m0)
        row = 0;
      else
        col -= shape[static_cast<std::size_t>(k)] * cstride[static_cast<std::size_t>(k)];
    }
  }
  return m;
}

namespace {

// Merges the cores other than `mode` (cyclic order) into the canonical
// layout of a (R_n, prod I_p, R_{n-1}) tensor, returned as a matrix with
// R_n * prod I_p rows and R_{n-1} columns.
Matrix merge_subchain(const TRFactors& f, Index mode) {
  const Index order = f.order();
  const Index m0 = mode - 1;

  const auto& first = f.cores[static_cast<std::size_t>((m0 + 1) % order)];
  Matrix merged = Eigen::Map<const Matrix>(first.data(), first.shape()[0] * first.shape()[1],
                                           first.shape()[2]);
  for (Index t = 2; t < order; ++t) {
    const auto& core = f.cores[static_cast<std::size_t>((m0 + t) % order)];
    Eigen::Map<const Matrix> rhs(core.data(), core.shape()[0],
                                 core.shape()[1] * core.shape()[2]);
    const Matrix prod = merged * rhs;  // rows keep (r_n, i...), cols become (i_new, r_new)
    // flat buffer already matches the grown row index, reinterpret in place
    merged = Eigen::Map<const Matrix>(prod.data(), prod.rows() * core.shape()[1],
                                      core.shape()[2]);
  }
  return merged;
}

}  // namespace

Matrix subchain_unfolding(const TRFactors& f, Index mode) {
  validate_ring(f);
  if (mode < 1 || mode > f.order())
    throw std::out_of_range("subchain_unfolding: mode out of range");
  const Index m0 = mode - 1;
  const Index rn = f.cores[static_cast<std::size_t>(m0)].shape()[2];        // R_n
  const Index rprev = f.cores[static_cast<std::size_t>(m0)].shape()[0];     // R_{n-1}
  const Matrix merged = merge_subchain(f, mode);                            // (R_n * J) x R_{n-1}
  const Index j_total = merged.rows() / rn;

  Matrix s(j_total, rprev * rn);
  for (Index r1 = 0; r1 < rprev; ++r1)
    for (Index r2 = 0; r2 < rn; ++r2) {
      double* col = s.data() + j_total * (r1 + rprev * r2);
      const double* src = merged.data() + merged.rows() * r1 + r2;
      for (Index j = 0; j < j_total; ++j) col[j] = src[rn * j];
    }
  return s;
}

DenseTensor tr_reconstruct(const TRFactors& f) {
  validate_ring(f);
  // Circular unfolding at mode 1 coincides with the canonical mode-1
  // matricization, so one subchain product recovers the whole tensor.
  const Matrix c1 = unfold(f.cores[0], 2);
  const Matrix s1 = subchain_unfolding(f, 1);
  const Matrix x1 = c1 * s1.transpose();
  const std::vector<Index> dims = f.dims();
  return fold(x1, 1, dims);
}

TrAlsResult tr_als(const DenseTensor& x, const TRRank& rank, int max_iter, double tol,
                   RngSeed seed) {
  const Index order = x.order();
  if (order < 2) throw std::invalid_argument("tr_als: tensor must have order >= 2");
  if (static_cast<Index>(rank.ranks.size()) != order)
    throw std::invalid_argument("tr_als: rank list must have one entry per mode");
  for (Index r : rank.ranks)
    if (r < 1) throw std::invalid_argument("tr_als: ranks must be positive");
  if (max_iter < 1) throw std::invalid_argument("tr_als: max_iter must be >= 1");

  TrAlsResult result;
  const auto& shape = x.shape();

  // random initial cores, one continuous stream in core order
  Index init_len = 0;
  for (Index n = 0; n < order; ++n) {
    const Index rprev = rank.ranks[static_cast<std::size_t>((n + order - 1) % order)];
    const Index rn = rank.ranks[static_cast<std::size_t>(n)];
    init_len += rprev * shape[static_cast<std::size_t>(n)] * rn;
  }
  const Vector init = gaussian_vector(init_len, seed);
  result.factors.cores.resize(static_cast<std::size_t>(order));
  Index offset = 0;
  for (Index n = 0; n < order; ++n) {
    const Index rprev = rank.ranks[static_cast<std::size_t>((n + order - 1) % order)];
    const Index rn = rank.ranks[static_cast<std::size_t>(n)];
    const Index len = rprev * shape[static_cast<std::size_t>(n)] * rn;
    result.factors.cores[static_cast<std::size_t>(n)] =
        DenseTensor(std::vector<Index>{rprev, shape[static_cast<std::size_t>(n)], rn},
                    init.segment(offset, len));
    offset += len;
  }

  std::vector<Matrix> unfoldings(static_cast<std::size_t>(order));
  for (Index n = 1; n <= order; ++n)
    unfoldings[static_cast<std::size_t>(n - 1)] = tr_unfold(x, n);

  const double x_norm = x.vec().norm();
  if (x_norm == 0.0) throw std::invalid_argument("tr_als: input tensor is zero");

  double prev_fit = 0.0;
  bool have_prev = false;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    double fit = 0.0;
    for (Index n = 1; n <= order; ++n) {
      auto& core = result.factors.cores[static_cast<std::size_t>(n - 1)];
      const Index rprev = core.shape()[0];
      const Index rn = core.shape()[2];
      const Matrix s = subchain_unfolding(result.factors, n);
      if (s.cols() > s.rows()) result.underdetermined = true;

      Eigen::CompleteOrthogonalDecomposition<Matrix> cod;
      cod.setThreshold(1e-10);
      cod.compute(s);
      const Matrix gt = cod.solve(unfoldings[static_cast<std::size_t>(n - 1)].transpose());
      core = fold(gt.transpose(), 2,
                  std::vector<Index>{rprev, shape[static_cast<std::size_t>(n - 1)], rn});
      if (n == order) {
        const double err =
            (unfoldings[static_cast<std::size_t>(n - 1)] - gt.transpose() * s.transpose())
                .norm();
        fit = (1.0 - err / x_norm) * 100.0;
      }
    }
    result.fit_trace.push_back(fit);
    if (have_prev && std::abs(fit - prev_fit) <= tol) break;
    prev_fit = fit;
    have_prev = true;
  }
  return result;
}

RbkiTkTrResult rbki_tk_tr(const DenseTensor& x, const std::vector<Index>& compress_sizes,
                          const TRRank& rank, int q, double omega, RngSeed seed, int max_iter,
                          double tol) {
  if (static_cast<Index>(compress_sizes.size()) != x.order())
    throw std::invalid_argument("rbki_tk_tr: compress size list must have one entry per mode");

  RbkiTkTrResult result;
  MultilinearRank mr{compress_sizes};
  result.compression = rbki_tucker(x, compress_sizes, mr, q, omega, seed);

  TrAlsResult als = tr_als(result.compression.core, rank, max_iter, tol, seed);
  result.core_fit_trace = std::move(als.fit_trace);
  result.underdetermined = als.underdetermined;
  result.core_factors = als.factors;

  result.factors.cores.resize(static_cast<std::size_t>(x.order()));
  for (Index n = 1; n <= x.order(); ++n) {
    const auto& u = result.compression.factors[static_cast<std::size_t>(n - 1)];
    result.factors.cores[static_cast<std::size_t>(n - 1)] =
        mode_product(als.factors.cores[static_cast<std::size_t>(n - 1)], u, 2);
  }
  return result;
}

std::vector<Index> default_compress_sizes(const std::vector<Index>& dims,
                                          const std::vector<Index>& tr_ranks) {
  if (dims.size() != tr_ranks.size())
    throw std::invalid_argument("default_compress_sizes: dims/ranks size mismatch");
  Index total = 1;
  for (Index d : dims) total *= d;
  std::vector<Index> sizes(dims.size());
  for (std::size_t n = 0; n < dims.size(); ++n) {
    const Index cap = std::min(dims[n], total / dims[n]);
    sizes[n] = std::min(5 * tr_ranks[n], cap);
    sizes[n] = std::max<Index>(sizes[n], 1);
  }
  return sizes;
}

}  // namespace rbki
