#pragma once

#include "rbki/linalg.hpp"
#include "rbki/tensor.hpp"
#include "rbki/tucker.hpp"

#include <vector>

namespace rbki {

/// Cyclic chain of N third-order cores; core n has shape
/// (R_{n-1}, I_n, R_n) with R_0 = R_N, so an entry of the represented
/// tensor is the trace of the product of one slice per core.
struct TRFactors {
  std::vector<DenseTensor> cores;

  Index order() const { return static_cast<Index>(cores.size()); }
  std::vector<Index> dims() const;
  std::vector<Index> ranks() const;  // ranks[n-1] = R_n
};

struct TRRank {
  std::vector<Index> ranks;
};

/// Throws unless every adjacent pair of cores shares its ring rank.
void validate_ring(const TRFactors& f);

/// Circular mode-n unfolding: rows index i_n, columns run over the
/// remaining modes in cyclic order n+1, ..., N, 1, ..., n-1 with the first
/// of them varying fastest. This is the unfolding under which the tensor
/// ring model factorizes as X_<n> = C_(n,2) * subchain'.
Matrix tr_unfold(const DenseTensor& x, Index mode);

/// Merges all cores except core n (in cyclic order) into the subchain
/// matrix of shape prod_{p != n} I_p x (R_{n-1} * R_n), column pairing
/// (r_{n-1} fastest) matching the mode-2 matricization of core n.
Matrix subchain_unfolding(const TRFactors& f, Index mode);

/// Evaluates the ring: entry (i_1, ..., i_N) is the trace of the chained
/// slice product. Computed by merging cores with matrix products.
DenseTensor tr_reconstruct(const TRFactors& f);

struct TrAlsResult {
  TRFactors factors;
  std::vector<double> fit_trace;  // percent fit against the input, per sweep
  bool underdetermined = false;   // some LS system was wider than the data
};

/// Alternating least squares for the tensor ring model. Cores start from
/// i.i.d. standard normal entries drawn from `seed`; each sweep solves the
/// per-mode linear least-squares problem exactly (QR with pseudo-inverse
/// fallback on rank-deficient subchains), so the fit never decreases.
/// Stops after max_iter sweeps or when the fit changes by at most `tol`
/// percentage points.
TrAlsResult tr_als(const DenseTensor& x, const TRRank& rank, int max_iter, double tol,
                   RngSeed seed);

struct RbkiTkTrResult {
  TRFactors factors;           // ring cores over the original dimensions
  TuckerFactors compression;   // the prior orthonormal compression
  TRFactors core_factors;      // ring cores of the compressed core tensor
  std::vector<double> core_fit_trace;
  bool underdetermined = false;
};

/// Hierarchical decomposition: compress x with a block Krylov Tucker step
/// at the given compress sizes (factor n is I_n x S_n orthonormal), run
/// TR-ALS on the small core, then expand each ring core back through its
/// mode's compression factor (a mode-2 product on the third-order core).
RbkiTkTrResult rbki_tk_tr(const DenseTensor& x, const std::vector<Index>& compress_sizes,
                          const TRRank& rank, int q, double omega, RngSeed seed,
                          int max_iter = 20, double tol = 1e-3);

/// Default prior compress size min(5 R_n, I_n), capped at the feasible
/// sketch range of each mode.
std::vector<Index> default_compress_sizes(const std::vector<Index>& dims,
                                          const std::vector<Index>& tr_ranks);

}  // namespace rbki
