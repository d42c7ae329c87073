#pragma once

#include "rbki/tensor.hpp"

#include <cstdint>

namespace rbki {

/// Seed for the deterministic random streams used across the library.
/// Same seed + same call sequence gives bit-identical results.
struct RngSeed {
  std::uint64_t value = 0;
};

/// splitmix64 mix of a seed with a tag; used to derive decorrelated
/// sub-streams (data vs. noise vs. probe matrices) from one base seed.
RngSeed derive_seed(RngSeed base, std::uint64_t tag);

/// Per-mode sketch seeds are the base seed XOR the 1-based mode index.
inline RngSeed mode_seed(RngSeed base, Index mode) {
  return RngSeed{base.value ^ static_cast<std::uint64_t>(mode)};
}

/// Eigendecomposition of a symmetric matrix: values sorted non-increasing,
/// column j of `vectors` pairs with values[j]. Vectors are orthonormal and
/// sign-normalized (largest-magnitude entry positive, ties to lower index).
struct EigenPairs {
  Vector values;
  Matrix vectors;
};

/// Orthonormal basis of range(m), economical: at most min(rows, cols)
/// columns, truncated at the numerical rank (column threshold
/// 1e-12 * ||m||_F). A zero matrix yields a rows x 0 result.
Matrix economical_qr(const Matrix& m);

/// Same, with an explicit absolute truncation threshold on the R diagonal.
Matrix economical_qr(const Matrix& m, double abs_tol);

/// Symmetric eigendecomposition; the input is symmetrized as (a+a')/2
/// first. Throws if a is not square or is far from symmetric.
EigenPairs sym_eig(const Matrix& a);

/// Top-k left singular vectors of m, computed from the Gram matrix m*m'
/// (never from m itself: every call site has rows << cols). Columns are
/// orthonormal and sign-normalized.
Matrix truncated_left_singular(const Matrix& m, Index k);

/// Singular values of m in non-increasing order, via the Gram matrix of the
/// shorter side.
Vector singular_values(const Matrix& m);

/// rows x cols matrix of i.i.d. standard normal entries, filled in
/// column-major order from a Box-Muller transform over mt19937_64. The
/// stream is pinned by this library, not by the platform's distributions.
Matrix gaussian_matrix(Index rows, Index cols, RngSeed seed);

/// i.i.d. standard normal vector, same stream construction.
Vector gaussian_vector(Index n, RngSeed seed);

/// Uniform sample without replacement of ceil(omega * cols) columns of m,
/// preserving the original relative column order. omega = 1 returns m
/// unchanged (and consumes no randomness).
Matrix sample_columns(const Matrix& m, double omega, RngSeed seed);

}  // namespace rbki
