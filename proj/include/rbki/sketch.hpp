#pragma once

#include "rbki/linalg.hpp"
#include "rbki/tensor.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace rbki {

/// Parameters of a randomized range finder on one unfolding.
///
/// sketch_size is the number of Gaussian probe columns; krylov_depth q is
/// the number of Gram-operator applications (q = 0 is the one-pass range
/// finder); sampling_rate omega in (0, 1] optionally builds the Krylov
/// space from a uniform column subsample of the unfolding.
struct SketchConfig {
  Index sketch_size = 0;
  int krylov_depth = 2;
  double sampling_rate = 1.0;
  RngSeed seed;
};

enum class SketchMethod { RBKI, RRF, PowerIteration };

std::string to_string(SketchMethod m);

/// Block Krylov range finder. With A the (optionally column-sampled)
/// unfolding, W = A * Omega and K = [W, (AA')W, ..., (AA')^q W], returns an
/// orthonormal basis of K with at most min(rows, S*(q+1)) columns. Blocks
/// are re-orthogonalized against the accepted basis before concatenation
/// and rank-truncated, which keeps the numerics stable while spanning the
/// same space as one economical QR of K.
Matrix rbki_basis(const Matrix& x_unf, const SketchConfig& cfg);

/// One-pass Gaussian range finder: rbki_basis with q forced to 0, at most
/// S columns.
Matrix rrf_basis(const Matrix& x_unf, const SketchConfig& cfg);

/// Power iteration range finder: single block (AA')^q W, re-orthonormalized
/// after each application, at most S columns.
Matrix power_iter_basis(const Matrix& x_unf, const SketchConfig& cfg);

/// Singular values of Q' * x_unf for each range-finder method, in
/// non-increasing order. Used to compare how much tail-spectrum energy each
/// method retains; serializes to CSV (method,index,singular_value).
struct TailSpectrumReport {
  std::vector<std::pair<SketchMethod, Vector>> spectra;

  /// Sum of squared singular values past position `rank`.
  static double tail_mass(const Vector& sv, Index rank);
  void write_csv(std::ostream& os) const;
};

TailSpectrumReport tail_spectrum_report(const Matrix& x_unf, const SketchConfig& cfg);

}  // namespace rbki
