#pragma once

#include "rbki/linalg.hpp"
#include "rbki/sketch.hpp"
#include "rbki/tensor.hpp"

#include <vector>

namespace rbki {

/// Core tensor plus one orthonormal factor matrix per mode; factor n has
/// shape I_n x R_n and the core has shape (R_1, ..., R_N).
struct TuckerFactors {
  DenseTensor core;
  std::vector<Matrix> factors;
};

struct MultilinearRank {
  std::vector<Index> ranks;
};

/// Randomized HOSVD with a pluggable range finder. Per mode, an orthonormal
/// basis Q of the unfolding's range is drawn, the data is projected as
/// Z = Q' (X_(n) X_(n)') Q, and the factor is U = Q * top-R_n eigenvectors
/// of Z. The core is formed once after all factors are known,
/// G = x x_1 U1' ... x_N UN'. Modes with R_n = I_n get an identity factor
/// without sketching. Per-mode sketch seeds are seed XOR mode index.
TuckerFactors randomized_hosvd(const DenseTensor& x, const std::vector<Index>& sketch_sizes,
                               const MultilinearRank& rank, SketchMethod method, int q,
                               double omega, RngSeed seed);

/// Block Krylov variant of the above (the default solver here).
TuckerFactors rbki_tucker(const DenseTensor& x, const std::vector<Index>& sketch_sizes,
                          const MultilinearRank& rank, int q, double omega, RngSeed seed);

/// Deterministic truncated HOSVD: factor n is the top-R_n left singular
/// vectors of the mode-n unfolding.
TuckerFactors truncated_hosvd(const DenseTensor& x, const MultilinearRank& rank);

DenseTensor tucker_reconstruct(const TuckerFactors& tf);

/// Default sketch size R_n + ceil(1/gamma), capped at the feasible range
/// for each mode.
std::vector<Index> default_sketch_sizes(const std::vector<Index>& dims,
                                        const std::vector<Index>& ranks, double gamma);

/// Error decomposition of a sketched approximation against the
/// deterministic optimum at the same target rank.
///
/// With x_tilde the reconstruction of `sketch` (an untruncated, typically
/// S-dimensional orthonormal Tucker representation of x):
///   alpha    = ||x - x_tilde||
///   beta     = ||x - T-SVD(x, rank)||
///   achieved = ||x - T-SVD(x_tilde, rank)||
/// The sandwich beta <= achieved <= 2 alpha + beta must hold, as must the
/// Pythagorean bound alpha^2 <= sum of per-mode projection residuals.
struct SketchErrorBounds {
  double alpha = 0.0;
  double beta = 0.0;
  double achieved = 0.0;
  double mode_residual_sq_sum = 0.0;
  bool sandwich_holds = false;
  bool pythagorean_holds = false;
};

SketchErrorBounds sketch_error_bounds_check(const DenseTensor& x, const TuckerFactors& sketch,
                                            const MultilinearRank& rank);

}  // namespace rbki
