#pragma once

#include "rbki/linalg.hpp"
#include "rbki/tensor.hpp"
#include "rbki/tucker.hpp"

#include <utility>
#include <vector>

namespace rbki {

/// Target signal-to-noise ratio in decibels plus the noise draw's seed.
struct NoiseSpec {
  double snr_db = 0.0;
  RngSeed seed;
};

/// Random low-multilinear-rank tensor: i.i.d. standard normal core of shape
/// (R_1, ..., R_N) expanded through i.i.d. standard normal I_n x R_n
/// factors. The draw order is pinned: core first, then factors in mode
/// order, all from one stream.
DenseTensor gaussian_tucker_tensor(const std::vector<Index>& dims, const MultilinearRank& rank,
                                   RngSeed seed);

/// Deterministic tensor with entry (sum_m i_m^p)^(-1/p) over 1-based
/// indices. Larger p gives a faster singular value decay. Stated for three
/// modes; higher orders use the same formula over all indices.
DenseTensor power_functional_tensor(const std::vector<Index>& dims, double p);

/// Adds scaled i.i.d. standard normal noise: returns x + lambda * N and
/// lambda, where lambda is solved from the realized noise norm so that
/// 20 log10(||x|| / ||lambda N||) equals spec.snr_db exactly.
std::pair<DenseTensor, double> add_noise(const DenseTensor& x, const NoiseSpec& spec);

}  // namespace rbki
