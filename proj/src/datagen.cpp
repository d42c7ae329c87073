#include "rbki/datagen.hpp"

#include <cmath>
#include <stdexcept>

namespace rbki {

DenseTensor gaussian_tucker_tensor(const std::vector<Index>& dims, const MultilinearRank& rank,
                                   RngSeed seed) {
  if (dims.size() != rank.ranks.size())
    throw std::invalid_argument("gaussian_tucker_tensor: dims/rank size mismatch");
  Index draw_len = 1;
  for (std::size_t n = 0; n < dims.size(); ++n) {
    if (rank.ranks[n] < 1 || rank.ranks[n] > dims[n])
      throw std::invalid_argument("gaussian_tucker_tensor: rank out of range for mode " +
                                  std::to_string(n + 1));
    draw_len *= rank.ranks[n];
  }
  for (std::size_t n = 0; n < dims.size(); ++n) draw_len += dims[n] * rank.ranks[n];

  const Vector draws = gaussian_vector(draw_len, seed);
  Index offset = shape_numel(rank.ranks);
  DenseTensor core(rank.ranks, draws.head(offset));
  std::vector<Matrix> factors(dims.size());
  for (std::size_t n = 0; n < dims.size(); ++n) {
    const Index len = dims[n] * rank.ranks[n];
    factors[n] = Eigen::Map<const Matrix>(draws.data() + offset, dims[n], rank.ranks[n]);
    offset += len;
  }
  return multi_mode_product(core, factors);
}

DenseTensor power_functional_tensor(const std::vector<Index>& dims, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("power_functional_tensor: p must be >= 1");
  DenseTensor x(dims);
  const Index order = static_cast<Index>(dims.size());
  std::vector<Index> idx(dims.size(), 0);
  double* data = x.data();
  const Index total = x.numel();
  for (Index f = 0; f < total; ++f) {
    double s = 0.0;
    for (Index k = 0; k < order; ++k)
      s += std::pow(static_cast<double>(idx[static_cast<std::size_t>(k)] + 1), p);
    data[f] = std::pow(s, -1.0 / p);
    for (Index k = 0; k < order; ++k) {
      auto& ik = idx[static_cast<std::size_t>(k)];
      if (++ik < dims[static_cast<std::size_t>(k)]) break;
      ik = 0;
    }
  }
  return x;
}

std::pair<DenseTensor, double> add_noise(const DenseTensor& x, const NoiseSpec& spec) {
  if (!std::isfinite(spec.snr_db)) throw std::invalid_argument("add_noise: snr_db must be finite");
  const double x_norm = x.vec().norm();
  if (x_norm == 0.0) throw std::invalid_argument("add_noise: input tensor is zero");

  const Vector noise = gaussian_vector(x.numel(), spec.seed);
  const double lambda = x_norm / (noise.norm() * std::pow(10.0, spec.snr_db / 20.0));
  DenseTensor noisy(x.shape(), x.vec() + lambda * noise);
  return {std::move(noisy), lambda};
}

}  // namespace rbki
