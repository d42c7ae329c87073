#pragma once

#include "rbki/tensor.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace rbki {

/// Fitting rate in percent: (1 - ||x - xhat|| / ||x||) * 100. Equals 100
/// only for an exact match and goes negative once the error exceeds ||x||.
double fit(const DenseTensor& x, const DenseTensor& xhat);

/// Relative error against a reference optimum:
/// ||x - xhat|| / ||x - x_opt||. Value 1 means xhat approximates x as well
/// as x_opt does. Throws when the denominator vanishes (x_opt exact).
double rerr(const DenseTensor& x, const DenseTensor& xhat, const DenseTensor& x_opt);

enum class MseKind {
  Verbatim,      // ||x - xhat||_F / numel  (unsquared norm over count)
  Conventional,  // ||x - xhat||_F^2 / numel
};

/// Mean square error in the requested convention. The Verbatim variant is
/// the default used by psnr below; the unsquared norm is unusual but is the
/// definition this benchmark's reference numbers use.
double mse(const DenseTensor& x, const DenseTensor& xhat, MseKind kind = MseKind::Verbatim);

/// Peak signal-to-noise ratio 10 log10(255^2 / MSE). Identical tensors have
/// no finite PSNR and come back as nullopt.
std::optional<double> psnr(const DenseTensor& x, const DenseTensor& xhat,
                           MseKind kind = MseKind::Verbatim);

/// One solver run's worth of evaluation results; serializes to a fixed CSV
/// column order (see csv_header).
struct MetricsReport {
  std::string run_id;
  std::string method;
  Index order = 0;
  std::string dims;
  std::string rank;
  std::string sketch;
  int q = 0;
  double omega = 1.0;
  std::optional<double> snr_db;
  double fit_percent = 0.0;
  std::optional<double> rerr;
  std::optional<double> psnr_db;
  double mse = 0.0;
  double wall_time_s = 0.0;
  std::uint64_t seed = 0;
  std::string config_digest;  // written once per file as a comment, not per row

  static std::string csv_header();
  std::string csv_row() const;
};

/// Deterministic short formatting used in every CSV this library writes.
std::string format_double(double v);

}  // namespace rbki
