#include "rbki/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rbki {

namespace {

void require_same_shape(const DenseTensor& x, const DenseTensor& xhat, const char* who) {
  if (x.shape() != xhat.shape())
    throw std::invalid_argument(std::string(who) + ": tensors must have the same shape");
}

}  // namespace

double fit(const DenseTensor& x, const DenseTensor& xhat) {
  require_same_shape(x, xhat, "fit");
  const double x_norm = x.vec().norm();
  if (x_norm == 0.0) throw std::invalid_argument("fit: reference tensor is zero");
  return (1.0 - (x.vec() - xhat.vec()).norm() / x_norm) * 100.0;
}

double rerr(const DenseTensor& x, const DenseTensor& xhat, const DenseTensor& x_opt) {
  require_same_shape(x, xhat, "rerr");
  require_same_shape(x, x_opt, "rerr");
  const double denom = (x.vec() - x_opt.vec()).norm();
  if (denom < 1e-14 * x.vec().norm())
    throw std::invalid_argument("rerr: reference approximation is exact, ratio undefined");
  return (x.vec() - xhat.vec()).norm() / denom;
}

double mse(const DenseTensor& x, const DenseTensor& xhat, MseKind kind) {
  require_same_shape(x, xhat, "mse");
  const double err = (x.vec() - xhat.vec()).norm();
  const double count = static_cast<double>(x.numel());
  return kind == MseKind::Verbatim ? err / count : err * err / count;
}

std::optional<double> psnr(const DenseTensor& x, const DenseTensor& xhat, MseKind kind) {
  const double m = mse(x, xhat, kind);
  if (m == 0.0) return std::nullopt;  // exact match, no finite ratio
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

std::string MetricsReport::csv_header() {
  return "run_id,method,N,dims,rank,sketch,q,omega,snr_db,fit,rerr,psnr,time_s,seed";
}

std::string MetricsReport::csv_row() const {
  std::ostringstream os;
  os << run_id << ',' << method << ',' << order << ',' << dims << ',' << rank << ',' << sketch
     << ',' << q << ',' << format_double(omega) << ',';
  if (snr_db) os << format_double(*snr_db);
  os << ',' << format_double(fit_percent) << ',';
  if (rerr) os << format_double(*rerr);
  os << ',';
  if (psnr_db)
    os << format_double(*psnr_db);
  else
    os << "exact";
  os << ',' << format_double(wall_time_s) << ',' << seed;
  return os.str();
}

}  // namespace rbki
