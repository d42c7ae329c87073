#include "rbki/sketch.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>
#include <string>

namespace rbki {

namespace {

constexpr std::uint64_t kProbeTag = 0x70726f6265ULL;  // gaussian probe sub-stream

void validate(const Matrix& x, const SketchConfig& cfg) {
  if (x.rows() < 1 || x.cols() < 1)
    throw std::invalid_argument("sketch: input matrix must be nonempty");
  if (cfg.sketch_size < 1)
    throw std::invalid_argument("sketch: sketch_size must be >= 1");
  if (cfg.sketch_size > std::min(x.rows(), x.cols()))
    throw std::invalid_argument("sketch: sketch_size " + std::to_string(cfg.sketch_size) +
                                " exceeds min(rows, cols) = " +
                                std::to_string(std::min(x.rows(), x.cols())));
  if (cfg.krylov_depth < 0)
    throw std::invalid_argument("sketch: krylov_depth must be >= 0");
  if (!(cfg.sampling_rate > 0.0) || cfg.sampling_rate > 1.0)
    throw std::invalid_argument("sketch: sampling_rate must be in (0, 1]");
  if (x.norm() == 0.0)
    throw std::invalid_argument("sketch: input matrix is zero, no range to find");
}

}  // namespace

std::string to_string(SketchMethod m) {
  switch (m) {
    case SketchMethod::RBKI: return "bk-iter";
    case SketchMethod::RRF: return "non-iter";
    case SketchMethod::PowerIteration: return "p-iter";
  }
  return "?";
}

Matrix rbki_basis(const Matrix& x_unf, const SketchConfig& cfg) {
  validate(x_unf, cfg);
  const bool sampled = cfg.sampling_rate < 1.0;
  const Matrix a_storage =
      sampled ? sample_columns(x_unf, cfg.sampling_rate, cfg.seed) : Matrix();
  const Matrix& a = sampled ? a_storage : x_unf;

  const Matrix omega =
      gaussian_matrix(a.cols(), cfg.sketch_size, derive_seed(cfg.seed, kProbeTag));
  Matrix block = a * omega;

  Matrix q = economical_qr(block, 1e-12 * block.norm());
  if (q.cols() == 0) throw std::runtime_error("rbki_basis: sketch collapsed to zero");

  Matrix b = q;
  for (int k = 1; k <= cfg.krylov_depth; ++k) {
    if (q.cols() >= a.rows()) break;  // basis already spans the row space
    b = a * (a.transpose() * b);
    const double scale = b.norm();
    b -= q * (q.transpose() * b);
    b -= q * (q.transpose() * b);
    Matrix qb = economical_qr(b, 1e-12 * scale);
    if (qb.cols() == 0) break;  // no new directions left in the Krylov space
    Matrix merged(q.rows(), q.cols() + qb.cols());
    merged << q, qb;
    q = std::move(merged);
    b = std::move(qb);
  }
  return q;
}

Matrix rrf_basis(const Matrix& x_unf, const SketchConfig& cfg) {
  SketchConfig one_pass = cfg;
  one_pass.krylov_depth = 0;
  return rbki_basis(x_unf, one_pass);
}

Matrix power_iter_basis(const Matrix& x_unf, const SketchConfig& cfg) {
  validate(x_unf, cfg);
  const bool sampled = cfg.sampling_rate < 1.0;
  const Matrix a_storage =
      sampled ? sample_columns(x_unf, cfg.sampling_rate, cfg.seed) : Matrix();
  const Matrix& a = sampled ? a_storage : x_unf;

  const Matrix omega =
      gaussian_matrix(a.cols(), cfg.sketch_size, derive_seed(cfg.seed, kProbeTag));
  Matrix b = a * omega;
  for (int k = 1; k <= cfg.krylov_depth; ++k) {
    b = economical_qr(b, 1e-12 * b.norm());
    if (b.cols() == 0) throw std::runtime_error("power_iter_basis: sketch collapsed to zero");
    b = a * (a.transpose() * b);
  }
  Matrix q = economical_qr(b, 1e-12 * b.norm());
  if (q.cols() == 0) throw std::runtime_error("power_iter_basis: sketch collapsed to zero");
  return q;
}

double TailSpectrumReport::tail_mass(const Vector& sv, Index rank) {
  double mass = 0.0;
  for (Index i = rank; i < sv.size(); ++i) mass += sv(i) * sv(i);
  return mass;
}

void TailSpectrumReport::write_csv(std::ostream& os) const {
  os << "method,index,singular_value\n";
  for (const auto& [method, sv] : spectra)
    for (Index i = 0; i < sv.size(); ++i)
      os << to_string(method) << ',' << (i + 1) << ',' << sv(i) << '\n';
}

TailSpectrumReport tail_spectrum_report(const Matrix& x_unf, const SketchConfig& cfg) {
  TailSpectrumReport report;
  const SketchMethod methods[] = {SketchMethod::RRF, SketchMethod::PowerIteration,
                                  SketchMethod::RBKI};
  for (SketchMethod m : methods) {
    Matrix q;
    switch (m) {
      case SketchMethod::RRF: q = rrf_basis(x_unf, cfg); break;
      case SketchMethod::PowerIteration: q = power_iter_basis(x_unf, cfg); break;
      case SketchMethod::RBKI: q = rbki_basis(x_unf, cfg); break;
    }
    report.spectra.emplace_back(m, singular_values(q.transpose() * x_unf));
  }
  return report;
}

}  // namespace rbki
