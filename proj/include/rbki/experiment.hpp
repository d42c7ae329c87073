#pragma once

#include "rbki/datagen.hpp"
#include "rbki/metrics.hpp"
#include "rbki/sketch.hpp"
#include "rbki/tring.hpp"
#include "rbki/tucker.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rbki {

/// Raised for malformed or infeasible experiment configurations; the CLI
/// maps it to exit code 2 and never writes partial output.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class DataFamily { GaussianTucker, PowerFunctional, File };
enum class Method { TSvd, GrSvd, GrpiSvd, RbkiTk, TrAls, RbkiTkTr };

std::string to_string(Method m);
std::string to_string(DataFamily f);
bool is_tr_method(Method m);

/// Declarative description of one benchmark experiment, parsed from a
/// sectioned key = value file (see the commented example shipped in
/// configs/). Unset optional values fall back to the documented defaults.
struct ExperimentConfig {
  // [data]
  DataFamily family = DataFamily::GaussianTucker;
  std::vector<Index> dims;
  std::vector<Index> rank;  // multilinear rank; may be empty for TR-only runs
  double p = 10.0;          // power-functional exponent
  std::filesystem::path path;

  // [noise]
  std::optional<double> snr_db;

  // [methods]
  std::vector<Method> methods;

  // [solver]
  std::vector<Index> sketch;  // empty: R_n + ceil(1/gamma), capped per mode
  double gamma = 0.2;
  int q = 2;
  double omega = 1.0;
  int max_iter = 20;
  double tol = 1e-3;
  std::vector<Index> tr_rank;
  std::vector<Index> compress;  // empty: min(5 R_n, I_n)

  // [run]
  int runs = 10;
  std::uint64_t seed = 0;
  std::filesystem::path output = "results.csv";

  // [sweep] / [spectrum]
  std::vector<double> omegas;  // empty: 0.1, 0.2, ..., 1.0
  Index spectrum_mode = 1;

  std::vector<Index> effective_sketch() const;
  std::vector<Index> effective_compress() const;
  std::vector<double> effective_omegas() const;
};

ExperimentConfig parse_experiment_config(const std::filesystem::path& path);
ExperimentConfig parse_experiment_config_text(const std::string& text);

/// Full feasibility check; throws ConfigError naming the violated
/// constraint. For file-backed data this reads the tensor header.
void validate_config(const ExperimentConfig& cfg);

/// Canonical one-line-per-field rendering of a config; its FNV-1a hash is
/// the config digest stamped into every CSV.
std::string canonical_config_text(const ExperimentConfig& cfg);
std::string config_digest(const ExperimentConfig& cfg);

/// One Monte Carlo instance. Run r uses seed base+r; the data and noise
/// draws use sub-streams derived from it, solvers get the run seed itself.
struct Instance {
  DenseTensor clean;
  DenseTensor noisy;
  double lambda = 0.0;
  RngSeed run_seed;
};

Instance make_instance(const ExperimentConfig& cfg, int run_index,
                       const DenseTensor* preloaded = nullptr);

struct ExperimentResult {
  std::vector<MetricsReport> rows;        // per run, in config method order
  std::vector<MetricsReport> aggregates;  // mean and stddev per method
  std::string csv;
};

/// Runs every configured method over `runs` Monte Carlo instances,
/// computing fit against the clean tensor, relative error against the
/// truncated HOSVD of the noisy tensor (shared per run), PSNR and wall
/// time of the solver call.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

struct SpectrumResult {
  // per run: labeled singular value spectra of the chosen unfolding
  std::vector<std::vector<std::pair<std::string, Vector>>> runs;
  std::string csv;  // run,method,index,singular_value
};

/// Emits the spectra of the clean and noisy unfoldings next to the spectra
/// retained by each range-finder method.
SpectrumResult spectrum_experiment(const ExperimentConfig& cfg);

struct SweepRow {
  int run = 0;
  double omega = 1.0;
  double fit_rbki_tk = 0.0;
  double fit_tsvd = 0.0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::string csv;  // run,omega,fit_rbki_tk,fit_tsvd
};

/// Fit of the block Krylov Tucker solver across column sampling rates,
/// with the deterministic truncated HOSVD as the per-run reference.
SweepResult sampling_sweep(const ExperimentConfig& cfg);

/// Atomically-ish writes text to a file (write to temp, rename).
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace rbki
