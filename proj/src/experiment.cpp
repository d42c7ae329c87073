#include "rbki/experiment.hpp"

#include "rbki/tensor_io.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rbki {

namespace {

constexpr std::uint64_t kDataTag = 0x64617461ULL;
constexpr std::uint64_t kNoiseTag = 0x6e6f697365ULL;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::string to_string(Method m) {
  switch (m) {
    case Method::TSvd: return "t-svd";
    case Method::GrSvd: return "gr-svd";
    case Method::GrpiSvd: return "grpi-svd";
    case Method::RbkiTk: return "rbki-tk";
    case Method::TrAls: return "tr-als";
    case Method::RbkiTkTr: return "rbki-tk-tr";
  }
  return "?";
}

std::string to_string(DataFamily f) {
  switch (f) {
    case DataFamily::GaussianTucker: return "gaussian-tucker";
    case DataFamily::PowerFunctional: return "power-functional";
    case DataFamily::File: return "file";
  }
  return "?";
}

bool is_tr_method(Method m) { return m == Method::TrAls || m == Method::RbkiTkTr; }

namespace {

Method parse_method(const std::string& raw) {
  const std::string s = lower(raw);
  if (s == "t-svd" || s == "tsvd") return Method::TSvd;
  if (s == "gr-svd" || s == "grsvd") return Method::GrSvd;
  if (s == "grpi-svd" || s == "grpisvd") return Method::GrpiSvd;
  if (s == "rbki-tk" || s == "rbkitk") return Method::RbkiTk;
  if (s == "tr-als" || s == "trals") return Method::TrAls;
  if (s == "rbki-tk-tr" || s == "rbkitktr") return Method::RbkiTkTr;
  throw ConfigError("methods.list: unknown method '" + raw + "'");
}

DataFamily parse_family(const std::string& raw) {
  const std::string s = lower(raw);
  if (s == "gaussian-tucker") return DataFamily::GaussianTucker;
  if (s == "power-functional") return DataFamily::PowerFunctional;
  if (s == "file") return DataFamily::File;
  throw ConfigError("data.family: unknown family '" + raw + "', expected gaussian-tucker, "
                    "power-functional or file");
}

// flat "section.key" -> value map from the sectioned key = value format
std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    // strip comments; '#' starts a comment at start of line or after space
    std::size_t cut = std::string::npos;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        cut = i;
        break;
      }
    }
    if (cut != std::string::npos) line.erase(cut);
    auto trim = [](const std::string& s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) +
                                             ": malformed section header '" + t + "'");
      section = lower(trim(t.substr(1, t.size() - 2)));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value, got '" + t +
                        "'");
    const std::string key = lower(trim(t.substr(0, eq)));
    if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    kv[section.empty() ? key : section + "." + key] = trim(t.substr(eq + 1));
  }
  return kv;
}

std::vector<Index> parse_index_list(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  std::vector<Index> out;
  long long x;
  while (is >> x) out.push_back(static_cast<Index>(x));
  if (!is.eof() || out.empty())
    throw ConfigError(key + ": expected a space-separated list of integers, got '" + v + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  std::vector<double> out;
  double x;
  while (is >> x) out.push_back(x);
  if (!is.eof() || out.empty())
    throw ConfigError(key + ": expected a space-separated list of numbers, got '" + v + "'");
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
}

std::string join(const std::vector<Index>& v, char sep = ' ') {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? std::string(1, sep) : "") << v[i];
  return os.str();
}

}  // namespace

std::vector<Index> ExperimentConfig::effective_sketch() const {
  if (!sketch.empty()) return sketch;
  return default_sketch_sizes(dims, rank, gamma);
}

std::vector<Index> ExperimentConfig::effective_compress() const {
  if (!compress.empty()) return compress;
  return default_compress_sizes(dims, tr_rank);
}

std::vector<double> ExperimentConfig::effective_omegas() const {
  if (!omegas.empty()) return omegas;
  std::vector<double> w;
  for (int i = 1; i <= 10; ++i) w.push_back(0.1 * i);
  w.back() = 1.0;
  return w;
}

ExperimentConfig parse_experiment_config_text(const std::string& text) {
  const auto kv = parse_kv(text);
  ExperimentConfig cfg;
  auto get = [&kv](const std::string& key) -> const std::string* {
    const auto it = kv.find(key);
    return it == kv.end() ? nullptr : &it->second;
  };

  static const char* known[] = {
      "data.family", "data.dims", "data.rank", "data.p", "data.path",
      "noise.snr_db", "methods.list",
      "solver.sketch", "solver.gamma", "solver.q", "solver.omega", "solver.max_iter",
      "solver.tol", "solver.tr_rank", "solver.compress",
      "run.runs", "run.seed", "run.output",
      "sweep.omegas", "spectrum.mode"};
  for (const auto& [key, value] : kv) {
    if (std::find_if(std::begin(known), std::end(known),
                     [&key](const char* k) { return key == k; }) == std::end(known))
      throw ConfigError("unknown config key '" + key + "'");
  }

  if (const auto* v = get("data.family")) cfg.family = parse_family(*v);
  if (const auto* v = get("data.dims")) cfg.dims = parse_index_list("data.dims", *v);
  if (const auto* v = get("data.rank")) cfg.rank = parse_index_list("data.rank", *v);
  if (const auto* v = get("data.p")) cfg.p = parse_double("data.p", *v);
  if (const auto* v = get("data.path")) cfg.path = *v;
  if (const auto* v = get("noise.snr_db")) cfg.snr_db = parse_double("noise.snr_db", *v);
  if (const auto* v = get("methods.list")) {
    std::istringstream is(*v);
    std::string tok;
    while (is >> tok) cfg.methods.push_back(parse_method(tok));
  }
  if (const auto* v = get("solver.sketch")) cfg.sketch = parse_index_list("solver.sketch", *v);
  if (const auto* v = get("solver.gamma")) cfg.gamma = parse_double("solver.gamma", *v);
  if (const auto* v = get("solver.q")) cfg.q = static_cast<int>(parse_int("solver.q", *v));
  if (const auto* v = get("solver.omega")) cfg.omega = parse_double("solver.omega", *v);
  if (const auto* v = get("solver.max_iter"))
    cfg.max_iter = static_cast<int>(parse_int("solver.max_iter", *v));
  if (const auto* v = get("solver.tol")) cfg.tol = parse_double("solver.tol", *v);
  if (const auto* v = get("solver.tr_rank"))
    cfg.tr_rank = parse_index_list("solver.tr_rank", *v);
  if (const auto* v = get("solver.compress"))
    cfg.compress = parse_index_list("solver.compress", *v);
  if (const auto* v = get("run.runs")) cfg.runs = static_cast<int>(parse_int("run.runs", *v));
  if (const auto* v = get("run.seed"))
    cfg.seed = static_cast<std::uint64_t>(parse_int("run.seed", *v));
  if (const auto* v = get("run.output")) cfg.output = *v;
  if (const auto* v = get("sweep.omegas")) cfg.omegas = parse_double_list("sweep.omegas", *v);
  if (const auto* v = get("spectrum.mode"))
    cfg.spectrum_mode = static_cast<Index>(parse_int("spectrum.mode", *v));
  return cfg;
}

ExperimentConfig parse_experiment_config(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << is.rdbuf();
  return parse_experiment_config_text(buf.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.family == DataFamily::File) {
    if (cfg.path.empty()) throw ConfigError("data.path: required when data.family = file");
  } else if (cfg.dims.empty()) {
    throw ConfigError("data.dims: required for generated data");
  }
  std::vector<Index> dims = cfg.dims;
  if (cfg.family == DataFamily::File) {
    try {
      dims = read_tensor_shape(cfg.path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("data.path: ") + e.what());
    }
  }
  for (Index d : dims)
    if (d < 1) throw ConfigError("data.dims: dimensions must be >= 1");
  if (cfg.family == DataFamily::PowerFunctional && !(cfg.p >= 1.0))
    throw ConfigError("data.p: power parameter must be >= 1");
  if (cfg.methods.empty()) throw ConfigError("methods.list: at least one method is required");
  if (cfg.runs < 1) throw ConfigError("run.runs: must be >= 1");
  if (!(cfg.omega > 0.0) || cfg.omega > 1.0)
    throw ConfigError("solver.omega: must be in (0, 1]");
  if (cfg.q < 0) throw ConfigError("solver.q: must be >= 0");
  if (cfg.max_iter < 1) throw ConfigError("solver.max_iter: must be >= 1");
  if (!(cfg.gamma > 0.0)) throw ConfigError("solver.gamma: must be > 0");
  if (cfg.snr_db && !std::isfinite(*cfg.snr_db))
    throw ConfigError("noise.snr_db: must be finite");
  for (double w : cfg.effective_omegas())
    if (!(w > 0.0) || w > 1.0) throw ConfigError("sweep.omegas: entries must be in (0, 1]");

  Index total = 1;
  for (Index d : dims) total *= d;

  const bool any_tucker =
      std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) { return !is_tr_method(m); });
  const bool any_tr =
      std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) { return is_tr_method(m); });
  const bool any_sketched = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
    return m == Method::GrSvd || m == Method::GrpiSvd || m == Method::RbkiTk;
  });

  if (any_tucker || !cfg.rank.empty()) {
    if (cfg.rank.empty())
      throw ConfigError("data.rank: required by the configured tucker methods");
    if (cfg.rank.size() != dims.size())
      throw ConfigError("data.rank: expected " + std::to_string(dims.size()) +
                        " entries, got " + std::to_string(cfg.rank.size()));
    for (std::size_t n = 0; n < dims.size(); ++n)
      if (cfg.rank[n] < 1 || cfg.rank[n] > dims[n])
        throw ConfigError("data.rank: R_" + std::to_string(n + 1) + " = " +
                          std::to_string(cfg.rank[n]) + " outside 1.." +
                          std::to_string(dims[n]));
  }
  if (any_sketched) {
    std::vector<Index> sketch;
    try {
      sketch = cfg.sketch.empty() ? default_sketch_sizes(dims, cfg.rank, cfg.gamma) : cfg.sketch;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("solver.sketch: ") + e.what());
    }
    if (sketch.size() != dims.size())
      throw ConfigError("solver.sketch: expected " + std::to_string(dims.size()) + " entries");
    for (std::size_t n = 0; n < dims.size(); ++n) {
      if (cfg.rank[n] == dims[n]) continue;  // identity factor, no sketching
      const Index cap = std::min(dims[n], total / dims[n]);
      if (sketch[n] < cfg.rank[n] || sketch[n] > cap)
        throw ConfigError("solver.sketch: S_" + std::to_string(n + 1) + " = " +
                          std::to_string(sketch[n]) + " must satisfy " +
                          std::to_string(cfg.rank[n]) + " <= S <= " + std::to_string(cap));
    }
  }
  if (any_tr) {
    if (cfg.tr_rank.empty())
      throw ConfigError("solver.tr_rank: required by the configured tensor-ring methods");
    if (cfg.tr_rank.size() != dims.size())
      throw ConfigError("solver.tr_rank: expected " + std::to_string(dims.size()) + " entries");
    for (Index r : cfg.tr_rank)
      if (r < 1) throw ConfigError("solver.tr_rank: entries must be >= 1");
    if (dims.size() < 2) throw ConfigError("solver.tr_rank: ring methods need order >= 2");
  }
  if (std::find(cfg.methods.begin(), cfg.methods.end(), Method::RbkiTkTr) != cfg.methods.end()) {
    std::vector<Index> compress;
    try {
      compress =
          cfg.compress.empty() ? default_compress_sizes(dims, cfg.tr_rank) : cfg.compress;
    } catch (const std::exception& e) {
      throw ConfigError(std::string("solver.compress: ") + e.what());
    }
    if (compress.size() != dims.size())
      throw ConfigError("solver.compress: expected " + std::to_string(dims.size()) + " entries");
    for (std::size_t n = 0; n < dims.size(); ++n) {
      const Index cap = std::min(dims[n], total / dims[n]);
      if (compress[n] < 1 || compress[n] > cap)
        throw ConfigError("solver.compress: S_" + std::to_string(n + 1) + " = " +
                          std::to_string(compress[n]) + " outside 1.." + std::to_string(cap));
    }
  }
  if (cfg.spectrum_mode < 1 || cfg.spectrum_mode > static_cast<Index>(dims.size()))
    throw ConfigError("spectrum.mode: outside 1.." + std::to_string(dims.size()));
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "family=" << to_string(cfg.family) << '\n'
     << "dims=" << join(cfg.dims) << '\n'
     << "rank=" << join(cfg.rank) << '\n'
     << "p=" << format_double(cfg.p) << '\n'
     << "path=" << cfg.path.string() << '\n'
     << "snr_db=" << (cfg.snr_db ? format_double(*cfg.snr_db) : "none") << '\n';
  os << "methods=";
  for (std::size_t i = 0; i < cfg.methods.size(); ++i)
    os << (i ? " " : "") << to_string(cfg.methods[i]);
  os << '\n'
     << "sketch=" << join(cfg.sketch) << '\n'
     << "gamma=" << format_double(cfg.gamma) << '\n'
     << "q=" << cfg.q << '\n'
     << "omega=" << format_double(cfg.omega) << '\n'
     << "max_iter=" << cfg.max_iter << '\n'
     << "tol=" << format_double(cfg.tol) << '\n'
     << "tr_rank=" << join(cfg.tr_rank) << '\n'
     << "compress=" << join(cfg.compress) << '\n'
     << "runs=" << cfg.runs << '\n'
     << "seed=" << cfg.seed << '\n';
  os << "omegas=";
  const auto ws = cfg.effective_omegas();
  for (std::size_t i = 0; i < ws.size(); ++i) os << (i ? " " : "") << format_double(ws[i]);
  os << '\n' << "spectrum_mode=" << cfg.spectrum_mode << '\n';
  return os.str();
}

std::string config_digest(const ExperimentConfig& cfg) {
  const std::string text = canonical_config_text(cfg);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Instance make_instance(const ExperimentConfig& cfg, int run_index,
                       const DenseTensor* preloaded) {
  Instance inst;
  inst.run_seed = RngSeed{cfg.seed + static_cast<std::uint64_t>(run_index)};
  switch (cfg.family) {
    case DataFamily::GaussianTucker:
      inst.clean = gaussian_tucker_tensor(cfg.dims, MultilinearRank{cfg.rank},
                                          derive_seed(inst.run_seed, kDataTag));
      break;
    case DataFamily::PowerFunctional:
      inst.clean = power_functional_tensor(cfg.dims, cfg.p);
      break;
    case DataFamily::File:
      inst.clean = preloaded ? *preloaded : read_tensor(cfg.path);
      break;
  }
  if (cfg.snr_db) {
    auto [noisy, lambda] =
        add_noise(inst.clean, NoiseSpec{*cfg.snr_db, derive_seed(inst.run_seed, kNoiseTag)});
    inst.noisy = std::move(noisy);
    inst.lambda = lambda;
  } else {
    inst.noisy = inst.clean;
    inst.lambda = 0.0;
  }
  return inst;
}

namespace {

struct MethodOutcome {
  DenseTensor reconstruction;
  double seconds = 0.0;
};

class Stopwatch {
public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

private:
  std::chrono::steady_clock::time_point start_;
};

MethodOutcome execute_method(Method m, const ExperimentConfig& cfg, const Instance& inst) {
  MethodOutcome out;
  switch (m) {
    case Method::TSvd: {
      Stopwatch sw;
      const TuckerFactors tf = truncated_hosvd(inst.noisy, MultilinearRank{cfg.rank});
      out.seconds = sw.seconds();
      out.reconstruction = tucker_reconstruct(tf);
      break;
    }
    case Method::GrSvd:
    case Method::GrpiSvd:
    case Method::RbkiTk: {
      const SketchMethod sm = m == Method::GrSvd ? SketchMethod::RRF
                              : m == Method::GrpiSvd ? SketchMethod::PowerIteration
                                                     : SketchMethod::RBKI;
      const int q = m == Method::GrSvd ? 0 : cfg.q;
      Stopwatch sw;
      const TuckerFactors tf =
          randomized_hosvd(inst.noisy, cfg.effective_sketch(), MultilinearRank{cfg.rank}, sm, q,
                           cfg.omega, inst.run_seed);
      out.seconds = sw.seconds();
      out.reconstruction = tucker_reconstruct(tf);
      break;
    }
    case Method::TrAls: {
      Stopwatch sw;
      const TrAlsResult r =
          tr_als(inst.noisy, TRRank{cfg.tr_rank}, cfg.max_iter, cfg.tol, inst.run_seed);
      out.seconds = sw.seconds();
      out.reconstruction = tr_reconstruct(r.factors);
      break;
    }
    case Method::RbkiTkTr: {
      Stopwatch sw;
      const RbkiTkTrResult r = rbki_tk_tr(inst.noisy, cfg.effective_compress(),
                                          TRRank{cfg.tr_rank}, cfg.q, cfg.omega, inst.run_seed,
                                          cfg.max_iter, cfg.tol);
      out.seconds = sw.seconds();
      out.reconstruction = tr_reconstruct(r.factors);
      break;
    }
  }
  return out;
}

// For file-backed data the dimensions come from the tensor header; loads the
// tensor once and fills cfg.dims so downstream defaults see real sizes.
ExperimentConfig normalize_config(const ExperimentConfig& cfg_in,
                                  std::optional<DenseTensor>& preloaded) {
  ExperimentConfig cfg = cfg_in;
  if (cfg.family == DataFamily::File) {
    if (cfg.path.empty()) throw ConfigError("data.path: required when data.family = file");
    try {
      preloaded = read_tensor(cfg.path);
    } catch (const std::exception& e) {
      throw ConfigError(std::string("data.path: ") + e.what());
    }
    if (!cfg.dims.empty() && cfg.dims != preloaded->shape())
      throw ConfigError("data.dims: does not match the shape stored in " + cfg.path.string());
    cfg.dims = preloaded->shape();
  }
  validate_config(cfg);
  return cfg;
}

MetricsReport base_report(const ExperimentConfig& cfg, Method m) {
  MetricsReport r;
  r.method = to_string(m);
  r.order = static_cast<Index>(cfg.dims.size());
  r.dims = join(cfg.dims, 'x');
  r.snr_db = cfg.snr_db;
  r.config_digest = config_digest(cfg);
  switch (m) {
    case Method::TSvd:
      r.rank = join(cfg.rank, 'x');
      r.q = 0;
      r.omega = 1.0;
      break;
    case Method::GrSvd:
      r.rank = join(cfg.rank, 'x');
      r.sketch = join(cfg.effective_sketch(), 'x');
      r.q = 0;
      r.omega = cfg.omega;
      break;
    case Method::GrpiSvd:
    case Method::RbkiTk:
      r.rank = join(cfg.rank, 'x');
      r.sketch = join(cfg.effective_sketch(), 'x');
      r.q = cfg.q;
      r.omega = cfg.omega;
      break;
    case Method::TrAls:
      r.rank = join(cfg.tr_rank, 'x');
      r.q = 0;
      r.omega = 1.0;
      break;
    case Method::RbkiTkTr:
      r.rank = join(cfg.tr_rank, 'x');
      r.sketch = join(cfg.effective_compress(), 'x');
      r.q = cfg.q;
      r.omega = cfg.omega;
      break;
  }
  return r;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg_in) {
  std::optional<DenseTensor> preloaded;
  const ExperimentConfig cfg = normalize_config(cfg_in, preloaded);
  ExperimentResult result;

  const bool have_rank = !cfg.rank.empty();
  for (int r = 0; r < cfg.runs; ++r) {
    const Instance inst = make_instance(cfg, r, preloaded ? &*preloaded : nullptr);

    // shared relative-error reference: truncated HOSVD of the noisy tensor
    std::optional<MethodOutcome> tsvd;
    if (have_rank) tsvd = execute_method(Method::TSvd, cfg, inst);

    for (Method m : cfg.methods) {
      const MethodOutcome outcome =
          (m == Method::TSvd && tsvd) ? *tsvd : execute_method(m, cfg, inst);

      MetricsReport rep = base_report(cfg, m);
      rep.run_id = std::to_string(r);
      rep.seed = inst.run_seed.value;
      rep.fit_percent = fit(inst.clean, outcome.reconstruction);
      rep.mse = mse(inst.clean, outcome.reconstruction);
      rep.psnr_db = psnr(inst.clean, outcome.reconstruction);
      rep.wall_time_s = outcome.seconds;
      if (tsvd) {
        try {
          rep.rerr = rerr(inst.clean, outcome.reconstruction, tsvd->reconstruction);
        } catch (const std::invalid_argument&) {
          rep.rerr = std::nullopt;  // reference is exact, ratio undefined
        }
      }
      result.rows.push_back(std::move(rep));
    }
  }

  // aggregates in configured method order
  for (Method m : cfg.methods) {
    const std::string name = to_string(m);
    std::vector<const MetricsReport*> rows;
    for (const auto& row : result.rows)
      if (row.method == name) rows.push_back(&row);
    const double n = static_cast<double>(rows.size());

    auto mean_of = [&rows, n](auto get) {
      double s = 0.0;
      for (const auto* r : rows) s += get(*r);
      return s / n;
    };
    auto stddev_of = [&rows, n](auto get, double mean) {
      if (rows.size() < 2) return 0.0;
      double s = 0.0;
      for (const auto* r : rows) {
        const double d = get(*r) - mean;
        s += d * d;
      }
      return std::sqrt(s / (n - 1.0));
    };

    const bool all_rerr =
        std::all_of(rows.begin(), rows.end(), [](const MetricsReport* r) { return r->rerr.has_value(); });
    const bool all_psnr =
        std::all_of(rows.begin(), rows.end(), [](const MetricsReport* r) { return r->psnr_db.has_value(); });

    MetricsReport mean = base_report(cfg, m);
    mean.run_id = "mean";
    mean.seed = cfg.seed;
    mean.fit_percent = mean_of([](const MetricsReport& r) { return r.fit_percent; });
    mean.mse = mean_of([](const MetricsReport& r) { return r.mse; });
    mean.wall_time_s = mean_of([](const MetricsReport& r) { return r.wall_time_s; });
    if (all_rerr) mean.rerr = mean_of([](const MetricsReport& r) { return *r.rerr; });
    if (all_psnr) mean.psnr_db = mean_of([](const MetricsReport& r) { return *r.psnr_db; });

    MetricsReport dev = base_report(cfg, m);
    dev.run_id = "stddev";
    dev.seed = cfg.seed;
    dev.fit_percent =
        stddev_of([](const MetricsReport& r) { return r.fit_percent; }, mean.fit_percent);
    dev.mse = stddev_of([](const MetricsReport& r) { return r.mse; }, mean.mse);
    dev.wall_time_s =
        stddev_of([](const MetricsReport& r) { return r.wall_time_s; }, mean.wall_time_s);
    if (all_rerr) dev.rerr = stddev_of([](const MetricsReport& r) { return *r.rerr; }, *mean.rerr);
    if (all_psnr)
      dev.psnr_db = stddev_of([](const MetricsReport& r) { return *r.psnr_db; }, *mean.psnr_db);

    result.aggregates.push_back(std::move(mean));
    result.aggregates.push_back(std::move(dev));
  }

  std::ostringstream csv;
  csv << "# config_digest = " << config_digest(cfg) << '\n';
  csv << MetricsReport::csv_header() << '\n';
  for (const auto& row : result.rows) csv << row.csv_row() << '\n';
  for (const auto& row : result.aggregates) csv << row.csv_row() << '\n';
  result.csv = csv.str();
  return result;
}

SpectrumResult spectrum_experiment(const ExperimentConfig& cfg_in) {
  std::optional<DenseTensor> preloaded;
  const ExperimentConfig cfg = normalize_config(cfg_in, preloaded);
  SpectrumResult result;

  std::ostringstream csv;
  csv << "# config_digest = " << config_digest(cfg) << '\n';
  csv << "run,method,index,singular_value\n";
  const Index mode = cfg.spectrum_mode;
  for (int r = 0; r < cfg.runs; ++r) {
    const Instance inst = make_instance(cfg, r, preloaded ? &*preloaded : nullptr);
    std::vector<std::pair<std::string, Vector>> labeled;
    labeled.emplace_back("clean", singular_values(unfold(inst.clean, mode)));
    labeled.emplace_back("noisy", singular_values(unfold(inst.noisy, mode)));

    const std::vector<Index> sketch = cfg.effective_sketch();
    const SketchConfig scfg{sketch[static_cast<std::size_t>(mode - 1)], cfg.q, cfg.omega,
                            mode_seed(inst.run_seed, mode)};
    const TailSpectrumReport rep = tail_spectrum_report(unfold(inst.noisy, mode), scfg);
    for (const auto& [method, sv] : rep.spectra) labeled.emplace_back(to_string(method), sv);

    for (const auto& [label, sv] : labeled)
      for (Index i = 0; i < sv.size(); ++i)
        csv << r << ',' << label << ',' << (i + 1) << ',' << format_double(sv(i)) << '\n';
    result.runs.push_back(std::move(labeled));
  }
  result.csv = csv.str();
  return result;
}

SweepResult sampling_sweep(const ExperimentConfig& cfg_in) {
  std::optional<DenseTensor> preloaded;
  const ExperimentConfig cfg = normalize_config(cfg_in, preloaded);
  if (cfg.rank.empty()) throw ConfigError("data.rank: required for the sampling sweep");
  SweepResult result;

  std::ostringstream csv;
  csv << "# config_digest = " << config_digest(cfg) << '\n';
  csv << "run,omega,fit_rbki_tk,fit_tsvd\n";
  for (int r = 0; r < cfg.runs; ++r) {
    const Instance inst = make_instance(cfg, r, preloaded ? &*preloaded : nullptr);
    const TuckerFactors ts = truncated_hosvd(inst.noisy, MultilinearRank{cfg.rank});
    const double fit_tsvd = fit(inst.clean, tucker_reconstruct(ts));

    for (double w : cfg.effective_omegas()) {
      const TuckerFactors tf =
          rbki_tucker(inst.noisy, cfg.effective_sketch(), MultilinearRank{cfg.rank}, cfg.q, w,
                      inst.run_seed);
      SweepRow row;
      row.run = r;
      row.omega = w;
      row.fit_rbki_tk = fit(inst.clean, tucker_reconstruct(tf));
      row.fit_tsvd = fit_tsvd;
      csv << r << ',' << format_double(w) << ',' << format_double(row.fit_rbki_tk) << ','
          << format_double(row.fit_tsvd) << '\n';
      result.rows.push_back(row);
    }
  }
  result.csv = csv.str();
  return result;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc | std::ios::binary);
    if (!os) throw std::runtime_error("cannot write output file: " + path.string());
    os << text;
    if (!os) throw std::runtime_error("write failed: " + path.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace rbki
