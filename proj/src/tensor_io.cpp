#include "rbki/tensor_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbki {

namespace {

constexpr char kMagic[4] = {'D', 'N', 'T', '1'};

std::uint64_t to_le(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r = (r << 8) | ((v >> (8 * i)) & 0xff);
    return r;
  }
  return v;
}

void write_u64(std::ostream& os, std::uint64_t v) {
  const std::uint64_t le = to_le(v);
  os.write(reinterpret_cast<const char*>(&le), 8);
}

std::uint64_t read_u64(std::istream& is, const std::filesystem::path& path) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8))
    throw std::runtime_error("truncated tensor file: " + path.string());
  return to_le(v);
}

}  // namespace

namespace {

std::vector<Index> read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("not a DNT1 tensor file: " + path.string());

  const std::uint64_t order = read_u64(is, path);
  if (order < 1 || order > 64)
    throw std::runtime_error("implausible tensor order in " + path.string());
  std::vector<Index> shape(order);
  for (auto& d : shape) {
    const std::uint64_t dim = read_u64(is, path);
    if (dim < 1) throw std::runtime_error("zero dimension in " + path.string());
    d = static_cast<Index>(dim);
  }
  return shape;
}

}  // namespace

std::vector<Index> read_tensor_shape(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open tensor file: " + path.string());
  return read_header(is, path);
}

DenseTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open tensor file: " + path.string());

  std::vector<Index> shape = read_header(is, path);
  const Index total = shape_numel(shape);

  Vector data(total);
  static_assert(sizeof(double) == 8);
  if constexpr (std::endian::native == std::endian::little) {
    if (!is.read(reinterpret_cast<char*>(data.data()), total * 8))
      throw std::runtime_error("truncated tensor payload: " + path.string());
  } else {
    for (Index i = 0; i < total; ++i) {
      const std::uint64_t bits = read_u64(is, path);
      data(i) = std::bit_cast<double>(bits);
    }
  }
  return DenseTensor(std::move(shape), std::move(data));
}

void write_tensor(const std::filesystem::path& path, const DenseTensor& x) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write tensor file: " + path.string());
  os.write(kMagic, 4);
  write_u64(os, static_cast<std::uint64_t>(x.order()));
  for (Index d : x.shape()) write_u64(os, static_cast<std::uint64_t>(d));
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(x.data()), x.numel() * 8);
  } else {
    for (Index i = 0; i < x.numel(); ++i) write_u64(os, std::bit_cast<std::uint64_t>(x.vec()(i)));
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open manifest: " + path.string());
  Manifest m;
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    m[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return m;
}

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write manifest: " + path.string());
  for (const auto& [k, v] : m) os << k << " = " << v << '\n';
}

namespace {

std::string join_dims(const std::vector<Index>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

DenseTensor matrix_tensor(const Matrix& m) {
  return DenseTensor({m.rows(), m.cols()},
                     Eigen::Map<const Vector>(m.data(), m.size()));
}

}  // namespace

void write_tucker_dir(const std::filesystem::path& dir, const TuckerFactors& tf,
                      const Manifest& extra) {
  std::filesystem::create_directories(dir);
  Manifest m = extra;
  m["type"] = "tucker";
  m["order"] = std::to_string(tf.core.order());
  m["ranks"] = join_dims(tf.core.shape());
  std::vector<Index> dims(tf.factors.size());
  for (std::size_t n = 0; n < tf.factors.size(); ++n) dims[n] = tf.factors[n].rows();
  m["dims"] = join_dims(dims);

  write_tensor(dir / "core.dnt", tf.core);
  for (std::size_t n = 0; n < tf.factors.size(); ++n)
    write_tensor(dir / ("factor_" + std::to_string(n + 1) + ".dnt"),
                 matrix_tensor(tf.factors[n]));
  write_manifest(dir / "manifest.txt", m);
}

TuckerFactors read_tucker_dir(const std::filesystem::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("type");
  if (it == m.end() || it->second != "tucker")
    throw std::runtime_error("not a tucker factor directory: " + dir.string());

  TuckerFactors tf;
  tf.core = read_tensor(dir / "core.dnt");
  tf.factors.resize(static_cast<std::size_t>(tf.core.order()));
  for (std::size_t n = 0; n < tf.factors.size(); ++n) {
    const DenseTensor t = read_tensor(dir / ("factor_" + std::to_string(n + 1) + ".dnt"));
    if (t.order() != 2)
      throw std::runtime_error("factor file is not a matrix in " + dir.string());
    tf.factors[n] = Eigen::Map<const Matrix>(t.data(), t.shape()[0], t.shape()[1]);
  }
  return tf;
}

void write_tr_dir(const std::filesystem::path& dir, const TRFactors& f, const Manifest& extra) {
  validate_ring(f);
  std::filesystem::create_directories(dir);
  Manifest m = extra;
  m["type"] = "tensor-ring";
  m["order"] = std::to_string(f.order());
  m["dims"] = join_dims(f.dims());
  m["ranks"] = join_dims(f.ranks());
  for (std::size_t n = 0; n < f.cores.size(); ++n)
    write_tensor(dir / ("core_" + std::to_string(n + 1) + ".dnt"), f.cores[n]);
  write_manifest(dir / "manifest.txt", m);
}

TRFactors read_tr_dir(const std::filesystem::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("type");
  if (it == m.end() || it->second != "tensor-ring")
    throw std::runtime_error("not a tensor-ring factor directory: " + dir.string());
  const auto ord = m.find("order");
  if (ord == m.end()) throw std::runtime_error("manifest missing order: " + dir.string());

  TRFactors f;
  f.cores.resize(std::stoul(ord->second));
  for (std::size_t n = 0; n < f.cores.size(); ++n)
    f.cores[n] = read_tensor(dir / ("core_" + std::to_string(n + 1) + ".dnt"));
  validate_ring(f);
  return f;
}

DenseTensor reconstruct_dir(const std::filesystem::path& dir) {
  const Manifest m = read_manifest(dir / "manifest.txt");
  const auto it = m.find("type");
  if (it == m.end()) throw std::runtime_error("manifest missing type: " + dir.string());
  if (it->second == "tucker") return tucker_reconstruct(read_tucker_dir(dir));
  if (it->second == "tensor-ring") return tr_reconstruct(read_tr_dir(dir));
  throw std::runtime_error("unknown factor directory type: " + it->second);
}

}  // namespace rbki
