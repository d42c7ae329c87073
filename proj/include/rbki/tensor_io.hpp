#pragma once

#include "rbki/tensor.hpp"
#include "rbki/tring.hpp"
#include "rbki/tucker.hpp"

#include <filesystem>
#include <map>
#include <string>

namespace rbki {

/// Binary tensor file format "DNT1":
///   bytes 0..3   magic "DNT1"
///   bytes 4..11  order N, unsigned 64-bit little-endian
///   next N*8     dimension sizes, unsigned 64-bit little-endian
///   payload      numel doubles, IEEE-754 64-bit little-endian, canonical
///                (first index fastest) order
DenseTensor read_tensor(const std::filesystem::path& path);
void write_tensor(const std::filesystem::path& path, const DenseTensor& x);

/// Reads only the header and returns the stored shape.
std::vector<Index> read_tensor_shape(const std::filesystem::path& path);

/// Plain-text key/value manifest (one "key = value" per line).
using Manifest = std::map<std::string, std::string>;
Manifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& m);

/// Tucker factors as a directory: manifest.txt, core.dnt, factor_<n>.dnt.
/// `extra` entries are merged into the manifest (solver settings etc.).
void write_tucker_dir(const std::filesystem::path& dir, const TuckerFactors& tf,
                      const Manifest& extra = {});
TuckerFactors read_tucker_dir(const std::filesystem::path& dir);

/// Tensor ring factors as a directory: manifest.txt, core_<n>.dnt.
void write_tr_dir(const std::filesystem::path& dir, const TRFactors& f,
                  const Manifest& extra = {});
TRFactors read_tr_dir(const std::filesystem::path& dir);

/// Reads manifest.txt and dispatches on its `type` entry ("tucker" or
/// "tensor-ring"), reconstructing the stored decomposition.
DenseTensor reconstruct_dir(const std::filesystem::path& dir);

}  // namespace rbki
