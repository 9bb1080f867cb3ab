#pragma once

#include <filesystem>
#include <iosfwd>

#include "posh/hash_model.hpp"

namespace posh {

// POSH1 model file, all integers and reals little-endian:
//   "POSH1" | u8 scheme | u32 d | u32 D | u32 alpha | f64[d] center
//   | u8 has_pca [ u32 k | f64[d] mean | f64[k*d] components ]
//   | f64[D * (has_pca ? k : d)] W, row-major

void write_model(std::ostream& out, const HashModel& model);
HashModel read_model(std::istream& in);

/// Writes through a temporary file and renames, so a failed write leaves no
/// partial file behind.
void save_model(const std::filesystem::path& path, const HashModel& model);
HashModel load_model(const std::filesystem::path& path);

}  // namespace posh
