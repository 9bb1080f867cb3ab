#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posh/tensor.hpp"

namespace posh {

/// Feature vectors with optional class labels (empty when absent).
struct Dataset {
  Matrix features;
  std::vector<std::int64_t> labels;
  std::string name;
  bool synthetic = false;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  bool has_labels() const { return !labels.empty(); }
};

// Loaders throw ParseError carrying a byte offset (binary) or 1-based line
// number (csv). An empty file yields an empty dataset.

/// Records of little-endian i32 dim followed by dim f32 values; every record
/// must share the same dim.
Dataset load_fvecs(const std::filesystem::path& path);
void write_fvecs(const std::filesystem::path& path, const Matrix& x);

/// Same layout with i32 payloads (ground-truth lists, label files).
std::vector<std::vector<std::int32_t>> load_ivecs(const std::filesystem::path& path);
void write_ivecs(const std::filesystem::path& path,
                 const std::vector<std::vector<std::int32_t>>& rows);

/// Comma-separated values with a header row. When `label_column` names a
/// header field, that column holds integer labels and is excluded from the
/// features.
Dataset load_csv(const std::filesystem::path& path,
                 const std::optional<std::string>& label_column = std::nullopt);

/// Headerless little-endian f32 matrix; n is the file size over 4 d.
Dataset load_raw_f32(const std::filesystem::path& path, std::size_t d);
void write_raw_f32(const std::filesystem::path& path, const Matrix& x);

/// Row subset in the given id order.
Dataset subset(const Dataset& data, std::span<const std::uint64_t> ids);

struct Split {
  std::vector<std::uint64_t> train;   // sampled from target, ascending
  std::vector<std::uint64_t> target;  // ascending
  std::vector<std::uint64_t> query;   // ascending, disjoint from target
};

inline constexpr std::size_t kDefaultTrainSize = 5000;

/// Draws `query_size` queries uniformly without replacement, leaves the rest as
/// targets, and samples `train_size` training ids from the targets.
Split make_split(std::size_t n, std::size_t train_size, std::uint64_t seed,
                 std::size_t query_size = 0);

/// `count` distinct values of [0, n) in ascending order.
std::vector<std::uint64_t> sample_without_replacement(std::size_t n, std::size_t count,
                                                      std::uint64_t seed);

/// classes * per_class labelled points around centers drawn uniformly on the
/// sphere of radius `separation`; each point is center + noise * N(0, I).
Dataset synth_gaussian_mixture(std::size_t classes, std::size_t per_class, std::size_t d,
                               double separation, double noise, std::uint64_t seed);

}  // namespace posh
