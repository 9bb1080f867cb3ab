#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "posh/codes.hpp"

namespace posh {

struct Neighbor {
  std::uint64_t id = 0;
  std::uint32_t distance = 0;

  bool operator==(const Neighbor&) const = default;
};

/// Hamming distance between two alpha-of-D codes, 2 alpha - 2 |a & b|. One
/// popcount when D <= 64, otherwise a merge over the sorted index lists.
std::uint32_t sparse_hamming(const SparseCode& a, const SparseCode& b);

/// Number of shared set positions of two sorted index lists.
std::uint32_t intersection_count(std::span<const std::uint32_t> a,
                                 std::span<const std::uint32_t> b);

/// Hamming-space index over fixed-popcount codes. Codes are stored as
/// contiguous alpha-wide rows of sorted u32 positions; when alpha / D > 1/8 a
/// packed bitset copy is kept as well and used for scoring.
class SparseIndex {
 public:
  SparseIndex(std::uint32_t dim, std::uint32_t alpha);

  /// Throws ArgumentError on a duplicate id or a code of the wrong shape.
  void add(std::uint64_t id, const SparseCode& code);

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::uint32_t dim() const { return dim_; }
  std::uint32_t alpha() const { return alpha_; }
  bool uses_bitsets() const { return packed_; }

  std::uint64_t id_at(std::size_t position) const { return ids_[position]; }
  std::span<const std::uint32_t> indices_at(std::size_t position) const;
  SparseCode code_at(std::size_t position) const;
  std::optional<std::size_t> position_of(std::uint64_t id) const;

  /// The k nearest codes by ascending distance, ties by ascending id.
  std::vector<Neighbor> knn_query(const SparseCode& query, std::size_t k) const;

  /// Same ranking restricted to `candidate_ids`; unknown ids are ignored.
  std::vector<Neighbor> knn_query_among(const SparseCode& query, std::size_t k,
                                        std::span<const std::uint64_t> candidate_ids) const;

  /// Independent queries over the frozen index, optionally on several threads.
  std::vector<std::vector<Neighbor>> knn_query_batch(std::span<const SparseCode> queries,
                                                     std::size_t k,
                                                     std::size_t threads = 1) const;

 private:
  void check_query(const SparseCode& query) const;
  std::uint32_t overlap(std::size_t position, const std::vector<std::uint8_t>& mask,
                        const std::vector<std::uint64_t>& query_bits) const;
  std::vector<Neighbor> select(const SparseCode& query, std::size_t k,
                               std::span<const std::size_t> positions) const;

  std::uint32_t dim_;
  std::uint32_t alpha_;
  bool packed_;
  std::size_t words_per_code_;
  std::vector<std::uint64_t> ids_;
  std::vector<std::uint32_t> indices_;
  std::vector<std::uint64_t> bits_;
  std::unordered_map<std::uint64_t, std::size_t> positions_;
};

/// Linear-scan Hamming index over packed sign codes.
class DenseIndex {
 public:
  explicit DenseIndex(std::uint32_t dim) : dim_(dim) {}

  void add(std::uint64_t id, const DenseCode& code);
  std::size_t size() const { return ids_.size(); }
  std::uint32_t dim() const { return dim_; }

  std::vector<Neighbor> knn_query(const DenseCode& query, std::size_t k) const;
  std::vector<Neighbor> knn_query_among(const DenseCode& query, std::size_t k,
                                        std::span<const std::uint64_t> candidate_ids) const;

 private:
  std::vector<Neighbor> rank(std::vector<Neighbor> scored, std::size_t k) const;

  std::uint32_t dim_;
  std::vector<std::uint64_t> ids_;
  std::vector<DenseCode> codes_;
  std::unordered_map<std::uint64_t, std::size_t> positions_;
};

// SPIX1 index file, little-endian:
//   "SPIX1" | u32 D | u32 alpha | u64 n | n x (u64 id | u32[alpha] positions)
void write_index(std::ostream& out, const SparseIndex& index);
SparseIndex read_index(std::istream& in);
void save_index(const std::filesystem::path& path, const SparseIndex& index);
SparseIndex load_index(const std::filesystem::path& path);

}  // namespace posh
