#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <string>

#include "binary_io.hpp"
#include "posh/common.hpp"
#include "posh/parallel.hpp"
#include "posh/sparse_index.hpp"

namespace posh {
namespace {

constexpr char kMagic[5] = {'S', 'P', 'I', 'X', '1'};

bool by_distance_then_id(const Neighbor& l, const Neighbor& r) {
  return l.distance < r.distance || (l.distance == r.distance && l.id < r.id);
}

}  // namespace

std::uint32_t intersection_count(std::span<const std::uint32_t> a,
                                 std::span<const std::uint32_t> b) {
  // Branch-free merge: the comparisons are data dependent and mispredict badly.
  std::uint32_t shared = 0;
  const std::uint32_t* ia = a.data();
  const std::uint32_t* ib = b.data();
  const std::uint32_t* const ea = ia + a.size();
  const std::uint32_t* const eb = ib + b.size();
  while (ia != ea && ib != eb) {
    const std::uint32_t x = *ia;
    const std::uint32_t y = *ib;
    shared += x == y;
    ia += x <= y;
    ib += y <= x;
  }
  return shared;
}

namespace {

[[noreturn, gnu::cold, gnu::noinline]] void throw_shape_mismatch(const SparseCode& a,
                                                                const SparseCode& b) {
  if (a.dim != b.dim) {
    throw ArgumentError("sparse_hamming: code lengths differ (" + std::to_string(a.dim) + " vs " +
                        std::to_string(b.dim) + ")");
  }
  throw ArgumentError("sparse_hamming: alpha differs (" + std::to_string(a.alpha()) + " vs " +
                      std::to_string(b.alpha()) + ")");
}

}  // namespace

std::uint32_t sparse_hamming(const SparseCode& a, const SparseCode& b) {
  if (a.dim != b.dim || a.alpha() != b.alpha()) throw_shape_mismatch(a, b);
  const auto alpha = static_cast<std::uint32_t>(a.alpha());
  if (a.dim <= 64) {
    // short codes fit one word: the distance is a single popcount
    std::uint64_t ma = 0;
    std::uint64_t mb = 0;
    for (std::uint32_t j : a.indices) ma |= std::uint64_t{1} << j;
    for (std::uint32_t j : b.indices) mb |= std::uint64_t{1} << j;
    return static_cast<std::uint32_t>(std::popcount(ma ^ mb));
  }
  return 2 * alpha - 2 * intersection_count(a.indices, b.indices);
}

SparseIndex::SparseIndex(std::uint32_t dim, std::uint32_t alpha)
    : dim_(dim),
      alpha_(alpha),
      packed_(static_cast<std::uint64_t>(alpha) * 8 > dim),
      words_per_code_((dim + 63) / 64) {
  if (alpha < 1 || alpha > dim) {
    throw ArgumentError("SparseIndex: alpha=" + std::to_string(alpha) + " outside [1, " +
                        std::to_string(dim) + "]");
  }
}

void SparseIndex::add(std::uint64_t id, const SparseCode& code) {
  if (code.dim != dim_ || code.alpha() != alpha_) {
    throw ArgumentError("SparseIndex::add: code shape (" + std::to_string(code.dim) + ", " +
                        std::to_string(code.alpha()) + ") does not match index (" +
                        std::to_string(dim_) + ", " + std::to_string(alpha_) + ")");
  }
  validate_code(code);
  if (!positions_.emplace(id, ids_.size()).second) {
    throw ArgumentError("SparseIndex::add: duplicate id " + std::to_string(id));
  }
  ids_.push_back(id);
  indices_.insert(indices_.end(), code.indices.begin(), code.indices.end());
  if (packed_) {
    const std::size_t base = bits_.size();
    bits_.resize(base + words_per_code_, 0);
    for (std::uint32_t j : code.indices) bits_[base + j / 64] |= std::uint64_t{1} << (j % 64);
  }
}

std::span<const std::uint32_t> SparseIndex::indices_at(std::size_t position) const {
  return {indices_.data() + position * alpha_, alpha_};
}

SparseCode SparseIndex::code_at(std::size_t position) const {
  const auto span = indices_at(position);
  return SparseCode{dim_, std::vector<std::uint32_t>(span.begin(), span.end())};
}

std::optional<std::size_t> SparseIndex::position_of(std::uint64_t id) const {
  const auto it = positions_.find(id);
  if (it == positions_.end()) return std::nullopt;
  return it->second;
}

void SparseIndex::check_query(const SparseCode& query) const {
  if (query.dim != dim_ || query.alpha() != alpha_) {
    throw ArgumentError("SparseIndex: query shape (" + std::to_string(query.dim) + ", " +
                        std::to_string(query.alpha()) + ") does not match index");
  }
}

std::uint32_t SparseIndex::overlap(std::size_t position, const std::vector<std::uint8_t>& mask,
                                   const std::vector<std::uint64_t>& query_bits) const {
  std::uint32_t shared = 0;
  if (packed_) {
    const std::uint64_t* row = bits_.data() + position * words_per_code_;
    for (std::size_t w = 0; w < words_per_code_; ++w) {
      shared += static_cast<std::uint32_t>(std::popcount(row[w] & query_bits[w]));
    }
  } else {
    const std::uint32_t* row = indices_.data() + position * alpha_;
    for (std::uint32_t t = 0; t < alpha_; ++t) shared += mask[row[t]];
  }
  return shared;
}

// Distances take only alpha + 1 values, so the k-th smallest is found with a
// histogram over overlaps; only the entries at or above the cutoff are sorted.
std::vector<Neighbor> SparseIndex::select(const SparseCode& query, std::size_t k,
                                          std::span<const std::size_t> positions) const {
  if (k == 0 || positions.empty()) return {};
  std::vector<std::uint8_t> mask;
  std::vector<std::uint64_t> query_bits;
  if (packed_) {
    query_bits.assign(words_per_code_, 0);
    for (std::uint32_t j : query.indices) query_bits[j / 64] |= std::uint64_t{1} << (j % 64);
  } else {
    mask.assign(dim_, 0);
    for (std::uint32_t j : query.indices) mask[j] = 1;
  }

  std::vector<std::uint32_t> shared(positions.size());
  std::vector<std::size_t> histogram(alpha_ + 1, 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    shared[i] = overlap(positions[i], mask, query_bits);
    ++histogram[shared[i]];
  }
  std::uint32_t cutoff = alpha_;
  std::size_t covered = histogram[alpha_];
  while (covered < k && cutoff > 0) {
    --cutoff;
    covered += histogram[cutoff];
  }

  std::vector<Neighbor> out;
  out.reserve(std::min(covered, positions.size()));
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (shared[i] >= cutoff) out.push_back({ids_[positions[i]], 2 * alpha_ - 2 * shared[i]});
  }
  std::sort(out.begin(), out.end(), by_distance_then_id);
  if (out.size() > k) out.resize(k);
  return out;
}

std::vector<Neighbor> SparseIndex::knn_query(const SparseCode& query, std::size_t k) const {
  check_query(query);
  std::vector<std::size_t> all(ids_.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return select(query, k, all);
}

std::vector<Neighbor> SparseIndex::knn_query_among(
    const SparseCode& query, std::size_t k, std::span<const std::uint64_t> candidate_ids) const {
  check_query(query);
  std::vector<std::size_t> positions;
  positions.reserve(candidate_ids.size());
  for (std::uint64_t id : candidate_ids) {
    if (auto p = position_of(id)) positions.push_back(*p);
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  return select(query, k, positions);
}

std::vector<std::vector<Neighbor>> SparseIndex::knn_query_batch(
    std::span<const SparseCode> queries, std::size_t k, std::size_t threads) const {
  std::vector<std::vector<Neighbor>> out(queries.size());
  parallel_for(queries.size(), threads, [&](std::size_t i) { out[i] = knn_query(queries[i], k); });
  return out;
}

void DenseIndex::add(std::uint64_t id, const DenseCode& code) {
  if (code.dim != dim_) throw ArgumentError("DenseIndex::add: code length mismatch");
  if (!positions_.emplace(id, ids_.size()).second) {
    throw ArgumentError("DenseIndex::add: duplicate id " + std::to_string(id));
  }
  ids_.push_back(id);
  codes_.push_back(code);
}

std::vector<Neighbor> DenseIndex::rank(std::vector<Neighbor> scored, std::size_t k) const {
  k = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    by_distance_then_id);
  scored.resize(k);
  return scored;
}

std::vector<Neighbor> DenseIndex::knn_query(const DenseCode& query, std::size_t k) const {
  std::vector<Neighbor> scored(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    scored[i] = {ids_[i], dense_hamming(query, codes_[i])};
  }
  return rank(std::move(scored), k);
}

std::vector<Neighbor> DenseIndex::knn_query_among(
    const DenseCode& query, std::size_t k, std::span<const std::uint64_t> candidate_ids) const {
  std::vector<Neighbor> scored;
  scored.reserve(candidate_ids.size());
  for (std::uint64_t id : candidate_ids) {
    const auto it = positions_.find(id);
    if (it == positions_.end()) continue;
    scored.push_back({id, dense_hamming(query, codes_[it->second])});
  }
  std::sort(scored.begin(), scored.end(), by_distance_then_id);
  scored.erase(std::unique(scored.begin(), scored.end()), scored.end());
  return rank(std::move(scored), k);
}

void write_index(std::ostream& out, const SparseIndex& index) {
  out.write(kMagic, sizeof(kMagic));
  detail::put_le(out, index.dim());
  detail::put_le(out, index.alpha());
  detail::put_le(out, static_cast<std::uint64_t>(index.size()));
  for (std::size_t p = 0; p < index.size(); ++p) {
    detail::put_le(out, index.id_at(p));
    for (std::uint32_t j : index.indices_at(p)) detail::put_le(out, j);
  }
}

SparseIndex read_index(std::istream& in) {
  detail::Reader reader(in, "SPIX1 index");
  char magic[sizeof(kMagic)];
  reader.bytes(magic, sizeof(magic));
  if (!std::equal(std::begin(magic), std::end(magic), std::begin(kMagic))) {
    throw ParseError("SPIX1 index: bad magic bytes", 0);
  }
  const auto dim = reader.le<std::uint32_t>();
  const auto alpha = reader.le<std::uint32_t>();
  if (alpha < 1 || alpha > dim) reader.fail("alpha outside [1, D]");
  const auto n = reader.le<std::uint64_t>();
  SparseIndex index(dim, alpha);
  SparseCode code{dim, std::vector<std::uint32_t>(alpha)};
  for (std::uint64_t r = 0; r < n; ++r) {
    const std::uint64_t record_offset = reader.offset();
    const auto id = reader.le<std::uint64_t>();
    for (auto& j : code.indices) j = reader.le<std::uint32_t>();
    try {
      index.add(id, code);
    } catch (const ArgumentError& e) {
      throw ParseError(std::string("SPIX1 index: invalid record at byte ") +
                           std::to_string(record_offset) + ": " + e.what(),
                       record_offset);
    }
  }
  if (!reader.at_end()) reader.fail("trailing bytes after index");
  return index;
}

void save_index(const std::filesystem::path& path, const SparseIndex& index) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    write_index(out, index);
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  } catch (...) {
    std::error_code ignored;
    std::filesystem::remove(tmp, ignored);
    throw;
  }
  std::filesystem::rename(tmp, path);
}

SparseIndex load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open index file " + path.string());
  return read_index(in);
}

}  // namespace posh
