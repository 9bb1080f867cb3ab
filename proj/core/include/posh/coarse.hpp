#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "posh/tensor.hpp"

namespace posh {

/// k-means partition of the database used to prune queries to a few cells.
struct CoarseQuantizer {
  Matrix centroids;                            // C x d
  std::vector<std::uint64_t> ids;              // one per fitted sample
  std::vector<std::uint32_t> assignments;      // centroid of ids[i]
  std::vector<std::vector<std::uint64_t>> lists;  // members per centroid, ascending id

  std::size_t cells() const { return static_cast<std::size_t>(centroids.rows()); }
};

inline constexpr std::size_t kCoarseCellSize = 1000;
inline constexpr std::size_t kCoarseIterations = 25;
inline constexpr std::size_t kDefaultProbes = 20;

/// ceil(n / 1000), at least one cell.
std::size_t coarse_cell_count(std::size_t n);

/// k-means++ seeding followed by Lloyd iterations; empty cells keep their
/// previous centroid. Every sample ends up assigned to its nearest centroid
/// (lowest centroid index on ties). `ids` defaults to 0..n-1.
CoarseQuantizer coarse_fit(const Matrix& x, std::uint64_t seed,
                           std::span<const std::uint64_t> ids = {},
                           std::size_t iterations = kCoarseIterations);

/// Ids in the `nprobe` cells nearest to the query, sorted ascending. nprobe is
/// clamped to the number of cells.
std::vector<std::uint64_t> coarse_probe(const CoarseQuantizer& quantizer,
                                        std::span<const double> query, std::size_t nprobe);

}  // namespace posh
