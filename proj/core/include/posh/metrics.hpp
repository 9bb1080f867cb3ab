#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <optional>
#include <vector>

#include "posh/tensor.hpp"

namespace posh {

enum class Distance { kEuclidean, kCosine };

std::string_view distance_name(Distance metric);
std::optional<Distance> parse_distance(std::string_view name);

/// Exact k nearest targets (row ids) of every query, ties by ascending id.
/// k > n is clamped to n with a warning. Cosine distance treats a zero vector
/// as orthogonal to everything.
std::vector<std::vector<std::uint64_t>> brute_force_neighbors(const Matrix& targets,
                                                              const Matrix& queries,
                                                              std::size_t k, Distance metric,
                                                              std::size_t threads = 1);

enum class RelevanceMode { kLabel, kMetric };

/// Decides which target ids are relevant to each query. Target ids are row
/// positions in the target set.
class RelevanceOracle {
 public:
  RelevanceMode mode() const { return mode_; }
  std::size_t queries() const { return query_count_; }

  bool relevant(std::size_t query, std::uint64_t target) const;
  /// Total number of relevant targets for `query` (R_q).
  std::size_t relevant_count(std::size_t query) const;

  friend RelevanceOracle build_label_oracle(std::span<const std::int64_t> target_labels,
                                            std::span<const std::int64_t> query_labels);
  friend RelevanceOracle build_metric_oracle(const Matrix& targets, const Matrix& queries,
                                             std::size_t k, Distance metric,
                                             std::size_t threads);

 private:
  RelevanceMode mode_ = RelevanceMode::kLabel;
  std::size_t query_count_ = 0;
  std::vector<std::int64_t> target_labels_;
  std::vector<std::int64_t> query_labels_;
  std::vector<std::size_t> query_relevant_;
  std::vector<std::vector<std::uint64_t>> neighbors_;  // sorted, metric mode
};

/// relevant(q, t) iff the labels agree. Negative labels mean "missing" and are
/// rejected.
RelevanceOracle build_label_oracle(std::span<const std::int64_t> target_labels,
                                   std::span<const std::int64_t> query_labels);

/// relevant(q, t) iff t is among the exact k nearest targets of q.
RelevanceOracle build_metric_oracle(const Matrix& targets, const Matrix& queries, std::size_t k,
                                    Distance metric, std::size_t threads = 1);

struct MapResult {
  double percent = 0;           // mean AP over the scored queries, x100
  std::size_t skipped = 0;      // queries with no relevant target
};

/// Mean average precision over the first n entries of each ranking. A query's
/// AP is normalised by min(n, R_q).
MapResult map_at_n(const std::vector<std::vector<std::uint64_t>>& rankings,
                   const RelevanceOracle& oracle, std::size_t n);

/// Mean over queries of (relevant among the first n) / n, x100.
double precision_at_n(const std::vector<std::vector<std::uint64_t>>& rankings,
                      const RelevanceOracle& oracle, std::size_t n);

}  // namespace posh
