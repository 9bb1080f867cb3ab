#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_map>
#include <utility>

#include "posh/common.hpp"
#include "posh/log.hpp"
#include "posh/metrics.hpp"
#include "posh/parallel.hpp"

namespace posh {
namespace {

void check_rankings(const std::vector<std::vector<std::uint64_t>>& rankings,
                    const RelevanceOracle& oracle, std::size_t n, const char* who) {
  if (n < 1) throw ArgumentError(std::string(who) + ": n must be at least 1");
  if (rankings.size() != oracle.queries()) {
    throw ArgumentError(std::string(who) + ": " + std::to_string(rankings.size()) +
                        " rankings for " + std::to_string(oracle.queries()) + " queries");
  }
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    if (rankings[q].empty()) {
      throw ArgumentError(std::string(who) + ": ranking of query " + std::to_string(q) +
                          " is empty");
    }
  }
}

}  // namespace

std::string_view distance_name(Distance metric) {
  return metric == Distance::kEuclidean ? "euclidean" : "cosine";
}

std::optional<Distance> parse_distance(std::string_view name) {
  if (name == "euclidean") return Distance::kEuclidean;
  if (name == "cosine") return Distance::kCosine;
  return std::nullopt;
}

std::vector<std::vector<std::uint64_t>> brute_force_neighbors(const Matrix& targets,
                                                              const Matrix& queries,
                                                              std::size_t k, Distance metric,
                                                              std::size_t threads) {
  if (targets.cols() != queries.cols()) {
    throw ArgumentError("brute_force_neighbors: targets have " + std::to_string(targets.cols()) +
                        " columns, queries " + std::to_string(queries.cols()));
  }
  const auto n = static_cast<std::size_t>(targets.rows());
  if (k > n) {
    log_warning("brute_force_neighbors: k=" + std::to_string(k) + " exceeds " +
                std::to_string(n) + " targets, clamped");
    k = n;
  }
  Vector target_norms;
  if (metric == Distance::kCosine) target_norms = targets.rowwise().norm();

  std::vector<std::vector<std::uint64_t>> out(static_cast<std::size_t>(queries.rows()));
  parallel_for(out.size(), threads, [&](std::size_t q) {
    const auto query = queries.row(static_cast<Eigen::Index>(q));
    const double query_norm = query.norm();
    std::vector<std::pair<double, std::uint64_t>> scored(n);
    for (std::size_t t = 0; t < n; ++t) {
      const auto target = targets.row(static_cast<Eigen::Index>(t));
      double dist = 0;
      if (metric == Distance::kEuclidean) {
        dist = (target - query).squaredNorm();
      } else {
        const double denom = query_norm * target_norms(static_cast<Eigen::Index>(t));
        dist = 1.0 - (denom > 0 ? target.dot(query) / denom : 0.0);
      }
      scored[t] = {dist, t};
    }
    std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                      scored.end());
    out[q].resize(k);
    for (std::size_t i = 0; i < k; ++i) out[q][i] = scored[i].second;
  });
  return out;
}

bool RelevanceOracle::relevant(std::size_t query, std::uint64_t target) const {
  if (mode_ == RelevanceMode::kLabel) {
    return target < target_labels_.size() && target_labels_[target] == query_labels_[query];
  }
  return std::binary_search(neighbors_[query].begin(), neighbors_[query].end(), target);
}

std::size_t RelevanceOracle::relevant_count(std::size_t query) const {
  return query_relevant_[query];
}

RelevanceOracle build_label_oracle(std::span<const std::int64_t> target_labels,
                                   std::span<const std::int64_t> query_labels) {
  const auto check = [](std::span<const std::int64_t> labels, const char* what) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] < 0) {
        throw ArgumentError(std::string("build_label_oracle: missing label for ") + what + " " +
                            std::to_string(i));
      }
    }
  };
  check(target_labels, "target");
  check(query_labels, "query");

  RelevanceOracle oracle;
  oracle.mode_ = RelevanceMode::kLabel;
  oracle.query_count_ = query_labels.size();
  oracle.target_labels_.assign(target_labels.begin(), target_labels.end());
  oracle.query_labels_.assign(query_labels.begin(), query_labels.end());
  std::unordered_map<std::int64_t, std::size_t> counts;
  for (std::int64_t label : target_labels) ++counts[label];
  oracle.query_relevant_.resize(query_labels.size());
  for (std::size_t q = 0; q < query_labels.size(); ++q) {
    const auto it = counts.find(query_labels[q]);
    oracle.query_relevant_[q] = it == counts.end() ? 0 : it->second;
  }
  return oracle;
}

RelevanceOracle build_metric_oracle(const Matrix& targets, const Matrix& queries, std::size_t k,
                                    Distance metric, std::size_t threads) {
  RelevanceOracle oracle;
  oracle.mode_ = RelevanceMode::kMetric;
  oracle.query_count_ = static_cast<std::size_t>(queries.rows());
  oracle.neighbors_ = brute_force_neighbors(targets, queries, k, metric, threads);
  oracle.query_relevant_.resize(oracle.query_count_);
  for (std::size_t q = 0; q < oracle.query_count_; ++q) {
    std::sort(oracle.neighbors_[q].begin(), oracle.neighbors_[q].end());
    oracle.query_relevant_[q] = oracle.neighbors_[q].size();
  }
  return oracle;
}

MapResult map_at_n(const std::vector<std::vector<std::uint64_t>>& rankings,
                   const RelevanceOracle& oracle, std::size_t n) {
  check_rankings(rankings, oracle, n, "map_at_n");
  MapResult result;
  double total = 0;
  std::size_t scored = 0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    const std::size_t relevant_total = oracle.relevant_count(q);
    if (relevant_total == 0) {
      ++result.skipped;
      continue;
    }
    const std::size_t depth = std::min(n, rankings[q].size());
    double sum = 0;
    std::size_t hits = 0;
    for (std::size_t r = 0; r < depth; ++r) {
      if (oracle.relevant(q, rankings[q][r])) {
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(r + 1);
      }
    }
    total += sum / static_cast<double>(std::min(n, relevant_total));
    ++scored;
  }
  result.percent = scored == 0 ? 0.0 : 100.0 * total / static_cast<double>(scored);
  return result;
}

double precision_at_n(const std::vector<std::vector<std::uint64_t>>& rankings,
                      const RelevanceOracle& oracle, std::size_t n) {
  check_rankings(rankings, oracle, n, "precision_at_n");
  if (rankings.empty()) return 0.0;
  double total = 0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    const std::size_t depth = std::min(n, rankings[q].size());
    std::size_t hits = 0;
    for (std::size_t r = 0; r < depth; ++r) hits += oracle.relevant(q, rankings[q][r]) ? 1 : 0;
    total += static_cast<double>(hits) / static_cast<double>(n);
  }
  return 100.0 * total / static_cast<double>(rankings.size());
}

}  // namespace posh
