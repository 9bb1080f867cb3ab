#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "posh/coarse.hpp"
#include "posh/common.hpp"
#include "posh/rng.hpp"

namespace posh {
namespace {

std::uint32_t nearest(const Matrix& centroids, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  std::uint32_t best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double dist = (centroids.row(c) - x).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = static_cast<std::uint32_t>(c);
    }
  }
  return best;
}

Matrix seed_plus_plus(const Matrix& x, std::size_t cells, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  Matrix centroids(static_cast<Eigen::Index>(cells), x.cols());
  centroids.row(0) = x.row(static_cast<Eigen::Index>(rng.below(n)));
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = (x.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();
  }
  for (std::size_t c = 1; c < cells; ++c) {
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (pick = 0; pick + 1 < n; ++pick) {
        target -= dist[pick];
        if (target < 0.0) break;
      }
    } else {
      pick = rng.below(n);
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i) {
      dist[i] = std::min(dist[i], (x.row(static_cast<Eigen::Index>(i)) -
                                   centroids.row(static_cast<Eigen::Index>(c)))
                                      .squaredNorm());
    }
  }
  return centroids;
}

}  // namespace

std::size_t coarse_cell_count(std::size_t n) {
  return std::max<std::size_t>(1, (n + kCoarseCellSize - 1) / kCoarseCellSize);
}

CoarseQuantizer coarse_fit(const Matrix& x, std::uint64_t seed, std::span<const std::uint64_t> ids,
                           std::size_t iterations) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (n < 1) throw ArgumentError("coarse_fit: need at least one sample");
  if (!ids.empty() && ids.size() != n) {
    throw ArgumentError("coarse_fit: " + std::to_string(ids.size()) + " ids for " +
                        std::to_string(n) + " samples");
  }
  CoarseQuantizer q;
  q.ids.resize(n);
  if (ids.empty()) {
    std::iota(q.ids.begin(), q.ids.end(), std::uint64_t{0});
  } else {
    std::copy(ids.begin(), ids.end(), q.ids.begin());
  }
  const std::size_t cells = std::min(coarse_cell_count(n), n);
  Rng rng(seed);
  q.centroids = seed_plus_plus(x, cells, rng);
  q.assignments.assign(n, 0);

  const auto assign = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      q.assignments[i] = nearest(q.centroids, x.row(static_cast<Eigen::Index>(i)));
    }
  };
  for (std::size_t it = 0; it < iterations; ++it) {
    assign();
    Matrix sums = Matrix::Zero(q.centroids.rows(), q.centroids.cols());
    std::vector<std::size_t> counts(cells, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(q.assignments[i]) += x.row(static_cast<Eigen::Index>(i));
      ++counts[q.assignments[i]];
    }
    for (std::size_t c = 0; c < cells; ++c) {
      if (counts[c] > 0) {
        q.centroids.row(static_cast<Eigen::Index>(c)) =
            sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
      }
    }
  }
  assign();

  q.lists.assign(cells, {});
  for (std::size_t i = 0; i < n; ++i) q.lists[q.assignments[i]].push_back(q.ids[i]);
  for (auto& list : q.lists) std::sort(list.begin(), list.end());
  return q;
}

std::vector<std::uint64_t> coarse_probe(const CoarseQuantizer& quantizer,
                                        std::span<const double> query, std::size_t nprobe) {
  if (nprobe < 1) throw ArgumentError("coarse_probe: nprobe must be at least 1");
  if (static_cast<Eigen::Index>(query.size()) != quantizer.centroids.cols()) {
    throw ArgumentError("coarse_probe: query dimension mismatch");
  }
  const std::size_t cells = quantizer.cells();
  nprobe = std::min(nprobe, cells);
  const Eigen::Map<const Eigen::RowVectorXd> q(query.data(), static_cast<Eigen::Index>(query.size()));
  std::vector<std::pair<double, std::size_t>> order(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    order[c] = {(quantizer.centroids.row(static_cast<Eigen::Index>(c)) - q).squaredNorm(), c};
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(nprobe), order.end());
  std::vector<std::uint64_t> out;
  for (std::size_t p = 0; p < nprobe; ++p) {
    const auto& list = quantizer.lists[order[p].second];
    out.insert(out.end(), list.begin(), list.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace posh
