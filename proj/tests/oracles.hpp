#pragma once

// Slow, obviously-correct reference implementations used only by tests.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posh/rng.hpp"
#include "posh/tensor.hpp"

namespace posh::oracle {

/// Minimizes ||h - y||^2 over every binary h with exactly alpha ones by
/// enumerating subsets in lexicographic order; the first minimizer wins.
inline std::vector<std::uint32_t> exhaustive_wta(const std::vector<double>& y, std::size_t alpha) {
  const std::size_t D = y.size();
  std::vector<std::uint32_t> pick(alpha);
  std::iota(pick.begin(), pick.end(), 0U);
  std::vector<std::uint32_t> best;
  double best_loss = std::numeric_limits<double>::infinity();
  for (;;) {
    std::vector<double> h(D, 0.0);
    for (auto j : pick) h[j] = 1.0;
    double loss = 0;
    for (std::size_t i = 0; i < D; ++i) loss += (h[i] - y[i]) * (h[i] - y[i]);
    if (loss < best_loss) {
      best_loss = loss;
      best = pick;
    }
    // next combination
    std::size_t i = alpha;
    while (i > 0 && pick[i - 1] == D - alpha + i - 1) --i;
    if (i == 0) break;
    ++pick[i - 1];
    for (std::size_t j = i; j < alpha; ++j) pick[j] = pick[j - 1] + 1;
  }
  return best;
}

/// Hamming distance of two index lists via explicit 0/1 vectors.
inline std::uint32_t dense_hamming_of(const std::vector<std::uint32_t>& a,
                                      const std::vector<std::uint32_t>& b, std::size_t D) {
  std::vector<int> va(D, 0), vb(D, 0);
  for (auto j : a) va[j] = 1;
  for (auto j : b) vb[j] = 1;
  std::uint32_t d = 0;
  for (std::size_t i = 0; i < D; ++i) d += va[i] != vb[i] ? 1U : 0U;
  return d;
}

/// Singular values as square roots of the eigenvalues of Mt M, descending.
inline Eigen::VectorXd singular_values(const Matrix& m) {
  const Eigen::MatrixXd gram = m.rows() >= m.cols() ? Eigen::MatrixXd(m.transpose() * m)
                                                    : Eigen::MatrixXd(m * m.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(s.data(), s.data() + s.size(), std::greater<>());
  return s;
}

/// Quadratic scan: ids sorted by (distance, id).
inline std::vector<std::uint64_t> scan_neighbors(const Matrix& targets,
                                                 const Eigen::RowVectorXd& q, std::size_t k,
                                                 bool cosine) {
  std::vector<std::pair<double, std::uint64_t>> all;
  for (Eigen::Index t = 0; t < targets.rows(); ++t) {
    double dist = 0;
    if (cosine) {
      const double nn = targets.row(t).norm() * q.norm();
      dist = 1.0 - (nn > 0 ? targets.row(t).dot(q) / nn : 0.0);
    } else {
      for (Eigen::Index j = 0; j < q.size(); ++j) {
        dist += (targets(t, j) - q(j)) * (targets(t, j) - q(j));
      }
    }
    all.push_back({dist, static_cast<std::uint64_t>(t)});
  }
  // insertion sort keeps the reference independent of std::sort tie handling
  for (std::size_t i = 1; i < all.size(); ++i) {
    for (std::size_t j = i; j > 0 && all[j] < all[j - 1]; --j) std::swap(all[j], all[j - 1]);
  }
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
  return out;
}

/// AP@n written from the definition: for every rank r <= n holding a relevant
/// item, count the relevant items in ranks 1..r again from scratch.
inline double reference_ap(const std::vector<std::uint64_t>& ranking,
                           const std::vector<bool>& relevant_by_id, std::size_t n) {
  std::size_t total_relevant = 0;
  for (bool r : relevant_by_id) total_relevant += r ? 1 : 0;
  double sum = 0;
  for (std::size_t r = 0; r < std::min(n, ranking.size()); ++r) {
    if (!relevant_by_id[ranking[r]]) continue;
    std::size_t hits = 0;
    for (std::size_t s = 0; s <= r; ++s) hits += relevant_by_id[ranking[s]] ? 1 : 0;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(std::min(n, total_relevant));
}

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

inline std::vector<std::uint32_t> random_subset(std::size_t D, std::size_t alpha, Rng& rng) {
  std::vector<std::uint32_t> all(D);
  std::iota(all.begin(), all.end(), 0U);
  for (std::size_t i = 0; i < alpha; ++i) std::swap(all[i], all[i + rng.below(D - i)]);
  all.resize(alpha);
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace posh::oracle
