#include <algorithm>
#include <string>

#include "posh/common.hpp"
#include "posh/log.hpp"
#include "posh/trainers.hpp"

namespace posh {

double posh_objective(const Matrix& w, const Matrix& x, std::size_t alpha) {
  if (w.cols() != x.cols()) throw ArgumentError("posh_objective: W and X disagree on d");
  const Matrix projected = x * w.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < projected.rows(); ++i) {
    const auto row = projected.row(i);
    const SparseCode code = wta(std::span<const double>(row.data(), row.size()), alpha);
    // ||h - y||^2 = ||y||^2 + sum over set bits of (1 - 2 y_j)
    double value = row.squaredNorm();
    for (std::uint32_t j : code.indices) value += 1.0 - 2.0 * row(j);
    total += value;
  }
  return total;
}

HashModel train_posh(const Matrix& x, std::size_t code_length, std::size_t alpha,
                     const TrainConfig& config, const ObjectiveObserver& observer) {
  const auto d = static_cast<std::size_t>(x.cols());
  const auto n = static_cast<std::size_t>(x.rows());
  if (code_length < d) {
    throw ArgumentError("train_posh: D=" + std::to_string(code_length) + " < d=" +
                        std::to_string(d));
  }
  if (alpha < 1 || alpha > code_length) {
    throw ArgumentError("train_posh: alpha=" + std::to_string(alpha) + " outside [1, D]");
  }
  if (n == 0) throw ArgumentError("train_posh: empty training set");

  HashModel model = gaussian_orthogonal_init(d, code_length, config.seed, alpha);
  Matrix& w = model.W;
  Matrix m = w;
  const std::size_t batch = config.full_batch ? n : std::max<std::size_t>(config.mini_batch, 1);
  bool warned = false;

  const auto update_w = [&] {
    bool rank_deficient = false;
    w = orthogonalize(m, &rank_deficient);
    if (rank_deficient && !warned) {
      log_warning("train_posh: accumulator is rank deficient");
      warned = true;
    }
  };

  if (observer) observer(0, posh_objective(w, x, alpha));
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    if (config.full_batch) m.setZero();
    for (std::size_t start = 0; start < n; start += batch) {
      const auto len = static_cast<Eigen::Index>(std::min(batch, n - start));
      const auto block = x.middleRows(static_cast<Eigen::Index>(start), len);
      const Matrix projected = block * w.transpose();
      for (Eigen::Index r = 0; r < len; ++r) {
        const auto row = projected.row(r);
        const SparseCode code = wta(std::span<const double>(row.data(), row.size()), alpha);
        for (std::uint32_t j : code.indices) m.row(j) += block.row(r);
      }
      update_w();
    }
    if (observer) observer(epoch, posh_objective(w, x, alpha));
  }
  return model;
}

}  // namespace posh
