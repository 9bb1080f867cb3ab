#include <algorithm>
#include <numeric>
#include <string>

#include "posh/common.hpp"
#include "posh/log.hpp"
#include "posh/rng.hpp"
#include "posh/trainers.hpp"

namespace posh {
namespace {

std::uint32_t argmax_lowest(const Eigen::Ref<const Eigen::RowVectorXd>& v) {
  std::uint32_t best = 0;
  for (Eigen::Index j = 1; j < v.size(); ++j) {
    if (v(j) > v(best)) best = static_cast<std::uint32_t>(j);
  }
  return best;
}

// Unit-normalized rows; zero rows are dropped and counted.
Matrix unit_samples(const Matrix& x, std::size_t* zero_rows) {
  std::vector<Eigen::Index> keep;
  keep.reserve(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (x.row(i).squaredNorm() > 0.0) keep.push_back(i);
  }
  if (zero_rows != nullptr) *zero_rows = static_cast<std::size_t>(x.rows()) - keep.size();
  Matrix out(static_cast<Eigen::Index>(keep.size()), x.cols());
  for (std::size_t r = 0; r < keep.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = x.row(keep[r]).normalized();
  }
  return out;
}

}  // namespace

double spherical_objective(const Matrix& w, const Matrix& x) {
  const Matrix unit = unit_samples(x, nullptr);
  if (unit.rows() == 0) return 0.0;
  const Matrix scores = unit * w.transpose();
  return scores.rowwise().maxCoeff().sum();
}

double biohash_objective(const Matrix& w, const Matrix& x) {
  if (w.cols() != x.cols()) throw ArgumentError("biohash_objective: W and X disagree on d");
  Vector norms(w.rows());
  for (Eigen::Index j = 0; j < w.rows(); ++j) {
    norms(j) = w.row(j).norm();
    if (norms(j) == 0.0) {
      throw ArgumentError("biohash_objective: row " + std::to_string(j) + " of W is zero");
    }
  }
  const Matrix scores = x * w.transpose();
  double total = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const std::uint32_t j = argmax_lowest(scores.row(i));
    total += scores(i, j) / norms(j);
  }
  return total;
}

HashModel train_spherical(const Matrix& x, std::size_t code_length, const TrainConfig& config,
                          const ObjectiveObserver& observer, std::size_t* skipped_zero_inputs) {
  if (x.rows() < 1) throw ArgumentError("train_spherical: empty training set");
  if (code_length < 1) throw ArgumentError("train_spherical: D must be positive");
  std::size_t skipped = 0;
  const Matrix unit = unit_samples(x, &skipped);
  if (skipped > 0) {
    log_warning("train_spherical: skipped " + std::to_string(skipped) + " zero input vector(s)");
  }
  if (skipped_zero_inputs != nullptr) *skipped_zero_inputs = skipped;

  Matrix w = normalize_rows(gaussian_matrix(code_length, static_cast<std::size_t>(x.cols()),
                                            config.seed));
  const auto objective = [&] {
    return unit.rows() == 0 ? 0.0 : (unit * w.transpose()).rowwise().maxCoeff().sum();
  };
  if (observer) observer(0, objective());
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    Matrix m = Matrix::Zero(w.rows(), w.cols());
    const Matrix scores = unit * w.transpose();
    for (Eigen::Index i = 0; i < unit.rows(); ++i) {
      m.row(argmax_lowest(scores.row(i))) += unit.row(i);
    }
    w = normalize_rows(m);
    if (observer) observer(epoch, objective());
  }
  return make_model(Scheme::kSpherical, std::move(w), 1);
}

std::uint32_t biohash_step(Matrix& w, const Eigen::Ref<const Eigen::RowVectorXd>& sample,
                           double lr) {
  const Eigen::RowVectorXd scores = sample * w.transpose();
  const std::uint32_t j = argmax_lowest(scores);
  const double overlap = scores(j);
  w.row(j) += lr * (sample - overlap * w.row(j));
  return j;
}

HashModel train_biohash(const Matrix& x, std::size_t code_length, const BioHashConfig& config,
                        const ObjectiveObserver& observer) {
  if (!(config.lr0 > 0.0)) throw ArgumentError("train_biohash: lr0 must be positive");
  if (x.rows() < 1) throw ArgumentError("train_biohash: empty training set");
  const Matrix unit = unit_samples(x, nullptr);
  Matrix w = gaussian_matrix(code_length, static_cast<std::size_t>(x.cols()), config.seed);
  Rng order_rng(config.seed ^ 0x5bd1e9955bd1e995ULL);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(unit.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});

  const auto objective = [&] {
    try {
      return biohash_objective(w, unit);
    } catch (const ArgumentError&) {
      return 0.0;
    }
  };
  if (observer) observer(0, objective());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.lr0 * (1.0 - static_cast<double>(epoch) /
                                              static_cast<double>(config.epochs));
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[order_rng.below(i)]);
    }
    for (Eigen::Index i : order) biohash_step(w, unit.row(i), lr);
    if (observer) observer(epoch + 1, objective());
  }
  return make_model(Scheme::kBioHash, std::move(w), 1);
}

}  // namespace posh
