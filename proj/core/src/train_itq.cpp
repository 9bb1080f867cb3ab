#include <algorithm>
#include <numeric>
#include <string>

#include "posh/common.hpp"
#include "posh/parallel.hpp"
#include "posh/trainers.hpp"

namespace posh {
namespace {

Matrix sign_matrix(const Matrix& m) {
  return m.unaryExpr([](double v) { return v > 0.0 ? 1.0 : -1.0; });
}

}  // namespace

double itq_loss(const Matrix& w, const Matrix& x) {
  const Matrix projected = x * w.transpose();
  return (sign_matrix(projected) - projected).squaredNorm();
}

Matrix itq_refine(const Matrix& x, Matrix w, std::size_t iterations,
                  const ObjectiveObserver& observer) {
  if (w.rows() != w.cols() || w.cols() != x.cols()) {
    throw ArgumentError("itq_refine: W must be square with side equal to the data dimension");
  }
  if (observer) observer(0, itq_loss(w, x));
  for (std::size_t it = 1; it <= iterations; ++it) {
    const Matrix codes = sign_matrix(x * w.transpose());
    w = orthogonalize(codes.transpose() * x);
    if (observer) observer(it, itq_loss(w, x));
  }
  return w;
}

HashModel train_itq(const Matrix& x, std::size_t iterations, std::uint64_t seed,
                    const ObjectiveObserver& observer) {
  const auto bits = static_cast<std::size_t>(x.cols());
  if (bits < 1 || x.rows() < 1) throw ArgumentError("train_itq: empty training data");
  Matrix w = itq_refine(x, orthogonalize(gaussian_matrix(bits, bits, seed)), iterations, observer);
  return make_model(Scheme::kItq, std::move(w), 0);
}

Matrix knnh_preprocess(const Matrix& x, std::size_t k, std::size_t threads) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (k < 1 || k >= n) {
    throw ArgumentError("knnh_preprocess: k=" + std::to_string(k) + " must lie in [1, n-1] for n=" +
                        std::to_string(n));
  }
  Matrix out(x.rows(), x.cols());
  parallel_for(n, threads, [&](std::size_t i) {
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(n - 1);
    const auto xi = x.row(static_cast<Eigen::Index>(i));
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      dist.emplace_back((x.row(static_cast<Eigen::Index>(j)) - xi).squaredNorm(), j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
    Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(x.cols());
    for (std::size_t r = 0; r < k; ++r) sum += x.row(static_cast<Eigen::Index>(dist[r].second));
    out.row(static_cast<Eigen::Index>(i)) = sum / static_cast<double>(k);
  });
  return out;
}

}  // namespace posh
