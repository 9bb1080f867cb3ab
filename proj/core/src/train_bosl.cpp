#include <algorithm>
#include <cmath>
#include <string>

#include "posh/common.hpp"
#include "posh/trainers.hpp"

namespace posh {
namespace {

// Y-step objective 1/4 ||Yt Y - G||^2 + 1/2 ||Y - T||^2 with T = H + L.
struct YStep {
  const Matrix& gram;
  const Matrix& target;

  double value(const Matrix& y) const {
    return 0.25 * (y.transpose() * y - gram).squaredNorm() + 0.5 * (y - target).squaredNorm();
  }
  Matrix gradient(const Matrix& y) const {
    const Matrix residual = y.transpose() * y - gram;
    return y * residual + (y - target);
  }
};

Matrix clip_unit(const Matrix& y) { return y.cwiseMax(0.0).cwiseMin(1.0); }

// Projected gradient descent with Armijo backtracking on the box [0, 1].
// Each accepted step satisfies f(Y+) <= f(Y) + sigma <grad, Y+ - Y> <= f(Y).
Matrix solve_y_step(const YStep& step, Matrix y, const BoslConfig& config) {
  double f = step.value(y);
  double t = 1.0;
  for (std::size_t it = 0; it < config.inner_iterations; ++it) {
    const Matrix g = step.gradient(y);
    bool accepted = false;
    Matrix candidate;
    double f_candidate = 0.0;
    for (int halvings = 0; halvings < 60; ++halvings) {
      candidate = clip_unit(y - t * g);
      f_candidate = step.value(candidate);
      const double predicted = (g.array() * (candidate - y).array()).sum();
      if (f_candidate <= f + config.sufficient_decrease * predicted) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    const double moved = (candidate - y).norm();
    y = std::move(candidate);
    f = f_candidate;
    if (moved <= 1e-10 * (1.0 + y.norm())) break;
    t *= 2.0;
  }
  return y;
}

Matrix wta_columns(const Matrix& m, std::size_t alpha) {
  Matrix h = Matrix::Zero(m.rows(), m.cols());
  std::vector<double> column(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) column[static_cast<std::size_t>(r)] = m(r, c);
    for (std::uint32_t r : wta(column, alpha).indices) h(r, c) = 1.0;
  }
  return h;
}

}  // namespace

double bosl_fit_residual(const Matrix& x_unit_rows, const Matrix& y) {
  return (x_unit_rows * x_unit_rows.transpose() - y.transpose() * y).norm();
}

HashModel train_bosl(const Matrix& x, std::size_t code_length, std::size_t alpha,
                     const BoslConfig& config,
                     const std::function<void(const BoslRound&)>& observer, BoslReport* report) {
  if (config.rounds < 1) throw ArgumentError("train_bosl: K must be at least 1");
  if (alpha < 1 || alpha > code_length) {
    throw ArgumentError("train_bosl: alpha=" + std::to_string(alpha) + " outside [1, D]");
  }
  if (x.rows() < 1) throw ArgumentError("train_bosl: empty training set");

  const Matrix xu = normalize_rows(x);
  const Matrix gram = xu * xu.transpose();
  const Matrix w1 = gaussian_matrix(code_length, static_cast<std::size_t>(x.cols()), config.seed);
  Matrix y = w1 * xu.transpose();
  Matrix lagrange = Matrix::Zero(y.rows(), y.cols());
  const double scale = std::sqrt(static_cast<double>(y.size()));

  BoslReport local;
  local.initial_residual = bosl_fit_residual(xu, clip_unit(y));

  for (std::size_t k = 1; k < config.rounds; ++k) {
    const Matrix h = wta_columns(y + lagrange, alpha);
    const Matrix target = h + lagrange;
    const YStep step{gram, target};
    const Matrix start = clip_unit(y);
    const double f_start = step.value(start);
    y = solve_y_step(step, start, config);
    const double f_end = step.value(y);
    lagrange += h - y;
    const double gap = (h - y).norm() / scale;
    ++local.rounds_run;
    if (observer) {
      observer(BoslRound{k, h, y, f_start, f_end, bosl_fit_residual(xu, y), gap});
    }
    if (gap < config.gap_tolerance) break;
  }
  local.final_residual = bosl_fit_residual(xu, y);
  if (report != nullptr) *report = local;

  // W minimizes ||W Xt - Y||_F; minimum-norm solution when X is rank deficient.
  const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(xu);
  Matrix w = cod.solve(Eigen::MatrixXd(y.transpose())).transpose();
  return make_model(Scheme::kBosl, std::move(w), alpha);
}

}  // namespace posh
