#include <gtest/gtest.h>

#include "oracles.hpp"
#include "posh/common.hpp"
#include "posh/datasets.hpp"
#include "posh/trainers.hpp"

namespace posh {
namespace {

Matrix blobs(std::uint64_t seed, std::size_t per_class = 60) {
  Dataset d = synth_gaussian_mixture(4, per_class, 8, 3.0, 1.0, seed);
  return apply_center(d.features, fit_center(d.features));
}

double orthonormality_error(const Matrix& w) {
  const Eigen::MatrixXd g = w.transpose() * w;
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

TEST(Posh, FullBatchObjectiveNonIncreasing) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    std::vector<double> trace;
    TrainConfig c;
    c.epochs = 15;
    c.full_batch = true;
    c.seed = seed;
    train_posh(blobs(seed), 32, 4, c, [&](std::size_t, double v) { trace.push_back(v); });
    ASSERT_EQ(trace.size(), 16U);
    for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9);
  }
}

TEST(Posh, StreamingKeepsOrthonormalColumnsAndIsDeterministic) {
  TrainConfig c;
  c.epochs = 3;
  c.mini_batch = 37;  // leaves a partial last batch
  const HashModel a = train_posh(blobs(1), 32, 4, c);
  const HashModel b = train_posh(blobs(1), 32, 4, c);
  EXPECT_EQ(a.W, b.W);
  EXPECT_LT(orthonormality_error(a.W), 1e-10);
  EXPECT_EQ(a.alpha, 4U);
  EXPECT_THROW(train_posh(blobs(1), 4, 2, c), ArgumentError);  // D < d
}

TEST(Posh, ObjectiveMatchesDefinition) {
  const Matrix x = blobs(2, 10);
  const Matrix w = gaussian_orthogonal_init(8, 16, 3, 3).W;
  double expected = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const Vector y = w * x.row(i).transpose();
    const SparseCode h = wta(std::span<const double>(y.data(), y.size()), 3);
    Vector hv = Vector::Zero(16);
    for (auto j : h.indices) hv(j) = 1.0;
    expected += (hv - y).squaredNorm();
  }
  EXPECT_NEAR(posh_objective(w, x, 3), expected, 1e-9 * expected);
}

TEST(Spherical, ObjectiveNonDecreasingAndRowsUnitOrZero) {
  std::vector<double> trace;
  TrainConfig c;
  c.epochs = 10;
  const HashModel m =
      train_spherical(blobs(4), 12, c, [&](std::size_t, double v) { trace.push_back(v); });
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_GE(trace[i], trace[i - 1] - 1e-9);
  for (Eigen::Index r = 0; r < m.W.rows(); ++r) {
    const double n = m.W.row(r).norm();
    EXPECT_TRUE(std::abs(n - 1.0) < 1e-12 || n == 0.0);
  }
}

TEST(Spherical, ZeroInputsSkippedAndCounted) {
  Matrix x = blobs(5, 10);
  x.row(3).setZero();
  x.row(7).setZero();
  std::size_t skipped = 0;
  TrainConfig c;
  c.epochs = 2;
  train_spherical(x, 4, c, {}, &skipped);
  EXPECT_EQ(skipped, 2U);
}

TEST(BioHash, FixedPointAndDecayingSteps) {
  Matrix x(1, 3);
  x << 0.6, 0.8, 0.0;
  Matrix w = x;
  EXPECT_EQ(biohash_step(w, x.row(0), 0.5), 0U);
  EXPECT_LT((w - x).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(biohash_objective(x, x), 1.0, 1e-15);

  Matrix two(2, 3);
  two << 1, 0, 0,
         0, 1, 0;
  EXPECT_EQ(biohash_step(two, x.row(0), 0.1), 1U);  // 0.8 beats 0.6
  EXPECT_DOUBLE_EQ(two(0, 0), 1.0);
  EXPECT_NEAR(two(1, 0), 0.1 * 0.6, 1e-15);
  EXPECT_NEAR(two(1, 1), 1.0 + 0.1 * (0.8 - 0.8), 1e-15);

  BioHashConfig c;
  c.epochs = 20;
  std::vector<double> trace;
  const HashModel m = train_biohash(blobs(6), 8, c, [&](std::size_t, double v) { trace.push_back(v); });
  EXPECT_EQ(trace.size(), 21U);
  EXPECT_GT(trace.back(), trace.front());
  for (Eigen::Index r = 0; r < m.W.rows(); ++r) EXPECT_TRUE(std::isfinite(m.W.row(r).norm()));
  EXPECT_THROW(train_biohash(blobs(6), 8, BioHashConfig{0.0, 5, 0}), ArgumentError);
}

TEST(BioHash, ObjectiveRejectsZeroRows) {
  Matrix w = Matrix::Identity(2, 2);
  w.row(1).setZero();
  EXPECT_THROW(biohash_objective(w, Matrix::Ones(1, 2)), ArgumentError);
}

TEST(Bosl, RoundsStayFeasible) {
  const Matrix x = oracle::random_matrix(60, 6, 7);
  BoslConfig c;
  c.rounds = 8;
  BoslReport report;
  std::size_t rounds = 0;
  train_bosl(x, 16, 3, c, [&](const BoslRound& r) {
    ++rounds;
    EXPECT_LE(r.y_objective_end, r.y_objective_start + 1e-9);
    for (Eigen::Index col = 0; col < r.H.cols(); ++col) {
      double sum = 0;
      for (Eigen::Index row = 0; row < r.H.rows(); ++row) {
        const double h = r.H(row, col);
        EXPECT_TRUE(h == 0.0 || h == 1.0);
        sum += h;
      }
      EXPECT_EQ(sum, 3.0);
    }
    EXPECT_GE(r.Y.minCoeff(), 0.0);
    EXPECT_LE(r.Y.maxCoeff(), 1.0);
  }, &report);
  EXPECT_EQ(rounds, report.rounds_run);
  EXPECT_GE(rounds, 1U);
  EXPECT_LE(report.final_residual, report.initial_residual + 1e-9);
}

TEST(Itq, LossNonIncreasingAndFixedPoint) {
  const Matrix x = oracle::random_matrix(200, 8, 8);
  std::vector<double> trace;
  const HashModel m = train_itq(x, 30, 1, [&](std::size_t, double v) { trace.push_back(v); });
  for (std::size_t i = 1; i < trace.size(); ++i) EXPECT_LE(trace[i], trace[i - 1] + 1e-9);
  EXPECT_LT(orthonormality_error(m.W), 1e-10);

  Matrix vertices(4, 2);
  vertices << 1, 1, -1, 1, 1, -1, -1, -1;
  const Matrix w = itq_refine(vertices, Matrix::Identity(2, 2), 5);
  EXPECT_LT((w - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(itq_loss(Matrix::Identity(2, 2), vertices), 0.0, 1e-15);
}

TEST(Knnh, MeanOfNearestNeighboursExcludingSelf) {
  const Matrix x = oracle::random_matrix(40, 3, 9);
  const Matrix out = knnh_preprocess(x, 4);
  const Matrix out_threads = knnh_preprocess(x, 4, 3);
  EXPECT_EQ(out, out_threads);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Matrix others(x.rows() - 1, 3);
    std::vector<std::uint64_t> map;
    for (Eigen::Index j = 0, r = 0; j < x.rows(); ++j) {
      if (j == i) continue;
      others.row(r++) = x.row(j);
      map.push_back(static_cast<std::uint64_t>(j));
    }
    const auto nn = oracle::scan_neighbors(others, x.row(i), 4, false);
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(3);
    for (auto id : nn) mean += x.row(static_cast<Eigen::Index>(map[id]));
    mean /= 4.0;
    EXPECT_LT((out.row(i) - mean).cwiseAbs().maxCoeff(), 1e-12);
  }
  EXPECT_THROW(knnh_preprocess(x, 0), ArgumentError);
}

}  // namespace
}  // namespace posh
