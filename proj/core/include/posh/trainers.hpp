#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "posh/hash_model.hpp"
#include "posh/tensor.hpp"

namespace posh {

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t mini_batch = 100;
  std::uint64_t seed = 0;
  /// Rebuild the accumulator from all samples each epoch (exact alternation).
  bool full_batch = false;
};

/// Receives the training objective after initialization (epoch 0) and after
/// every epoch or iteration.
using ObjectiveObserver = std::function<void(std::size_t epoch, double objective)>;

// All trainers take preprocessed samples, one per row, and return a model with
// an identity preprocessing stage; see train_scheme for the full pipeline.

/// Procrustean orthogonal sparse hashing. W starts as an orthonormalized
/// Gaussian matrix and the accumulator M as W; each sample adds
/// wta(W x) x^T to M and W is replaced by the polar factor of M after every
/// mini-batch (the final partial batch included).
HashModel train_posh(const Matrix& x, std::size_t code_length, std::size_t alpha,
                     const TrainConfig& config, const ObjectiveObserver& observer = {});

/// Sum over samples of ||wta(W x) - W x||^2.
double posh_objective(const Matrix& w, const Matrix& x, std::size_t alpha);

/// Spherical k-means with D centroids on unit-normalized samples; centroids
/// with no members become zero rows. Zero samples are skipped and counted.
HashModel train_spherical(const Matrix& x, std::size_t code_length, const TrainConfig& config,
                          const ObjectiveObserver& observer = {},
                          std::size_t* skipped_zero_inputs = nullptr);

/// Sum over unit-normalized samples of max_j w_j . x (zero samples skipped).
double spherical_objective(const Matrix& w, const Matrix& x);

/// Sum over samples of (w_j . x) / ||w_j|| for j = argmax_l w_l . x (lowest
/// index on ties). Throws ArgumentError if W has a zero row.
double biohash_objective(const Matrix& w, const Matrix& x);

struct BioHashConfig {
  double lr0 = 0.02;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
};

/// One Euler step on a unit sample: the winning row j (largest w_j . x, lowest
/// index on ties) moves by lr (x - (w_j . x) w_j). Returns j.
std::uint32_t biohash_step(Matrix& w, const Eigen::Ref<const Eigen::RowVectorXd>& sample,
                           double lr);

/// Euler steps of the winner-only Oja-style dynamic on unit-normalized samples,
/// learning rate lr0 * (1 - epoch / epochs), sample order reshuffled per epoch.
HashModel train_biohash(const Matrix& x, std::size_t code_length, const BioHashConfig& config,
                        const ObjectiveObserver& observer = {});

struct BoslConfig {
  std::size_t rounds = 50;  // K
  double gap_tolerance = 1e-4;
  std::size_t inner_iterations = 200;
  double sufficient_decrease = 1e-4;
  std::uint64_t seed = 0;
};

/// State after one ADMM round, handed to the observer. H and Y are D x n.
struct BoslRound {
  std::size_t round = 0;
  const Matrix& H;
  const Matrix& Y;
  double y_objective_start = 0;  // Y-step objective at its (projected) start
  double y_objective_end = 0;
  double fit_residual = 0;       // ||Xt X - Yt Y||_F
  double gap = 0;                // ||H - Y||_F / sqrt(D n)
};

struct BoslReport {
  double initial_residual = 0;  // at clip(W1 X, 0, 1)
  double final_residual = 0;
  std::size_t rounds_run = 0;
};

/// Binary optimal sparse lifting: ADMM on the binary similarity-matching
/// problem over the row-normalized samples, then W from unconstrained least
/// squares onto the final Y.
HashModel train_bosl(const Matrix& x, std::size_t code_length, std::size_t alpha,
                     const BoslConfig& config,
                     const std::function<void(const BoslRound&)>& observer = {},
                     BoslReport* report = nullptr);

/// ||X Xt - Yt Y||_F with X row-normalized (n x d) and Y as D x n.
double bosl_fit_residual(const Matrix& x_unit_rows, const Matrix& y);

/// Iterative quantization on bits-dimensional data (PCA already applied).
HashModel train_itq(const Matrix& x, std::size_t iterations, std::uint64_t seed,
                    const ObjectiveObserver& observer = {});

/// ITQ alternation from a given square orthogonal start.
Matrix itq_refine(const Matrix& x, Matrix w, std::size_t iterations,
                  const ObjectiveObserver& observer = {});

/// Sum over samples of ||b - W x||^2 with b = sign(W x) in {-1, +1}.
double itq_loss(const Matrix& w, const Matrix& x);

/// Replaces every sample by the mean of its k exact Euclidean nearest
/// neighbours, excluding itself; ties resolve to the lower row index.
Matrix knnh_preprocess(const Matrix& x, std::size_t k, std::size_t threads = 1);

}  // namespace posh
