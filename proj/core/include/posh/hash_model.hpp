#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "posh/codes.hpp"
#include "posh/tensor.hpp"

namespace posh {

/// Hashing scheme. The numeric values are the tag bytes of the model file.
enum class Scheme : std::uint8_t {
  kFruitFly = 0,
  kPosh = 1,
  kSpherical = 2,
  kBioHash = 3,
  kBosl = 4,
  kLsh = 5,
  kItq = 6,
};

std::string_view scheme_name(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

/// Sparse schemes produce alpha-of-D winner-take-all codes; the others produce
/// sign codes.
bool is_sparse(Scheme scheme);

/// Centering and optional PCA applied to raw vectors before projection.
struct Preprocessing {
  Vector center;
  std::optional<PcaTransform> pca;

  std::size_t input_dim() const { return static_cast<std::size_t>(center.size()); }
  std::size_t output_dim() const { return pca ? pca->k() : input_dim(); }
};

/// Fits the mean (and PCA when the input must be reduced) on a training
/// sample. Sparse schemes reduce to `alpha` components when d > code_length;
/// dense schemes reduce to code_length components when d > code_length, and
/// ITQ always projects onto code_length components.
Preprocessing fit_preprocessing(const Matrix& train, Scheme scheme, std::size_t code_length,
                                std::size_t alpha);
Matrix apply_preprocessing(const Preprocessing& prep, const Matrix& x);

/// Single-vector preprocessing in the same fixed summation order as project().
std::vector<double> preprocess(const Preprocessing& prep, std::span<const double> x);

/// A trained hasher. W is code_length x prep.output_dim().
struct HashModel {
  Scheme scheme = Scheme::kPosh;
  Matrix W;
  std::size_t alpha = 0;
  Preprocessing prep;

  std::size_t code_length() const { return static_cast<std::size_t>(W.rows()); }
  std::size_t input_dim() const { return prep.input_dim(); }
};

/// A model over already-preprocessed d-dimensional data: zero center, no PCA.
HashModel make_model(Scheme scheme, Matrix w, std::size_t alpha);

using Code = std::variant<SparseCode, DenseCode>;

/// Applies center, optional PCA and W in a fixed summation order, so that a
/// row hashes identically alone or inside a batch.
std::vector<double> project(const HashModel& model, std::span<const double> x);

SparseCode hash_sparse(const HashModel& model, std::span<const double> x);
DenseCode hash_dense(const HashModel& model, std::span<const double> x);
Code hash(const HashModel& model, std::span<const double> x);

/// Row-wise hashing of a frozen model; safe to call concurrently. `threads == 0`
/// selects the default thread count.
std::vector<SparseCode> hash_sparse_batch(const HashModel& model, const Matrix& x,
                                          std::size_t threads = 1);
std::vector<DenseCode> hash_dense_batch(const HashModel& model, const Matrix& x,
                                        std::size_t threads = 1);

/// Random binary projection with Bernoulli(p) entries.
HashModel fruitfly_init(std::size_t d, std::size_t code_length, double p, std::uint64_t seed,
                        std::size_t alpha);

/// Standard normal D x d matrix with orthonormalized columns. Requires D >= d.
HashModel gaussian_orthogonal_init(std::size_t d, std::size_t code_length, std::uint64_t seed,
                                   std::size_t alpha);

/// Random hyperplane LSH: standard normal bits x d projection with sign codes.
HashModel lsh_init(std::size_t d, std::size_t bits, std::uint64_t seed);

/// Standard normal rows x cols matrix drawn row-major from `seed`.
Matrix gaussian_matrix(std::size_t rows, std::size_t cols, std::uint64_t seed);

struct GramStatistics {
  double diag_mean = 0;
  double diag_var = 0;
  double offdiag_mean = 0;
  double offdiag_var = 0;
};

/// Sample mean and unbiased variance of the diagonal and the strictly upper
/// off-diagonal entries of Wt W. Requires a binary W with at least 2 columns.
GramStatistics gram_statistics(const Matrix& w);

/// Gram statistics over `samples` independent Bernoulli(p) D x d matrices.
/// Means are averaged over matrices and their standard errors are the
/// empirical spread of the per-matrix means; variances are averaged too.
struct GramCheck {
  std::size_t samples = 0;
  double diag_mean = 0;
  double diag_mean_se = 0;
  double offdiag_mean = 0;
  double offdiag_mean_se = 0;
  double diag_var = 0;
  double offdiag_var = 0;
  // Binomial reference values: D p, D p (1 - p), D p^2, D p^2 (1 - p^2).
  double expected_diag_mean = 0;
  double expected_diag_var = 0;
  double expected_offdiag_mean = 0;
  double expected_offdiag_var = 0;
};
GramCheck gram_check(std::size_t code_length, std::size_t d, double p, std::size_t samples,
                     std::uint64_t seed);

}  // namespace posh
