#pragma once

#include <Eigen/Dense>
#include <cstddef>

namespace posh {

/// Row-major dense matrix of doubles. Samples are stored one per row (n x d),
/// projections as D x d.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Thin singular value decomposition M = U diag(S) Vt with r = min(rows, cols).
struct SvdResult {
  Matrix U;   // rows x r, orthonormal columns
  Vector S;   // r, non-negative, descending
  Matrix Vt;  // r x cols, orthonormal rows
};

struct PcaTransform {
  Vector mean;        // d
  Matrix components;  // k x d, orthonormal rows

  std::size_t k() const { return static_cast<std::size_t>(components.rows()); }
  std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
};

inline constexpr double kSvdTolerance = 1e-12;
inline constexpr int kSvdMaxSweeps = 100;

/// One-sided Jacobi SVD on the triangular factor of a Householder QR.
/// Singular vector signs are fixed so that the largest-magnitude entry of each
/// U column is non-negative. Throws NumericalError if the Jacobi sweeps do not
/// converge within kSvdMaxSweeps.
SvdResult thin_svd(const Matrix& m);

/// Orthogonal polar factor U Vt of `m`: the (semi-)orthogonal Q maximizing
/// trace(Qt M). Rank-deficient input still yields an orthonormal factor and
/// sets *rank_deficient when the pointer is non-null.
Matrix orthogonalize(const Matrix& m, bool* rank_deficient = nullptr);

Vector fit_center(const Matrix& x);
Matrix apply_center(const Matrix& x, const Vector& mean);

/// Top-k principal directions of `x`, computed from the SVD of the centered data.
PcaTransform pca_fit(const Matrix& x, std::size_t k);
Matrix pca_apply(const PcaTransform& transform, const Matrix& x);

/// Scales every nonzero row to unit 2-norm; zero rows are returned unchanged.
Matrix normalize_rows(const Matrix& m);

/// True when every entry is finite.
bool all_finite(const Matrix& m);

}  // namespace posh
