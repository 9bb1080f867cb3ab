#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "posh/common.hpp"
#include "posh/tensor.hpp"

namespace posh {
namespace {

using ColMatrix = Eigen::MatrixXd;

std::string shape_of(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

// Hestenes one-sided Jacobi: orthogonalizes the columns of `a` in place and
// accumulates the rotations into `v`. Returns false on sweep exhaustion.
bool jacobi_sweeps(ColMatrix& a, ColMatrix& v) {
  const Eigen::Index n = a.cols();
  for (int sweep = 0; sweep < kSvdMaxSweeps; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double alpha = a.col(p).squaredNorm();
        const double beta = a.col(q).squaredNorm();
        const double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0.0 || std::abs(gamma) <= kSvdTolerance * std::sqrt(alpha * beta)) {
          continue;
        }
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (auto* mat : {&a, &v}) {
          auto cp = mat->col(p);
          auto cq = mat->col(q);
          for (Eigen::Index i = 0; i < mat->rows(); ++i) {
            const double xp = cp(i);
            const double xq = cq(i);
            cp(i) = c * xp - s * xq;
            cq(i) = s * xp + c * xq;
          }
        }
      }
    }
    if (!rotated) return true;
  }
  return false;
}

// Replaces the columns flagged in `missing` with unit vectors orthogonal to all
// other columns (Gram-Schmidt on the standard basis, two passes).
void complete_basis(ColMatrix& u, const std::vector<bool>& missing) {
  const Eigen::Index m = u.rows();
  Eigen::Index candidate = 0;
  for (Eigen::Index j = 0; j < u.cols(); ++j) {
    if (!missing[static_cast<std::size_t>(j)]) continue;
    for (; candidate < m; ++candidate) {
      Eigen::VectorXd e = Eigen::VectorXd::Unit(m, candidate);
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index k = 0; k < u.cols(); ++k) {
          if (k == j || (missing[static_cast<std::size_t>(k)] && k > j)) continue;
          e -= u.col(k).dot(e) * u.col(k);
        }
      }
      const double norm = e.norm();
      if (norm > 0.5) {
        u.col(j) = e / norm;
        ++candidate;
        break;
      }
    }
  }
}

SvdResult svd_tall(const Matrix& m) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index n = m.cols();

  Eigen::HouseholderQR<ColMatrix> qr(m);
  ColMatrix a = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  ColMatrix q = qr.householderQ() * ColMatrix::Identity(rows, n);
  ColMatrix v = ColMatrix::Identity(n, n);

  if (!jacobi_sweeps(a, v)) {
    throw NumericalError("thin_svd: Jacobi sweeps did not converge for " + shape_of(m) +
                         " matrix");
  }

  Eigen::VectorXd sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = a.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index l, Eigen::Index r) { return sigma(l) > sigma(r); });

  const double sigma_max = n > 0 ? sigma(order.front()) : 0.0;
  const double cutoff = sigma_max * static_cast<double>(std::max(rows, n)) *
                        std::numeric_limits<double>::epsilon();

  ColMatrix u_small(n, n);
  ColMatrix v_sorted(n, n);
  Eigen::VectorXd s_sorted(n);
  std::vector<bool> missing(static_cast<std::size_t>(n), false);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index src = order[static_cast<std::size_t>(j)];
    s_sorted(j) = sigma(src);
    v_sorted.col(j) = v.col(src);
    if (sigma(src) > cutoff && sigma(src) > 0.0) {
      u_small.col(j) = a.col(src) / sigma(src);
    } else {
      u_small.col(j).setZero();
      missing[static_cast<std::size_t>(j)] = true;
    }
  }
  if (std::find(missing.begin(), missing.end(), true) != missing.end()) {
    complete_basis(u_small, missing);
  }

  SvdResult out;
  out.U = q * u_small;
  out.S = s_sorted;
  out.Vt = v_sorted.transpose();
  return out;
}

void fix_signs(SvdResult& svd) {
  for (Eigen::Index j = 0; j < svd.U.cols(); ++j) {
    Eigen::Index arg = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < svd.U.rows(); ++i) {
      const double mag = std::abs(svd.U(i, j));
      if (mag > best) {
        best = mag;
        arg = i;
      }
    }
    if (svd.U(arg, j) < 0.0) {
      svd.U.col(j) *= -1.0;
      svd.Vt.row(j) *= -1.0;
    }
  }
}

}  // namespace

SvdResult thin_svd(const Matrix& m) {
  if (m.rows() < 1 || m.cols() < 1) {
    throw ArgumentError("thin_svd: empty " + shape_of(m) + " matrix");
  }
  if (!all_finite(m)) {
    throw ArgumentError("thin_svd: non-finite entries in " + shape_of(m) + " matrix");
  }
  SvdResult out;
  if (m.rows() >= m.cols()) {
    out = svd_tall(m);
  } else {
    SvdResult t = svd_tall(m.transpose());
    out.U = t.Vt.transpose();
    out.S = std::move(t.S);
    out.Vt = t.U.transpose();
  }
  fix_signs(out);
  return out;
}

namespace {

// Tolerances for the Gram shortcut: condition number of M at most 1e4, and the
// result must be orthonormal to 1e-10 or the SVD path is taken instead.
constexpr double kPolarGramConditionLimit = 1e-8;
constexpr double kPolarOrthogonalityTolerance = 1e-10;

// Polar factor of a well-conditioned tall matrix as M (Mt M)^(-1/2). Returns
// false when the Gram matrix is too ill-conditioned for that to be accurate.
bool polar_from_gram(const Matrix& m, Matrix& q) {
  const Eigen::MatrixXd gram = m.transpose() * m;
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) return false;
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  if (!(lambda(0) > kPolarGramConditionLimit * lambda(lambda.size() - 1))) return false;
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::MatrixXd inv_sqrt =
      v * lambda.cwiseSqrt().cwiseInverse().asDiagonal() * v.transpose();
  q.noalias() = m * inv_sqrt;
  const Eigen::MatrixXd err =
      q.transpose() * q - Eigen::MatrixXd::Identity(q.cols(), q.cols());
  return err.cwiseAbs().maxCoeff() <= kPolarOrthogonalityTolerance;
}

}  // namespace

Matrix orthogonalize(const Matrix& m, bool* rank_deficient) {
  if (m.size() > 0 && all_finite(m)) {
    Matrix q;
    const bool tall = m.rows() >= m.cols();
    if (tall ? polar_from_gram(m, q) : polar_from_gram(m.transpose(), q)) {
      if (rank_deficient != nullptr) *rank_deficient = false;
      if (tall) return q;
      return q.transpose();
    }
  }
  const SvdResult svd = thin_svd(m);
  if (rank_deficient != nullptr) {
    const Eigen::Index r = svd.S.size();
    const double cutoff = svd.S(0) * static_cast<double>(std::max(m.rows(), m.cols())) *
                          std::numeric_limits<double>::epsilon();
    *rank_deficient = svd.S(r - 1) <= cutoff;
  }
  return svd.U * svd.Vt;
}

}  // namespace posh
