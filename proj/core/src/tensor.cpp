#include <string>

#include "posh/common.hpp"
#include "posh/tensor.hpp"

namespace posh {

bool all_finite(const Matrix& m) { return m.allFinite(); }

Vector fit_center(const Matrix& x) {
  if (x.rows() < 1) throw ArgumentError("fit_center: need at least one row");
  return x.colwise().mean().transpose();
}

Matrix apply_center(const Matrix& x, const Vector& mean) {
  if (x.cols() != mean.size()) {
    throw ArgumentError("apply_center: mean has " + std::to_string(mean.size()) +
                        " entries, data has " + std::to_string(x.cols()) + " columns");
  }
  return x.rowwise() - mean.transpose();
}

PcaTransform pca_fit(const Matrix& x, std::size_t k) {
  const auto limit = static_cast<std::size_t>(std::min(x.rows(), x.cols()));
  if (k < 1 || k > limit) {
    throw ArgumentError("pca_fit: k=" + std::to_string(k) + " outside [1, " +
                        std::to_string(limit) + "]");
  }
  PcaTransform out;
  out.mean = fit_center(x);
  const SvdResult svd = thin_svd(apply_center(x, out.mean));
  out.components = svd.Vt.topRows(static_cast<Eigen::Index>(k));
  return out;
}

Matrix pca_apply(const PcaTransform& transform, const Matrix& x) {
  return apply_center(x, transform.mean) * transform.components.transpose();
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    const double norm = out.row(i).norm();
    if (norm > 0.0) out.row(i) /= norm;
  }
  return out;
}

}  // namespace posh
