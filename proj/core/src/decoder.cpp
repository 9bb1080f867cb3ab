#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "posh/common.hpp"
#include "posh/decoder.hpp"

namespace posh {

Vector LinearDecoder::decode(std::span<const std::uint32_t> indices) const {
  Vector out = Vector::Zero(D.rows());
  for (std::uint32_t j : indices) out += D.col(j);
  return out;
}

LinearDecoder train_decoder(std::span<const SparseCode> codes, const Matrix& x, double ridge) {
  if (codes.empty()) throw ArgumentError("train_decoder: need at least one sample");
  if (static_cast<std::size_t>(x.rows()) != codes.size()) {
    throw ArgumentError("train_decoder: " + std::to_string(codes.size()) + " codes but " +
                        std::to_string(x.rows()) + " samples");
  }
  const auto length = static_cast<Eigen::Index>(codes.front().dim);
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(length, length);
  Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(length, x.cols());  // Ht X
  for (std::size_t i = 0; i < codes.size(); ++i) {
    const SparseCode& code = codes[i];
    if (code.dim != codes.front().dim) throw ArgumentError("train_decoder: mixed code lengths");
    for (std::uint32_t a : code.indices) {
      for (std::uint32_t b : code.indices) gram(a, b) += 1.0;
      cross.row(a) += x.row(static_cast<Eigen::Index>(i));
    }
  }
  gram.diagonal().array() += ridge;
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
  if (ldlt.info() != Eigen::Success) {
    throw NumericalError("train_decoder: factorization of the code Gram matrix failed");
  }
  LinearDecoder decoder;
  decoder.D = ldlt.solve(cross).transpose();
  return decoder;
}

std::vector<RefinedNeighbor> refine(const SparseIndex& index, const HashModel& model,
                                    const LinearDecoder& decoder, std::span<const double> query,
                                    std::size_t k, double oversample,
                                    const std::vector<std::uint64_t>* candidate_ids) {
  if (!(oversample >= 1.0)) throw ArgumentError("refine: oversample must be >= 1");
  const auto fetch = static_cast<std::size_t>(std::ceil(oversample * static_cast<double>(k)));
  const SparseCode code = hash_sparse(model, query);
  const std::vector<Neighbor> hamming = candidate_ids == nullptr
                                            ? index.knn_query(code, fetch)
                                            : index.knn_query_among(code, fetch, *candidate_ids);
  const std::vector<double> z = preprocess(model.prep, query);
  const Eigen::Map<const Vector> zq(z.data(), static_cast<Eigen::Index>(z.size()));

  std::vector<RefinedNeighbor> out;
  out.reserve(hamming.size());
  for (const Neighbor& n : hamming) {
    const std::size_t position = *index.position_of(n.id);
    out.push_back({n.id, (zq - decoder.decode(index.indices_at(position))).norm()});
  }
  std::sort(out.begin(), out.end(), [](const RefinedNeighbor& l, const RefinedNeighbor& r) {
    return l.distance < r.distance || (l.distance == r.distance && l.id < r.id);
  });
  if (out.size() > k) out.resize(k);
  return out;
}

Vector sbiht_decode(const SparseCode& code, const Matrix& w, const LinearDecoder& decoder,
                    std::size_t max_iters, SbihtTrace* trace) {
  validate_code(code);
  if (static_cast<std::size_t>(w.rows()) != code.dim || w.cols() != decoder.D.rows()) {
    throw ArgumentError("sbiht_decode: W, decoder and code shapes disagree");
  }
  const std::size_t alpha = code.alpha();
  const double step = 1.0 / std::sqrt(static_cast<double>(w.rows() * w.cols()));

  Vector x = decoder.decode(code);
  Vector best = x;
  std::uint32_t best_loss = std::numeric_limits<std::uint32_t>::max();
  std::size_t stale = 0;
  Vector y(w.rows());
  for (std::size_t it = 0; it < max_iters; ++it) {
    y.noalias() = w * x;
    const SparseCode b = wta(std::span<const double>(y.data(), y.size()), alpha);
    const auto loss =
        static_cast<std::uint32_t>(2 * alpha - 2 * intersection_count(b.indices, code.indices));
    if (trace != nullptr) trace->losses.push_back(loss);
    if (loss < best_loss) {
      best = x;
      best_loss = loss;
      stale = 0;
      if (trace != nullptr) trace->accepted.push_back(loss);
    } else if (++stale >= 2) {
      break;
    }
    if (loss == 0) break;
    // Wt (b - h): add rows of W selected only by b, subtract those only in h.
    Vector g = Vector::Zero(w.cols());
    for (std::uint32_t j : b.indices) g += w.row(j).transpose();
    for (std::uint32_t j : code.indices) g -= w.row(j).transpose();
    x -= step * g;
  }
  return best;
}

}  // namespace posh
