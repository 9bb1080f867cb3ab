#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "posh/codes.hpp"
#include "posh/hash_model.hpp"
#include "posh/sparse_index.hpp"
#include "posh/tensor.hpp"

namespace posh {

/// Linear map from a sparse code back to the preprocessed input space.
struct LinearDecoder {
  Matrix D;  // d x code_length

  /// D h, i.e. the sum of the columns selected by the code.
  Vector decode(std::span<const std::uint32_t> indices) const;
  Vector decode(const SparseCode& code) const { return decode(code.indices); }
};

inline constexpr double kDecoderRidge = 1e-8;

/// Least-squares decoder minimizing sum_i ||x_i - D h_i||^2, solved through the
/// normal equations D (Ht H + ridge I) = Xt H. `x` holds one preprocessed
/// sample per row, aligned with `codes`.
LinearDecoder train_decoder(std::span<const SparseCode> codes, const Matrix& x,
                            double ridge = kDecoderRidge);

struct RefinedNeighbor {
  std::uint64_t id = 0;
  double distance = 0;  // ||z_q - D h||
};

/// Fetches ceil(oversample * k) Hamming candidates for hash(x_q) and re-ranks
/// them by Euclidean distance between the preprocessed query and each decoded
/// candidate, ties by id; returns the best k. When `candidate_ids` is given the
/// Hamming search is restricted to them.
std::vector<RefinedNeighbor> refine(const SparseIndex& index, const HashModel& model,
                                    const LinearDecoder& decoder, std::span<const double> query,
                                    std::size_t k, double oversample,
                                    const std::vector<std::uint64_t>* candidate_ids = nullptr);

struct SbihtTrace {
  std::vector<std::uint32_t> losses;    // ||b - h||^2 at every evaluated iterate
  std::vector<std::uint32_t> accepted;  // losses of iterates that improved on the best
};

inline constexpr std::size_t kSbihtMaxIterations = 100;

/// Sparse binary iterative hard thresholding. Starts from D h and steps
/// x <- x - Wt (wta(W x) - h) / sqrt(d D), stopping at zero loss, after two
/// consecutive non-improving iterates, or after max_iters evaluations. Returns
/// the best iterate. `w` is the model projection in the preprocessed space.
Vector sbiht_decode(const SparseCode& code, const Matrix& w, const LinearDecoder& decoder,
                    std::size_t max_iters = kSbihtMaxIterations, SbihtTrace* trace = nullptr);

}  // namespace posh
