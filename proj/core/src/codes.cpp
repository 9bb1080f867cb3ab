#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "posh/codes.hpp"
#include "posh/common.hpp"

namespace posh {

SparseCode wta(std::span<const double> y, std::size_t alpha) {
  if (alpha < 1 || alpha > y.size()) {
    throw ArgumentError("wta: alpha=" + std::to_string(alpha) + " outside [1, " +
                        std::to_string(y.size()) + "]");
  }
  std::vector<std::uint32_t> order(y.size());
  std::iota(order.begin(), order.end(), 0U);
  const auto before = [&](std::uint32_t l, std::uint32_t r) {
    return y[l] > y[r] || (y[l] == y[r] && l < r);
  };
  if (alpha < y.size()) {
    std::nth_element(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(alpha) - 1,
                     order.end(), before);
  }
  order.resize(alpha);
  std::sort(order.begin(), order.end());
  return SparseCode{static_cast<std::uint32_t>(y.size()), std::move(order)};
}

bool scale_invariance_check(std::span<const double> y, double beta, std::size_t alpha) {
  if (!(beta > 0.0)) throw ArgumentError("scale_invariance_check: beta must be positive");
  std::vector<double> scaled(y.begin(), y.end());
  for (double& v : scaled) v *= beta;
  return wta(scaled, alpha) == wta(y, alpha);
}

DenseCode sign_code(std::span<const double> y) {
  DenseCode code{static_cast<std::uint32_t>(y.size()),
                 std::vector<std::uint64_t>((y.size() + 63) / 64, 0)};
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] > 0.0) code.words[i / 64] |= std::uint64_t{1} << (i % 64);
  }
  return code;
}

void validate_code(const SparseCode& code) {
  if (code.indices.empty()) throw ArgumentError("sparse code has no set bits");
  for (std::size_t i = 0; i < code.indices.size(); ++i) {
    if (code.indices[i] >= code.dim) {
      throw ArgumentError("sparse code index " + std::to_string(code.indices[i]) +
                          " out of range for dim " + std::to_string(code.dim));
    }
    if (i > 0 && code.indices[i] <= code.indices[i - 1]) {
      throw ArgumentError("sparse code indices must be strictly increasing");
    }
  }
}

std::uint32_t dense_hamming(const DenseCode& a, const DenseCode& b) {
  if (a.dim != b.dim) throw ArgumentError("dense_hamming: code lengths differ");
  std::uint32_t total = 0;
  for (std::size_t w = 0; w < a.words.size(); ++w) {
    total += static_cast<std::uint32_t>(std::popcount(a.words[w] ^ b.words[w]));
  }
  return total;
}

}  // namespace posh
