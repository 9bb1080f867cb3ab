#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace posh {

/// Binary code of length `dim` with exactly alpha set bits, stored as the
/// strictly increasing list of set positions.
struct SparseCode {
  std::uint32_t dim = 0;
  std::vector<std::uint32_t> indices;

  std::size_t alpha() const { return indices.size(); }
  bool operator==(const SparseCode&) const = default;
};

/// Packed dense bit code of length `dim`; bit i lives in words[i / 64].
struct DenseCode {
  std::uint32_t dim = 0;
  std::vector<std::uint64_t> words;

  bool bit(std::size_t i) const { return (words[i / 64] >> (i % 64)) & 1U; }
  bool operator==(const DenseCode&) const = default;
};

/// Winner-take-all: positions of the alpha largest entries of y, returned in
/// increasing order. Equal values are ranked by lower index first.
SparseCode wta(std::span<const double> y, std::size_t alpha);

/// True iff wta(beta * y) == wta(y). Requires beta > 0.
bool scale_invariance_check(std::span<const double> y, double beta, std::size_t alpha);

/// Sign code: bit i is set iff y[i] > 0.
DenseCode sign_code(std::span<const double> y);

/// Throws ArgumentError unless `code` is a valid alpha-of-dim sparse code.
void validate_code(const SparseCode& code);

std::uint32_t dense_hamming(const DenseCode& a, const DenseCode& b);

}  // namespace posh
