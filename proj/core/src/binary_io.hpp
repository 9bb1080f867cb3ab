#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

#include "posh/common.hpp"

namespace posh::detail {

// Little-endian primitive codecs with byte-offset tracking for errors.

inline void put_u8(std::ostream& out, std::uint8_t v) { out.put(static_cast<char>(v)); }

template <typename U>
void put_le(std::ostream& out, U v) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    bytes[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
  }
  out.write(bytes.data(), bytes.size());
}

inline void put_f64(std::ostream& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }
inline void put_f32(std::ostream& out, float v) { put_le(out, std::bit_cast<std::uint32_t>(v)); }

class Reader {
 public:
  Reader(std::istream& in, std::string context) : in_(in), context_(std::move(context)) {}

  std::uint64_t offset() const { return offset_; }

  void bytes(char* dst, std::size_t count) {
    in_.read(dst, static_cast<std::streamsize>(count));
    if (static_cast<std::size_t>(in_.gcount()) != count) {
      throw ParseError(context_ + ": truncated at byte " + std::to_string(offset_), offset_);
    }
    offset_ += count;
  }

  template <typename U>
  U le() {
    std::array<char, sizeof(U)> raw{};
    bytes(raw.data(), raw.size());
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<U>(static_cast<unsigned char>(raw[i])) << (8 * i);
    }
    return v;
  }

  std::uint8_t u8() { return le<std::uint8_t>(); }
  double f64() { return std::bit_cast<double>(le<std::uint64_t>()); }
  float f32() { return std::bit_cast<float>(le<std::uint32_t>()); }

  bool at_end() { return in_.peek() == std::char_traits<char>::eof(); }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(context_ + ": " + what + " at byte " + std::to_string(offset_), offset_);
  }

 private:
  std::istream& in_;
  std::string context_;
  std::uint64_t offset_ = 0;
};

}  // namespace posh::detail
