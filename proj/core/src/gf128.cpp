// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/gf128.hpp"

namespace genovault::securechannel {

Gf128 Gf128::from_bytes(ByteView block16) {
  if (block16.size() != 16) {
    throw Error("securechannel", "bad-block", "GF(2^128) elements are 16 bytes");
  }
  Gf128 out;
  for (int i = 0; i < 8; ++i) {
    out.hi = (out.hi << 8) | block16[static_cast<std::size_t>(i)];
    out.lo = (out.lo << 8) | block16[static_cast<std::size_t>(8 + i)];
  }
  return out;
}

std::array<std::uint8_t, 16> Gf128::to_bytes() const {
  std::array<std::uint8_t, 16> out{};
  for (int i = 0; i < 8; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(hi >> (56 - 8 * i));
    out[static_cast<std::size_t>(8 + i)] = static_cast<std::uint8_t>(lo >> (56 - 8 * i));
  }
  return out;
}

namespace {

// Multiply by x: one left shift; an overflow out of x^127 folds back as
// x^7 + x^2 + x + 1 (0x87).
inline Gf128 mul_x(const Gf128& a) {
  Gf128 out;
  bool carry = (a.hi >> 63) != 0;
  out.hi = (a.hi << 1) | (a.lo >> 63);
  out.lo = a.lo << 1;
  if (carry) {
    out.lo ^= 0x87;
  }
  return out;
}

}  // namespace

Gf128 gf128_mul(const Gf128& a, const Gf128& b) {
  Gf128 product;
  Gf128 shifted = a;
  for (int bit = 0; bit < 128; ++bit) {
    std::uint64_t word = bit < 64 ? b.lo : b.hi;
    if ((word >> (bit % 64)) & 1) {
      product = product ^ shifted;
    }
    shifted = mul_x(shifted);
  }
  return product;
}

}  // namespace genovault::securechannel
