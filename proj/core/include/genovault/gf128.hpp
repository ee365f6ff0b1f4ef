// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <array>
#include <cstdint>

#include "genovault/common.hpp"

namespace genovault::securechannel {

/// Element of GF(2^128) with reduction polynomial x^128 + x^7 + x^2 + x + 1.
/// A 16-byte big-endian block maps to the element whose bit i (of the 128-bit
/// integer) is the coefficient of x^i.
struct Gf128 {
  std::uint64_t hi = 0;
  std::uint64_t lo = 0;

  bool operator==(const Gf128&) const = default;

  friend Gf128 operator^(const Gf128& a, const Gf128& b) {
    return Gf128{a.hi ^ b.hi, a.lo ^ b.lo};
  }

  bool is_zero() const { return hi == 0 && lo == 0; }

  static Gf128 from_bytes(ByteView block16);
  std::array<std::uint8_t, 16> to_bytes() const;
};

Gf128 gf128_mul(const Gf128& a, const Gf128& b);

}  // namespace genovault::securechannel
