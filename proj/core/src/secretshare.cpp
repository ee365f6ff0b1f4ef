// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/secretshare.hpp"

#include <algorithm>

namespace genovault::secretshare {

namespace {

void xor_into(Bytes& dst, ByteView src) {
  for (std::size_t i = 0; i < dst.size(); ++i) {
    dst[i] ^= src[i];
  }
}

Bytes xored(ByteView a, ByteView b) {
  Bytes out(a.begin(), a.end());
  xor_into(out, b);
  return out;
}

Bytes xored(ByteView a, ByteView b, ByteView c) {
  Bytes out = xored(a, b);
  xor_into(out, c);
  return out;
}

void check_pair_shapes(const SharePair& x, const SharePair& y, const char* op) {
  if (x.label == y.label) {
    throw Error("secretshare", "duplicate-label",
                std::string(op) + ": both shares are labelled " + to_char(x.label));
  }
  if (x.part1.size() != x.part2.size() || y.part1.size() != y.part2.size() ||
      x.part1.size() != y.part1.size()) {
    throw Error("secretshare", "length-mismatch",
                std::string(op) + ": share halves differ in length");
  }
  if (x.original_length != y.original_length) {
    throw Error("secretshare", "inconsistent-original-length",
                std::string(op) + ": shares disagree on the original length");
  }
  std::uint64_t padded = 2 * static_cast<std::uint64_t>(x.part1.size());
  if (x.original_length > padded || padded - x.original_length > 1) {
    throw Error("secretshare", "inconsistent-original-length",
                std::string(op) + ": original length does not fit the share size");
  }
}

SecretBlob blob_from_halves(Bytes s1, Bytes s2, std::uint64_t original_length) {
  SecretBlob out;
  out.payload = std::move(s1);
  out.payload.insert(out.payload.end(), s2.begin(), s2.end());
  out.original_length = original_length;
  return out;
}

}  // namespace

char to_char(ShareLabel label) { return static_cast<char>(label); }

ShareLabel label_from_char(char c) {
  switch (c) {
    case 'A':
      return ShareLabel::A;
    case 'B':
      return ShareLabel::B;
    case 'C':
      return ShareLabel::C;
    default:
      throw Error("secretshare", "bad-label", std::string("unknown share label: ") + c);
  }
}

SecretBlob SecretBlob::from_bytes(ByteView raw) {
  SecretBlob out;
  out.original_length = raw.size();
  out.payload.assign(raw.begin(), raw.end());
  if (out.payload.size() % 2 != 0) {
    out.payload.push_back(0x00);
  }
  return out;
}

Bytes SecretBlob::bytes() const {
  return Bytes(payload.begin(), payload.begin() + static_cast<std::ptrdiff_t>(original_length));
}

RandomTape RandomTape::draw(std::size_t half_len, EntropySource& entropy) {
  RandomTape tape;
  tape.r1 = entropy.draw(half_len);
  tape.r2 = entropy.draw(half_len);
  return tape;
}

const SharePair& ShareSet::by_label(ShareLabel label) const {
  switch (label) {
    case ShareLabel::A:
      return a;
    case ShareLabel::B:
      return b;
    case ShareLabel::C:
      return c;
  }
  throw Error("secretshare", "bad-label", "unknown share label");
}

std::tuple<Bytes, Bytes, std::uint64_t> pad_split(ByteView secret) {
  std::uint64_t original_length = secret.size();
  Bytes padded(secret.begin(), secret.end());
  if (padded.size() % 2 != 0) {
    padded.push_back(0x00);
  }
  std::size_t half = padded.size() / 2;
  Bytes s1(padded.begin(), padded.begin() + static_cast<std::ptrdiff_t>(half));
  Bytes s2(padded.begin() + static_cast<std::ptrdiff_t>(half), padded.end());
  return {std::move(s1), std::move(s2), original_length};
}

ShareSet share_xor23(const SecretBlob& secret, const RandomTape& tape) {
  std::size_t half = secret.payload.size() / 2;
  if (tape.r1.size() != half || tape.r2.size() != half) {
    throw Error("secretshare", "tape-length-mismatch",
                "random tape halves must each be " + std::to_string(half) + " bytes");
  }
  ByteView s1(secret.payload.data(), half);
  ByteView s2(secret.payload.data() + half, half);

  ShareSet set;
  set.a = {ShareLabel::A, xored(s1, tape.r1), xored(s2, tape.r2, tape.r1), secret.original_length};
  set.b = {ShareLabel::B, xored(s1, tape.r1, tape.r2), xored(s2, tape.r2), secret.original_length};
  set.c = {ShareLabel::C, tape.r1, tape.r2, secret.original_length};
  return set;
}

SecretBlob reconstruct_xor23(const SharePair& x, const SharePair& y) {
  check_pair_shapes(x, y, "reconstruct_xor23");
  const SharePair& first = to_char(x.label) < to_char(y.label) ? x : y;
  const SharePair& second = to_char(x.label) < to_char(y.label) ? y : x;

  Bytes s1;
  Bytes s2;
  if (first.label == ShareLabel::A && second.label == ShareLabel::C) {
    s1 = xored(first.part1, second.part1);
    s2 = xored(first.part2, second.part2, second.part1);
  } else if (first.label == ShareLabel::B && second.label == ShareLabel::C) {
    s1 = xored(first.part1, second.part1, second.part2);
    s2 = xored(first.part2, second.part2);
  } else {  // (A, B)
    s1 = xored(first.part1, first.part2, second.part2);
    s2 = xored(second.part2, first.part1, second.part1);
  }
  return blob_from_halves(std::move(s1), std::move(s2), first.original_length);
}

std::uint8_t gf256_mul(std::uint8_t a, std::uint8_t b) {
  std::uint8_t p = 0;
  for (int i = 0; i < 8; ++i) {
    if (b & 1) {
      p ^= a;
    }
    bool carry = (a & 0x80) != 0;
    a = static_cast<std::uint8_t>(a << 1);
    if (carry) {
      a ^= 0x1B;  // x^8 == x^4+x^3+x+1 under the reduction polynomial
    }
    b >>= 1;
  }
  return p;
}

std::uint8_t gf256_inv(std::uint8_t a) {
  if (a == 0) {
    throw Error("secretshare", "division-by-zero", "no inverse of 0 in GF(2^8)");
  }
  // a^254 == a^-1 since the multiplicative group has order 255.
  std::uint8_t result = 1;
  std::uint8_t base = a;
  int exp = 254;
  while (exp > 0) {
    if (exp & 1) {
      result = gf256_mul(result, base);
    }
    base = gf256_mul(base, base);
    exp >>= 1;
  }
  return result;
}

namespace {

std::uint8_t shamir_x(ShareLabel label) {
  switch (label) {
    case ShareLabel::A:
      return 1;
    case ShareLabel::B:
      return 2;
    case ShareLabel::C:
      return 3;
  }
  throw Error("secretshare", "bad-label", "unknown share label");
}

SharePair pair_from_flat(ShareLabel label, const Bytes& flat, std::uint64_t original_length) {
  std::size_t half = flat.size() / 2;
  SharePair p;
  p.label = label;
  p.part1.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(half));
  p.part2.assign(flat.begin() + static_cast<std::ptrdiff_t>(half), flat.end());
  p.original_length = original_length;
  return p;
}

Bytes flat_from_pair(const SharePair& p) {
  Bytes flat = p.part1;
  flat.insert(flat.end(), p.part2.begin(), p.part2.end());
  return flat;
}

}  // namespace

ShareSet share_shamir23(const SecretBlob& secret, EntropySource& entropy) {
  Bytes coeffs = entropy.draw(secret.payload.size());
  Bytes flat_a(secret.payload.size());
  Bytes flat_b(secret.payload.size());
  Bytes flat_c(secret.payload.size());
  for (std::size_t i = 0; i < secret.payload.size(); ++i) {
    std::uint8_t s = secret.payload[i];
    std::uint8_t c = coeffs[i];
    flat_a[i] = s ^ gf256_mul(c, 1);
    flat_b[i] = s ^ gf256_mul(c, 2);
    flat_c[i] = s ^ gf256_mul(c, 3);
  }
  secure_wipe(coeffs);

  ShareSet set;
  set.a = pair_from_flat(ShareLabel::A, flat_a, secret.original_length);
  set.b = pair_from_flat(ShareLabel::B, flat_b, secret.original_length);
  set.c = pair_from_flat(ShareLabel::C, flat_c, secret.original_length);
  return set;
}

SecretBlob reconstruct_shamir23(const SharePair& x, const SharePair& y) {
  check_pair_shapes(x, y, "reconstruct_shamir23");
  std::uint8_t xi = shamir_x(x.label);
  std::uint8_t xj = shamir_x(y.label);
  // Lagrange basis at 0: Li = xj / (xi ^ xj), Lj = xi / (xi ^ xj).
  std::uint8_t denom_inv = gf256_inv(xi ^ xj);
  std::uint8_t li = gf256_mul(xj, denom_inv);
  std::uint8_t lj = gf256_mul(xi, denom_inv);

  Bytes flat_x = flat_from_pair(x);
  Bytes flat_y = flat_from_pair(y);
  Bytes secret(flat_x.size());
  for (std::size_t i = 0; i < secret.size(); ++i) {
    secret[i] = static_cast<std::uint8_t>(gf256_mul(flat_x[i], li) ^ gf256_mul(flat_y[i], lj));
  }

  std::size_t half = secret.size() / 2;
  Bytes s1(secret.begin(), secret.begin() + static_cast<std::ptrdiff_t>(half));
  Bytes s2(secret.begin() + static_cast<std::ptrdiff_t>(half), secret.end());
  return blob_from_halves(std::move(s1), std::move(s2), x.original_length);
}

}  // namespace genovault::secretshare
