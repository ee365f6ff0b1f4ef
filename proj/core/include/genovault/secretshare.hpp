// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <tuple>

#include "genovault/common.hpp"

namespace genovault::secretshare {

enum class ShareLabel : std::uint8_t { A = 'A', B = 'B', C = 'C' };

char to_char(ShareLabel label);
ShareLabel label_from_char(char c);

/// Secret S held as two equal halves. The payload is padded to even length;
/// original_length remembers the pre-padding byte count.
struct SecretBlob {
  Bytes payload;
  std::uint64_t original_length = 0;

  static SecretBlob from_bytes(ByteView raw);

  /// The secret with padding stripped.
  Bytes bytes() const;
};

/// One-time randomness R = R1.R2 for a single sharing. Halves must match the
/// padded secret halves and must never be reused.
struct RandomTape {
  Bytes r1;
  Bytes r2;

  static RandomTape draw(std::size_t half_len, EntropySource& entropy);
};

struct SharePair {
  ShareLabel label = ShareLabel::A;
  Bytes part1;
  Bytes part2;
  std::uint64_t original_length = 0;
};

struct ShareSet {
  SharePair a;
  SharePair b;
  SharePair c;

  const SharePair& by_label(ShareLabel label) const;
};

/// Splits a secret into equal halves, appending one 0x00 byte first when the
/// input length is odd. Returns (s1, s2, original_length).
std::tuple<Bytes, Bytes, std::uint64_t> pad_split(ByteView secret);

// XOR-based (2,3) threshold sharing:
//   A = (S1^R1).(S2^R2^R1)
//   B = (S1^R1^R2).(S2^R2)
//   C = R1.R2
ShareSet share_xor23(const SecretBlob& secret, const RandomTape& tape);
SecretBlob reconstruct_xor23(const SharePair& x, const SharePair& y);

// Shamir (2,3) comparison backend: per secret byte s a degree-1 polynomial
// p(x) = s + c*x over GF(2^8) (reduction x^8+x^4+x^3+x+1), evaluated at
// x = 1, 2, 3 for labels A, B, C.
ShareSet share_shamir23(const SecretBlob& secret, EntropySource& entropy);
SecretBlob reconstruct_shamir23(const SharePair& x, const SharePair& y);

std::uint8_t gf256_mul(std::uint8_t a, std::uint8_t b);
std::uint8_t gf256_inv(std::uint8_t a);

// ---------------------------------------------------------------------------
// Share container format (see docs/share-format.md). Large inputs are
// processed in fixed-size chunks, each chunk shared independently with fresh
// tape, so GB-class files never need to fit in memory at once.

inline constexpr std::size_t kDefaultChunkSize = 64ull << 20;  // 64 MiB

inline constexpr std::array<std::uint8_t, 16> kShareMagic = {
    'G', 'E', 'N', 'O', 'V', 'A', 'U', 'L', 'T', '-', 'S', 'H', 'A', 'R', 'E', 0};

struct EncodedShareSet {
  Bytes a;
  Bytes b;
  Bytes c;

  const Bytes& by_label(ShareLabel label) const;
};

struct ShareFileInfo {
  ShareLabel label;
  std::uint64_t original_length;
  std::uint64_t chunk_count;
};

ShareFileInfo parse_share_header(ByteView encoded);

/// Streams `secret_len` bytes from `secret`, sharing chunk by chunk, and
/// appends each share's container bytes to the matching sink.
void share_xor23_stream(std::istream& secret, std::uint64_t secret_len, std::ostream& out_a,
                        std::ostream& out_b, std::ostream& out_c, EntropySource& entropy,
                        std::size_t chunk_size = kDefaultChunkSize);

EncodedShareSet share_xor23_encoded(ByteView secret, EntropySource& entropy,
                                    std::size_t chunk_size = kDefaultChunkSize);

/// Reconstructs from any two encoded shares with distinct labels.
Bytes reconstruct_xor23_encoded(ByteView x, ByteView y,
                                std::size_t chunk_size = kDefaultChunkSize);

void share_xor23_to_files(const std::filesystem::path& secret_file,
                          const std::filesystem::path& out_a, const std::filesystem::path& out_b,
                          const std::filesystem::path& out_c, EntropySource& entropy,
                          std::size_t chunk_size = kDefaultChunkSize);

Bytes reconstruct_xor23_from_files(const std::filesystem::path& x,
                                   const std::filesystem::path& y,
                                   std::size_t chunk_size = kDefaultChunkSize);

}  // namespace genovault::secretshare
