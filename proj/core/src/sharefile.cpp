// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
//
// Share container I/O. Layout (all integers big-endian, see
// docs/share-format.md):
//
//   [0,16)   magic "GENOVAULT-SHARE\0"
//   [16]     label byte 'A' | 'B' | 'C'
//   [17,25)  original_length (u64)
//   [25,33)  chunk_count (u64)
//   [33,..)  per chunk: part1 || part2
//
// The chunk size itself is not stored; writer and reader agree on it out of
// band (default 64 MiB). chunk_count cross-checks the agreement.

#include <fstream>
#include <sstream>

#include "genovault/secretshare.hpp"

namespace genovault::secretshare {

namespace {

constexpr std::size_t kHeaderSize = 16 + 1 + 8 + 8;

void check_chunk_size(std::size_t chunk_size) {
  if (chunk_size == 0) {
    throw Error("secretshare", "bad-chunk-size", "chunk size must be positive");
  }
}

std::uint64_t chunk_count_for(std::uint64_t len, std::size_t chunk_size) {
  return len == 0 ? 0 : (len + chunk_size - 1) / chunk_size;
}

// Unpadded size of chunk `index` of a `len`-byte secret.
std::uint64_t chunk_len_at(std::uint64_t len, std::size_t chunk_size, std::uint64_t index) {
  std::uint64_t start = index * chunk_size;
  return std::min<std::uint64_t>(chunk_size, len - start);
}

std::uint64_t padded(std::uint64_t n) { return n + (n % 2); }

Bytes encode_header(ShareLabel label, std::uint64_t original_length, std::uint64_t chunk_count) {
  Bytes out(kShareMagic.begin(), kShareMagic.end());
  out.push_back(static_cast<std::uint8_t>(label));
  put_u64_be(out, original_length);
  put_u64_be(out, chunk_count);
  return out;
}

void write_bytes(std::ostream& os, ByteView data) {
  os.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!os) {
    throw Error("secretshare", "io-error", "failed to write share data");
  }
}

Bytes read_exact(std::istream& is, std::size_t n, const char* what) {
  Bytes buf(n);
  is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
  if (static_cast<std::size_t>(is.gcount()) != n) {
    throw Error("secretshare", "truncated-share", std::string("short read while reading ") + what);
  }
  return buf;
}

struct ShareReader {
  std::istream* is;
  ShareFileInfo info;

  SharePair read_chunk_pair(std::uint64_t chunk_index, std::size_t chunk_size) {
    std::uint64_t unpadded = chunk_len_at(info.original_length, chunk_size, chunk_index);
    std::size_t half = static_cast<std::size_t>(padded(unpadded) / 2);
    SharePair p;
    p.label = info.label;
    p.part1 = read_exact(*is, half, "share chunk");
    p.part2 = read_exact(*is, half, "share chunk");
    p.original_length = unpadded;
    return p;
  }
};

ShareFileInfo read_header(std::istream& is) {
  Bytes hdr = read_exact(is, kHeaderSize, "share header");
  if (!std::equal(kShareMagic.begin(), kShareMagic.end(), hdr.begin())) {
    throw Error("secretshare", "bad-magic", "not a genovault share file");
  }
  ShareFileInfo info;
  info.label = label_from_char(static_cast<char>(hdr[16]));
  info.original_length = get_u64_be(hdr, 17);
  info.chunk_count = get_u64_be(hdr, 25);
  return info;
}

void reconstruct_xor23_stream(std::istream& xs, std::istream& ys, std::ostream& out,
                              std::size_t chunk_size) {
  check_chunk_size(chunk_size);
  ShareReader x{&xs, read_header(xs)};
  ShareReader y{&ys, read_header(ys)};

  if (x.info.label == y.info.label) {
    throw Error("secretshare", "duplicate-label", "both share files carry the same label");
  }
  if (x.info.original_length != y.info.original_length ||
      x.info.chunk_count != y.info.chunk_count) {
    throw Error("secretshare", "inconsistent-original-length",
                "share files disagree on length or chunk count");
  }
  if (x.info.chunk_count != chunk_count_for(x.info.original_length, chunk_size)) {
    throw Error("secretshare", "chunk-mismatch",
                "share file chunk count does not match the configured chunk size");
  }

  for (std::uint64_t i = 0; i < x.info.chunk_count; ++i) {
    SharePair px = x.read_chunk_pair(i, chunk_size);
    SharePair py = y.read_chunk_pair(i, chunk_size);
    SecretBlob blob = reconstruct_xor23(px, py);
    write_bytes(out, blob.bytes());
  }
}

class ViewStreambuf : public std::streambuf {
 public:
  explicit ViewStreambuf(ByteView view) {
    char* p = const_cast<char*>(reinterpret_cast<const char*>(view.data()));
    setg(p, p, p + view.size());
  }
};

}  // namespace

const Bytes& EncodedShareSet::by_label(ShareLabel label) const {
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

ShareFileInfo parse_share_header(ByteView encoded) {
  ViewStreambuf sb(encoded);
  std::istream is(&sb);
  return read_header(is);
}

void share_xor23_stream(std::istream& secret, std::uint64_t secret_len, std::ostream& out_a,
                        std::ostream& out_b, std::ostream& out_c, EntropySource& entropy,
                        std::size_t chunk_size) {
  check_chunk_size(chunk_size);
  std::uint64_t chunks = chunk_count_for(secret_len, chunk_size);
  write_bytes(out_a, encode_header(ShareLabel::A, secret_len, chunks));
  write_bytes(out_b, encode_header(ShareLabel::B, secret_len, chunks));
  write_bytes(out_c, encode_header(ShareLabel::C, secret_len, chunks));

  for (std::uint64_t i = 0; i < chunks; ++i) {
    std::uint64_t this_len = chunk_len_at(secret_len, chunk_size, i);
    Bytes chunk = read_exact(secret, static_cast<std::size_t>(this_len), "secret input");
    SecretBlob blob = SecretBlob::from_bytes(chunk);
    secure_wipe(chunk);
    RandomTape tape = RandomTape::draw(blob.payload.size() / 2, entropy);
    ShareSet set = share_xor23(blob, tape);
    secure_wipe(blob.payload);
    secure_wipe(tape.r1);
    secure_wipe(tape.r2);
    write_bytes(out_a, set.a.part1);
    write_bytes(out_a, set.a.part2);
    write_bytes(out_b, set.b.part1);
    write_bytes(out_b, set.b.part2);
    write_bytes(out_c, set.c.part1);
    write_bytes(out_c, set.c.part2);
  }
}

EncodedShareSet share_xor23_encoded(ByteView secret, EntropySource& entropy,
                                    std::size_t chunk_size) {
  ViewStreambuf sb(secret);
  std::istream is(&sb);
  std::ostringstream a, b, c;
  share_xor23_stream(is, secret.size(), a, b, c, entropy, chunk_size);
  auto to_bytes = [](const std::ostringstream& os) {
    const std::string s = os.str();
    return Bytes(s.begin(), s.end());
  };
  return EncodedShareSet{to_bytes(a), to_bytes(b), to_bytes(c)};
}

Bytes reconstruct_xor23_encoded(ByteView x, ByteView y, std::size_t chunk_size) {
  ViewStreambuf xb(x);
  ViewStreambuf yb(y);
  std::istream xs(&xb);
  std::istream ys(&yb);
  std::ostringstream out;
  reconstruct_xor23_stream(xs, ys, out, chunk_size);
  const std::string s = out.str();
  return Bytes(s.begin(), s.end());
}

void share_xor23_to_files(const std::filesystem::path& secret_file,
                          const std::filesystem::path& out_a, const std::filesystem::path& out_b,
                          const std::filesystem::path& out_c, EntropySource& entropy,
                          std::size_t chunk_size) {
  std::ifstream in(secret_file, std::ios::binary);
  if (!in) {
    throw Error("secretshare", "io-error", "cannot open " + secret_file.string());
  }
  std::uint64_t len = std::filesystem::file_size(secret_file);
  std::ofstream fa(out_a, std::ios::binary);
  std::ofstream fb(out_b, std::ios::binary);
  std::ofstream fc(out_c, std::ios::binary);
  if (!fa || !fb || !fc) {
    throw Error("secretshare", "io-error", "cannot open share output files");
  }
  share_xor23_stream(in, len, fa, fb, fc, entropy, chunk_size);
}

Bytes reconstruct_xor23_from_files(const std::filesystem::path& x, const std::filesystem::path& y,
                                   std::size_t chunk_size) {
  std::ifstream fx(x, std::ios::binary);
  std::ifstream fy(y, std::ios::binary);
  if (!fx || !fy) {
    throw Error("secretshare", "io-error", "cannot open share input files");
  }
  std::ostringstream out;
  reconstruct_xor23_stream(fx, fy, out, chunk_size);
  const std::string s = out.str();
  return Bytes(s.begin(), s.end());
}

}  // namespace genovault::secretshare
