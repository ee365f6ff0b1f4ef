// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace genovault {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

/// Domain error carrying a module-qualified code (e.g. "keyfabric.no-route").
/// The CLI maps these to exit code 1 and prints the qualified code.
class Error : public std::runtime_error {
 public:
  Error(std::string module, std::string code, const std::string& message);

  const std::string& module() const noexcept { return module_; }
  const std::string& code() const noexcept { return code_; }
  std::string qualified() const { return module_ + "." + code_; }

 private:
  std::string module_;
  std::string code_;
};

// Best-effort wipe that the optimizer may not elide.
void secure_wipe(std::uint8_t* data, std::size_t len) noexcept;
void secure_wipe(Bytes& data) noexcept;

std::string to_hex(ByteView data);
Bytes from_hex(const std::string& hex);

void put_u32_be(Bytes& out, std::uint32_t v);
void put_u64_be(Bytes& out, std::uint64_t v);
std::uint32_t get_u32_be(ByteView in, std::size_t offset);
std::uint64_t get_u64_be(ByteView in, std::size_t offset);

Bytes sha256(ByteView data);

/// Source of key material and random tapes. The simulated key fabric draws
/// everything from one of these; the quantum layer it stands in for is out of
/// scope, so the interface is the substitution point.
class EntropySource {
 public:
  virtual ~EntropySource() = default;
  virtual void fill(std::uint8_t* out, std::size_t len) = 0;
  Bytes draw(std::size_t len);
};

/// Deterministic stream (splitmix64). Seedable so relay, sharing and pipeline
/// runs are bit-reproducible in tests and in `demo --seed`.
class SeededEntropy final : public EntropySource {
 public:
  explicit SeededEntropy(std::uint64_t seed) : state_(seed) {}
  void fill(std::uint8_t* out, std::size_t len) override;

 private:
  std::mutex mu_;
  std::uint64_t state_;
};

/// OS entropy for normal runs.
class SystemEntropy final : public EntropySource {
 public:
  void fill(std::uint8_t* out, std::size_t len) override;

 private:
  std::mutex mu_;
};

/// Single-use key material. Bytes are handed out exactly once; consumed
/// regions are wiped in place, so an inspection of the buffer after use shows
/// zeros. Sequential consumers use take(); receivers that see frames out of
/// order use take_at(), and any overlap with an already-consumed region is a
/// key-reuse error.
class SecureBuffer {
 public:
  explicit SecureBuffer(Bytes material);
  ~SecureBuffer();

  SecureBuffer(const SecureBuffer&) = delete;
  SecureBuffer& operator=(const SecureBuffer&) = delete;

  std::size_t size() const;
  std::size_t cursor() const;
  std::size_t remaining() const;  // bytes after the sequential cursor
  bool fully_consumed() const;
  bool erased() const;

  Bytes take(std::size_t n);
  Bytes take_at(std::size_t offset, std::size_t n);
  void erase();

  /// Raw buffer content as currently stored (consumed regions read as zero).
  Bytes inspect() const;

 private:
  Bytes take_locked(std::size_t offset, std::size_t n);

  mutable std::mutex mu_;
  Bytes data_;
  std::map<std::size_t, std::size_t> consumed_;  // start -> end, disjoint
  std::size_t cursor_ = 0;
  bool erased_ = false;
};

enum class KeyStatus { available, consumed, erased };

const char* to_string(KeyStatus s);

/// Single-owner handle over key material supplied by the fabric or derived by
/// the key lifecycle. Transitions available -> consumed -> erased, and the
/// material is unreadable (wiped) past each transition.
class KeyHandle {
 public:
  KeyHandle() = default;
  KeyHandle(std::uint64_t id, std::string owner, Bytes material);
  KeyHandle(std::uint64_t id, std::string owner, std::shared_ptr<SecureBuffer> buffer);

  KeyHandle(KeyHandle&&) = default;
  KeyHandle& operator=(KeyHandle&&) = default;
  KeyHandle(const KeyHandle&) = delete;
  KeyHandle& operator=(const KeyHandle&) = delete;

  std::uint64_t id() const { return id_; }
  const std::string& owner() const { return owner_; }
  std::size_t size() const;
  std::size_t remaining() const;
  std::size_t cursor() const;
  KeyStatus status() const;

  Bytes take(std::size_t n);
  Bytes take_at(std::size_t offset, std::size_t n);
  void erase();

  Bytes inspect() const;

 private:
  std::uint64_t id_ = 0;
  std::string owner_;
  std::shared_ptr<SecureBuffer> buf_;
};

}  // namespace genovault
