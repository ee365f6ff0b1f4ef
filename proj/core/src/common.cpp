// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/common.hpp"

#include <openssl/sha.h>

#include <algorithm>
#include <random>

namespace genovault {

Error::Error(std::string module, std::string code, const std::string& message)
    : std::runtime_error(message), module_(std::move(module)), code_(std::move(code)) {}

void secure_wipe(std::uint8_t* data, std::size_t len) noexcept {
  volatile std::uint8_t* p = data;
  for (std::size_t i = 0; i < len; ++i) {
    p[i] = 0;
  }
}

void secure_wipe(Bytes& data) noexcept {
  if (!data.empty()) {
    secure_wipe(data.data(), data.size());
  }
}

std::string to_hex(ByteView data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0x0F]);
  }
  return out;
}

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(const std::string& hex) {
  if (hex.size() % 2 != 0) {
    throw Error("common", "bad-hex", "odd-length hex string");
  }
  Bytes out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    int hi = hex_nibble(hex[2 * i]);
    int lo = hex_nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) {
      throw Error("common", "bad-hex", "invalid hex digit");
    }
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

void put_u32_be(Bytes& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

void put_u64_be(Bytes& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) {
    out.push_back(static_cast<std::uint8_t>(v >> shift));
  }
}

std::uint32_t get_u32_be(ByteView in, std::size_t offset) {
  if (offset + 4 > in.size()) {
    throw Error("common", "short-buffer", "u32 read past end of buffer");
  }
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) {
    v = (v << 8) | in[offset + i];
  }
  return v;
}

std::uint64_t get_u64_be(ByteView in, std::size_t offset) {
  if (offset + 8 > in.size()) {
    throw Error("common", "short-buffer", "u64 read past end of buffer");
  }
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | in[offset + i];
  }
  return v;
}

Bytes sha256(ByteView data) {
  Bytes digest(SHA256_DIGEST_LENGTH);
  SHA256(data.data(), data.size(), digest.data());
  return digest;
}

Bytes EntropySource::draw(std::size_t len) {
  Bytes out(len);
  if (len > 0) {
    fill(out.data(), len);
  }
  return out;
}

void SeededEntropy::fill(std::uint8_t* out, std::size_t len) {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t i = 0;
  while (i < len) {
    // splitmix64 step
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z = z ^ (z >> 31);
    for (int b = 0; b < 8 && i < len; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(z >> (8 * b));
    }
  }
}

void SystemEntropy::fill(std::uint8_t* out, std::size_t len) {
  std::lock_guard<std::mutex> lock(mu_);
  static thread_local std::random_device dev;
  std::size_t i = 0;
  while (i < len) {
    unsigned int r = dev();
    for (std::size_t b = 0; b < sizeof(r) && i < len; ++b, ++i) {
      out[i] = static_cast<std::uint8_t>(r >> (8 * b));
    }
  }
}

SecureBuffer::SecureBuffer(Bytes material) : data_(std::move(material)) {}

SecureBuffer::~SecureBuffer() { secure_wipe(data_); }

std::size_t SecureBuffer::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return data_.size();
}

std::size_t SecureBuffer::cursor() const {
  std::lock_guard<std::mutex> lock(mu_);
  return cursor_;
}

std::size_t SecureBuffer::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  return data_.size() - cursor_;
}

bool SecureBuffer::fully_consumed() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t covered = 0;
  for (const auto& [start, end] : consumed_) {
    covered += end - start;
  }
  return covered == data_.size();
}

bool SecureBuffer::erased() const {
  std::lock_guard<std::mutex> lock(mu_);
  return erased_;
}

Bytes SecureBuffer::take(std::size_t n) {
  std::lock_guard<std::mutex> lock(mu_);
  Bytes out = take_locked(cursor_, n);
  cursor_ += n;
  return out;
}

Bytes SecureBuffer::take_at(std::size_t offset, std::size_t n) {
  std::lock_guard<std::mutex> lock(mu_);
  Bytes out = take_locked(offset, n);
  cursor_ = std::max(cursor_, offset + n);
  return out;
}

Bytes SecureBuffer::take_locked(std::size_t offset, std::size_t n) {
  if (erased_) {
    throw Error("keyfabric", "key-erased", "key material was erased");
  }
  if (offset + n > data_.size()) {
    throw Error("keyfabric", "key-exhausted",
                "requested " + std::to_string(n) + " bytes at offset " + std::to_string(offset) +
                    ", buffer holds " + std::to_string(data_.size()));
  }
  if (n == 0) {
    return {};
  }
  // Overlap with any consumed interval is a single-use violation.
  auto it = consumed_.upper_bound(offset);
  if (it != consumed_.begin()) {
    auto prev = std::prev(it);
    if (prev->second > offset) {
      throw Error("keyfabric", "key-reuse", "key slice overlaps consumed region");
    }
  }
  if (it != consumed_.end() && it->first < offset + n) {
    throw Error("keyfabric", "key-reuse", "key slice overlaps consumed region");
  }
  Bytes out(data_.begin() + static_cast<std::ptrdiff_t>(offset),
            data_.begin() + static_cast<std::ptrdiff_t>(offset + n));
  secure_wipe(data_.data() + offset, n);

  // Insert [offset, offset+n), merging with neighbours.
  std::size_t start = offset;
  std::size_t end = offset + n;
  if (it != consumed_.begin()) {
    auto prev = std::prev(it);
    if (prev->second == start) {
      start = prev->first;
      consumed_.erase(prev);
    }
  }
  auto next = consumed_.find(end);
  if (next != consumed_.end()) {
    end = next->second;
    consumed_.erase(next);
  }
  consumed_[start] = end;
  return out;
}

void SecureBuffer::erase() {
  std::lock_guard<std::mutex> lock(mu_);
  secure_wipe(data_);
  consumed_.clear();
  consumed_[0] = data_.size();
  cursor_ = data_.size();
  erased_ = true;
}

Bytes SecureBuffer::inspect() const {
  std::lock_guard<std::mutex> lock(mu_);
  return data_;
}

const char* to_string(KeyStatus s) {
  switch (s) {
    case KeyStatus::available:
      return "available";
    case KeyStatus::consumed:
      return "consumed";
    case KeyStatus::erased:
      return "erased";
  }
  return "unknown";
}

KeyHandle::KeyHandle(std::uint64_t id, std::string owner, Bytes material)
    : id_(id), owner_(std::move(owner)), buf_(std::make_shared<SecureBuffer>(std::move(material))) {}

KeyHandle::KeyHandle(std::uint64_t id, std::string owner, std::shared_ptr<SecureBuffer> buffer)
    : id_(id), owner_(std::move(owner)), buf_(std::move(buffer)) {}

std::size_t KeyHandle::size() const { return buf_ ? buf_->size() : 0; }

std::size_t KeyHandle::remaining() const { return buf_ ? buf_->remaining() : 0; }

std::size_t KeyHandle::cursor() const { return buf_ ? buf_->cursor() : 0; }

KeyStatus KeyHandle::status() const {
  if (!buf_ || buf_->erased()) {
    return KeyStatus::erased;
  }
  if (buf_->size() > 0 && buf_->fully_consumed()) {
    return KeyStatus::consumed;
  }
  return KeyStatus::available;
}

Bytes KeyHandle::take(std::size_t n) {
  if (!buf_) {
    throw Error("keyfabric", "key-erased", "empty key handle");
  }
  return buf_->take(n);
}

Bytes KeyHandle::take_at(std::size_t offset, std::size_t n) {
  if (!buf_) {
    throw Error("keyfabric", "key-erased", "empty key handle");
  }
  return buf_->take_at(offset, n);
}

void KeyHandle::erase() {
  if (buf_) {
    buf_->erase();
  }
}

Bytes KeyHandle::inspect() const { return buf_ ? buf_->inspect() : Bytes{}; }

}  // namespace genovault
