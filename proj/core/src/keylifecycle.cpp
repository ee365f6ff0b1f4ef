// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/keylifecycle.hpp"

#include <openssl/evp.h>

#include <algorithm>

namespace genovault::keylifecycle {

std::uint64_t LongTermStore::put(Bytes data) {
  std::lock_guard<std::mutex> lock(mu_);
  std::uint64_t id = ++counter_;
  entries_[id] = Entry{std::move(data), false};
  return id;
}

Bytes LongTermStore::read(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error("keylifecycle", "unknown-entry", "no long-term entry " + std::to_string(id));
  }
  if (it->second.erased) {
    throw Error("keylifecycle", "erased-entry",
                "long-term entry " + std::to_string(id) + " is erased");
  }
  return it->second.data;
}

void LongTermStore::erase(std::uint64_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  if (it != entries_.end()) {
    it->second.erased = true;
  }
}

bool LongTermStore::is_erased(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  return it != entries_.end() && it->second.erased;
}

bool LongTermStore::contains(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.find(id) != entries_.end();
}

Bytes LongTermStore::forensic_dump(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error("keylifecycle", "unknown-entry", "no long-term entry " + std::to_string(id));
  }
  // Remanence: the bytes survive the logical erase.
  return it->second.data;
}

std::uint64_t VolatileStore::put(Bytes data) {
  std::lock_guard<std::mutex> lock(mu_);
  std::uint64_t id = ++counter_;
  entries_[id] = std::make_shared<SecureBuffer>(std::move(data));
  return id;
}

std::shared_ptr<SecureBuffer> VolatileStore::entry(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  if (it == entries_.end()) {
    throw Error("keylifecycle", "unknown-entry", "no volatile entry " + std::to_string(id));
  }
  return it->second;
}

Bytes VolatileStore::read(std::uint64_t id) const {
  auto buf = entry(id);
  if (buf->erased()) {
    throw Error("keylifecycle", "erased-entry", "volatile entry " + std::to_string(id) +
                                                    " is erased");
  }
  return buf->inspect();
}

bool VolatileStore::contains(std::uint64_t id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return entries_.find(id) != entries_.end();
}

void VolatileStore::erase(std::uint64_t id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = entries_.find(id);
  if (it != entries_.end()) {
    it->second->erase();
    entries_.erase(it);
  }
}

void VolatileStore::power_loss() {
  std::lock_guard<std::mutex> lock(mu_);
  for (auto& [id, buf] : entries_) {
    buf->erase();
  }
  entries_.clear();
}

Bytes aes128_ctr_keystream(ByteView key_seed, std::size_t out_len) {
  std::array<std::uint8_t, 16> key{};
  std::copy_n(key_seed.begin(), std::min<std::size_t>(key_seed.size(), 16), key.begin());

  EVP_CIPHER_CTX* ctx = EVP_CIPHER_CTX_new();
  if (ctx == nullptr ||
      EVP_EncryptInit_ex(ctx, EVP_aes_128_ecb(), nullptr, key.data(), nullptr) != 1) {
    EVP_CIPHER_CTX_free(ctx);
    throw Error("keylifecycle", "cipher-failure", "AES context initialisation failed");
  }
  EVP_CIPHER_CTX_set_padding(ctx, 0);

  Bytes out;
  out.reserve(out_len + 16);
  std::array<std::uint8_t, 16> counter{};
  std::array<std::uint8_t, 32> block{};
  std::uint64_t counter_value = 0;
  while (out.size() < out_len) {
    for (int i = 0; i < 8; ++i) {
      counter[8 + i] = static_cast<std::uint8_t>(counter_value >> (56 - 8 * i));
    }
    int written = 0;
    if (EVP_EncryptUpdate(ctx, block.data(), &written, counter.data(), 16) != 1 || written != 16) {
      EVP_CIPHER_CTX_free(ctx);
      throw Error("keylifecycle", "cipher-failure", "AES block encryption failed");
    }
    out.insert(out.end(), block.begin(), block.begin() + 16);
    ++counter_value;
  }
  EVP_CIPHER_CTX_free(ctx);
  secure_wipe(key.data(), key.size());
  out.resize(out_len);  // truncate the final block
  return out;
}

KeyQuad LifecycleVault::split_key(KeyHandle& k0, std::size_t k2_size) {
  if (k0.status() != KeyStatus::available) {
    throw Error("keylifecycle", "handle-not-available",
                std::string("K0 handle is ") + to_string(k0.status()));
  }
  std::size_t total = k0.remaining();
  if (k2_size == 0 || k2_size > total) {
    throw Error("keylifecycle", "ratio-violation", "K2 size must be in [1, size(K0)]");
  }
  std::size_t k1_size = total - k2_size;
  if (k2_size * 64 > k1_size) {
    throw Error("keylifecycle", "ratio-violation",
                "size(K1) must dominate: require 64*size(K2) <= size(K1), got " +
                    std::to_string(k1_size) + "/" + std::to_string(k2_size));
  }

  Bytes k1 = k0.take(k1_size);
  Bytes k2 = k0.take(k2_size);

  KeyQuad quad;
  quad.k1_size = k1_size;
  quad.k2_size = k2_size;
  quad.k1_id = long_term_.put(std::move(k1));
  quad.k2_id = volatile_.put(std::move(k2));
  return quad;
}

void LifecycleVault::expand_key(KeyQuad& quad) {
  if (!quad.k2_id || !volatile_.contains(*quad.k2_id)) {
    throw Error("keylifecycle", "missing-component", "K2 is not present in volatile storage");
  }
  Bytes k2 = volatile_.read(*quad.k2_id);
  Bytes k3 = aes128_ctr_keystream(k2, quad.k1_size);
  secure_wipe(k2);
  quad.k3_id = volatile_.put(std::move(k3));
}

KeyHandle LifecycleVault::derive_otp_key(KeyQuad& quad) {
  if (!quad.k1_id || !long_term_.contains(*quad.k1_id) || long_term_.is_erased(*quad.k1_id)) {
    throw Error("keylifecycle", "missing-component", "K1 is not readable");
  }
  if (!quad.k3_id || !volatile_.contains(*quad.k3_id)) {
    throw Error("keylifecycle", "missing-component", "K3 is not present in volatile storage");
  }
  Bytes k1 = long_term_.read(*quad.k1_id);
  Bytes k3 = volatile_.read(*quad.k3_id);
  Bytes k4(k1.size());
  for (std::size_t i = 0; i < k4.size(); ++i) {
    k4[i] = k1[i] ^ k3[i];
  }
  secure_wipe(k1);
  secure_wipe(k3);

  // K4 lives in volatile storage; the handle aliases the same buffer, so a
  // later erase leaves nothing readable through the handle either.
  std::uint64_t id = volatile_.put(std::move(k4));
  quad.k4_id = id;
  return KeyHandle(++handle_counter_, "otp", volatile_.entry(id));
}

void LifecycleVault::erase_volatile_keys(KeyQuad& quad) {
  if (quad.k2_id) volatile_.erase(*quad.k2_id);
  if (quad.k3_id) volatile_.erase(*quad.k3_id);
  if (quad.k4_id) volatile_.erase(*quad.k4_id);
}

void LifecycleVault::erase_long_term(KeyQuad& quad) {
  if (quad.k1_id) {
    long_term_.erase(*quad.k1_id);
  }
}

void LifecycleVault::erase(KeyQuad& quad) {
  erase_volatile_keys(quad);
  erase_long_term(quad);
}

}  // namespace genovault::keylifecycle
