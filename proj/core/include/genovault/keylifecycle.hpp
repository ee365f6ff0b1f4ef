// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <optional>

#include "genovault/common.hpp"

namespace genovault::keylifecycle {

/// Long-term medium (SSD model). Erase marks the entry erased, but the
/// pre-erasure bytes stay recoverable through forensic_dump: erased SSD data
/// can often be restored, and the lifecycle's security argument must hold
/// anyway.
class LongTermStore {
 public:
  std::uint64_t put(Bytes data);
  Bytes read(std::uint64_t id) const;
  void erase(std::uint64_t id);
  bool is_erased(std::uint64_t id) const;
  bool contains(std::uint64_t id) const;
  Bytes forensic_dump(std::uint64_t id) const;

 private:
  struct Entry {
    Bytes data;
    bool erased = false;
  };
  mutable std::mutex mu_;
  std::map<std::uint64_t, Entry> entries_;
  std::uint64_t counter_ = 0;
};

/// Short-term memory (DRAM model). Erase is absolute: bytes are wiped and the
/// entry disappears; there is no forensic view, and power loss clears
/// everything.
class VolatileStore {
 public:
  std::uint64_t put(Bytes data);
  std::shared_ptr<SecureBuffer> entry(std::uint64_t id) const;
  Bytes read(std::uint64_t id) const;
  bool contains(std::uint64_t id) const;
  void erase(std::uint64_t id);
  void power_loss();

 private:
  mutable std::mutex mu_;
  std::map<std::uint64_t, std::shared_ptr<SecureBuffer>> entries_;
  std::uint64_t counter_ = 0;
};

struct KeyQuad {
  std::optional<std::uint64_t> k1_id;  // long-term store
  std::optional<std::uint64_t> k2_id;  // volatile
  std::optional<std::uint64_t> k3_id;  // volatile
  std::optional<std::uint64_t> k4_id;  // volatile
  std::size_t k1_size = 0;
  std::size_t k2_size = 0;
};

/// AES-128 counter-mode keystream: the cipher is keyed with `key_seed`
/// zero-padded or truncated to 16 bytes and encrypts a big-endian 128-bit
/// counter starting at 0; output is truncated to out_len.
Bytes aes128_ctr_keystream(ByteView key_seed, std::size_t out_len);

/// Key generation and erasure for OTP transmission:
///   step 1  split K0 into K1 (long-term) and K2 (volatile), size(K1) >> size(K2)
///   step 2  expand K2 into K3 with the block cipher, size(K3) = size(K1)
///   step 3  derive the OTP key K4 = K1 ^ K3 (volatile)
///   step 4  erase volatile keys (K2, K3, K4)
///   step 5  erase long-term K1
/// After steps 4-5 no store API can rebuild K4, even though the long-term
/// medium may still leak K1 forensically.
class LifecycleVault {
 public:
  KeyQuad split_key(KeyHandle& k0, std::size_t k2_size);
  void expand_key(KeyQuad& quad);
  KeyHandle derive_otp_key(KeyQuad& quad);
  void erase_volatile_keys(KeyQuad& quad);  // step 4
  void erase_long_term(KeyQuad& quad);      // step 5
  void erase(KeyQuad& quad);                // steps 4 + 5, idempotent

  LongTermStore& long_term() { return long_term_; }
  VolatileStore& volatile_store() { return volatile_; }

 private:
  LongTermStore long_term_;
  VolatileStore volatile_;
  std::uint64_t handle_counter_ = 0;
};

}  // namespace genovault::keylifecycle
