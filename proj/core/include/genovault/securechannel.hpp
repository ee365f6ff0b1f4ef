// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <optional>

#include "genovault/common.hpp"
#include "genovault/gf128.hpp"
#include "genovault/keyfabric.hpp"

namespace genovault::securechannel {

// --- one-time-pad primitives -------------------------------------------------

/// c[i] = p[i] ^ k[i], consuming exactly plaintext.size() bytes at the
/// handle's cursor. Consumed key bytes are wiped.
Bytes otp_encrypt(ByteView plaintext, KeyHandle& key);
Bytes otp_decrypt(ByteView ciphertext, KeyHandle& key);

/// Same, against an explicit key-stream offset (receivers that see frames out
/// of order). Overlapping an already-consumed slice is a key-reuse error.
Bytes otp_crypt_at(ByteView data, KeyHandle& key, std::uint64_t offset);

// --- Wegman-Carter authentication --------------------------------------------

/// One-time key pair for a single tag or verification.
struct AuthKeyPair {
  Gf128 a;
  Gf128 b;
  bool used = false;

  static AuthKeyPair draw(KeyHandle& key);                            // consumes 32 bytes
  static AuthKeyPair draw_at(KeyHandle& key, std::uint64_t offset);
};

/// Stateless polynomial hash core. The message is zero-padded into 16-byte
/// blocks m1..mn; with h accumulated as h = (h ^ m_i) * a, the tag is
/// h ^ L*a ^ b where L is the message byte length as a 128-bit block.
std::array<std::uint8_t, 16> wc_polyhash_tag(ByteView message, const Gf128& a, const Gf128& b);

std::array<std::uint8_t, 16> wc_tag(ByteView message, AuthKeyPair& keys);
bool wc_verify(ByteView message, ByteView tag16, AuthKeyPair& keys);

// --- framing ------------------------------------------------------------------

enum class Transport { stream, datagram };

const char* to_string(Transport t);

struct ChannelConfig {
  Transport transport = Transport::stream;
  bool header_encryption = false;
  /// false selects the "plain" benchmark mode: payload unencrypted and
  /// unauthenticated (tag bytes zero). Header encryption still applies if set.
  bool otp_payload = true;
  std::size_t mtu = 1470;
  std::string local_peer;
  std::string remote_peer;
  /// Datagram mode: how far out of order a frame may arrive.
  std::size_t reorder_window = 64;

  void validate() const;
};

inline constexpr std::size_t kFrameHeaderSize = 16;  // seq u64 | payload_len u32 | key_offset u32
inline constexpr std::size_t kTagSize = 16;

/// Clear-header frames spend 32 bytes of the MTU budget; encrypting the
/// header encapsulates it as an extra 16-byte block behind a minimal outer
/// header, so capacity drops by exactly 16 bytes.
std::size_t frame_overhead(const ChannelConfig& cfg);
std::size_t max_payload(const ChannelConfig& cfg);
std::size_t frame_count_for(std::size_t payload_bytes, const ChannelConfig& cfg);

/// Key bytes one endpoint needs for `payload_bytes` of application data:
/// payload bytes (OTP mode) + 16 per frame for header encryption + 32 per
/// frame for the per-frame MAC pair.
std::size_t required_key_bytes(std::size_t payload_bytes, const ChannelConfig& cfg);

/// One endpoint of an OTP channel. Sending fragments data into MTU-sized
/// frames; receiving verifies every frame tag and reassembles in sequence
/// order. Wire layout is documented bit-exact in docs/wire-format.md.
class Channel {
 public:
  Channel(ChannelConfig cfg, KeyHandle key);

  /// Fragments data into serialized frames, consuming key material.
  std::vector<Bytes> send(ByteView data);

  /// Verifies and reassembles a batch of frames. Frames failing
  /// authentication are dropped and counted; the call then fails with
  /// tag-failure and the channel stays flagged.
  Bytes receive(std::span<const Bytes> frames);

  const ChannelConfig& config() const { return cfg_; }
  KeyHandle& key() { return key_; }
  std::size_t tamper_count() const { return tamper_count_; }
  bool flagged() const { return tamper_count_ > 0; }
  std::uint64_t next_send_seq() const { return next_send_seq_; }

 private:
  Bytes build_frame(ByteView chunk);

  ChannelConfig cfg_;
  KeyHandle key_;
  std::uint64_t next_send_seq_ = 0;
  std::uint64_t next_recv_seq_ = 0;
  std::size_t tamper_count_ = 0;
};

// --- simulated transports ------------------------------------------------------

struct DatagramOptions {
  double loss_probability = 0.0;
  std::size_t reorder_window = 0;  // 0 = in-order delivery
  std::uint64_t seed = 0;
};

/// In-process one-way pipe. Stream mode preserves order and loses nothing;
/// datagram mode can drop and locally reorder frames.
class TransportPipe {
 public:
  explicit TransportPipe(Transport kind, DatagramOptions opts = {});

  void push(Bytes frame);
  std::vector<Bytes> drain();
  std::size_t pending() const;

 private:
  mutable std::mutex mu_;
  Transport kind_;
  DatagramOptions opts_;
  std::uint64_t rng_state_;
  std::vector<Bytes> queue_;
};

/// Sender/receiver endpoints provisioned with identical relay-agreed key
/// material from the fabric.
struct ChannelPair {
  Channel sender;
  Channel receiver;
};

ChannelPair make_channel_pair(keyfabric::KeyFabric& fabric, const keyfabric::NodeId& from,
                              const keyfabric::NodeId& to, std::size_t payload_bytes,
                              ChannelConfig cfg);

struct TransferResult {
  Bytes data;
  double seconds = 0.0;
  std::size_t frames = 0;
  std::size_t wire_bytes = 0;
};

/// Moves `data` sender -> pipe -> receiver, timing the full path.
TransferResult transfer(Channel& sender, Channel& receiver, TransportPipe& pipe, ByteView data);

}  // namespace genovault::securechannel
