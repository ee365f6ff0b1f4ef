// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/securechannel.hpp"

#include <algorithm>
#include <chrono>

namespace genovault::securechannel {

namespace {

Bytes xor_with_key(ByteView data, Bytes key_slice) {
  Bytes out(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    out[i] = data[i] ^ key_slice[i];
  }
  secure_wipe(key_slice);
  return out;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

Bytes otp_encrypt(ByteView plaintext, KeyHandle& key) {
  if (key.remaining() < plaintext.size()) {
    throw Error("securechannel", "key-exhausted",
                "OTP needs " + std::to_string(plaintext.size()) + " key bytes, " +
                    std::to_string(key.remaining()) + " remain");
  }
  return xor_with_key(plaintext, key.take(plaintext.size()));
}

Bytes otp_decrypt(ByteView ciphertext, KeyHandle& key) { return otp_encrypt(ciphertext, key); }

Bytes otp_crypt_at(ByteView data, KeyHandle& key, std::uint64_t offset) {
  return xor_with_key(data, key.take_at(offset, data.size()));
}

AuthKeyPair AuthKeyPair::draw(KeyHandle& key) {
  Bytes material = key.take(32);
  AuthKeyPair pair;
  pair.a = Gf128::from_bytes(ByteView(material.data(), 16));
  pair.b = Gf128::from_bytes(ByteView(material.data() + 16, 16));
  secure_wipe(material);
  return pair;
}

AuthKeyPair AuthKeyPair::draw_at(KeyHandle& key, std::uint64_t offset) {
  Bytes material = key.take_at(offset, 32);
  AuthKeyPair pair;
  pair.a = Gf128::from_bytes(ByteView(material.data(), 16));
  pair.b = Gf128::from_bytes(ByteView(material.data() + 16, 16));
  secure_wipe(material);
  return pair;
}

std::array<std::uint8_t, 16> wc_polyhash_tag(ByteView message, const Gf128& a, const Gf128& b) {
  Gf128 h;
  std::array<std::uint8_t, 16> block{};
  for (std::size_t off = 0; off < message.size(); off += 16) {
    std::size_t n = std::min<std::size_t>(16, message.size() - off);
    block.fill(0);
    std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(off), n, block.begin());
    h = gf128_mul(h ^ Gf128::from_bytes(block), a);
  }
  Gf128 length_block{0, static_cast<std::uint64_t>(message.size())};
  Gf128 tag = h ^ gf128_mul(length_block, a) ^ b;
  return tag.to_bytes();
}

std::array<std::uint8_t, 16> wc_tag(ByteView message, AuthKeyPair& keys) {
  if (keys.used) {
    throw Error("securechannel", "key-reuse", "authentication key pair already used");
  }
  keys.used = true;
  return wc_polyhash_tag(message, keys.a, keys.b);
}

bool wc_verify(ByteView message, ByteView tag16, AuthKeyPair& keys) {
  if (keys.used) {
    throw Error("securechannel", "key-reuse", "authentication key pair already used");
  }
  keys.used = true;
  if (tag16.size() != kTagSize) {
    return false;
  }
  std::array<std::uint8_t, 16> expected = wc_polyhash_tag(message, keys.a, keys.b);
  std::uint8_t diff = 0;
  for (std::size_t i = 0; i < kTagSize; ++i) {
    diff |= static_cast<std::uint8_t>(expected[i] ^ tag16[i]);
  }
  return diff == 0;
}

const char* to_string(Transport t) { return t == Transport::stream ? "stream" : "datagram"; }

void ChannelConfig::validate() const {
  std::size_t overhead = frame_overhead(*this);
  if (mtu < overhead + 1) {
    throw Error("securechannel", "bad-mtu",
                "mtu must be at least frame overhead + 1 (" + std::to_string(overhead + 1) + ")");
  }
}

std::size_t frame_overhead(const ChannelConfig& cfg) {
  return kFrameHeaderSize + kTagSize + (cfg.header_encryption ? kFrameHeaderSize : 0);
}

std::size_t max_payload(const ChannelConfig& cfg) { return cfg.mtu - frame_overhead(cfg); }

std::size_t frame_count_for(std::size_t payload_bytes, const ChannelConfig& cfg) {
  if (payload_bytes == 0) {
    return 0;
  }
  std::size_t per_frame = max_payload(cfg);
  return (payload_bytes + per_frame - 1) / per_frame;
}

std::size_t required_key_bytes(std::size_t payload_bytes, const ChannelConfig& cfg) {
  std::size_t frames = frame_count_for(payload_bytes, cfg);
  std::size_t per_frame = (cfg.header_encryption ? kFrameHeaderSize : 0) + (cfg.otp_payload ? 32 : 0);
  return (cfg.otp_payload ? payload_bytes : 0) + frames * per_frame;
}

Channel::Channel(ChannelConfig cfg, KeyHandle key) : cfg_(std::move(cfg)), key_(std::move(key)) {
  cfg_.validate();
}

Bytes Channel::build_frame(ByteView chunk) {
  std::uint64_t seq = next_send_seq_++;
  std::uint32_t payload_len = static_cast<std::uint32_t>(chunk.size());

  std::uint64_t payload_off = 0;
  Bytes payload;
  if (cfg_.otp_payload) {
    payload_off = key_.cursor();
    if (payload_off + chunk.size() > 0xFFFFFFFFull) {
      throw Error("securechannel", "key-offset-overflow",
                  "key stream offsets beyond 4 GiB are not supported per channel");
    }
    payload = otp_encrypt(chunk, key_);
  } else {
    payload.assign(chunk.begin(), chunk.end());
  }

  Bytes frame;
  frame.reserve(frame_overhead(cfg_) + payload.size());
  if (cfg_.header_encryption) {
    // Inner header (seq, payload_len, payload key offset), OTP-encrypted and
    // carried behind a minimal outer header.
    Bytes inner;
    put_u64_be(inner, seq);
    put_u32_be(inner, payload_len);
    put_u32_be(inner, static_cast<std::uint32_t>(payload_off));
    std::uint64_t hdr_off = key_.cursor();
    Bytes inner_ct = otp_encrypt(inner, key_);

    put_u64_be(frame, seq);
    put_u32_be(frame, static_cast<std::uint32_t>(kFrameHeaderSize + payload.size()));
    put_u32_be(frame, static_cast<std::uint32_t>(hdr_off));
    frame.insert(frame.end(), inner_ct.begin(), inner_ct.end());
  } else {
    put_u64_be(frame, seq);
    put_u32_be(frame, payload_len);
    put_u32_be(frame, static_cast<std::uint32_t>(payload_off));
  }
  frame.insert(frame.end(), payload.begin(), payload.end());

  if (cfg_.otp_payload) {
    AuthKeyPair pair = AuthKeyPair::draw(key_);
    std::array<std::uint8_t, 16> tag = wc_tag(frame, pair);
    frame.insert(frame.end(), tag.begin(), tag.end());
  } else {
    frame.insert(frame.end(), kTagSize, 0x00);
  }
  return frame;
}

std::vector<Bytes> Channel::send(ByteView data) {
  std::vector<Bytes> frames;
  std::size_t per_frame = max_payload(cfg_);
  std::size_t off = 0;
  while (off < data.size()) {
    std::size_t n = std::min(per_frame, data.size() - off);
    frames.push_back(build_frame(data.subspan(off, n)));
    off += n;
  }
  return frames;
}

Bytes Channel::receive(std::span<const Bytes> frames) {
  std::map<std::uint64_t, Bytes> by_seq;
  std::size_t dropped = 0;

  for (std::size_t arrival = 0; arrival < frames.size(); ++arrival) {
    const Bytes& frame = frames[arrival];
    std::size_t overhead = frame_overhead(cfg_);
    if (frame.size() < overhead) {
      throw Error("securechannel", "bad-frame", "frame shorter than framing overhead");
    }
    ByteView view(frame.data(), frame.size());
    std::uint64_t seq = get_u64_be(view, 0);

    // Reordering bounds: stream transports deliver in order; datagram
    // transports may displace a frame by at most the reorder window.
    std::uint64_t expected = next_recv_seq_ + arrival;
    std::uint64_t displacement = seq > expected ? seq - expected : expected - seq;
    if (cfg_.transport == Transport::stream && displacement != 0) {
      throw Error("securechannel", "out-of-order", "stream frames must arrive in sequence");
    }
    if (cfg_.transport == Transport::datagram && displacement > cfg_.reorder_window) {
      throw Error("securechannel", "out-of-order",
                  "frame displaced beyond the reorder window (" +
                      std::to_string(cfg_.reorder_window) + ")");
    }

    std::uint32_t payload_len = 0;
    std::uint64_t payload_off = 0;
    std::size_t payload_start = kFrameHeaderSize;
    bool damaged = false;

    if (cfg_.header_encryption) {
      std::uint64_t hdr_off = get_u32_be(view, 12);
      Bytes inner = otp_crypt_at(view.subspan(kFrameHeaderSize, kFrameHeaderSize), key_, hdr_off);
      std::uint64_t inner_seq = get_u64_be(inner, 0);
      payload_len = get_u32_be(inner, 8);
      payload_off = get_u32_be(inner, 12);
      payload_start = 2 * kFrameHeaderSize;
      if (inner_seq != seq || payload_off + payload_len != hdr_off) {
        damaged = true;  // header does not decrypt consistently
      }
    } else {
      payload_len = get_u32_be(view, 8);
      payload_off = get_u32_be(view, 12);
    }

    if (!damaged && frame.size() != payload_start + payload_len + kTagSize) {
      damaged = true;
    }

    if (!damaged && cfg_.otp_payload) {
      std::uint64_t mac_off =
          payload_off + payload_len + (cfg_.header_encryption ? kFrameHeaderSize : 0);
      AuthKeyPair pair = AuthKeyPair::draw_at(key_, mac_off);
      ByteView covered(frame.data(), frame.size() - kTagSize);
      ByteView tag(frame.data() + frame.size() - kTagSize, kTagSize);
      if (!wc_verify(covered, tag, pair)) {
        damaged = true;
      }
    }

    if (damaged) {
      ++tamper_count_;
      ++dropped;
      continue;
    }

    Bytes payload;
    ByteView payload_ct = view.subspan(payload_start, payload_len);
    if (cfg_.otp_payload) {
      payload = otp_crypt_at(payload_ct, key_, payload_off);
    } else {
      payload.assign(payload_ct.begin(), payload_ct.end());
    }

    if (!by_seq.emplace(seq, std::move(payload)).second) {
      throw Error("securechannel", "duplicate-frame",
                  "frame " + std::to_string(seq) + " received twice");
    }
  }

  if (dropped > 0) {
    throw Error("securechannel", "tag-failure",
                std::to_string(dropped) + " frame(s) failed authentication and were dropped");
  }

  Bytes data;
  std::uint64_t expected = next_recv_seq_;
  for (const auto& [seq, payload] : by_seq) {
    if (seq != expected) {
      throw Error("securechannel", "missing-frame",
                  "gap in sequence numbers at " + std::to_string(expected));
    }
    data.insert(data.end(), payload.begin(), payload.end());
    ++expected;
  }
  next_recv_seq_ = expected;
  return data;
}

TransportPipe::TransportPipe(Transport kind, DatagramOptions opts)
    : kind_(kind), opts_(opts), rng_state_(opts.seed ^ 0xD1B54A32D192ED03ull) {}

void TransportPipe::push(Bytes frame) {
  std::lock_guard<std::mutex> lock(mu_);
  if (kind_ == Transport::datagram) {
    if (opts_.loss_probability > 0.0) {
      double roll = static_cast<double>(splitmix64(rng_state_) >> 11) * 0x1.0p-53;
      if (roll < opts_.loss_probability) {
        return;  // dropped on the floor
      }
    }
    if (opts_.reorder_window > 0 && !queue_.empty()) {
      std::size_t window = std::min(opts_.reorder_window, queue_.size());
      std::size_t slot = queue_.size() - window + splitmix64(rng_state_) % (window + 1);
      queue_.insert(queue_.begin() + static_cast<std::ptrdiff_t>(slot), std::move(frame));
      return;
    }
  }
  queue_.push_back(std::move(frame));
}

std::vector<Bytes> TransportPipe::drain() {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Bytes> out;
  out.swap(queue_);
  return out;
}

std::size_t TransportPipe::pending() const {
  std::lock_guard<std::mutex> lock(mu_);
  return queue_.size();
}

ChannelPair make_channel_pair(keyfabric::KeyFabric& fabric, const keyfabric::NodeId& from,
                              const keyfabric::NodeId& to, std::size_t payload_bytes,
                              ChannelConfig cfg) {
  cfg.validate();
  cfg.local_peer = from.name;
  cfg.remote_peer = to.name;
  std::size_t key_bytes = required_key_bytes(payload_bytes, cfg);
  auto [src_handle, dst_handle] = fabric.relay_key(from, to, key_bytes);
  ChannelConfig recv_cfg = cfg;
  recv_cfg.local_peer = to.name;
  recv_cfg.remote_peer = from.name;
  return ChannelPair{Channel(cfg, std::move(src_handle)), Channel(recv_cfg, std::move(dst_handle))};
}

TransferResult transfer(Channel& sender, Channel& receiver, TransportPipe& pipe, ByteView data) {
  auto start = std::chrono::steady_clock::now();
  std::vector<Bytes> frames = sender.send(data);
  std::size_t frame_count = frames.size();
  std::size_t wire_bytes = 0;
  for (auto& frame : frames) {
    wire_bytes += frame.size();
    pipe.push(std::move(frame));
  }
  std::vector<Bytes> delivered = pipe.drain();
  Bytes out = receiver.receive(delivered);
  auto stop = std::chrono::steady_clock::now();
  TransferResult result;
  result.data = std::move(out);
  result.seconds = std::chrono::duration<double>(stop - start).count();
  result.frames = frame_count;
  result.wire_bytes = wire_bytes;
  return result;
}

}  // namespace genovault::securechannel
