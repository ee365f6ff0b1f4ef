// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#pragma once

#include <compare>
#include <filesystem>
#include <memory>
#include <optional>
#include <utility>

#include "genovault/common.hpp"

#include "json.hpp"

namespace genovault::keyfabric {

struct NodeId {
  std::string name;

  auto operator<=>(const NodeId&) const = default;
};

/// Undirected link between two trusted nodes; endpoints are kept in sorted
/// order so (x,y) and (y,x) name the same link.
struct LinkId {
  NodeId a;
  NodeId b;

  static LinkId normalized(NodeId x, NodeId y);
  std::string label() const { return a.name + "--" + b.name; }
  auto operator<=>(const LinkId&) const = default;
};

struct LinkConfig {
  NodeId a;
  NodeId b;
  double rate_bytes_per_sec = 1.0e6;
  std::uint64_t initial_pool_bytes = 0;
};

struct TopologyConfig {
  std::vector<NodeId> nodes;
  std::vector<LinkConfig> links;

  static TopologyConfig from_json(const nlohmann::json& j);
  static TopologyConfig from_json_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Fig-2 style desk topology: data owner (co-located with the trusted
  /// server and share holder A), two share holders, and a user.
  static TopologyConfig default_desk_topology();
};

struct LinkStatus {
  LinkId link;
  std::uint64_t pool_bytes;   // bytes ever pushed into the pool
  std::uint64_t consumed;     // bytes consumed (wiped) from the front
  double rate_bytes_per_sec;
  double generated_seconds;   // simulated time spent generating the pool
};

struct HopTranscript {
  LinkId link;
  Bytes wire;  // K xor k_i as seen on the public channel
};

/// Public-channel record of one relay, kept for test inspection: without the
/// link keys the wire values carry no information about K.
struct RelayTranscript {
  NodeId src;
  NodeId dst;
  std::vector<NodeId> route;
  std::vector<HopTranscript> hops;
  std::uint64_t nbytes = 0;
  double ready_sim_seconds = 0.0;  // when the consumed key material existed
};

struct RelayRequest {
  NodeId src;
  NodeId dst;
  std::uint64_t nbytes;
};

/// Simulated key-management layer: per-link key pools at trusted nodes, a
/// routing KMS and hop-by-hop key relay. Supplies single-use KeyHandles to
/// the service layer; once supplied, the fabric's copy is wiped and key
/// custody moves to the consumer.
class KeyFabric {
 public:
  KeyFabric(TopologyConfig topology, std::shared_ptr<EntropySource> entropy,
            bool auto_generate = false);

  /// Appends nbytes of entropy-source output identically to both endpoint
  /// pools of the link.
  void generate_link_keys(const LinkId& link, std::uint64_t nbytes);

  /// Mints a fresh key K at src and relays it hop by hop: each hop consumes
  /// nbytes of link key k_i and puts K^k_i on the public channel. Returns one
  /// handle per endpoint with identical material; intermediate nodes retain
  /// nothing. src == dst degenerates to a zero-hop direct supply.
  std::pair<KeyHandle, KeyHandle> relay_key(const NodeId& src, const NodeId& dst,
                                            std::uint64_t nbytes);

  /// Checks (without consuming) that all requests could be satisfied,
  /// accounting for links shared between routes. Throws on the first
  /// shortfall when `strict`, otherwise returns false.
  bool can_relay(const std::vector<RelayRequest>& requests, bool strict = false) const;

  /// Adds nbytes of locally minted key material to the node's supply reserve
  /// (the zero-hop relay case).
  void replenish_reserve(const NodeId& node, std::uint64_t nbytes);

  /// Hands nbytes from the node's reserve to a service-layer consumer. The
  /// fabric's copy of those bytes is wiped.
  KeyHandle supply_key(const NodeId& node, const std::string& consumer, std::uint64_t nbytes);

  // --- inspection -----------------------------------------------------------

  std::vector<LinkStatus> status() const;
  bool has_node(const NodeId& node) const;
  std::vector<NodeId> route(const NodeId& src, const NodeId& dst) const;
  Bytes link_pool_snapshot(const LinkId& link, int endpoint) const;
  Bytes reserve_snapshot(const NodeId& node) const;
  std::uint64_t reserve_available(const NodeId& node) const;
  const std::vector<RelayTranscript>& transcripts() const { return transcripts_; }
  double last_relay_ready_seconds() const { return last_ready_seconds_; }
  EntropySource& entropy() { return *entropy_; }
  bool auto_generate() const { return auto_generate_; }

  nlohmann::json save_state() const;
  void restore_state(const nlohmann::json& j);

 private:
  struct Link {
    LinkId id;
    double rate = 1.0e6;
    // Both endpoints hold identical pool content; two physical copies so the
    // identity is inspectable.
    std::array<Bytes, 2> pools;
    std::uint64_t consumed = 0;
    std::uint64_t generated_total = 0;
  };

  struct Reserve {
    Bytes pool;
    std::uint64_t consumed = 0;
  };

  Link& link_at(const LinkId& id);
  const Link& link_at(const LinkId& id) const;
  void require_node(const NodeId& node) const;
  Bytes consume_link_key(Link& link, std::uint64_t nbytes);
  std::uint64_t next_handle_id() { return ++handle_counter_; }

  std::shared_ptr<EntropySource> entropy_;
  bool auto_generate_ = false;

  std::vector<NodeId> nodes_;
  std::map<NodeId, std::vector<NodeId>> adjacency_;
  std::map<LinkId, Link> links_;
  std::map<NodeId, Reserve> reserves_;

  std::vector<RelayTranscript> transcripts_;
  double last_ready_seconds_ = 0.0;
  std::uint64_t handle_counter_ = 0;

  // One relay at a time: the KMS schedules requests first-come-first-served.
  mutable std::mutex mu_;
};

}  // namespace genovault::keyfabric
