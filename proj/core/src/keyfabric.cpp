// Copyright (c) Genovault Contributors.
// Licensed under the Apache 2.0 License.
#include "genovault/keyfabric.hpp"

#include <algorithm>
#include <deque>
#include <fstream>

namespace genovault::keyfabric {

LinkId LinkId::normalized(NodeId x, NodeId y) {
  if (y < x) {
    std::swap(x, y);
  }
  return LinkId{std::move(x), std::move(y)};
}

TopologyConfig TopologyConfig::from_json(const nlohmann::json& j) {
  TopologyConfig cfg;
  for (const auto& n : j.at("nodes")) {
    cfg.nodes.push_back(NodeId{n.get<std::string>()});
  }
  for (const auto& l : j.at("links")) {
    LinkConfig lc;
    lc.a = NodeId{l.at("a").get<std::string>()};
    lc.b = NodeId{l.at("b").get<std::string>()};
    lc.rate_bytes_per_sec = l.value("rate_bytes_per_sec", 1.0e6);
    lc.initial_pool_bytes = l.value("initial_pool_bytes", std::uint64_t{0});
    cfg.links.push_back(std::move(lc));
  }
  return cfg;
}

TopologyConfig TopologyConfig::from_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("keyfabric", "io-error", "cannot open topology file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("keyfabric", "bad-topology", std::string("topology parse error: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json TopologyConfig::to_json() const {
  nlohmann::json j;
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : nodes) {
    j["nodes"].push_back(n.name);
  }
  j["links"] = nlohmann::json::array();
  for (const auto& l : links) {
    j["links"].push_back({{"a", l.a.name},
                          {"b", l.b.name},
                          {"rate_bytes_per_sec", l.rate_bytes_per_sec},
                          {"initial_pool_bytes", l.initial_pool_bytes}});
  }
  return j;
}

TopologyConfig TopologyConfig::default_desk_topology() {
  TopologyConfig cfg;
  cfg.nodes = {NodeId{"owner"}, NodeId{"holder-b"}, NodeId{"holder-c"}, NodeId{"user"}};
  auto link = [](const char* a, const char* b) {
    LinkConfig lc;
    lc.a = NodeId{a};
    lc.b = NodeId{b};
    lc.rate_bytes_per_sec = 8.0e6;
    lc.initial_pool_bytes = 0;
    return lc;
  };
  cfg.links = {link("owner", "holder-b"), link("owner", "holder-c"),
               link("holder-b", "holder-c"), link("owner", "user")};
  return cfg;
}

KeyFabric::KeyFabric(TopologyConfig topology, std::shared_ptr<EntropySource> entropy,
                     bool auto_generate)
    : entropy_(std::move(entropy)), auto_generate_(auto_generate) {
  if (!entropy_) {
    throw Error("keyfabric", "no-entropy", "fabric requires an entropy source");
  }
  nodes_ = topology.nodes;
  std::sort(nodes_.begin(), nodes_.end());
  for (const auto& n : nodes_) {
    adjacency_[n];
    reserves_[n];
  }
  for (const auto& lc : topology.links) {
    require_node(lc.a);
    require_node(lc.b);
    LinkId id = LinkId::normalized(lc.a, lc.b);
    Link& link = links_[id];
    link.id = id;
    link.rate = lc.rate_bytes_per_sec;
    adjacency_[lc.a].push_back(lc.b);
    adjacency_[lc.b].push_back(lc.a);
  }
  for (auto& [node, neighbours] : adjacency_) {
    std::sort(neighbours.begin(), neighbours.end());
    neighbours.erase(std::unique(neighbours.begin(), neighbours.end()), neighbours.end());
  }
  for (const auto& lc : topology.links) {
    if (lc.initial_pool_bytes > 0) {
      generate_link_keys(LinkId::normalized(lc.a, lc.b), lc.initial_pool_bytes);
    }
  }
}

void KeyFabric::require_node(const NodeId& node) const {
  if (adjacency_.find(node) == adjacency_.end()) {
    throw Error("keyfabric", "unknown-node", "no such node: " + node.name);
  }
}

KeyFabric::Link& KeyFabric::link_at(const LinkId& id) {
  auto it = links_.find(id);
  if (it == links_.end()) {
    throw Error("keyfabric", "unknown-link", "no such link: " + id.label());
  }
  return it->second;
}

const KeyFabric::Link& KeyFabric::link_at(const LinkId& id) const {
  auto it = links_.find(id);
  if (it == links_.end()) {
    throw Error("keyfabric", "unknown-link", "no such link: " + id.label());
  }
  return it->second;
}

void KeyFabric::generate_link_keys(const LinkId& link_id, std::uint64_t nbytes) {
  std::lock_guard<std::mutex> lock(mu_);
  Link& link = link_at(LinkId::normalized(link_id.a, link_id.b));
  if (nbytes == 0) {
    return;
  }
  Bytes fresh = entropy_->draw(nbytes);
  link.pools[0].insert(link.pools[0].end(), fresh.begin(), fresh.end());
  link.pools[1].insert(link.pools[1].end(), fresh.begin(), fresh.end());
  link.generated_total += nbytes;
  secure_wipe(fresh);
}

Bytes KeyFabric::consume_link_key(Link& link, std::uint64_t nbytes) {
  std::uint64_t available = link.pools[0].size() - link.consumed;
  if (available < nbytes) {
    if (!auto_generate_) {
      throw Error("keyfabric", "insufficient-key-material",
                  "link " + link.id.label() + " holds " + std::to_string(available) +
                      " unconsumed bytes, need " + std::to_string(nbytes));
    }
    std::uint64_t deficit = nbytes - available;
    Bytes fresh = entropy_->draw(deficit);
    link.pools[0].insert(link.pools[0].end(), fresh.begin(), fresh.end());
    link.pools[1].insert(link.pools[1].end(), fresh.begin(), fresh.end());
    link.generated_total += deficit;
    secure_wipe(fresh);
  }
  Bytes key(link.pools[0].begin() + static_cast<std::ptrdiff_t>(link.consumed),
            link.pools[0].begin() + static_cast<std::ptrdiff_t>(link.consumed + nbytes));
  secure_wipe(link.pools[0].data() + link.consumed, nbytes);
  secure_wipe(link.pools[1].data() + link.consumed, nbytes);
  link.consumed += nbytes;
  return key;
}

std::vector<NodeId> KeyFabric::route(const NodeId& src, const NodeId& dst) const {
  require_node(src);
  require_node(dst);
  if (src == dst) {
    return {src};
  }
  // BFS for hop distance, then walk back from dst picking the lexically
  // smallest predecessor on a shortest path.
  std::map<NodeId, int> dist;
  dist[src] = 0;
  std::deque<NodeId> queue{src};
  while (!queue.empty()) {
    NodeId cur = queue.front();
    queue.pop_front();
    for (const NodeId& next : adjacency_.at(cur)) {
      if (dist.find(next) == dist.end()) {
        dist[next] = dist[cur] + 1;
        queue.push_back(next);
      }
    }
  }
  auto it = dist.find(dst);
  if (it == dist.end()) {
    throw Error("keyfabric", "no-route", "no route from " + src.name + " to " + dst.name);
  }
  std::vector<NodeId> path{dst};
  NodeId cur = dst;
  while (cur != src) {
    const NodeId* best = nullptr;
    for (const NodeId& prev : adjacency_.at(cur)) {
      auto pd = dist.find(prev);
      if (pd != dist.end() && pd->second == dist[cur] - 1) {
        if (best == nullptr || prev < *best) {
          best = &prev;
        }
      }
    }
    cur = *best;
    path.push_back(cur);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::pair<KeyHandle, KeyHandle> KeyFabric::relay_key(const NodeId& src, const NodeId& dst,
                                                     std::uint64_t nbytes) {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<NodeId> path = route(src, dst);

  if (!auto_generate_) {
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      const Link& link = link_at(LinkId::normalized(path[i], path[i + 1]));
      if (link.pools[0].size() - link.consumed < nbytes) {
        throw Error("keyfabric", "insufficient-key-material",
                    "link " + link.id.label() + " holds " +
                        std::to_string(link.pools[0].size() - link.consumed) +
                        " unconsumed bytes, need " + std::to_string(nbytes));
      }
    }
  }

  Bytes minted = entropy_->draw(nbytes);

  RelayTranscript transcript;
  transcript.src = src;
  transcript.dst = dst;
  transcript.route = path;
  transcript.nbytes = nbytes;

  double ready = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    Link& link = link_at(LinkId::normalized(path[i], path[i + 1]));
    Bytes hop_key = consume_link_key(link, nbytes);
    Bytes wire(nbytes);
    for (std::uint64_t b = 0; b < nbytes; ++b) {
      wire[b] = minted[b] ^ hop_key[b];
    }
    secure_wipe(hop_key);
    // Key material consumed so far on this link had to exist first; at the
    // link's generation rate that takes consumed/rate simulated seconds.
    ready = std::max(ready, static_cast<double>(link.consumed) / link.rate);
    transcript.hops.push_back(HopTranscript{link.id, std::move(wire)});
  }
  transcript.ready_sim_seconds = ready;
  last_ready_seconds_ = ready;
  transcripts_.push_back(std::move(transcript));

  KeyHandle src_handle(next_handle_id(), src.name, Bytes(minted));
  KeyHandle dst_handle(next_handle_id(), dst.name, Bytes(minted));
  secure_wipe(minted);
  return {std::move(src_handle), std::move(dst_handle)};
}

bool KeyFabric::can_relay(const std::vector<RelayRequest>& requests, bool strict) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (auto_generate_) {
    return true;
  }
  std::map<LinkId, std::uint64_t> needed;
  for (const auto& req : requests) {
    std::vector<NodeId> path = route(req.src, req.dst);
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      needed[LinkId::normalized(path[i], path[i + 1])] += req.nbytes;
    }
  }
  for (const auto& [id, need] : needed) {
    const Link& link = link_at(id);
    std::uint64_t available = link.pools[0].size() - link.consumed;
    if (available < need) {
      if (strict) {
        throw Error("keyfabric", "insufficient-key-material",
                    "link " + id.label() + " holds " + std::to_string(available) +
                        " unconsumed bytes, need " + std::to_string(need));
      }
      return false;
    }
  }
  return true;
}

void KeyFabric::replenish_reserve(const NodeId& node, std::uint64_t nbytes) {
  std::lock_guard<std::mutex> lock(mu_);
  require_node(node);
  Reserve& reserve = reserves_[node];
  Bytes fresh = entropy_->draw(nbytes);
  reserve.pool.insert(reserve.pool.end(), fresh.begin(), fresh.end());
  secure_wipe(fresh);
}

KeyHandle KeyFabric::supply_key(const NodeId& node, const std::string& consumer,
                                std::uint64_t nbytes) {
  std::lock_guard<std::mutex> lock(mu_);
  require_node(node);
  Reserve& reserve = reserves_[node];
  std::uint64_t available = reserve.pool.size() - reserve.consumed;
  if (available < nbytes) {
    if (!auto_generate_) {
      throw Error("keyfabric", "insufficient-reserve",
                  "node " + node.name + " reserve holds " + std::to_string(available) +
                      " bytes, need " + std::to_string(nbytes));
    }
    Bytes fresh = entropy_->draw(nbytes - available);
    reserve.pool.insert(reserve.pool.end(), fresh.begin(), fresh.end());
    secure_wipe(fresh);
  }
  Bytes material(reserve.pool.begin() + static_cast<std::ptrdiff_t>(reserve.consumed),
                 reserve.pool.begin() + static_cast<std::ptrdiff_t>(reserve.consumed + nbytes));
  secure_wipe(reserve.pool.data() + reserve.consumed, nbytes);
  reserve.consumed += nbytes;
  KeyHandle handle(next_handle_id(), consumer, std::move(material));
  return handle;
}

std::vector<LinkStatus> KeyFabric::status() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<LinkStatus> out;
  for (const auto& [id, link] : links_) {
    LinkStatus st;
    st.link = id;
    st.pool_bytes = link.pools[0].size();
    st.consumed = link.consumed;
    st.rate_bytes_per_sec = link.rate;
    st.generated_seconds = static_cast<double>(link.generated_total) / link.rate;
    out.push_back(std::move(st));
  }
  return out;
}

bool KeyFabric::has_node(const NodeId& node) const {
  std::lock_guard<std::mutex> lock(mu_);
  return adjacency_.find(node) != adjacency_.end();
}

Bytes KeyFabric::link_pool_snapshot(const LinkId& link, int endpoint) const {
  std::lock_guard<std::mutex> lock(mu_);
  const Link& l = link_at(LinkId::normalized(link.a, link.b));
  return l.pools.at(static_cast<std::size_t>(endpoint));
}

Bytes KeyFabric::reserve_snapshot(const NodeId& node) const {
  std::lock_guard<std::mutex> lock(mu_);
  require_node(node);
  return reserves_.at(node).pool;
}

std::uint64_t KeyFabric::reserve_available(const NodeId& node) const {
  std::lock_guard<std::mutex> lock(mu_);
  require_node(node);
  const Reserve& r = reserves_.at(node);
  return r.pool.size() - r.consumed;
}

nlohmann::json KeyFabric::save_state() const {
  std::lock_guard<std::mutex> lock(mu_);
  nlohmann::json j;
  j["handle_counter"] = handle_counter_;
  j["links"] = nlohmann::json::array();
  for (const auto& [id, link] : links_) {
    j["links"].push_back({{"a", id.a.name},
                          {"b", id.b.name},
                          {"pool", to_hex(link.pools[0])},
                          {"consumed", link.consumed},
                          {"generated_total", link.generated_total}});
  }
  j["reserves"] = nlohmann::json::array();
  for (const auto& [node, reserve] : reserves_) {
    j["reserves"].push_back(
        {{"node", node.name}, {"pool", to_hex(reserve.pool)}, {"consumed", reserve.consumed}});
  }
  return j;
}

void KeyFabric::restore_state(const nlohmann::json& j) {
  std::lock_guard<std::mutex> lock(mu_);
  handle_counter_ = j.value("handle_counter", std::uint64_t{0});
  for (const auto& l : j.at("links")) {
    LinkId id = LinkId::normalized(NodeId{l.at("a").get<std::string>()},
                                   NodeId{l.at("b").get<std::string>()});
    Link& link = link_at(id);
    link.pools[0] = from_hex(l.at("pool").get<std::string>());
    link.pools[1] = link.pools[0];
    link.consumed = l.at("consumed").get<std::uint64_t>();
    link.generated_total = l.at("generated_total").get<std::uint64_t>();
  }
  for (const auto& r : j.at("reserves")) {
    Reserve& reserve = reserves_[NodeId{r.at("node").get<std::string>()}];
    reserve.pool = from_hex(r.at("pool").get<std::string>());
    reserve.consumed = r.at("consumed").get<std::uint64_t>();
  }
}

}  // namespace genovault::keyfabric
