#include "edgehealth/store/content_store.hpp"

#include <istream>
#include <ostream>

namespace edgehealth::store {

ContentHash StoreNode::put(const Ciphertext& ciphertext, std::uint64_t timestamp) {
    Bytes body = ciphertext.serialize();
    ContentHash h = crypto::content_hash(body, timestamp);
    entries_.try_emplace(h, Entry{timestamp, std::move(body)});
    return h;
}

const StoreNode::Entry& StoreNode::verified(const ContentHash& hash) const {
    auto it = entries_.find(hash);
    if (it == entries_.end()) throw NotFound(hash);
    if (crypto::content_hash(it->second.body, it->second.timestamp) != hash) throw IntegrityError(hash);
    return it->second;
}

Ciphertext StoreNode::get(const ContentHash& hash) const {
    return Ciphertext::parse(verified(hash).body);
}

std::vector<ContentHash> StoreNode::keys() const {
    std::vector<ContentHash> out;
    out.reserve(entries_.size());
    for (const auto& [h, _] : entries_) out.push_back(h);
    return out;
}

void StoreNode::accept_replica(const ContentHash& hash, std::uint64_t timestamp, ByteView body) {
    if (crypto::content_hash(body, timestamp) != hash) throw IntegrityError(hash);
    entries_.try_emplace(hash, Entry{timestamp, Bytes(body.begin(), body.end())});
}

void StoreNode::flip_bit(const ContentHash& hash, std::size_t bit_index) {
    auto it = entries_.find(hash);
    if (it == entries_.end()) throw NotFound(hash);
    Bytes& body = it->second.body;
    if (bit_index >= body.size() * 8) throw std::out_of_range("bit index beyond stored body");
    body[bit_index / 8] ^= static_cast<std::uint8_t>(1u << (bit_index % 8));
}

std::size_t StoreNode::stored_bytes(const ContentHash& hash) const {
    auto it = entries_.find(hash);
    if (it == entries_.end()) throw NotFound(hash);
    return it->second.body.size();
}

std::uint64_t StoreNode::timestamp(const ContentHash& hash) const {
    auto it = entries_.find(hash);
    if (it == entries_.end()) throw NotFound(hash);
    return it->second.timestamp;
}

void StoreNode::save_snapshot(std::ostream& out) const {
    for (const auto& [h, entry] : entries_) {
        Bytes header;
        append(header, h.digest);
        put_u64_be(header, entry.timestamp);
        put_u64_be(header, entry.body.size());
        out.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
        out.write(reinterpret_cast<const char*>(entry.body.data()), static_cast<std::streamsize>(entry.body.size()));
    }
}

StoreNode StoreNode::load_snapshot(std::uint32_t id, std::istream& in) {
    StoreNode node(id);
    constexpr std::size_t kHeader = crypto::kHashSize + 16;
    while (true) {
        Bytes header(kHeader);
        in.read(reinterpret_cast<char*>(header.data()), static_cast<std::streamsize>(kHeader));
        if (in.gcount() == 0) break;
        if (static_cast<std::size_t>(in.gcount()) != kHeader) throw MalformedEncoding("truncated snapshot header");
        ContentHash h = ContentHash::from_bytes(ByteView(header).first(crypto::kHashSize));
        std::uint64_t ts = read_u64_be(header, crypto::kHashSize);
        std::uint64_t len = read_u64_be(header, crypto::kHashSize + 8);
        Bytes body(len);
        in.read(reinterpret_cast<char*>(body.data()), static_cast<std::streamsize>(len));
        if (static_cast<std::uint64_t>(in.gcount()) != len) throw MalformedEncoding("truncated snapshot body");
        node.accept_replica(h, ts, body);
    }
    return node;
}

StoreCluster::StoreCluster(std::size_t nodes, ReplicationMode mode) : mode_(mode) {
    nodes_.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) nodes_.emplace_back(static_cast<std::uint32_t>(i));
}

StoreNode& StoreCluster::node(std::uint32_t id) {
    return nodes_.at(id);
}

const StoreNode& StoreCluster::node(std::uint32_t id) const {
    return nodes_.at(id);
}

namespace {
std::pair<std::uint32_t, std::uint32_t> link_key(std::uint32_t a, std::uint32_t b) {
    return a < b ? std::pair{a, b} : std::pair{b, a};
}
}  // namespace

void StoreCluster::set_link(std::uint32_t a, std::uint32_t b, bool up) {
    if (up) down_.erase(link_key(a, b));
    else down_.insert(link_key(a, b));
}

bool StoreCluster::link_up(std::uint32_t a, std::uint32_t b) const {
    return a == b || down_.count(link_key(a, b)) == 0;
}

ContentHash StoreCluster::put(std::uint32_t id, const Ciphertext& ciphertext, std::uint64_t timestamp,
                              HopCounter* hops) {
    ContentHash h = node(id).put(ciphertext, timestamp);
    if (mode_ == ReplicationMode::Eager) replicate(id, hops);
    return h;
}

Ciphertext StoreCluster::get(std::uint32_t id, const ContentHash& hash, HopCounter& hops) const {
    const StoreNode& local = node(id);
    if (local.contains(hash)) return local.get(hash);
    for (const auto& peer : nodes_) {
        if (peer.id() == id || !link_up(id, peer.id())) continue;
        hops.messages += 2;
        if (peer.contains(hash)) return peer.get(hash);
    }
    throw NotFound(hash);
}

Ciphertext StoreCluster::fetch_from(std::uint32_t id, std::uint32_t holder, const ContentHash& hash,
                                    HopCounter& hops) const {
    if (id == holder) return node(id).get(hash);
    if (!link_up(id, holder)) throw NotFound(hash);
    hops.messages += 2;
    return node(holder).get(hash);
}

void StoreCluster::replicate(std::uint32_t id, HopCounter* hops) {
    StoreNode& source = node(id);
    for (const auto& h : source.keys()) {
        Bytes body = source.get(h).serialize();
        std::uint64_t ts = source.timestamp(h);
        for (auto& peer : nodes_) {
            if (peer.id() == id || !link_up(id, peer.id()) || peer.contains(h)) continue;
            peer.accept_replica(h, ts, body);
            if (hops) ++hops->messages;
        }
    }
}

}  // namespace edgehealth::store
