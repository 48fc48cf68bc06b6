#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "edgehealth/crypto/crypto.hpp"

namespace edgehealth::store {

using crypto::Ciphertext;
using crypto::ContentHash;

class NotFound : public std::runtime_error {
public:
    explicit NotFound(const ContentHash& h) : std::runtime_error("content not found: " + h.hex()) {}
};

/// The stored bytes no longer hash to their key.
class IntegrityError : public std::runtime_error {
public:
    explicit IntegrityError(const ContentHash& h) : std::runtime_error("integrity check failed: " + h.hex()) {}
};

/// Message counter shared by one logical operation.
struct HopCounter {
    std::size_t messages = 0;
};

/// One content-addressed node, co-located with a MEC server.
///
/// Entries are keyed by content_hash(serialized ciphertext, timestamp) and
/// re-hashed on every read. There is deliberately no location table: finding
/// which node holds a record is the contract registry's job.
class StoreNode {
public:
    explicit StoreNode(std::uint32_t id) : id_(id) {}

    std::uint32_t id() const { return id_; }

    /// Idempotent for identical (ciphertext, timestamp).
    ContentHash put(const Ciphertext& ciphertext, std::uint64_t timestamp);
    /// Local lookup only. Throws NotFound or IntegrityError.
    Ciphertext get(const ContentHash& hash) const;

    bool contains(const ContentHash& hash) const { return entries_.count(hash) != 0; }
    std::size_t size() const { return entries_.size(); }
    std::vector<ContentHash> keys() const;

    /// Stores an entry received from a peer after checking it hashes to `hash`.
    void accept_replica(const ContentHash& hash, std::uint64_t timestamp, ByteView body);

    /// Fault injection: flips one bit of the stored body.
    void flip_bit(const ContentHash& hash, std::size_t bit_index);
    std::size_t stored_bytes(const ContentHash& hash) const;
    std::uint64_t timestamp(const ContentHash& hash) const;

    /// Append-only snapshot: [32-byte hash][8-byte BE timestamp][8-byte BE length][body] per entry,
    /// in ascending hash order.
    void save_snapshot(std::ostream& out) const;
    /// Every entry is re-verified; a bad entry throws IntegrityError.
    static StoreNode load_snapshot(std::uint32_t id, std::istream& in);

private:
    struct Entry {
        std::uint64_t timestamp = 0;
        Bytes body;
    };
    const Entry& verified(const ContentHash& hash) const;

    std::uint32_t id_;
    std::map<ContentHash, Entry> entries_;
};

enum class ReplicationMode {
    Lazy,   ///< records stay on the writing node; remote reads fetch on demand
    Eager,  ///< every put is pushed to all reachable peers
};

/// A set of store nodes with full-mesh peering and per-link up/down state.
class StoreCluster {
public:
    StoreCluster(std::size_t nodes, ReplicationMode mode);

    StoreNode& node(std::uint32_t id);
    const StoreNode& node(std::uint32_t id) const;
    std::size_t size() const { return nodes_.size(); }
    ReplicationMode mode() const { return mode_; }

    void set_link(std::uint32_t a, std::uint32_t b, bool up);
    bool link_up(std::uint32_t a, std::uint32_t b) const;

    /// Eager mode pushes to every reachable peer, one message each.
    ContentHash put(std::uint32_t node, const Ciphertext& ciphertext, std::uint64_t timestamp,
                    HopCounter* hops = nullptr);

    /// Local read, falling back to asking reachable peers in id order
    /// (request + response = 2 messages per peer asked).
    Ciphertext get(std::uint32_t node, const ContentHash& hash, HopCounter& hops) const;

    /// Read from a known holder, as resolved by the contract registry.
    Ciphertext fetch_from(std::uint32_t node, std::uint32_t holder, const ContentHash& hash,
                          HopCounter& hops) const;

    /// Pushes everything `node` holds to every reachable peer that lacks it.
    void replicate(std::uint32_t node, HopCounter* hops = nullptr);

private:
    std::vector<StoreNode> nodes_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> down_;
    ReplicationMode mode_;
};

}  // namespace edgehealth::store
