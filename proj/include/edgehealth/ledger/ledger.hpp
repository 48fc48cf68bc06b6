#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgehealth/common/bytes.hpp"
#include "edgehealth/crypto/crypto.hpp"

namespace edgehealth::ledger {

using crypto::ContentHash;
using crypto::KeyPair;
using crypto::PublicKey;
using crypto::Signature;

enum class TxKind : std::uint8_t {
    Storage = 1,
    Registration = 2,
    Request = 3,
    Access = 4,
    InterMecRequest = 5,
    DataRelay = 6,
    Sharing = 7,
};
std::string to_string(TxKind kind);

class InvalidSignature : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ChainError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LedgerTx {
    TxKind kind = TxKind::Storage;
    Bytes payload;
    PublicKey submitter;
    Signature signature{};
    std::uint64_t timestamp = 0;

    /// The bytes the submitter signs: everything except the signature.
    Bytes signing_bytes() const;
    Bytes encode() const;
    static LedgerTx decode(ByteView in);
    ContentHash hash() const;
    bool signature_valid() const;

    friend bool operator==(const LedgerTx&, const LedgerTx&) = default;
};

LedgerTx make_tx(TxKind kind, Bytes payload, const KeyPair& submitter, std::uint64_t timestamp);

/// A signed commit vote for one block.
struct Vote {
    std::uint32_t node = 0;
    Signature signature{};
    friend bool operator==(const Vote&, const Vote&) = default;
};

struct Block {
    std::uint64_t height = 0;
    ContentHash prev_hash;
    ContentHash merkle_root;
    std::vector<LedgerTx> txs;
    std::uint32_t proposer = 0;
    std::vector<Vote> commit_certificate;  // not covered by hash()

    /// Hash over the header (height, prev, merkle root, proposer, tx count).
    ContentHash hash() const;
};

/// content_hash over the concatenated transaction hashes, timestamp 0.
ContentHash merkle_root(const std::vector<LedgerTx>& txs);

Block make_block(std::uint64_t height, const ContentHash& prev, std::vector<LedgerTx> txs, std::uint32_t proposer);

/// Hash-chained block sequence starting from a fixed genesis block at height 0.
class Ledger {
public:
    Ledger();

    /// Throws ChainError unless the block extends the tip with a matching merkle root.
    void append(Block block);

    const std::vector<Block>& blocks() const { return blocks_; }
    const Block& tip() const { return blocks_.back(); }
    std::uint64_t height() const { return blocks_.back().height; }

    /// Recomputes every link and merkle root.
    bool verify_chain() const;

    /// Transactions of the given kind, in chain order.
    std::vector<LedgerTx> transactions(TxKind kind) const;
    std::size_t tx_count() const;

    /// One line per block: "height prev_hex merkle_hex tx_count".
    std::string dump() const;

private:
    std::vector<Block> blocks_;
};

/// A hospital's own chain: one writer, one transaction per block, no consensus.
class LocalLedger {
public:
    LocalLedger(std::uint32_t hospital, KeyPair writer) : hospital_(hospital), writer_(std::move(writer)) {}

    const LedgerTx& record(TxKind kind, Bytes payload, std::uint64_t timestamp);
    const Ledger& chain() const { return chain_; }

private:
    std::uint32_t hospital_;
    KeyPair writer_;
    Ledger chain_;
};

}  // namespace edgehealth::ledger
