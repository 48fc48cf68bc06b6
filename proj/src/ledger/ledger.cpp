#include "edgehealth/ledger/ledger.hpp"

#include <sstream>

#include "edgehealth/common/codec.hpp"

namespace edgehealth::ledger {

std::string to_string(TxKind kind) {
    switch (kind) {
        case TxKind::Storage: return "Storage";
        case TxKind::Registration: return "Registration";
        case TxKind::Request: return "Request";
        case TxKind::Access: return "Access";
        case TxKind::InterMecRequest: return "InterMecRequest";
        case TxKind::DataRelay: return "DataRelay";
        case TxKind::Sharing: return "Sharing";
    }
    return "Unknown";
}

Bytes LedgerTx::signing_bytes() const {
    return FieldWriter()
        .add_u32(static_cast<std::uint32_t>(kind))
        .add(payload)
        .add(submitter.bytes)
        .add_u64(timestamp)
        .finish();
}

Bytes LedgerTx::encode() const {
    return FieldWriter().add(signing_bytes()).add(signature).finish();
}

LedgerTx LedgerTx::decode(ByteView in) {
    FieldReader outer(in, 2);
    FieldReader r(outer.field(1), 4);
    std::uint32_t kind = r.u32(1);
    if (kind < 1 || kind > 7) throw MalformedEncoding("unknown transaction kind");
    LedgerTx tx;
    tx.kind = static_cast<TxKind>(kind);
    tx.payload = r.bytes(2);
    tx.submitter = PublicKey::from_bytes(r.field(3));
    tx.timestamp = r.u64(4);
    tx.signature = crypto::signature_from_bytes(outer.field(2));
    return tx;
}

ContentHash LedgerTx::hash() const {
    return crypto::sha256(encode());
}

bool LedgerTx::signature_valid() const {
    return crypto::verify(signature, signing_bytes(), submitter);
}

LedgerTx make_tx(TxKind kind, Bytes payload, const KeyPair& submitter, std::uint64_t timestamp) {
    LedgerTx tx;
    tx.kind = kind;
    tx.payload = std::move(payload);
    tx.submitter = submitter.public_key;
    tx.timestamp = timestamp;
    tx.signature = crypto::sign(tx.signing_bytes(), submitter.secret_key);
    return tx;
}

ContentHash Block::hash() const {
    return crypto::sha256(FieldWriter()
                              .add_u64(height)
                              .add(prev_hash.digest)
                              .add(merkle_root.digest)
                              .add_u32(proposer)
                              .add_u64(txs.size())
                              .finish());
}

ContentHash merkle_root(const std::vector<LedgerTx>& txs) {
    Bytes concat;
    concat.reserve(txs.size() * crypto::kHashSize);
    for (const auto& tx : txs) append(concat, tx.hash().digest);
    return crypto::content_hash(concat, 0);
}

Block make_block(std::uint64_t height, const ContentHash& prev, std::vector<LedgerTx> txs, std::uint32_t proposer) {
    Block b;
    b.height = height;
    b.prev_hash = prev;
    b.merkle_root = merkle_root(txs);
    b.txs = std::move(txs);
    b.proposer = proposer;
    return b;
}

Ledger::Ledger() {
    blocks_.push_back(make_block(0, ContentHash{}, {}, 0));
}

void Ledger::append(Block block) {
    if (block.height != height() + 1) {
        throw ChainError("block height " + std::to_string(block.height) + " does not extend tip " +
                         std::to_string(height()));
    }
    if (block.prev_hash != tip().hash()) throw ChainError("previous hash does not match tip");
    if (block.merkle_root != merkle_root(block.txs)) throw ChainError("merkle root does not match body");
    blocks_.push_back(std::move(block));
}

bool Ledger::verify_chain() const {
    for (std::size_t i = 0; i < blocks_.size(); ++i) {
        const Block& b = blocks_[i];
        if (b.height != i || b.merkle_root != merkle_root(b.txs)) return false;
        ContentHash expected_prev = i == 0 ? ContentHash{} : blocks_[i - 1].hash();
        if (b.prev_hash != expected_prev) return false;
    }
    return true;
}

std::vector<LedgerTx> Ledger::transactions(TxKind kind) const {
    std::vector<LedgerTx> out;
    for (const auto& b : blocks_) {
        for (const auto& tx : b.txs) {
            if (tx.kind == kind) out.push_back(tx);
        }
    }
    return out;
}

std::size_t Ledger::tx_count() const {
    std::size_t n = 0;
    for (const auto& b : blocks_) n += b.txs.size();
    return n;
}

std::string Ledger::dump() const {
    std::ostringstream out;
    for (const auto& b : blocks_) {
        out << b.height << ' ' << b.prev_hash.hex() << ' ' << b.merkle_root.hex() << ' ' << b.txs.size() << '\n';
    }
    return out.str();
}

const LedgerTx& LocalLedger::record(TxKind kind, Bytes payload, std::uint64_t timestamp) {
    LedgerTx tx = make_tx(kind, std::move(payload), writer_, timestamp);
    chain_.append(make_block(chain_.height() + 1, chain_.tip().hash(), {std::move(tx)}, hospital_));
    return chain_.tip().txs.front();
}

}  // namespace edgehealth::ledger
