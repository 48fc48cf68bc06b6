#include "edgehealth/ledger/pbft.hpp"

#include <algorithm>

#include "edgehealth/common/codec.hpp"

namespace edgehealth::ledger {

Bytes PbftMessage::signing_bytes() const {
    return FieldWriter()
        .add_u32(static_cast<std::uint32_t>(phase))
        .add_u64(view)
        .add_u64(height)
        .add(digest.digest)
        .add_u32(from)
        .finish();
}

bool verify_certificate(const Block& block, const std::vector<PublicKey>& validators, std::size_t quorum) {
    std::set<std::uint32_t> signers;
    PbftMessage vote;
    vote.phase = Phase::Commit;
    vote.height = block.height;
    vote.digest = block.hash();
    for (const auto& v : block.commit_certificate) {
        if (v.node >= validators.size()) continue;
        vote.from = v.node;
        if (crypto::verify(v.signature, vote.signing_bytes(), validators[v.node])) signers.insert(v.node);
    }
    return signers.size() >= quorum;
}

PbftNode::PbftNode(std::uint32_t id, Behavior behavior, KeyPair keys, std::vector<PublicKey> validators,
                   std::size_t f)
    : id_(id), behavior_(behavior), keys_(std::move(keys)), validators_(std::move(validators)), quorum_(2 * f + 1) {}

PbftMessage PbftNode::make(Phase phase, std::uint64_t height, const ContentHash& digest, std::uint32_t to) const {
    PbftMessage m;
    m.phase = phase;
    m.view = view_;
    m.height = height;
    m.digest = digest;
    m.from = id_;
    m.to = to;
    m.signature = crypto::sign(m.signing_bytes(), keys_.secret_key);
    return m;
}

std::vector<PbftMessage> PbftNode::broadcast(Phase phase, std::uint64_t height, const ContentHash& digest) const {
    std::vector<PbftMessage> out;
    for (std::uint32_t peer = 0; peer < validators_.size(); ++peer) {
        if (peer == id_) continue;
        ContentHash sent = digest;
        if (behavior_ == Behavior::Equivocating) {
            // A different, validly signed digest for every recipient.
            Bytes fake(digest.digest.begin(), digest.digest.end());
            put_u32_be(fake, peer);
            sent = crypto::sha256(fake);
        }
        out.push_back(make(phase, height, sent, peer));
    }
    return out;
}

std::vector<PbftMessage> PbftNode::propose(std::vector<LedgerTx> batch) {
    if (behavior_ == Behavior::Silent || leader() != id_) return {};
    std::uint64_t height = ledger_.height() + 1;
    Block block = make_block(height, ledger_.tip().hash(), std::move(batch), id_);
    ContentHash digest = block.hash();

    Round& r = rounds_[height];
    r = Round{};
    r.candidate = block;
    r.prepares.emplace(id_, digest);

    std::vector<PbftMessage> out;
    for (std::uint32_t peer = 0; peer < validators_.size(); ++peer) {
        if (peer == id_) continue;
        PbftMessage m = make(Phase::PrePrepare, height, digest, peer);
        m.block = block;
        out.push_back(std::move(m));
    }
    auto prepares = broadcast(Phase::Prepare, height, digest);
    out.insert(out.end(), prepares.begin(), prepares.end());
    return out;
}

bool PbftNode::accept_proposal(const PbftMessage& msg) const {
    if (!msg.block || msg.from != leader()) return false;
    const Block& b = *msg.block;
    if (b.height != msg.height || b.height != ledger_.height() + 1) return false;
    if (b.proposer != msg.from || b.prev_hash != ledger_.tip().hash()) return false;
    if (b.hash() != msg.digest || b.merkle_root != merkle_root(b.txs)) return false;
    return std::all_of(b.txs.begin(), b.txs.end(), [](const LedgerTx& tx) { return tx.signature_valid(); });
}

std::size_t PbftNode::matching(const Round& r, Phase phase) const {
    ContentHash digest = r.candidate->hash();
    std::size_t n = 0;
    if (phase == Phase::Prepare) {
        for (const auto& [_, d] : r.prepares) n += d == digest;
    } else {
        for (const auto& [_, vote] : r.commits) n += vote.first == digest;
    }
    return n;
}

std::vector<PbftMessage> PbftNode::advance(std::uint64_t height) {
    std::vector<PbftMessage> out;
    Round& r = rounds_[height];
    if (!r.candidate) return out;
    ContentHash digest = r.candidate->hash();

    if (!r.prepared && matching(r, Phase::Prepare) >= quorum_) {
        r.prepared = true;
        r.commits.emplace(id_, std::pair{digest, make(Phase::Commit, height, digest, id_).signature});
        out = broadcast(Phase::Commit, height, digest);
    }
    if (r.prepared && !r.committed && matching(r, Phase::Commit) >= quorum_) {
        r.committed = true;
        Block block = *r.candidate;
        for (const auto& [node, vote] : r.commits) {
            if (vote.first == digest) block.commit_certificate.push_back(Vote{node, vote.second});
        }
        ledger_.append(block);
        reports_.push_back(apply_committed(state_, block));
    }
    return out;
}

std::vector<PbftMessage> PbftNode::handle(const PbftMessage& msg) {
    if (behavior_ == Behavior::Silent) return {};
    if (msg.from >= validators_.size() || msg.view != view_ ||
        !crypto::verify(msg.signature, msg.signing_bytes(), validators_[msg.from])) {
        ++rejected_;
        return {};
    }

    Round& r = rounds_[msg.height];
    switch (msg.phase) {
        case Phase::PrePrepare: {
            if (r.candidate) return {};
            if (!accept_proposal(msg)) {
                ++rejected_;
                return {};
            }
            r.candidate = *msg.block;
            r.prepares.emplace(id_, msg.digest);
            std::vector<PbftMessage> out;
            if (behavior_ == Behavior::Equivocating) {
                // Also try to pass off a competing proposal.
                for (std::uint32_t peer = 0; peer < validators_.size(); ++peer) {
                    if (peer == id_) continue;
                    Block forged = make_block(msg.height, ledger_.tip().hash(), {}, id_);
                    PbftMessage m = make(Phase::PrePrepare, msg.height, forged.hash(), peer);
                    m.block = std::move(forged);
                    out.push_back(std::move(m));
                }
            }
            auto prepares = broadcast(Phase::Prepare, msg.height, msg.digest);
            out.insert(out.end(), prepares.begin(), prepares.end());
            auto next = advance(msg.height);
            out.insert(out.end(), next.begin(), next.end());
            return out;
        }
        case Phase::Prepare:
            r.prepares.emplace(msg.from, msg.digest);
            return advance(msg.height);
        case Phase::Commit:
            r.commits.emplace(msg.from, std::pair{msg.digest, msg.signature});
            return advance(msg.height);
    }
    return {};
}

PbftCluster::PbftCluster(std::size_t n, PbftConfig config, std::vector<Behavior> behaviors, std::string key_seed)
    : config_(config), rng_(Rng::derive(config.seed, 0x7062667400ULL)) {
    if (n != 3 * config_.f + 1) throw std::invalid_argument("validator count must be 3f+1");
    if (config_.batch_size == 0) throw std::invalid_argument("batch size must be positive");
    if (behaviors.empty()) behaviors.assign(n, Behavior::Honest);
    if (behaviors.size() != n) throw std::invalid_argument("one behavior per validator");

    for (std::size_t i = 0; i < n; ++i) {
        keys_.push_back(crypto::generate_keypair(key_seed + "/" + std::to_string(i)));
        validator_keys_.push_back(keys_.back().public_key);
    }
    for (std::size_t i = 0; i < n; ++i) {
        nodes_.emplace_back(static_cast<std::uint32_t>(i), behaviors[i], keys_[i], validator_keys_, config_.f);
    }
}

RoundResult PbftCluster::run_round(std::vector<LedgerTx> batch) {
    PbftNode& leader = nodes_.at(0);
    RoundResult result;
    result.height = leader.ledger().height() + 1;
    result.tx_count = batch.size();

    std::vector<PbftMessage> in_flight = leader.propose(std::move(batch));
    result.messages = in_flight.size();
    while (!in_flight.empty()) {
        std::size_t pick = rng_.below(in_flight.size());
        std::swap(in_flight[pick], in_flight.back());
        PbftMessage msg = std::move(in_flight.back());
        in_flight.pop_back();
        auto replies = nodes_.at(msg.to).handle(msg);
        result.messages += replies.size();
        for (auto& r : replies) in_flight.push_back(std::move(r));
    }

    messages_ += result.messages;
    result.committed = leader.honest() && leader.ledger().height() >= result.height;
    if (result.committed) result.block_hash = leader.ledger().blocks()[result.height].hash();
    history_.push_back(result);
    return result;
}

void PbftCluster::submit(LedgerTx tx, std::uint64_t now) {
    if (!tx.signature_valid()) throw InvalidSignature("transaction signature does not verify");
    if (!seen_.insert(tx.hash()).second) return;
    pending_.emplace_back(std::move(tx), now);
    if (pending_.size() >= config_.batch_size) close_batch();
}

bool PbftCluster::close_batch() {
    std::size_t take = std::min(config_.batch_size, pending_.size());
    std::vector<LedgerTx> batch;
    for (std::size_t i = 0; i < take; ++i) batch.push_back(pending_[i].first);
    if (!run_round(std::move(batch)).committed) return false;
    pending_.erase(pending_.begin(), pending_.begin() + static_cast<std::ptrdiff_t>(take));
    return true;
}

void PbftCluster::tick(std::uint64_t now) {
    while (!pending_.empty() && now - pending_.front().second >= config_.batch_timeout_us) {
        if (!close_batch()) break;
    }
}

void PbftCluster::flush() {
    while (!pending_.empty()) {
        if (!close_batch()) break;
    }
}

bool PbftCluster::honest_agree() const {
    std::map<std::uint64_t, ContentHash> seen;
    for (const auto& node : nodes_) {
        if (!node.honest()) continue;
        for (const auto& b : node.ledger().blocks()) {
            auto [it, fresh] = seen.emplace(b.height, b.hash());
            if (!fresh && it->second != b.hash()) return false;
        }
    }
    return true;
}

bool PbftCluster::honest_states_identical() const {
    std::optional<Bytes> reference;
    for (const auto& node : nodes_) {
        if (!node.honest()) continue;
        Bytes s = node.state().serialize();
        if (!reference) reference = std::move(s);
        else if (*reference != s) return false;
    }
    return true;
}

std::size_t PbftCluster::reference_node() const {
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].honest()) return i;
    }
    throw std::logic_error("no honest validator");
}

}  // namespace edgehealth::ledger
