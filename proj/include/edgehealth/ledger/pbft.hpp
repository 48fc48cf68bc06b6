#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "edgehealth/common/rng.hpp"
#include "edgehealth/contract/acsc.hpp"
#include "edgehealth/ledger/apply.hpp"
#include "edgehealth/ledger/ledger.hpp"

namespace edgehealth::ledger {

enum class Behavior {
    Honest,
    Silent,        ///< receives everything, sends nothing
    Equivocating,  ///< votes for a different digest toward each peer
};

struct PbftConfig {
    std::size_t f = 1;
    std::size_t batch_size = 4;
    std::uint64_t batch_timeout_us = 1'000'000;
    std::uint64_t seed = 0;  // drives message delivery order
};

enum class Phase : std::uint8_t { PrePrepare = 1, Prepare = 2, Commit = 3 };

struct PbftMessage {
    Phase phase = Phase::PrePrepare;
    std::uint64_t view = 0;
    std::uint64_t height = 0;
    ContentHash digest;
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::optional<Block> block;  // pre-prepare only
    Signature signature{};

    /// Covers phase, view, height, digest and sender; not the recipient.
    Bytes signing_bytes() const;
};

/// True when the block carries at least `quorum` distinct valid commit votes.
bool verify_certificate(const Block& block, const std::vector<PublicKey>& validators, std::size_t quorum);

/// One validator: vote tallies per height, its own copy of the global ledger,
/// and its contract replica.
class PbftNode {
public:
    PbftNode(std::uint32_t id, Behavior behavior, KeyPair keys, std::vector<PublicKey> validators, std::size_t f);

    std::uint32_t id() const { return id_; }
    Behavior behavior() const { return behavior_; }
    bool honest() const { return behavior_ == Behavior::Honest; }
    std::uint32_t leader() const { return static_cast<std::uint32_t>(view_ % validators_.size()); }

    /// Leader only: builds the next block and returns the pre-prepare fan-out.
    std::vector<PbftMessage> propose(std::vector<LedgerTx> batch);
    std::vector<PbftMessage> handle(const PbftMessage& msg);

    const Ledger& ledger() const { return ledger_; }
    const contract::ContractState& state() const { return state_; }
    const std::vector<ApplyReport>& apply_reports() const { return reports_; }
    std::size_t rejected_messages() const { return rejected_; }

private:
    struct Round {
        std::optional<Block> candidate;
        std::map<std::uint32_t, ContentHash> prepares;  // first vote per node only
        std::map<std::uint32_t, std::pair<ContentHash, Signature>> commits;
        bool prepared = false;
        bool committed = false;
    };

    PbftMessage make(Phase phase, std::uint64_t height, const ContentHash& digest, std::uint32_t to) const;
    std::vector<PbftMessage> broadcast(Phase phase, std::uint64_t height, const ContentHash& digest) const;
    bool accept_proposal(const PbftMessage& msg) const;
    std::vector<PbftMessage> advance(std::uint64_t height);
    std::size_t matching(const Round& r, Phase phase) const;

    std::uint32_t id_;
    Behavior behavior_;
    KeyPair keys_;
    std::vector<PublicKey> validators_;
    std::size_t quorum_;
    std::uint64_t view_ = 0;
    std::map<std::uint64_t, Round> rounds_;
    Ledger ledger_;
    contract::ContractState state_;
    std::vector<ApplyReport> reports_;
    std::size_t rejected_ = 0;
};

struct RoundResult {
    bool committed = false;  // false means no quorum; the batch stays pending
    std::uint64_t height = 0;
    std::size_t tx_count = 0;
    std::size_t messages = 0;
    std::optional<ContentHash> block_hash;
};

/// n = 3f+1 validators with a fixed leader (node 0) and a seeded delivery order.
class PbftCluster {
public:
    /// `behaviors` defaults to all honest. Validator keys derive from `key_seed` and the node index.
    PbftCluster(std::size_t n, PbftConfig config, std::vector<Behavior> behaviors = {},
                std::string key_seed = "validator");

    std::size_t size() const { return nodes_.size(); }
    std::size_t quorum() const { return 2 * config_.f + 1; }
    const PbftConfig& config() const { return config_; }
    const PbftNode& node(std::size_t i) const { return nodes_.at(i); }
    const KeyPair& keys(std::size_t i) const { return keys_.at(i); }
    const std::vector<PublicKey>& validators() const { return validator_keys_; }

    /// Throws InvalidSignature. Already pending or committed transactions are ignored.
    /// A full batch closes immediately.
    void submit(LedgerTx tx, std::uint64_t now);
    /// Closes a partial batch once its oldest transaction has waited the timeout.
    void tick(std::uint64_t now);
    /// Closes every pending batch now; stops at the first round without quorum.
    void flush();

    /// Runs one three-phase round over `batch` without touching the pending pool.
    RoundResult run_round(std::vector<LedgerTx> batch);

    std::size_t pending() const { return pending_.size(); }
    std::uint64_t oldest_pending_time() const { return pending_.empty() ? 0 : pending_.front().second; }
    std::size_t messages_sent() const { return messages_; }
    const std::vector<RoundResult>& history() const { return history_; }

    /// Safety: no height holds two different block hashes among honest nodes.
    bool honest_agree() const;
    /// Convergence: all honest contract replicas serialize identically.
    bool honest_states_identical() const;
    /// Index of the first honest node.
    std::size_t reference_node() const;

private:
    bool close_batch();

    PbftConfig config_;
    std::vector<KeyPair> keys_;
    std::vector<PublicKey> validator_keys_;
    std::vector<PbftNode> nodes_;
    Rng rng_;
    std::vector<std::pair<LedgerTx, std::uint64_t>> pending_;  // tx, submission time
    std::set<ContentHash> seen_;
    std::size_t messages_ = 0;
    std::vector<RoundResult> history_;
};

}  // namespace edgehealth::ledger
