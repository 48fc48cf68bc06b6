#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgehealth/contract/transactions.hpp"

namespace edgehealth::contract {

class DuplicateRegistration : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NotRegistered : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The caller is not the MEC hosting this contract instance.
class UnauthorizedCaller : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The hosting MEC server's identity.
struct MecIdentity {
    std::uint32_t id = 0;
    KeyPair keys;
};

enum class Verdict : std::uint8_t { Accepted = 1, Denied = 2 };
std::string to_string(Verdict v);

struct AccessResult {
    std::uint32_t sender = 0;         // MEC that invoked the contract
    PublicKey principal;              // key the request claimed; zero when undecryptable
    bool principal_known = false;     // true when the claim is backed by a valid signature
    Verdict verdict = Verdict::Denied;
    bool flag = false;                // true iff Accepted
    std::uint64_t timestamp = 0;
    std::string reason;

    Bytes encode() const;
    static AccessResult decode(ByteView in);
    /// One JSON object on a single line.
    std::string to_json() const;
    friend bool operator==(const AccessResult&, const AccessResult&) = default;
};

struct RegistryEntry {
    ContentHash hash;
    PublicKey owner;
    std::uint64_t timestamp = 0;
};

struct Registration {
    RegistrationTx tx;
    Address address{};
    Signature receipt{};  // MEC signature over the T_reg bytes, for the local ledger
};

/// MEC-side check of a signed T_reg: the signature must verify under the key
/// being registered. Returns the receipt without binding anything.
/// Throws MalformedTx.
Registration issue_receipt(ByteView signed_registration, const MecIdentity& mec);

/// Outcome of checking one encrypted request without touching state.
struct Evaluation {
    AccessResult result;
    std::optional<Certificate> certificate;
    std::optional<RequestTx> request;  // present whenever decryption and decoding succeeded
};

/// Access-control contract state, replicated at every MEC.
///
/// Mutations that must agree across replicas (bind_user, register_record,
/// record_access, record_sharing, record_inter_mec) are pure functions of their
/// arguments. Operations that need the hosting MEC's secret key
/// (register_user, evaluate_request) run only at that MEC; their effects reach
/// the other replicas as ledger transactions.
class ContractState {
public:
    /// Binds address → (key, id). Idempotent for the same key and id.
    /// Throws DuplicateRegistration if the address is bound to a different key or id.
    Address bind_user(const RegistrationTx& tx);

    /// Verifies the user's signature over T_reg, binds, and signs a receipt.
    /// Throws MalformedTx when the signature does not match the embedded key.
    Registration register_user(ByteView signed_registration, const MecIdentity& mec);

    /// Latest timestamp wins; ties go to the later call.
    void register_record(const ContentHash& hash, const PatientAddress& patient, const PublicKey& owner,
                         std::uint64_t timestamp);
    /// Throws NotRegistered.
    const RegistryEntry& lookup_hash(const PatientAddress& patient) const;

    /// Decrypts, decodes and checks a request. `caller` must be the hosting MEC.
    Evaluation evaluate_request(const Ciphertext& request, const MecIdentity& mec, const PublicKey& caller,
                                std::uint64_t now) const;
    /// Appends to the access log; a denied, signature-backed principal is penalized.
    void record_access(const AccessResult& result);
    /// evaluate_request followed by record_access.
    Evaluation authenticate(const Ciphertext& request, const MecIdentity& mec, const PublicKey& caller,
                            std::uint64_t now);

    void record_sharing(const SharingTx& tx) { sharing_log_.push_back(tx); }
    void record_inter_mec(const InterMecRequestTx& tx) { inter_mec_log_.push_back(tx); }

    bool penalized(const PublicKey& principal) const { return penalties_.count(principal) != 0; }
    void reset_penalty(const PublicKey& principal) { penalties_.erase(principal); }

    std::optional<PublicKey> user_key(const Address& a) const;
    std::optional<std::string> user_id(const Address& a) const;
    std::size_t user_count() const { return user_pk_.size(); }
    std::size_t record_count() const { return registry_.size(); }
    const std::vector<AccessResult>& access_log() const { return access_log_; }
    const std::vector<SharingTx>& sharing_log() const { return sharing_log_; }
    const std::vector<InterMecRequestTx>& inter_mec_log() const { return inter_mec_log_; }
    const std::set<PublicKey>& penalties() const { return penalties_; }

    std::uint64_t applied_height() const { return applied_height_; }
    void set_applied_height(std::uint64_t h) { applied_height_ = h; }

    /// Canonical byte image of the whole state; equal states give equal bytes.
    Bytes serialize() const;
    /// Access log as newline-delimited JSON.
    std::string access_log_ndjson() const;

private:
    std::map<Address, PublicKey> user_pk_;
    std::map<Address, std::string> user_id_;
    std::map<PatientAddress, RegistryEntry> registry_;
    std::vector<AccessResult> access_log_;
    std::set<PublicKey> penalties_;
    std::vector<SharingTx> sharing_log_;
    std::vector<InterMecRequestTx> inter_mec_log_;
    std::uint64_t applied_height_ = 0;
};

}  // namespace edgehealth::contract
