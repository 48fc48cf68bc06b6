#include "edgehealth/contract/acsc.hpp"

#include "json.hpp"

#include "edgehealth/common/codec.hpp"

namespace edgehealth::contract {

std::string to_string(Verdict v) {
    return v == Verdict::Accepted ? "Accepted" : "Denied";
}

Bytes AccessResult::encode() const {
    return FieldWriter()
        .add_u32(sender)
        .add(principal.bytes)
        .add_u32(principal_known ? 1 : 0)
        .add_u32(static_cast<std::uint32_t>(verdict))
        .add_u32(flag ? 1 : 0)
        .add_u64(timestamp)
        .add(reason)
        .finish();
}

AccessResult AccessResult::decode(ByteView in) {
    try {
        FieldReader r(in, 7);
        AccessResult a;
        a.sender = r.u32(1);
        a.principal = PublicKey::from_bytes(r.field(2));
        a.principal_known = r.u32(3) != 0;
        std::uint32_t v = r.u32(4);
        if (v != 1 && v != 2) throw MalformedTx("access result: unknown verdict");
        a.verdict = static_cast<Verdict>(v);
        a.flag = r.u32(5) != 0;
        a.timestamp = r.u64(6);
        a.reason = r.text(7);
        return a;
    } catch (const MalformedEncoding& e) {
        throw MalformedTx(std::string("access result: ") + e.what());
    }
}

std::string AccessResult::to_json() const {
    nlohmann::ordered_json j;
    j["sender"] = sender;
    j["principal"] = principal_known ? principal.hex() : "";
    j["verdict"] = to_string(verdict);
    j["flag"] = flag;
    j["timestamp"] = timestamp;
    j["reason"] = reason;
    return j.dump();
}

Address ContractState::bind_user(const RegistrationTx& tx) {
    Address addr = address_of(tx.user_pk);
    auto pk = user_pk_.find(addr);
    if (pk != user_pk_.end()) {
        if (pk->second != tx.user_pk || user_id_.at(addr) != tx.user_id) {
            throw DuplicateRegistration("address " + to_hex(addr) + " is already bound");
        }
        return addr;
    }
    user_pk_.emplace(addr, tx.user_pk);
    user_id_.emplace(addr, tx.user_id);
    return addr;
}

Registration issue_receipt(ByteView signed_registration, const MecIdentity& mec) {
    SignedMessage msg = SignedMessage::decode(signed_registration);
    Registration out;
    out.tx = RegistrationTx::decode(msg.payload);
    if (!crypto::verify(msg.signature, msg.payload, out.tx.user_pk)) {
        throw MalformedTx("registration is not signed by the key it registers");
    }
    out.address = address_of(out.tx.user_pk);
    out.receipt = crypto::sign(msg.payload, mec.keys.secret_key);
    return out;
}

Registration ContractState::register_user(ByteView signed_registration, const MecIdentity& mec) {
    Registration out = issue_receipt(signed_registration, mec);
    bind_user(out.tx);
    return out;
}

void ContractState::register_record(const ContentHash& hash, const PatientAddress& patient, const PublicKey& owner,
                                    std::uint64_t timestamp) {
    auto it = registry_.find(patient);
    if (it != registry_.end() && it->second.timestamp > timestamp) return;
    registry_[patient] = RegistryEntry{hash, owner, timestamp};
}

const RegistryEntry& ContractState::lookup_hash(const PatientAddress& patient) const {
    auto it = registry_.find(patient);
    if (it == registry_.end()) {
        throw NotRegistered("no record for patient " + patient.patient_id + " at hospital " +
                            std::to_string(patient.hospital));
    }
    return it->second;
}

Evaluation ContractState::evaluate_request(const Ciphertext& request, const MecIdentity& mec, const PublicKey& caller,
                                           std::uint64_t now) const {
    if (caller != mec.keys.public_key) throw UnauthorizedCaller("only the hosting MEC may authenticate requests");

    Evaluation ev;
    ev.result.sender = mec.id;
    ev.result.timestamp = now;
    auto deny = [&](std::string reason) -> Evaluation& {
        ev.result.verdict = Verdict::Denied;
        ev.result.flag = false;
        ev.result.reason = std::move(reason);
        return ev;
    };

    Bytes plain;
    try {
        plain = crypto::decrypt(request, mec.keys.secret_key);
    } catch (const crypto::AuthFailure&) {
        return deny("undecryptable");
    }

    SignedMessage msg;
    RequestTx tx;
    try {
        msg = SignedMessage::decode(plain);
        tx = RequestTx::decode(msg.payload);
    } catch (const MalformedTx&) {
        return deny("malformed");
    }
    ev.request = tx;
    ev.result.principal = tx.user_pk;

    if (!crypto::verify(msg.signature, msg.payload, tx.user_pk)) return deny("bad signature");
    ev.result.principal_known = true;

    if (penalized(tx.user_pk)) return deny("penalized");

    Address addr = address_of(tx.user_pk);
    auto pk = user_pk_.find(addr);
    if (pk == user_pk_.end()) return deny("unregistered");
    bool pk_check = pk->second == tx.user_pk;
    bool id_check = user_id_.at(addr) == tx.user_id;
    if (!(pk_check && id_check)) return deny("identity mismatch");

    ev.result.verdict = Verdict::Accepted;
    ev.result.flag = true;
    ev.result.reason = "ok";
    ev.certificate = Certificate{crypto::sign(plain, mec.keys.secret_key), tx.user_pk, tx.user_id, now, plain};
    return ev;
}

void ContractState::record_access(const AccessResult& result) {
    access_log_.push_back(result);
    if (result.verdict == Verdict::Denied && result.principal_known) penalties_.insert(result.principal);
}

Evaluation ContractState::authenticate(const Ciphertext& request, const MecIdentity& mec, const PublicKey& caller,
                                       std::uint64_t now) {
    Evaluation ev = evaluate_request(request, mec, caller, now);
    record_access(ev.result);
    return ev;
}

std::optional<PublicKey> ContractState::user_key(const Address& a) const {
    auto it = user_pk_.find(a);
    if (it == user_pk_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> ContractState::user_id(const Address& a) const {
    auto it = user_id_.find(a);
    if (it == user_id_.end()) return std::nullopt;
    return it->second;
}

namespace {
void put_chunk(Bytes& out, ByteView chunk) {
    put_u64_be(out, chunk.size());
    append(out, chunk);
}
}  // namespace

Bytes ContractState::serialize() const {
    Bytes out;
    put_u64_be(out, applied_height_);

    put_u64_be(out, user_pk_.size());
    for (const auto& [addr, pk] : user_pk_) {
        append(out, addr);
        append(out, pk.bytes);
        put_chunk(out, to_bytes(user_id_.at(addr)));
    }

    put_u64_be(out, registry_.size());
    for (const auto& [patient, entry] : registry_) {
        put_chunk(out, patient.encode());
        append(out, entry.hash.digest);
        append(out, entry.owner.bytes);
        put_u64_be(out, entry.timestamp);
    }

    put_u64_be(out, access_log_.size());
    for (const auto& a : access_log_) put_chunk(out, a.encode());

    put_u64_be(out, penalties_.size());
    for (const auto& pk : penalties_) append(out, pk.bytes);

    put_u64_be(out, sharing_log_.size());
    for (const auto& s : sharing_log_) put_chunk(out, s.encode());

    put_u64_be(out, inter_mec_log_.size());
    for (const auto& r : inter_mec_log_) put_chunk(out, r.encode());
    return out;
}

std::string ContractState::access_log_ndjson() const {
    std::string out;
    for (const auto& a : access_log_) {
        out += a.to_json();
        out += '\n';
    }
    return out;
}

}  // namespace edgehealth::contract
