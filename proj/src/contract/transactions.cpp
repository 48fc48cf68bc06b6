#include "edgehealth/contract/transactions.hpp"

#include <algorithm>

#include "edgehealth/common/codec.hpp"

namespace edgehealth::contract {

namespace {

// Every decoder reports layout problems as MalformedTx, whatever layer found them.
template <typename Fn>
auto guarded(const char* what, Fn&& fn) {
    try {
        return fn();
    } catch (const MalformedEncoding& e) {
        throw MalformedTx(std::string(what) + ": " + e.what());
    }
}

PublicKey key_at(const FieldReader& r, std::uint8_t i) {
    return PublicKey::from_bytes(r.field(i));
}

ContentHash hash_at(const FieldReader& r, std::uint8_t i) {
    return ContentHash::from_bytes(r.field(i));
}

}  // namespace

Address address_of(const PublicKey& pk) {
    ContentHash h = crypto::content_hash(pk.bytes, 0);
    Address a;
    std::copy_n(h.digest.begin(), a.size(), a.begin());
    return a;
}

Bytes RegistrationTx::encode() const {
    return FieldWriter().add(user_pk.bytes).add(user_id).add_u64(timestamp).finish();
}

RegistrationTx RegistrationTx::decode(ByteView in) {
    return guarded("registration", [&] {
        FieldReader r(in, 3);
        return RegistrationTx{key_at(r, 1), r.text(2), r.u64(3)};
    });
}

Bytes PatientAddress::encode() const {
    return FieldWriter().add(patient_id).add_u32(hospital).finish();
}

PatientAddress PatientAddress::decode(ByteView in) {
    return guarded("patient address", [&] {
        FieldReader r(in, 2);
        return PatientAddress{r.text(1), r.u32(2)};
    });
}

Bytes RequestTx::encode() const {
    return FieldWriter()
        .add(user_pk.bytes)
        .add(user_id)
        .add(target.encode())
        .add_u64(deadline_us)
        .add_u64(timestamp)
        .finish();
}

RequestTx RequestTx::decode(ByteView in) {
    return guarded("request", [&] {
        FieldReader r(in, 5);
        return RequestTx{key_at(r, 1), r.text(2), PatientAddress::decode(r.field(3)), r.u64(4), r.u64(5)};
    });
}

Bytes SignedMessage::encode() const {
    return FieldWriter().add(payload).add(signature).finish();
}

SignedMessage SignedMessage::decode(ByteView in) {
    return guarded("signed message", [&] {
        FieldReader r(in, 2);
        return SignedMessage{r.bytes(1), crypto::signature_from_bytes(r.field(2))};
    });
}

SignedMessage sign_message(Bytes payload, const SecretKey& author) {
    Signature sig = crypto::sign(payload, author);
    return SignedMessage{std::move(payload), sig};
}

Bytes prepare_registration(const RegistrationTx& tx, const SecretKey& user) {
    return sign_message(tx.encode(), user).encode();
}

Ciphertext seal_request(const RequestTx& tx, const SecretKey& user, const PublicKey& mec,
                        const crypto::Entropy& entropy) {
    return crypto::encrypt(sign_message(tx.encode(), user).encode(), mec, entropy);
}

bool Certificate::verify(const PublicKey& mec) const {
    return crypto::verify(signature, request, mec);
}

Bytes Certificate::encode() const {
    return FieldWriter().add(signature).add(user_pk.bytes).add(user_id).add_u64(timestamp).add(request).finish();
}

Certificate Certificate::decode(ByteView in) {
    return guarded("certificate", [&] {
        FieldReader r(in, 5);
        return Certificate{crypto::signature_from_bytes(r.field(1)), key_at(r, 2), r.text(3), r.u64(4), r.bytes(5)};
    });
}

Bytes StorageTx::encode() const {
    return FieldWriter().add(hash.digest).add(patient.encode()).add(owner.bytes).add_u64(timestamp).finish();
}

StorageTx StorageTx::decode(ByteView in) {
    return guarded("storage", [&] {
        FieldReader r(in, 4);
        return StorageTx{hash_at(r, 1), PatientAddress::decode(r.field(2)), key_at(r, 3), r.u64(4)};
    });
}

Bytes RegistrationRecord::encode() const {
    return FieldWriter().add(signed_registration).add(receipt).finish();
}

RegistrationRecord RegistrationRecord::decode(ByteView in) {
    return guarded("registration record", [&] {
        FieldReader r(in, 2);
        return RegistrationRecord{r.bytes(1), crypto::signature_from_bytes(r.field(2))};
    });
}

Bytes InterMecRequestTx::encode() const {
    return FieldWriter().add(patient.encode()).add(user_pk.bytes).add(requester.bytes).add_u64(timestamp).finish();
}

InterMecRequestTx InterMecRequestTx::decode(ByteView in) {
    return guarded("inter-MEC request", [&] {
        FieldReader r(in, 4);
        return InterMecRequestTx{PatientAddress::decode(r.field(1)), key_at(r, 2), key_at(r, 3), r.u64(4)};
    });
}

Bytes DataRelayTx::encode() const {
    return FieldWriter().add(hash.digest).add(source.bytes).add(user_pk.bytes).add_u64(timestamp).finish();
}

DataRelayTx DataRelayTx::decode(ByteView in) {
    return guarded("data relay", [&] {
        FieldReader r(in, 4);
        return DataRelayTx{hash_at(r, 1), key_at(r, 2), key_at(r, 3), r.u64(4)};
    });
}

Bytes SharingTx::encode() const {
    return FieldWriter().add(user_pk.bytes).add(hash.digest).add(server.bytes).add_u64(timestamp).finish();
}

SharingTx SharingTx::decode(ByteView in) {
    return guarded("sharing", [&] {
        FieldReader r(in, 4);
        return SharingTx{key_at(r, 1), hash_at(r, 2), key_at(r, 3), r.u64(4)};
    });
}

}  // namespace edgehealth::contract
