#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "edgehealth/common/bytes.hpp"
#include "edgehealth/crypto/crypto.hpp"

namespace edgehealth::contract {

using crypto::Ciphertext;
using crypto::ContentHash;
using crypto::KeyPair;
using crypto::PublicKey;
using crypto::SecretKey;
using crypto::Signature;

class MalformedTx : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 20-byte account address derived from a user public key.
using Address = std::array<std::uint8_t, 20>;

/// First 20 bytes of content_hash(pk, 0).
Address address_of(const PublicKey& pk);

/// T_reg: (user key, user id, timestamp) at indices 1..3.
struct RegistrationTx {
    PublicKey user_pk;
    std::string user_id;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static RegistrationTx decode(ByteView in);  // throws MalformedTx
    friend bool operator==(const RegistrationTx&, const RegistrationTx&) = default;
};

/// Where a patient's record lives: (patient id, hospital id).
struct PatientAddress {
    std::string patient_id;
    std::uint32_t hospital = 0;

    Bytes encode() const;
    static PatientAddress decode(ByteView in);
    friend auto operator<=>(const PatientAddress&, const PatientAddress&) = default;
};

/// T_req: (user key, user id, patient address, deadline, timestamp) at indices 1..5.
struct RequestTx {
    PublicKey user_pk;
    std::string user_id;
    PatientAddress target;
    std::uint64_t deadline_us = 0;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static RequestTx decode(ByteView in);
    friend bool operator==(const RequestTx&, const RequestTx&) = default;
};

/// An encoded transaction plus its author's signature over exactly those bytes.
/// This is how a receiver learns the sender's key: it is the key the
/// signature verifies under.
struct SignedMessage {
    Bytes payload;
    Signature signature{};

    Bytes encode() const;
    static SignedMessage decode(ByteView in);
};

SignedMessage sign_message(Bytes payload, const SecretKey& author);

/// User side of registration: the signed T_reg, ready to submit.
Bytes prepare_registration(const RegistrationTx& tx, const SecretKey& user);

/// User side of a data request: T_req, signed by the user and sealed to the MEC key.
Ciphertext seal_request(const RequestTx& tx, const SecretKey& user, const PublicKey& mec,
                        const crypto::Entropy& entropy);

/// Proof of a successful authentication, verifiable by anyone holding the MEC key.
struct Certificate {
    Signature signature{};  // MEC signature over `request`
    PublicKey user_pk;
    std::string user_id;
    std::uint64_t timestamp = 0;
    Bytes request;  // the decrypted request bytes the signature covers

    bool verify(const PublicKey& mec) const;
    Bytes encode() const;
    static Certificate decode(ByteView in);
};

// Ledger payloads.

/// Record announcement: (h_j, PID_j, owning MEC key, timestamp), plus the holder hospital.
struct StorageTx {
    ContentHash hash;
    PatientAddress patient;
    PublicKey owner;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static StorageTx decode(ByteView in);
};

/// Signed T_reg together with the MEC's receipt over it.
struct RegistrationRecord {
    Bytes signed_registration;
    Signature receipt{};

    Bytes encode() const;
    static RegistrationRecord decode(ByteView in);
};

/// MEC m asks MEC y for a record: (PID_j, user key, requester MEC key, time).
struct InterMecRequestTx {
    PatientAddress patient;
    PublicKey user_pk;
    PublicKey requester;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static InterMecRequestTx decode(ByteView in);
    friend bool operator==(const InterMecRequestTx&, const InterMecRequestTx&) = default;
};

/// MEC m notes on its local ledger that y handed over a record for a user.
struct DataRelayTx {
    ContentHash hash;
    PublicKey source;
    PublicKey user_pk;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static DataRelayTx decode(ByteView in);
};

/// Completed share: (user key, h_j, serving MEC key, timestamp).
struct SharingTx {
    PublicKey user_pk;
    ContentHash hash;
    PublicKey server;
    std::uint64_t timestamp = 0;

    Bytes encode() const;
    static SharingTx decode(ByteView in);
    friend bool operator==(const SharingTx&, const SharingTx&) = default;
};

}  // namespace edgehealth::contract
