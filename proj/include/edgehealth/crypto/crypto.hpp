#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "edgehealth/common/bytes.hpp"

namespace edgehealth::crypto {

// Public key = X25519 encryption key (32) || Ed25519 verification key (32).
inline constexpr std::size_t kPublicKeySize = 64;
// Secret key = X25519 secret (32) || Ed25519 signing key (64).
inline constexpr std::size_t kSecretKeySize = 96;
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kHashSize = 32;
// Ephemeral X25519 public key (32) || AEAD-wrapped message key (32 + 16 tag).
inline constexpr std::size_t kWrappedKeySize = 80;
inline constexpr std::size_t kNonceSize = 24;
inline constexpr std::size_t kTagSize = 16;

/// Decryption or integrity failure: wrong key, tampered ciphertext, or a
/// ciphertext that does not parse.
class AuthFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PublicKey {
    std::array<std::uint8_t, kPublicKeySize> bytes{};

    std::string hex() const { return to_hex(bytes); }
    static PublicKey from_bytes(ByteView in);
    friend auto operator<=>(const PublicKey&, const PublicKey&) = default;
};

struct SecretKey {
    std::array<std::uint8_t, kSecretKeySize> bytes{};
    friend bool operator==(const SecretKey&, const SecretKey&) = default;
};

struct KeyPair {
    PublicKey public_key;
    SecretKey secret_key;
};

using Signature = std::array<std::uint8_t, kSignatureSize>;
using Entropy = std::array<std::uint8_t, 32>;

Signature signature_from_bytes(ByteView in);

/// Hybrid envelope: a fresh message key wrapped to the recipient, and the
/// payload sealed under that key with XChaCha20-Poly1305.
struct Ciphertext {
    std::array<std::uint8_t, kWrappedKeySize> wrapped_key{};
    std::array<std::uint8_t, kNonceSize> nonce{};
    Bytes body;
    std::array<std::uint8_t, kTagSize> auth_tag{};

    /// wrapped_key || nonce || auth_tag || u64 BE body length || body
    Bytes serialize() const;
    /// Throws AuthFailure when the layout is inconsistent.
    static Ciphertext parse(ByteView in);

    friend bool operator==(const Ciphertext&, const Ciphertext&) = default;
};

struct ContentHash {
    std::array<std::uint8_t, kHashSize> digest{};

    /// Exactly 64 lowercase hex characters.
    std::string hex() const { return to_hex(digest); }
    static ContentHash from_hex(std::string_view hex);
    static ContentHash from_bytes(ByteView in);
    friend auto operator<=>(const ContentHash&, const ContentHash&) = default;
};

/// Deterministic key pair for simulation reproducibility.
KeyPair generate_keypair(ByteView seed);
KeyPair generate_keypair(std::string_view seed);

/// `entropy` fixes the ephemeral key, message key and nonce; equal inputs give
/// equal ciphertexts. Use the two-argument overload for OS randomness.
Ciphertext encrypt(ByteView plaintext, const PublicKey& recipient, const Entropy& entropy);
Ciphertext encrypt(ByteView plaintext, const PublicKey& recipient);

/// Throws AuthFailure on any mismatch.
Bytes decrypt(const Ciphertext& ciphertext, const SecretKey& secret);

Signature sign(ByteView message, const SecretKey& secret);
/// Never throws.
bool verify(const Signature& signature, ByteView message, const PublicKey& public_key);

ContentHash sha256(ByteView data);

/// SHA-256 over (8-byte big-endian timestamp || data).
ContentHash content_hash(ByteView data, std::uint64_t timestamp);

}  // namespace edgehealth::crypto
