#include "edgehealth/crypto/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cstring>

namespace edgehealth::crypto {

namespace {

void ensure_sodium() {
    static const bool ready = [] { return sodium_init() >= 0; }();
    if (!ready) throw std::runtime_error("libsodium initialization failed");
}

using Key32 = std::array<std::uint8_t, 32>;

// SHA-256 over a domain label followed by the given parts.
template <typename... Parts>
Key32 derive(std::string_view label, const Parts&... parts) {
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, reinterpret_cast<const unsigned char*>(label.data()), label.size());
    (crypto_hash_sha256_update(&st, parts.data(), parts.size()), ...);
    Key32 out;
    crypto_hash_sha256_final(&st, out.data());
    return out;
}

constexpr std::size_t kX25519 = crypto_box_PUBLICKEYBYTES;
static_assert(kX25519 == 32 && crypto_box_SECRETKEYBYTES == 32);
static_assert(crypto_sign_PUBLICKEYBYTES == 32 && crypto_sign_SECRETKEYBYTES == 64);
static_assert(crypto_sign_BYTES == kSignatureSize);
static_assert(crypto_aead_xchacha20poly1305_ietf_NPUBBYTES == kNonceSize);
static_assert(crypto_aead_xchacha20poly1305_ietf_ABYTES == kTagSize);
static_assert(kWrappedKeySize == kX25519 + 32 + kTagSize);

Key32 key_encapsulation_key(const Key32& shared, ByteView ephemeral_pk, ByteView recipient_pk) {
    return derive("edgehealth.kek", shared, ephemeral_pk, recipient_pk);
}

}  // namespace

PublicKey PublicKey::from_bytes(ByteView in) {
    if (in.size() != kPublicKeySize) throw MalformedEncoding("public key must be 64 bytes");
    PublicKey pk;
    std::copy(in.begin(), in.end(), pk.bytes.begin());
    return pk;
}

Signature signature_from_bytes(ByteView in) {
    if (in.size() != kSignatureSize) throw MalformedEncoding("signature must be 64 bytes");
    Signature s;
    std::copy(in.begin(), in.end(), s.begin());
    return s;
}

ContentHash ContentHash::from_hex(std::string_view hex) {
    return from_bytes(edgehealth::from_hex(hex));
}

ContentHash ContentHash::from_bytes(ByteView in) {
    if (in.size() != kHashSize) throw MalformedEncoding("content hash must be 32 bytes");
    ContentHash h;
    std::copy(in.begin(), in.end(), h.digest.begin());
    return h;
}

Bytes Ciphertext::serialize() const {
    Bytes out;
    out.reserve(kWrappedKeySize + kNonceSize + kTagSize + 8 + body.size());
    append(out, wrapped_key);
    append(out, nonce);
    append(out, auth_tag);
    put_u64_be(out, body.size());
    append(out, body);
    return out;
}

Ciphertext Ciphertext::parse(ByteView in) {
    constexpr std::size_t header = kWrappedKeySize + kNonceSize + kTagSize + 8;
    if (in.size() < header) throw AuthFailure("ciphertext truncated");
    Ciphertext ct;
    std::size_t off = 0;
    std::copy_n(in.begin() + off, kWrappedKeySize, ct.wrapped_key.begin());
    off += kWrappedKeySize;
    std::copy_n(in.begin() + off, kNonceSize, ct.nonce.begin());
    off += kNonceSize;
    std::copy_n(in.begin() + off, kTagSize, ct.auth_tag.begin());
    off += kTagSize;
    std::uint64_t len = read_u64_be(in, off);
    off += 8;
    if (len != in.size() - off) throw AuthFailure("ciphertext length field does not match body");
    ct.body.assign(in.begin() + off, in.end());
    return ct;
}

KeyPair generate_keypair(ByteView seed) {
    ensure_sodium();
    Key32 box_seed = derive("edgehealth.x25519", seed);
    Key32 sign_seed = derive("edgehealth.ed25519", seed);

    KeyPair kp;
    auto* pk = kp.public_key.bytes.data();
    auto* sk = kp.secret_key.bytes.data();
    crypto_box_seed_keypair(pk, sk, box_seed.data());
    crypto_sign_seed_keypair(pk + kX25519, sk + kX25519, sign_seed.data());
    sodium_memzero(box_seed.data(), box_seed.size());
    sodium_memzero(sign_seed.data(), sign_seed.size());
    return kp;
}

KeyPair generate_keypair(std::string_view seed) {
    return generate_keypair(ByteView(reinterpret_cast<const std::uint8_t*>(seed.data()), seed.size()));
}

Ciphertext encrypt(ByteView plaintext, const PublicKey& recipient, const Entropy& entropy) {
    ensure_sodium();
    ByteView recipient_x(recipient.bytes.data(), kX25519);

    Key32 eph_seed = derive("edgehealth.ephemeral", entropy);
    Key32 message_key = derive("edgehealth.message-key", entropy);
    Key32 nonce_material = derive("edgehealth.nonce", entropy);

    std::array<std::uint8_t, kX25519> eph_pk;
    std::array<std::uint8_t, crypto_box_SECRETKEYBYTES> eph_sk;
    crypto_box_seed_keypair(eph_pk.data(), eph_sk.data(), eph_seed.data());

    Key32 shared;
    if (crypto_scalarmult(shared.data(), eph_sk.data(), recipient_x.data()) != 0) {
        throw std::invalid_argument("recipient public key is not a valid X25519 point");
    }
    Key32 kek = key_encapsulation_key(shared, eph_pk, recipient_x);

    Ciphertext ct;
    std::copy(eph_pk.begin(), eph_pk.end(), ct.wrapped_key.begin());
    const std::array<std::uint8_t, kNonceSize> zero_nonce{};  // the KEK is unique per message
    unsigned long long wrapped_len = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt(ct.wrapped_key.data() + kX25519, &wrapped_len, message_key.data(),
                                               message_key.size(), eph_pk.data(), eph_pk.size(), nullptr,
                                               zero_nonce.data(), kek.data());
    std::copy_n(nonce_material.begin(), kNonceSize, ct.nonce.begin());

    Bytes ad;
    append(ad, ct.wrapped_key);
    append(ad, ct.nonce);
    ct.body.resize(plaintext.size());
    unsigned long long tag_len = 0;
    crypto_aead_xchacha20poly1305_ietf_encrypt_detached(ct.body.data(), ct.auth_tag.data(), &tag_len,
                                                        plaintext.data(), plaintext.size(), ad.data(), ad.size(),
                                                        nullptr, ct.nonce.data(), message_key.data());

    sodium_memzero(eph_sk.data(), eph_sk.size());
    sodium_memzero(message_key.data(), message_key.size());
    sodium_memzero(shared.data(), shared.size());
    sodium_memzero(kek.data(), kek.size());
    return ct;
}

Ciphertext encrypt(ByteView plaintext, const PublicKey& recipient) {
    ensure_sodium();
    Entropy entropy;
    randombytes_buf(entropy.data(), entropy.size());
    return encrypt(plaintext, recipient, entropy);
}

Bytes decrypt(const Ciphertext& ct, const SecretKey& secret) {
    ensure_sodium();
    ByteView eph_pk(ct.wrapped_key.data(), kX25519);
    std::array<std::uint8_t, kX25519> own_pk;
    crypto_scalarmult_base(own_pk.data(), secret.bytes.data());

    Key32 shared;
    if (crypto_scalarmult(shared.data(), secret.bytes.data(), eph_pk.data()) != 0) {
        throw AuthFailure("ephemeral key rejected");
    }
    Key32 kek = key_encapsulation_key(shared, eph_pk, own_pk);

    Key32 message_key;
    const std::array<std::uint8_t, kNonceSize> zero_nonce{};
    unsigned long long key_len = 0;
    if (crypto_aead_xchacha20poly1305_ietf_decrypt(message_key.data(), &key_len, nullptr,
                                                   ct.wrapped_key.data() + kX25519, kWrappedKeySize - kX25519,
                                                   eph_pk.data(), eph_pk.size(), zero_nonce.data(),
                                                   kek.data()) != 0 ||
        key_len != message_key.size()) {
        throw AuthFailure("message key unwrap failed");
    }

    Bytes ad;
    append(ad, ct.wrapped_key);
    append(ad, ct.nonce);
    Bytes plain(ct.body.size());
    int rc = crypto_aead_xchacha20poly1305_ietf_decrypt_detached(plain.data(), nullptr, ct.body.data(),
                                                                 ct.body.size(), ct.auth_tag.data(), ad.data(),
                                                                 ad.size(), ct.nonce.data(), message_key.data());
    sodium_memzero(message_key.data(), message_key.size());
    sodium_memzero(shared.data(), shared.size());
    sodium_memzero(kek.data(), kek.size());
    if (rc != 0) throw AuthFailure("payload authentication failed");
    return plain;
}

Signature sign(ByteView message, const SecretKey& secret) {
    ensure_sodium();
    Signature sig;
    crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret.bytes.data() + kX25519);
    return sig;
}

bool verify(const Signature& signature, ByteView message, const PublicKey& public_key) {
    ensure_sodium();
    return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                       public_key.bytes.data() + kX25519) == 0;
}

ContentHash sha256(ByteView data) {
    ContentHash h;
    crypto_hash_sha256(h.digest.data(), data.data(), data.size());
    return h;
}

ContentHash content_hash(ByteView data, std::uint64_t timestamp) {
    std::array<std::uint8_t, 8> prefix;
    for (int i = 0; i < 8; ++i) prefix[i] = static_cast<std::uint8_t>(timestamp >> (56 - 8 * i));
    crypto_hash_sha256_state st;
    crypto_hash_sha256_init(&st);
    crypto_hash_sha256_update(&st, prefix.data(), prefix.size());
    crypto_hash_sha256_update(&st, data.data(), data.size());
    ContentHash h;
    crypto_hash_sha256_final(&st, h.digest.data());
    return h;
}

}  // namespace edgehealth::crypto
