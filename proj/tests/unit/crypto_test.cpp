#include "doctest.h"
#include "edgehealth/crypto/crypto.hpp"

using namespace edgehealth;
using namespace edgehealth::crypto;

namespace {

Entropy entropy_of(std::uint8_t fill) {
    Entropy e;
    e.fill(fill);
    return e;
}

}  // namespace

TEST_SUITE("crypto") {
    TEST_CASE("sha256 known answers") {
        CHECK(sha256(to_bytes("abc")).hex() == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
        CHECK(sha256(Bytes{}).hex() == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    }

    TEST_CASE("content hash prefixes a big-endian timestamp") {
        // sha256 of eight zero bytes
        CHECK(content_hash(Bytes{}, 0).hex() == "af5570f5a1810b7af78caf4bc70a660f0df51e42baf91d4de5b2328de0e83dfc");
        Bytes manual = u64_be(5);
        append(manual, to_bytes("hello"));
        CHECK(content_hash(to_bytes("hello"), 5) == sha256(manual));
        CHECK(content_hash(to_bytes("hello"), 5).hex() ==
              "c6402d15196824a049ad87c371a5047a673535c2ac8607e2bfa483f7591cc27a");
        CHECK(content_hash(to_bytes("hello"), 5) != content_hash(to_bytes("hello"), 6));
    }

    TEST_CASE("hash hex parsing") {
        auto h = sha256(to_bytes("abc"));
        CHECK(ContentHash::from_hex(h.hex()) == h);
        CHECK_THROWS(ContentHash::from_hex("abcd"));
    }

    TEST_CASE("seeded keys are deterministic and distinct") {
        auto a = generate_keypair("alice");
        auto b = generate_keypair("alice");
        auto c = generate_keypair("bob");
        CHECK(a.public_key == b.public_key);
        CHECK(a.secret_key == b.secret_key);
        CHECK(a.public_key != c.public_key);
    }

    TEST_CASE("envelope round trip across sizes") {
        auto keys = generate_keypair("recipient");
        for (std::size_t n : {0u, 1u, 63u, 64u, 1000u, 100000u}) {
            Bytes msg(n);
            for (std::size_t i = 0; i < n; ++i) msg[i] = static_cast<std::uint8_t>(i * 31 + 7);
            auto ct = encrypt(msg, keys.public_key, entropy_of(static_cast<std::uint8_t>(n)));
            CHECK(ct.body.size() == n);
            CHECK(decrypt(ct, keys.secret_key) == msg);
            CHECK(Ciphertext::parse(ct.serialize()) == ct);
        }
    }

    TEST_CASE("entropy fixes the ciphertext") {
        auto keys = generate_keypair("recipient");
        auto msg = to_bytes("payload");
        CHECK(encrypt(msg, keys.public_key, entropy_of(1)) == encrypt(msg, keys.public_key, entropy_of(1)));
        CHECK_FALSE(encrypt(msg, keys.public_key, entropy_of(1)) == encrypt(msg, keys.public_key, entropy_of(2)));
        CHECK_FALSE(encrypt(msg, keys.public_key) == encrypt(msg, keys.public_key));
    }

    TEST_CASE("wrong key and every single-bit tamper fail") {
        auto keys = generate_keypair("recipient");
        auto other = generate_keypair("other");
        auto msg = to_bytes("clinical record");
        auto ct = encrypt(msg, keys.public_key, entropy_of(9));
        CHECK_THROWS_AS(decrypt(ct, other.secret_key), AuthFailure);

        Bytes wire = ct.serialize();
        for (std::size_t bit = 0; bit < wire.size() * 8; ++bit) {
            // A flipped length prefix fails at parse time rather than at the tag check.
            Bytes bad = wire;
            bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            bool rejected = false;
            try {
                decrypt(Ciphertext::parse(bad), keys.secret_key);
            } catch (const AuthFailure&) {
                rejected = true;
            }
            CHECK(rejected);
        }
    }

    TEST_CASE("truncated ciphertext does not parse") {
        auto keys = generate_keypair("recipient");
        Bytes wire = encrypt(to_bytes("x"), keys.public_key, entropy_of(3)).serialize();
        wire.pop_back();
        CHECK_THROWS_AS(Ciphertext::parse(wire), AuthFailure);
    }

    TEST_CASE("signatures verify only for the signed bytes and key") {
        auto keys = generate_keypair("signer");
        auto other = generate_keypair("other");
        auto msg = to_bytes("T_req");
        auto sig = sign(msg, keys.secret_key);
        CHECK(verify(sig, msg, keys.public_key));
        CHECK_FALSE(verify(sig, msg, other.public_key));
        CHECK_FALSE(verify(sig, to_bytes("T_reQ"), keys.public_key));
        sig[0] ^= 1;
        CHECK_FALSE(verify(sig, msg, keys.public_key));
    }
}
