#include <sstream>

#include "doctest.h"
#include "edgehealth/store/content_store.hpp"
#include "edgehealth/store/health_record.hpp"

using namespace edgehealth;
using namespace edgehealth::store;

namespace {

crypto::Ciphertext sealed(std::string_view text, std::uint8_t fill = 1) {
    static const auto keys = crypto::generate_keypair("store-test");
    crypto::Entropy e;
    e.fill(fill);
    return crypto::encrypt(to_bytes(text), keys.public_key, e);
}

}  // namespace

TEST_SUITE("store") {
    TEST_CASE("entries are keyed by the timestamped content hash") {
        StoreNode node(0);
        auto ct = sealed("record");
        auto h = node.put(ct, 42);
        CHECK(h == crypto::content_hash(ct.serialize(), 42));
        CHECK(node.get(h) == ct);
        CHECK(node.put(ct, 42) == h);
        CHECK(node.size() == 1);
        CHECK(node.put(ct, 43) != h);
        CHECK(node.size() == 2);
    }

    TEST_CASE("missing and tampered entries are reported") {
        StoreNode node(0);
        auto h = node.put(sealed("record"), 1);
        CHECK_THROWS_AS(node.get(crypto::sha256(to_bytes("nothing"))), NotFound);
        node.flip_bit(h, 100);
        CHECK_THROWS_AS(node.get(h), IntegrityError);
        node.flip_bit(h, 100);
        CHECK_NOTHROW(node.get(h));
        CHECK_THROWS_AS(node.flip_bit(h, node.stored_bytes(h) * 8), std::out_of_range);
    }

    TEST_CASE("replicas must hash to their key") {
        StoreNode node(1);
        auto ct = sealed("record");
        Bytes body = ct.serialize();
        auto h = crypto::content_hash(body, 7);
        CHECK_THROWS_AS(node.accept_replica(h, 8, body), IntegrityError);
        node.accept_replica(h, 7, body);
        CHECK(node.get(h) == ct);
    }

    TEST_CASE("snapshot round trip re-verifies entries") {
        StoreNode node(3);
        auto a = node.put(sealed("a", 1), 1);
        auto b = node.put(sealed("b", 2), 2);
        std::stringstream snap;
        node.save_snapshot(snap);
        auto loaded = StoreNode::load_snapshot(3, snap);
        CHECK(loaded.keys() == node.keys());
        CHECK(loaded.get(a) == node.get(a));
        CHECK(loaded.timestamp(b) == 2);

        std::string bytes;
        {
            std::stringstream s;
            node.save_snapshot(s);
            bytes = s.str();
        }
        bytes[bytes.size() - 1] ^= 1;
        std::stringstream bad(bytes);
        CHECK_THROWS_AS(StoreNode::load_snapshot(3, bad), IntegrityError);

        std::stringstream truncated(bytes.substr(0, 20));
        CHECK_THROWS_AS(StoreNode::load_snapshot(3, truncated), MalformedEncoding);
    }

    TEST_CASE("lazy cluster fetches on demand and counts messages") {
        StoreCluster cluster(3, ReplicationMode::Lazy);
        auto ct = sealed("record");
        auto h = cluster.put(2, ct, 5);
        CHECK_FALSE(cluster.node(0).contains(h));

        HopCounter hops;
        CHECK(cluster.get(2, h, hops) == ct);
        CHECK(hops.messages == 0);
        // node 0 asks node 1 (miss) then node 2 (hit)
        CHECK(cluster.get(0, h, hops) == ct);
        CHECK(hops.messages == 4);

        HopCounter direct;
        CHECK(cluster.fetch_from(0, 2, h, direct) == ct);
        CHECK(direct.messages == 2);

        cluster.set_link(0, 2, false);
        HopCounter cut;
        CHECK_THROWS_AS(cluster.fetch_from(0, 2, h, cut), NotFound);
        CHECK_THROWS_AS(cluster.get(0, h, cut), NotFound);
        cluster.set_link(2, 0, true);
        CHECK(cluster.link_up(0, 2));
    }

    TEST_CASE("eager cluster pushes to reachable peers") {
        StoreCluster cluster(4, ReplicationMode::Eager);
        cluster.set_link(0, 3, false);
        HopCounter hops;
        auto h = cluster.put(0, sealed("record"), 9, &hops);
        CHECK(hops.messages == 2);
        CHECK(cluster.node(1).contains(h));
        CHECK(cluster.node(2).contains(h));
        CHECK_FALSE(cluster.node(3).contains(h));
        cluster.replicate(1);
        CHECK(cluster.node(3).contains(h));
    }

    TEST_CASE("sensor series and health record encodings round trip") {
        auto series = synthetic_series(4096, 11);
        CHECK(series.samples.size() % series.channels == 0);
        auto enc = series.encode();
        CHECK(enc.size() <= 4096);
        CHECK(enc.size() + 2 * series.channels > 4096);
        auto back = SensorSeries::decode(enc);
        CHECK(back.channels == series.channels);
        CHECK(back.samples == series.samples);

        auto rec = HealthRecord::from_series("P-1", series);
        CHECK(rec.raw_data == enc);
        CHECK(HealthRecord::parse("P-1", rec.serialize()) == rec);
        Bytes bad = rec.serialize();
        bad.pop_back();
        CHECK_THROWS_AS(HealthRecord::parse("P-1", bad), MalformedEncoding);
    }

    TEST_CASE("analysis matches hand-computed statistics") {
        SensorSeries s;
        s.channels = 2;
        s.samples = {1, -4, 3, 0, 5, 4};
        auto summary = analyze(s);
        REQUIRE(summary.size() == 2);
        CHECK(summary[0].min == 1);
        CHECK(summary[0].max == 5);
        CHECK(summary[0].mean == doctest::Approx(3));
        CHECK(summary[0].variance == doctest::Approx(8.0 / 3));
        CHECK(summary[1].mean == doctest::Approx(0));
        CHECK(summary[1].variance == doctest::Approx(32.0 / 3));
    }
}
