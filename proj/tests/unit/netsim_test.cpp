#include "doctest.h"
#include "edgehealth/netsim/scenario.hpp"

using namespace edgehealth;
using namespace edgehealth::netsim;

namespace {

store::HealthRecord record_for(std::uint32_t hospital, std::uint32_t index, std::size_t bytes = 4000) {
    return store::HealthRecord::from_series(std::to_string(index), store::synthetic_series(bytes, hospital * 100 + index));
}

// One record for patient 0 at hospitals 0 and 1, all users registered.
struct SmallNetwork {
    HealthNetwork net;
    store::HealthRecord rec0 = record_for(0, 0);
    store::HealthRecord rec1 = record_for(1, 0);

    explicit SmallNetwork(Mode mode = Mode::Decentralized, NetworkConfig cfg = {}) : net(cfg, 5, mode) {
        net.register_all_users();
        net.run_storage(0, 0, rec0);  // device 0 belongs to hospital 0
        net.run_storage(cfg.devices_per_hospital, 0, rec1);
        net.settle();
    }

    // User 0 lives at hospital 0.
    RequestOutcome fetch(std::uint32_t hospital) { return net.run_request({0, net.patient(hospital, 0), 5.0, 0}); }
};

}  // namespace

TEST_SUITE("netsim") {
    TEST_CASE("events fire in time order, ties in insertion order") {
        Simulator sim;
        std::vector<int> order;
        sim.schedule(20, [&] { order.push_back(3); });
        sim.schedule(10, [&] { order.push_back(1); });
        sim.schedule(10, [&] {
            order.push_back(2);
            sim.schedule(0, [&] { order.push_back(25); });
        });
        sim.run_until(15);
        CHECK(sim.now() == 15);
        sim.run();
        CHECK(order == std::vector<int>{1, 2, 25, 3});
        CHECK(sim.fired() == 4);
        CHECK(sim.idle());
    }

    TEST_CASE("link delay is propagation plus serialization") {
        // 10 ms + 1e6 bytes * 8 / 100 Mbps = 90 ms
        CHECK(transfer_time({0.01, 100e6}, 1'000'000) == 90'000);
        CHECK(transfer_time({0.005, 20e6}, 0) == 5'000);
    }

    TEST_CASE("mode names round trip") {
        for (auto m : {Mode::Decentralized, Mode::Dht, Mode::CentralAuthority, Mode::CentralCloud}) {
            CHECK(parse_mode(to_string(m)) == m);
        }
        CHECK_FALSE(parse_mode("p2p"));
    }

    TEST_CASE("config validation names the field") {
        NetworkConfig c;
        c.validators = 5;
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("validators"), std::invalid_argument);
        c = NetworkConfig{};
        c.hospitals = 5;
        CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("validators"), std::invalid_argument);
        c = NetworkConfig{};
        c.backbone.bandwidth_bps = 0;
        CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    }

    TEST_CASE("stored record comes back byte-identical on both paths") {
        SmallNetwork s;
        auto local = s.fetch(0);
        CHECK(local.status == RequestStatus::Delivered);
        CHECK(local.path == RequestPath::Local);
        CHECK(local.payload == s.rec0.serialize());
        CHECK(local.integrity);
        CHECK(local.accepted);
        REQUIRE(local.certificate);
        CHECK(local.certificate->verify(s.net.mec(0).keys.public_key));

        auto remote = s.fetch(1);
        CHECK(remote.status == RequestStatus::Delivered);
        CHECK(remote.path == RequestPath::Remote);
        CHECK(remote.payload == s.rec1.serialize());
    }

    TEST_CASE("hop counts per path and architecture") {
        SmallNetwork dec(Mode::Decentralized);
        CHECK(dec.fetch(0).hops == 2);
        CHECK(dec.fetch(1).hops == 4);
        SmallNetwork dht(Mode::Dht);
        CHECK(dht.fetch(0).hops == 4);
        CHECK(dht.fetch(1).hops == 6);
        SmallNetwork ca(Mode::CentralAuthority);
        CHECK(ca.fetch(0).hops == 4);
        CHECK(ca.fetch(1).hops == 6);
        SmallNetwork cloud(Mode::CentralCloud);
        CHECK(cloud.fetch(0).hops == 4);
        CHECK(cloud.fetch(1).hops == 4);
    }

    TEST_CASE("local fetch latency matches the modeled delays") {
        NetworkConfig cfg;
        SmallNetwork s(Mode::Decentralized, cfg);
        auto out = s.fetch(0);
        auto hash = s.net.replica(0).lookup_hash(s.net.patient(0, 0)).hash;
        std::size_t stored = s.net.stores().node(0).stored_bytes(hash);
        auto tx = s.net.make_request({0, s.net.patient(0, 0), 5.0, 0});
        std::size_t up = s.net.seal(tx, s.net.user_keys(0).secret_key, 0).serialize().size();
        SimTime expected = transfer_time(cfg.access, up) + from_seconds(cfg.auth_service_s) +
                           from_seconds(cfg.retrieval_base_s + cfg.retrieval_s_per_mb * static_cast<double>(stored) / 1e6) +
                           transfer_time(cfg.access, s.rec0.serialize().size());
        CHECK(from_seconds(out.latency_s) == expected);
    }

    TEST_CASE("Case 2 leaves the inter-MEC request, relay and sharing records") {
        SmallNetwork s;
        std::size_t before_global = s.net.global().node(0).ledger().transactions(ledger::TxKind::InterMecRequest).size();
        auto out = s.fetch(1);
        s.net.settle();
        REQUIRE(out.status == RequestStatus::Delivered);
        const auto& chain = s.net.global().node(0).ledger();
        CHECK(chain.transactions(ledger::TxKind::InterMecRequest).size() == before_global + 1);
        auto shares = chain.transactions(ledger::TxKind::Sharing);
        REQUIRE_FALSE(shares.empty());
        auto share = contract::SharingTx::decode(shares.back().payload);
        CHECK(share.server == s.net.mec(1).keys.public_key);
        CHECK(share.user_pk == s.net.user_keys(0).public_key);
        auto relays = s.net.local(0).chain().transactions(ledger::TxKind::DataRelay);
        REQUIRE(relays.size() == 1);
        CHECK(contract::DataRelayTx::decode(relays[0].payload).source == s.net.mec(1).keys.public_key);
        CHECK(s.net.local(1).chain().transactions(ledger::TxKind::DataRelay).empty());
    }

    TEST_CASE("forged and unregistered requests are denied") {
        SmallNetwork s;
        RequestSpec spec{0, s.net.patient(0, 0), 5.0, 0};
        auto other = crypto::generate_keypair("intruder");
        auto forged = s.net.run_sealed_request(spec, s.net.seal(s.net.make_request(spec), other.secret_key, 0));
        CHECK(forged.status == RequestStatus::Denied);
        CHECK(forged.hops == 2);
        CHECK_FALSE(forged.certificate);
        CHECK(forged.payload.empty());

        auto missing = s.net.run_request({0, s.net.patient(0, 2), 5.0, 0});
        CHECK(missing.status == RequestStatus::NotRegistered);
    }

    TEST_CASE("tampered storage is reported as an integrity failure") {
        SmallNetwork s;
        auto hash = s.net.replica(0).lookup_hash(s.net.patient(0, 0)).hash;
        s.net.stores().node(0).flip_bit(hash, 1234);
        auto out = s.fetch(0);
        CHECK(out.status == RequestStatus::IntegrityFailure);
        CHECK_FALSE(out.integrity);
        CHECK(out.payload.empty());
    }

    TEST_CASE("down links retry then time out") {
        SmallNetwork s;
        s.net.set_link(s.net.user_node(0), s.net.mec_node(0), false);
        auto out = s.fetch(0);
        CHECK(out.status == RequestStatus::Timeout);
        s.net.set_link(s.net.user_node(0), s.net.mec_node(0), true);
        s.net.set_link(s.net.mec_node(0), s.net.mec_node(1), false);
        CHECK(s.fetch(1).status == RequestStatus::Timeout);
        CHECK(s.fetch(0).status == RequestStatus::Delivered);
    }

    TEST_CASE("scenario runs are deterministic") {
        ScenarioConfig cfg;
        cfg.workload.record_min_bytes = 2000;
        cfg.workload.record_max_bytes = 8000;
        cfg.workload.request_count = 6;
        auto a = run_scenario(cfg);
        auto b = run_scenario(cfg);
        CHECK(requests_csv(a) == requests_csv(b));
        CHECK(storage_csv(a) == storage_csv(b));
        CHECK(a.requests.size() == 6);
        CHECK(a.storage.size() == cfg.network.hospitals * cfg.network.patients_per_hospital);
        CHECK_THROWS_AS(run_baseline(cfg, Mode::Decentralized), std::invalid_argument);
    }

    TEST_CASE("bursts are nested prefixes") {
        ScenarioConfig cfg;
        HealthNetwork net(cfg.network, 1);
        auto small = make_burst(net, 3, cfg.workload, 9);
        auto large = make_burst(net, 8, cfg.workload, 9);
        for (std::size_t i = 0; i < small.size(); ++i) {
            CHECK(small[i].user == large[i].user);
            CHECK(small[i].target == large[i].target);
        }
        CHECK(large[5].user == 5 % net.user_count());
    }
}
