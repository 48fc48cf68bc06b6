// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 on any failure.

#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "edgehealth/cli/commands.hpp"
#include "edgehealth/cli/config.hpp"
#include "edgehealth/netsim/scenario.hpp"
#include "edgehealth/offload/instance.hpp"

using namespace edgehealth;
using netsim::Mode;
using netsim::RequestStatus;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

std::string ratio(std::size_t a, std::size_t b) {
    return std::to_string(a) + "/" + std::to_string(b);
}

std::string source_path(const std::string& rel) {
    return std::string(EDGEHEALTH_SOURCE_DIR) + "/" + rel;
}

offload::SolveResult solve_or_best(const std::function<offload::SolveResult()>& solver) {
    try {
        return solver();
    } catch (const offload::NoFeasibleSolution& e) {
        return e.result();
    }
}

// ---- 1. optimizer optimality ----

Outcome optimizer_optimality() {
    offload::RandomProblemOptions opts;
    opts.random_weights = true;
    std::size_t optimal = 0, below = 0;
    auto start = std::chrono::steady_clock::now();
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        std::uint64_t seed = Rng::derive(0xacce55, trial).next();
        auto problem = offload::random_problem(10, seed, opts);
        offload::PsoConfig pso;
        pso.seed = seed;
        auto candidate = solve_or_best([&] { return offload::solve_pso(problem, pso); });
        auto oracle = solve_or_best([&] { return offload::solve_exhaustive(problem, pso.penalty); });
        if (offload::confirm_against_oracle(candidate, oracle)) ++optimal;
        if (candidate.penalized_cost < oracle.penalized_cost) ++below;
    }
    double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    char buf[160];
    std::snprintf(buf, sizeof buf, "%zu/100 optimal, %zu below the oracle, %.2f s", optimal, below, seconds);
    return {optimal >= 95 && below == 0 && seconds < 10, buf};
}

// ---- 2. constraint soundness ----

using boost::multiprecision::cpp_rational;

cpp_rational exact(double v) {
    int e = 0;
    double m = std::frexp(v, &e);
    cpp_rational r(static_cast<std::int64_t>(std::ldexp(m, 53)));
    for (int s = e - 53; s > 0; --s) r *= 2;
    for (int s = e - 53; s < 0; ++s) r /= 2;
    return r;
}

// Recomputes every constraint from the raw profiles, without the model's
// evaluate(). Returns the number of violated (device, constraint) pairs.
std::size_t independent_violations(const offload::OffloadProblem& p, const std::vector<std::uint8_t>& x) {
    std::size_t k = 0;
    for (auto v : x) k += v == 1;
    double share = k == 0 ? 0 : p.edge.budget_hz / static_cast<double>(k);
    std::size_t bad = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const auto& t = p.tasks[i];
        const auto& d = p.devices[i];
        if (x[i] > 1) {
            ++bad;
            continue;
        }
        bool off = x[i] == 1;
        double time = off ? t.data_size_bits * t.enc_cycles_per_bit / d.local_cpu_hz + t.data_size_bits / d.tx_rate_bps +
                                t.data_size_bits * t.edge_cycles_per_bit / share + p.edge.extra_delay_s
                          : t.data_size_bits * t.local_cycles_per_bit / d.local_cpu_hz;
        // Allow for the rounding of the time sum itself.
        if (time > t.max_latency_s * (1 + 1e-12)) ++bad;
        if (off && exact(d.tx_rate_bps) * exact(t.max_latency_s) < exact(t.data_size_bits)) ++bad;
        if ((off ? d.offload_mem_mb : d.local_mem_mb) > d.mem_cap_mb) ++bad;
        if (off && !(d.tx_power_w > 0 && d.tx_power_w <= d.max_tx_power_w)) ++bad;
    }
    return bad;
}

// Wide, sometimes hostile ranges so that every constraint binds somewhere.
offload::OffloadProblem fuzzed_problem(Rng& rng) {
    offload::RandomProblemOptions opts;
    opts.random_weights = true;
    auto& r = opts.ranges;
    r.file_kb = {rng.uniform(1, 500), 0};
    r.file_kb.hi = r.file_kb.lo + rng.uniform(0, 2000);
    r.max_latency_s = {rng.uniform(0.05, 2), 0};
    r.max_latency_s.hi = r.max_latency_s.lo + rng.uniform(0, 10);
    r.tx_rate_bps = {rng.uniform(0.1e6, 5e6), 0};
    r.tx_rate_bps.hi = r.tx_rate_bps.lo + rng.uniform(0, 30e6);
    r.mem_cap_mb = {rng.uniform(10, 80), 0};
    r.mem_cap_mb.hi = r.mem_cap_mb.lo + rng.uniform(0, 150);
    r.edge_budget_hz = rng.uniform(0.2e9, 10e9);
    std::size_t n = 1 + rng.below(10);
    auto p = offload::random_problem(n, rng.next(), opts);
    for (auto& d : p.devices) {
        if (rng.below(8) == 0) d.tx_power_w = d.max_tx_power_w * rng.uniform(1.0, 1.5);
    }
    if (rng.below(4) == 0) p.edge.extra_delay_s = rng.uniform(0, 1);
    return p;
}

Outcome constraint_soundness() {
    Rng rng(0x50f7);
    std::size_t feasible = 0, unsound = 0, model_disagrees = 0;
    constexpr std::size_t kInstances = 10'000;
    for (std::size_t i = 0; i < kInstances; ++i) {
        auto p = fuzzed_problem(rng);
        offload::PsoConfig pso;
        pso.seed = rng.next();
        for (const auto& r : {solve_or_best([&] { return offload::solve_pso(p, pso); }),
                              solve_or_best([&] { return offload::solve_exhaustive(p, pso.penalty); })}) {
            if (!r.best.feasible) continue;
            ++feasible;
            double granted = 0;
            for (const auto& d : r.best.devices) granted += d.edge_hz;
            if (independent_violations(p, r.best.x) != 0 || granted > p.edge.budget_hz * (1 + 1e-12)) ++unsound;
            if (!p.evaluate(r.best.x).violations.empty()) ++model_disagrees;
        }
    }
    return {unsound == 0 && model_disagrees == 0,
            std::to_string(feasible) + " feasible-flagged decisions from " + std::to_string(kInstances) +
                " fuzzed instances, " + std::to_string(unsound) + " violate a recomputed constraint, " +
                std::to_string(model_disagrees) + " fail re-evaluation"};
}

// ---- 3. dominance ----

Outcome sweep_dominance() {
    auto config = cli::load_config(source_path("configs/default.json"));
    auto rows = cli::offload_sweep(config, cli::default_weight_sets());
    std::size_t points = 0, ok = 0;
    for (std::size_t i = 0; i + 2 < rows.size(); i += 3) {
        const auto& local = rows[i];
        const auto& edge = rows[i + 2];
        if (local.scheme != "local" || edge.scheme != "edge") return {false, "unexpected row layout"};
        ++points;
        if (edge.total_cost <= local.total_cost) ++ok;
    }
    return {ok == points && points == 2 * config.sweep.sizes_kb.size(),
            ratio(ok, points) + " (size, weights) rows with edge cost <= local cost"};
}

// ---- 4. storage round trip ----

store::HealthRecord make_record(Rng& rng, std::size_t min_bytes, std::size_t max_bytes, const std::string& patient) {
    std::size_t size = min_bytes + rng.below(max_bytes - min_bytes + 1);
    return store::HealthRecord::from_series(patient, store::synthetic_series(size, rng.next()));
}

netsim::NetworkConfig network_config() {
    return cli::load_config(source_path("configs/default.json")).scenario.network;
}

// Stores each record and fetches it back, alternating a user at the record's
// hospital and one at the next hospital. A fresh network serves every
// kPerNetwork records to bound memory.
Outcome storage_roundtrip() {
    constexpr std::size_t kRecords = 1000, kPerNetwork = 24;
    auto cfg = network_config();
    Rng rng(0x5707);
    std::size_t identical = 0, local = 0, remote = 0;
    for (std::size_t base = 0; base < kRecords; base += kPerNetwork) {
        netsim::HealthNetwork net(cfg, rng.next());
        net.register_all_users();
        for (std::size_t i = base; i < std::min(kRecords, base + kPerNetwork); ++i) {
            auto h = static_cast<std::uint32_t>(i % cfg.hospitals);
            auto j = static_cast<std::uint32_t>((i / cfg.hospitals) % cfg.patients_per_hospital);
            auto rec = make_record(rng, 100 * 1024, 5 * 1024 * 1024, net.patient(h, j).patient_id);
            auto device = static_cast<std::uint32_t>(h * cfg.devices_per_hospital + j % cfg.devices_per_hospital);
            net.run_storage(device, j, rec);
            net.settle();

            auto user = static_cast<std::uint32_t>((h + (i % 2)) % cfg.hospitals);
            auto out = net.run_request({user, net.patient(h, j), 60.0, 0});
            (out.path == netsim::RequestPath::Local ? local : remote) += 1;
            if (out.status == RequestStatus::Delivered && out.integrity && out.payload == rec.serialize()) ++identical;
        }
    }
    return {identical == kRecords, ratio(identical, kRecords) + " byte-identical (" + std::to_string(local) +
                                       " local, " + std::to_string(remote) + " cross-hospital)"};
}

// ---- 5. tamper detection ----

Outcome tamper_detection() {
    constexpr std::size_t kTampers = 1000;
    auto cfg = network_config();
    netsim::HealthNetwork net(cfg, 0x7a3);
    Rng rng(0x7a3);
    net.register_all_users();
    struct Stored {
        std::uint32_t hospital;
        std::uint32_t patient;
        crypto::ContentHash hash;
    };
    std::vector<Stored> stored;
    for (std::uint32_t h = 0; h < cfg.hospitals; ++h) {
        for (std::uint32_t j = 0; j < cfg.patients_per_hospital; ++j) {
            auto rec = make_record(rng, 2000, 40000, net.patient(h, j).patient_id);
            auto receipt = net.run_storage(h * static_cast<std::uint32_t>(cfg.devices_per_hospital), j, rec);
            stored.push_back({h, j, receipt.hash});
        }
    }
    net.settle();

    std::size_t detected_at_read = 0, detected_end_to_end = 0, leaked = 0;
    for (std::size_t t = 0; t < kTampers; ++t) {
        const auto& s = stored[t % stored.size()];
        auto& node = net.stores().node(s.hospital);
        std::size_t bit = rng.below(node.stored_bytes(s.hash) * 8);
        node.flip_bit(s.hash, bit);

        try {
            node.get(s.hash);
        } catch (const store::IntegrityError&) {
            ++detected_at_read;
        }
        auto user = static_cast<std::uint32_t>((s.hospital + t % 2) % cfg.hospitals);
        auto out = net.run_request({user, net.patient(s.hospital, s.patient), 60.0, 0});
        if (out.status == RequestStatus::IntegrityFailure && !out.integrity && out.payload.empty()) ++detected_end_to_end;
        if (out.integrity) ++leaked;

        node.flip_bit(s.hash, bit);
    }
    return {detected_at_read == kTampers && detected_end_to_end == kTampers && leaked == 0,
            ratio(detected_at_read, kTampers) + " caught at read, " + ratio(detected_end_to_end, kTampers) +
                " reported as integrity failures, " + std::to_string(leaked) + " tampered payloads delivered"};
}

// ---- 6. authentication soundness ----

Outcome authentication_soundness() {
    auto cfg = network_config();
    netsim::HealthNetwork net(cfg, 0xa07);
    Rng rng(0xa07);
    net.register_all_users();
    for (std::uint32_t h = 0; h < cfg.hospitals; ++h) {
        auto rec = make_record(rng, 1000, 4000, net.patient(h, 0).patient_id);
        net.run_storage(h * static_cast<std::uint32_t>(cfg.devices_per_hospital), 0, rec);
    }
    net.settle();
    const auto users = static_cast<std::uint32_t>(net.user_count());

    // Valid requests first: mutations below penalize some principals.
    std::size_t valid = 0, certified = 0;
    for (std::uint32_t u = 0; u < users; ++u) {
        for (std::uint32_t h = 0; h < cfg.hospitals; ++h) {
            auto out = net.run_request({u, net.patient(h, 0), 60.0, 0});
            ++valid;
            std::uint32_t home = net.home_of_user(u);
            if (out.status == RequestStatus::Delivered && out.certificate &&
                out.certificate->verify(net.mec(home).keys.public_key)) {
                ++certified;
            }
        }
    }
    net.settle();
    std::size_t log_before = net.replica(0).access_log().size();

    constexpr std::size_t kMutated = 1000;
    std::size_t denied = 0, certificates = 0;
    std::size_t kinds[4] = {};
    for (std::size_t i = 0; i < kMutated; ++i) {
        auto u = static_cast<std::uint32_t>(rng.below(users));
        std::uint32_t home = net.home_of_user(u);
        netsim::RequestSpec spec{u, net.patient(static_cast<std::uint32_t>(rng.below(cfg.hospitals)), 0), 60.0, 0};
        contract::RequestTx tx = net.make_request(spec);
        crypto::Ciphertext sealed;
        std::size_t kind = i % 4;
        ++kinds[kind];
        switch (kind) {
            case 0: {  // wrong PKU: claims another registered user's key
                auto other = static_cast<std::uint32_t>((u + 1 + rng.below(users - 1)) % users);
                tx.user_pk = net.user_keys(other).public_key;
                sealed = net.seal(tx, net.user_keys(u).secret_key, home);
                break;
            }
            case 1: {  // wrong ID under the user's own key
                tx.user_id = "HU-" + std::to_string(users + rng.below(1000));
                sealed = net.seal(tx, net.user_keys(u).secret_key, home);
                break;
            }
            case 2: {  // never registered
                auto stranger = crypto::generate_keypair("acceptance/stranger/" + std::to_string(i));
                tx.user_pk = stranger.public_key;
                tx.user_id = "HU-stranger-" + std::to_string(i);
                sealed = net.seal(tx, stranger.secret_key, home);
                break;
            }
            default: {  // tampered ciphertext
                sealed = net.seal(tx, net.user_keys(u).secret_key, home);
                Bytes wire = sealed.serialize();
                // Skip the 8-byte length prefix, which fails parsing rather than decryption.
                std::size_t prefix_at = crypto::kWrappedKeySize + crypto::kNonceSize + crypto::kTagSize;
                std::size_t bit = 0;
                do {
                    bit = rng.below(wire.size() * 8);
                } while (bit / 8 >= prefix_at && bit / 8 < prefix_at + 8);
                wire[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
                sealed = crypto::Ciphertext::parse(wire);
                break;
            }
        }
        auto out = net.run_sealed_request(spec, sealed);
        if (out.status == RequestStatus::Denied) ++denied;
        if (out.certificate) ++certificates;
    }
    net.settle();

    std::size_t logged_denied = 0;
    const auto& log = net.replica(0).access_log();
    for (std::size_t i = log_before; i < log.size(); ++i) {
        if (log[i].verdict == contract::Verdict::Denied && !log[i].flag) ++logged_denied;
    }
    bool replicas_agree = net.global().honest_states_identical();
    return {denied == kMutated && logged_denied == kMutated && log.size() - log_before == kMutated &&
                certificates == 0 && certified == valid && replicas_agree,
            ratio(denied, kMutated) + " mutated requests denied (" + std::to_string(kinds[0]) + " wrong key, " +
                std::to_string(kinds[1]) + " wrong id, " + std::to_string(kinds[2]) + " unregistered, " +
                std::to_string(kinds[3]) + " tampered), " + std::to_string(logged_denied) +
                " Denied results on the replicated log, " + std::to_string(certificates) + " certificates; " +
                ratio(certified, valid) + " valid requests certified"};
}

// ---- 7. PBFT safety and convergence ----

Outcome pbft_safety() {
    using ledger::Behavior;
    constexpr std::size_t kRuns = 100;
    auto mec = crypto::generate_keypair("acceptance/mec");
    std::size_t safe = 0, converged = 0, live = 0, certified = 0;
    std::size_t scenarios[3] = {};
    for (std::size_t run = 0; run < kRuns; ++run) {
        std::vector<Behavior> behaviors(4, Behavior::Honest);
        std::size_t scenario = run % 3;
        std::size_t faulty = 1 + (run / 3) % 3;  // never the leader
        if (scenario == 1) behaviors[faulty] = Behavior::Silent;
        if (scenario == 2) behaviors[faulty] = Behavior::Equivocating;
        ++scenarios[scenario];

        ledger::PbftConfig pc{1, 4, 1'000'000, run + 1};
        ledger::PbftCluster cluster(4, pc, behaviors);
        contract::MecIdentity identity{0, mec};
        constexpr std::size_t kUsers = 6;
        std::size_t submitted = 0;
        for (std::size_t u = 0; u < kUsers; ++u) {
            auto user = crypto::generate_keypair("acceptance/pbft-user/" + std::to_string(u));
            Bytes reg = contract::prepare_registration({user.public_key, "HU-" + std::to_string(u), u}, user.secret_key);
            auto receipt = contract::issue_receipt(reg, identity);
            cluster.submit(ledger::make_tx(ledger::TxKind::Registration,
                                           contract::RegistrationRecord{reg, receipt.receipt}.encode(), mec, u),
                           u);
            contract::StorageTx stx{crypto::content_hash(Bytes{static_cast<std::uint8_t>(u)}, run),
                                    {std::to_string(u), static_cast<std::uint32_t>(u % 4)},
                                    mec.public_key,
                                    run * 100 + u};
            cluster.submit(ledger::make_tx(ledger::TxKind::Storage, stx.encode(), mec, 100 + u), 100 + u);
            submitted += 2;
        }
        cluster.flush();

        if (cluster.honest_agree()) ++safe;
        if (cluster.honest_states_identical()) ++converged;
        bool all_committed = cluster.pending() == 0;
        bool certs = true;
        for (std::size_t i = 0; i < 4; ++i) {
            if (!cluster.node(i).honest()) continue;
            const auto& chain = cluster.node(i).ledger();
            all_committed = all_committed && chain.tx_count() == submitted && chain.verify_chain();
            for (std::size_t b = 1; b < chain.blocks().size(); ++b) {
                certs = certs && ledger::verify_certificate(chain.blocks()[b], cluster.validators(), cluster.quorum());
            }
        }
        if (all_committed) ++live;
        if (certs) ++certified;
    }
    return {safe == kRuns && converged == kRuns,
            std::to_string(safe) + "/" + std::to_string(kRuns) + " runs without conflicting commits, " +
                std::to_string(converged) + " with byte-identical honest replicas (" + std::to_string(scenarios[0]) +
                " honest, " + std::to_string(scenarios[1]) + " silent, " + std::to_string(scenarios[2]) +
                " equivocating); " + std::to_string(live) + " committed everything, " + std::to_string(certified) +
                " with valid commit certificates"};
}

// ---- 8-10. sharing benchmark ----

netsim::ScenarioConfig bench_config() {
    return cli::load_config(source_path("configs/bench.json")).scenario;
}

Outcome hop_dominance() {
    auto config = bench_config();
    auto rows = netsim::share_bench(config, {Mode::Decentralized, Mode::Dht, Mode::CentralAuthority});
    std::size_t points = 0, ok = 0;
    std::string detail;
    for (std::size_t i = 0; i + 2 < rows.size(); i += 3) {
        ++points;
        const auto &dec = rows[i], &dht = rows[i + 1], &ca = rows[i + 2];
        if (dec.mean_hops < dht.mean_hops && dec.mean_hops < ca.mean_hops) ++ok;
        char buf[96];
        std::snprintf(buf, sizeof buf, " k=%zu:%.2f/%.2f/%.2f", dec.requests, dec.mean_hops, dht.mean_hops,
                      ca.mean_hops);
        detail += buf;
    }
    return {ok == points && points == config.workload.request_counts.size(),
            ratio(ok, points) + " load points; mean hops decentralized/dht/ca" + detail};
}

Outcome acceptance_trend() {
    auto config = bench_config();
    auto modes = cli::all_modes();
    std::size_t seeds_ok = 0;
    std::string failures;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        config.seed = seed;
        auto rows = netsim::share_bench(config, modes);
        bool ok = true;
        std::size_t m = modes.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            // rows are grouped by load point, modes in order, decentralized first
            if (i >= m && rows[i].acceptance > rows[i - m].acceptance) ok = false;
            if (i % m != 0 && rows[i - i % m].acceptance < rows[i].acceptance) ok = false;
        }
        if (ok) ++seeds_ok;
        else failures += " " + std::to_string(seed);
    }
    return {seeds_ok == 10,
            ratio(seeds_ok, 10) + " seeds non-increasing with decentralized >= every baseline" +
                (failures.empty() ? std::string() : "; failing seeds:" + failures)};
}

Outcome determinism() {
    auto config = cli::load_config(source_path("tests/golden/golden.json"));
    auto modes = cli::all_modes();
    std::string a = netsim::bench_csv(netsim::share_bench(config.scenario, modes));
    std::string b = netsim::bench_csv(netsim::share_bench(config.scenario, modes));
    std::ifstream in(source_path("tests/golden/share_bench.csv"), std::ios::binary);
    std::stringstream golden;
    golden << in.rdbuf();
    bool same = a == b;
    bool matches = in.good() && golden.str() == a;
    return {same && matches, std::string(same ? "two runs byte-identical" : "two runs differ") + ", " +
                                 (matches ? "matches" : "differs from") + " tests/golden/share_bench.csv"};
}

// ---- 11. Case-2 message sequence ----

std::vector<std::string> dump_lines(const ledger::Ledger& l) {
    std::vector<std::string> lines;
    std::istringstream in(l.dump());
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

// Kinds of the transactions in blocks after `from_height`, in chain order.
std::vector<ledger::TxKind> kinds_after(const ledger::Ledger& l, std::size_t from_height) {
    std::vector<ledger::TxKind> out;
    for (std::size_t b = from_height + 1; b < l.blocks().size(); ++b) {
        for (const auto& tx : l.blocks()[b].txs) out.push_back(tx.kind);
    }
    return out;
}

Outcome case2_sequence() {
    using ledger::TxKind;
    auto cfg = network_config();
    netsim::HealthNetwork net(cfg, 0xc2);
    Rng rng(0xc2);
    net.register_all_users();
    const std::uint32_t m = 0, y = 1;
    auto rec = make_record(rng, 5000, 5000, net.patient(y, 0).patient_id);
    auto stored = net.run_storage(y * static_cast<std::uint32_t>(cfg.devices_per_hospital), 0, rec);
    net.settle();

    const auto& global = net.global().node(0).ledger();
    auto global_before = dump_lines(global);
    std::size_t local_m_before = net.local(m).chain().height();
    std::size_t local_y_before = net.local(y).chain().height();

    auto out = net.run_request({m, net.patient(y, 0), 60.0, 0});  // user 0 is homed at hospital 0
    net.settle();

    std::vector<std::string> problems;
    auto expect = [&](bool cond, const std::string& what) {
        if (!cond) problems.push_back(what);
    };
    expect(out.status == RequestStatus::Delivered && out.payload == rec.serialize(), "record not delivered intact");
    expect(out.hops == 4, "expected 4 hops, got " + std::to_string(out.hops));

    auto global_after = dump_lines(global);
    expect(std::equal(global_before.begin(), global_before.end(), global_after.begin()),
           "global ledger history rewritten");
    auto new_global = kinds_after(global, global_before.size() - 1);
    std::size_t imr = 0, sharing = 0, access = 0, other = 0;
    for (auto k : new_global) {
        if (k == TxKind::InterMecRequest) ++imr;
        else if (k == TxKind::Sharing) ++sharing;
        else if (k == TxKind::Access) ++access;
        else ++other;
    }
    expect(imr == 1 && sharing == 1 && access == 1 && other == 0,
           "global ledger gained " + std::to_string(imr) + " InterMecRequest, " + std::to_string(sharing) +
               " Sharing, " + std::to_string(access) + " Access, " + std::to_string(other) + " other");
    auto imr_pos = std::find(new_global.begin(), new_global.end(), TxKind::InterMecRequest);
    auto share_pos = std::find(new_global.begin(), new_global.end(), TxKind::Sharing);
    expect(imr_pos < share_pos, "InterMecRequest not ordered before Sharing");

    if (imr == 1) {
        auto tx = contract::InterMecRequestTx::decode(global.transactions(TxKind::InterMecRequest).back().payload);
        expect(tx.requester == net.mec(m).keys.public_key, "InterMecRequest not from MEC m");
        expect(tx.patient == net.patient(y, 0), "InterMecRequest names the wrong patient");
        expect(tx.user_pk == net.user_keys(0).public_key, "InterMecRequest names the wrong user");
        expect(global.transactions(TxKind::InterMecRequest).back().submitter == net.mec(m).keys.public_key,
               "InterMecRequest not signed by MEC m");
    }
    if (sharing == 1) {
        auto tx = global.transactions(TxKind::Sharing).back();
        auto share = contract::SharingTx::decode(tx.payload);
        expect(share.server == net.mec(y).keys.public_key && tx.submitter == net.mec(y).keys.public_key,
               "Sharing not announced by MEC y");
        expect(share.hash == stored.hash, "Sharing names the wrong record");
        expect(share.user_pk == net.user_keys(0).public_key, "Sharing names the wrong user");
    }
    expect(net.global().honest_states_identical(), "replicas diverged");
    expect(net.replica(2).inter_mec_log().size() == 1 && net.replica(3).sharing_log().size() == 1,
           "broadcast did not reach every replica");

    auto local_m = kinds_after(net.local(m).chain(), local_m_before);
    expect(local_m == std::vector<TxKind>{TxKind::Request, TxKind::DataRelay},
           "MEC m's local ledger gained " + std::to_string(local_m.size()) + " entries, expected Request then DataRelay");
    if (local_m.size() == 2) {
        auto relay = contract::DataRelayTx::decode(net.local(m).chain().tip().txs.front().payload);
        expect(relay.source == net.mec(y).keys.public_key && relay.hash == stored.hash,
               "DataRelay does not name MEC y and the record");
    }
    expect(net.local(y).chain().height() == local_y_before, "MEC y's local ledger changed");

    // Control: a Case-1 request stays inside hospital m.
    auto own = make_record(rng, 5000, 5000, net.patient(m, 0).patient_id);
    net.run_storage(m * static_cast<std::uint32_t>(cfg.devices_per_hospital), 0, own);
    net.settle();
    std::size_t control_height = global.height();
    std::size_t control_local = net.local(m).chain().height();
    auto control = net.run_request({m, net.patient(m, 0), 60.0, 0});
    net.settle();
    auto control_global = kinds_after(global, control_height);
    auto control_m = kinds_after(net.local(m).chain(), control_local);
    expect(control.status == RequestStatus::Delivered && control.hops == 2, "Case-1 control not delivered in 2 hops");
    expect(std::count(control_global.begin(), control_global.end(), TxKind::InterMecRequest) == 0 &&
               control_m == std::vector<TxKind>{TxKind::Request},
           "Case-1 control produced inter-MEC records");

    std::string detail = "global +";
    for (auto k : new_global) detail += " " + ledger::to_string(k);
    detail += "; local m +";
    for (auto k : local_m) detail += " " + ledger::to_string(k);
    detail += "; local y +" + std::to_string(net.local(y).chain().height() - local_y_before);
    for (const auto& p : problems) detail += "; " + p;
    return {problems.empty(), detail};
}

}  // namespace

// With arguments, runs only the listed criterion numbers.
int main(int argc, char** argv) {
    struct Criterion {
        const char* name;
        Outcome (*run)();
    };
    const Criterion criteria[] = {
        {"optimizer-optimality", optimizer_optimality},
        {"constraint-soundness", constraint_soundness},
        {"sweep-dominance", sweep_dominance},
        {"storage-roundtrip", storage_roundtrip},
        {"tamper-detection", tamper_detection},
        {"authentication-soundness", authentication_soundness},
        {"pbft-safety-convergence", pbft_safety},
        {"hop-dominance", hop_dominance},
        {"acceptance-trend", acceptance_trend},
        {"determinism", determinism},
        {"case2-sequence", case2_sequence},
    };
    std::size_t failed = 0, index = 0;
    std::vector<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::strtoul(argv[i], nullptr, 10));
    std::size_t total = 0;
    for (const auto& c : criteria) {
        ++index;
        if (!selected.empty() && std::find(selected.begin(), selected.end(), index) == selected.end()) continue;
        ++total;
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.passed) ++failed;
        std::printf("%s %2zu %s: %s\n", o.passed ? "PASS" : "FAIL", index, c.name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", total - failed, total);
    return failed == 0 ? 0 : 1;
}
