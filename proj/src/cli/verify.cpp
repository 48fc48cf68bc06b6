#include "edgehealth/cli/verify.hpp"

#include "edgehealth/offload/instance.hpp"

namespace edgehealth::cli {

namespace {

offload::SolveResult solve_or_best(const auto& solver) {
    try {
        return solver();
    } catch (const offload::NoFeasibleSolution& e) {
        return e.result();
    }
}

bool recheck(const offload::OffloadProblem& problem, const offload::OffloadDecision& d) {
    if (!d.feasible) return true;
    auto again = problem.evaluate(d.x);
    return again.feasible && again.violations.empty();
}

std::vector<CheckResult> check_optimizer(const AppConfig& config) {
    const auto& v = config.verify;
    std::size_t optimal = 0, below = 0, unsound = 0;
    offload::RandomProblemOptions options;
    options.random_weights = true;
    options.ranges = config.scenario.network.devices;
    for (std::size_t t = 0; t < v.oracle_trials; ++t) {
        std::uint64_t seed = Rng::derive(config.scenario.seed, 0x6f7261 + t).next();
        auto problem = offload::random_problem(v.oracle_devices, seed, options);
        offload::PsoConfig pso = config.scenario.network.pso;
        pso.seed = seed;
        auto candidate = solve_or_best([&] { return offload::solve_pso(problem, pso); });
        auto oracle = solve_or_best([&] { return offload::solve_exhaustive(problem, pso.penalty); });
        if (offload::confirm_against_oracle(candidate, oracle)) ++optimal;
        if (candidate.penalized_cost < oracle.penalized_cost) ++below;
        if (!recheck(problem, candidate.best)) ++unsound;
        if (!recheck(problem, oracle.best)) ++unsound;
    }
    std::size_t n = v.oracle_trials;
    return {
        {"oracle-equivalence", below == 0 && optimal * 100 >= 95 * n,
         std::to_string(optimal) + "/" + std::to_string(n) + " optimal, " + std::to_string(below) + " below oracle"},
        {"constraint-soundness", unsound == 0, std::to_string(unsound) + " feasible-flagged decisions violate a constraint"},
    };
}

CheckResult check_crypto(const AppConfig& config) {
    Rng rng = Rng::derive(config.scenario.seed, 0x63727970);
    auto keys = crypto::generate_keypair("verify/crypto");
    std::size_t ok = 0, detected = 0, n = config.verify.roundtrips;
    for (std::size_t i = 0; i < n; ++i) {
        Bytes plain(1 + rng.below(4096));
        rng.fill(plain);
        crypto::Entropy entropy;
        rng.fill(entropy);
        auto ct = crypto::encrypt(plain, keys.public_key, entropy);
        if (crypto::decrypt(ct, keys.secret_key) == plain) ++ok;
        Bytes wire = ct.serialize();
        std::size_t bit = rng.below(wire.size() * 8);
        wire[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        try {
            crypto::decrypt(crypto::Ciphertext::parse(wire), keys.secret_key);
        } catch (const crypto::AuthFailure&) {
            ++detected;
        }
    }
    return {"crypto-roundtrip", ok == n && detected == n,
            std::to_string(ok) + "/" + std::to_string(n) + " round trips, " + std::to_string(detected) + "/" +
                std::to_string(n) + " tampers detected"};
}

std::vector<CheckResult> check_pbft(const AppConfig& config) {
    const auto& v = config.verify;
    const auto& net = config.scenario.network;
    std::size_t n = net.validators, f = net.fault_tolerance();
    std::size_t faulty = v.silent_validators + v.equivocating_validators;
    bool expect_quorum = faulty <= f;
    auto submitter = crypto::generate_keypair("verify/mec");
    constexpr std::size_t kTxs = 8;

    std::size_t safe = 0, converged = 0, live = 0;
    for (std::size_t run = 0; run < v.pbft_runs; ++run) {
        std::vector<ledger::Behavior> behaviors(n, ledger::Behavior::Honest);
        for (std::size_t i = 0; i < v.silent_validators; ++i) behaviors[n - 1 - i] = ledger::Behavior::Silent;
        for (std::size_t i = 0; i < v.equivocating_validators; ++i) {
            behaviors[n - 1 - v.silent_validators - i] = ledger::Behavior::Equivocating;
        }
        ledger::PbftConfig pc{f, net.batch_size, netsim::from_seconds(net.batch_timeout_s), config.scenario.seed + run};
        ledger::PbftCluster cluster(n, pc, behaviors);
        for (std::size_t t = 0; t < kTxs; ++t) {
            contract::StorageTx tx;
            tx.hash = crypto::content_hash(Bytes{static_cast<std::uint8_t>(t), static_cast<std::uint8_t>(run)}, t);
            tx.patient = {std::to_string(t), static_cast<std::uint32_t>(t % 4)};
            tx.owner = submitter.public_key;
            tx.timestamp = t;
            cluster.submit(ledger::make_tx(ledger::TxKind::Storage, tx.encode(), submitter, t), t);
        }
        cluster.flush();
        if (cluster.honest_agree()) ++safe;
        if (cluster.honest_states_identical()) ++converged;
        std::size_t committed = cluster.node(cluster.reference_node()).ledger().tx_count();
        if (expect_quorum ? committed == kTxs && cluster.pending() == 0 : committed == 0 && cluster.pending() == kTxs) {
            ++live;
        }
    }
    std::string runs = "/" + std::to_string(v.pbft_runs) + " runs";
    return {
        {"pbft-safety", safe == v.pbft_runs, std::to_string(safe) + runs + " without conflicting commits"},
        {"replica-convergence", converged == v.pbft_runs, std::to_string(converged) + runs + " with identical replicas"},
        {"pbft-liveness", live == v.pbft_runs,
         std::to_string(live) + runs + (expect_quorum ? " committed every transaction"
                                                      : " stalled with NoQuorum as expected for " +
                                                            std::to_string(faulty) + " faulty of " + std::to_string(n))},
    };
}

std::vector<CheckResult> check_network(const AppConfig& config) {
    const auto& net_cfg = config.scenario.network;
    netsim::HealthNetwork net(net_cfg, config.scenario.seed);
    auto rows = netsim::populate(net, config.scenario.workload, config.scenario.seed);
    if (config.verify.inject_tamper && !rows.empty()) {
        net.stores().node(rows.front().hospital).flip_bit(crypto::ContentHash::from_hex(rows.front().hash), 7);
    }

    std::vector<netsim::RequestSpec> specs;
    for (const auto& row : rows) {
        // A user homed at the record's hospital and one homed at the next hospital.
        for (std::uint32_t shift : {0u, 1u}) {
            netsim::RequestSpec spec;
            spec.user = static_cast<std::uint32_t>((row.hospital + shift) % net_cfg.hospitals);
            spec.target = net.patient(row.hospital, row.patient);
            spec.deadline_s = config.scenario.workload.deadline_s;
            specs.push_back(spec);
        }
    }
    auto outcomes = net.run_burst(specs);
    net.settle();

    std::size_t intact = 0;
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        const auto& row = rows[i / 2];
        if (o.status != netsim::RequestStatus::Delivered || !o.integrity || o.payload.size() != row.record_bytes) {
            continue;
        }
        try {
            store::HealthRecord::parse(net.patient(row.hospital, row.patient).patient_id, o.payload);
            ++intact;
        } catch (const std::exception&) {
        }
    }
    bool converged = net.global().honest_agree() && net.global().honest_states_identical();
    std::size_t registered = net.replica(0).record_count();
    return {
        {"storage-integrity", intact == outcomes.size(),
         std::to_string(intact) + "/" + std::to_string(outcomes.size()) + " retrievals intact"},
        {"network-replicas", converged && registered == rows.size(),
         std::to_string(registered) + " records registered, replicas " + (converged ? "identical" : "diverged")},
    };
}

CheckResult check_hops(const AppConfig& config) {
    netsim::ScenarioConfig sc = config.scenario;
    sc.workload.repetitions = 1;
    sc.workload.record_min_bytes = std::min<std::size_t>(sc.workload.record_min_bytes, 4096);
    sc.workload.record_max_bytes = std::min<std::size_t>(sc.workload.record_max_bytes, 8192);
    using netsim::Mode;
    auto rows = netsim::share_bench(sc, {Mode::Decentralized, Mode::Dht, Mode::CentralAuthority});
    std::size_t points = 0, dominated = 0;
    for (std::size_t i = 0; i + 2 < rows.size(); i += 3) {
        ++points;
        if (rows[i].mean_hops < rows[i + 1].mean_hops && rows[i].mean_hops < rows[i + 2].mean_hops) ++dominated;
    }
    return {"hop-dominance", dominated == points,
            std::to_string(dominated) + "/" + std::to_string(points) + " load points with fewer hops than DHT and CA"};
}

}  // namespace

std::vector<CheckResult> run_verify(const AppConfig& config) {
    std::vector<CheckResult> checks;
    auto append = [&](std::vector<CheckResult> more) {
        for (auto& c : more) checks.push_back(std::move(c));
    };
    append(check_optimizer(config));
    checks.push_back(check_crypto(config));
    append(check_network(config));
    append(check_pbft(config));
    checks.push_back(check_hops(config));
    return checks;
}

std::string format_report(const std::vector<CheckResult>& checks) {
    std::string out;
    std::size_t failed = 0;
    for (const auto& c : checks) {
        out += std::string(c.passed ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
        if (!c.passed) ++failed;
    }
    out += std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) + " checks passed\n";
    return out;
}

}  // namespace edgehealth::cli
