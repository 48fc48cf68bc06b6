#include "edgehealth/netsim/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgehealth::netsim {

using contract::InterMecRequestTx;
using contract::RegistrationRecord;
using contract::SharingTx;
using contract::StorageTx;
using ledger::TxKind;

std::string to_string(Mode mode) {
    switch (mode) {
        case Mode::Decentralized: return "decentralized";
        case Mode::Dht: return "dht";
        case Mode::CentralAuthority: return "central-authority";
        case Mode::CentralCloud: return "central-cloud";
    }
    return "unknown";
}

std::optional<Mode> parse_mode(std::string_view name) {
    for (Mode m : {Mode::Decentralized, Mode::Dht, Mode::CentralAuthority, Mode::CentralCloud}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

std::string to_string(RequestPath path) {
    return path == RequestPath::Local ? "local" : "remote";
}

std::string to_string(RequestStatus status) {
    switch (status) {
        case RequestStatus::Delivered: return "delivered";
        case RequestStatus::Denied: return "denied";
        case RequestStatus::NotRegistered: return "not-registered";
        case RequestStatus::Timeout: return "timeout";
        case RequestStatus::IntegrityFailure: return "integrity-failure";
    }
    return "unknown";
}

SimTime transfer_time(const LinkParams& link, std::size_t bytes) {
    return from_seconds(link.propagation_s + static_cast<double>(bytes) * 8.0 / link.bandwidth_bps);
}

void NetworkConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument(field + ": " + why);
    };
    if (hospitals == 0) fail("hospitals", "must be at least 1");
    if (validators < 4 || (validators - 1) % 3 != 0) fail("validators", "must be 3f+1 with f >= 1");
    if (validators < hospitals) fail("validators", "every hospital needs its own validator");
    if (devices_per_hospital == 0) fail("devices_per_hospital", "must be at least 1");
    if (patients_per_hospital == 0) fail("patients_per_hospital", "must be at least 1");
    if (users_per_hospital == 0) fail("users_per_hospital", "must be at least 1");
    for (auto [name, link] : {std::pair{"access", access}, std::pair{"backbone", backbone}, std::pair{"wan", wan}}) {
        if (!(link.bandwidth_bps > 0)) fail(std::string(name) + ".bandwidth_bps", "must be positive");
        if (!(link.propagation_s >= 0)) fail(std::string(name) + ".propagation_s", "must be non-negative");
    }
    if (!(auth_service_s >= 0)) fail("auth_service_s", "must be non-negative");
    if (!(retrieval_base_s >= 0)) fail("retrieval_base_s", "must be non-negative");
    if (!(retrieval_s_per_mb >= 0)) fail("retrieval_s_per_mb", "must be non-negative");
    if (!(lookup_service_s >= 0)) fail("lookup_service_s", "must be non-negative");
    if (!(consensus_round_s >= 0)) fail("consensus_round_s", "must be non-negative");
    if (!(retry_backoff_s > 0)) fail("retry_backoff_s", "must be positive");
    if (batch_size == 0) fail("batch_size", "must be at least 1");
    if (!(batch_timeout_s > 0)) fail("batch_timeout_s", "must be positive");
    if (!weights.normalized()) fail("weights", "must be non-negative and sum to 1");
    pso.validate();
}

struct HealthNetwork::Request {
    RequestSpec spec;
    Ciphertext sealed;
    RequestOutcome out;
    SimTime start = 0;
    contract::RegistryEntry entry;
    PatientAddress target;  // as decoded by the contract
    bool done = false;
};

namespace {

offload::OffloadDecision solve_hospital(const offload::OffloadProblem& problem, const offload::PsoConfig& pso) {
    try {
        return offload::solve_pso(problem, pso).best;
    } catch (const offload::NoFeasibleSolution& e) {
        // Devices still have to store their records; keep the least-bad plan.
        return e.result().best;
    }
}

}  // namespace

HealthNetwork::HealthNetwork(NetworkConfig config, std::uint64_t seed, Mode mode)
    : config_((config.validate(), std::move(config))),
      mode_(mode),
      rng_(Rng::derive(seed, 0x6e6574)),
      cluster_(config_.validators,
               ledger::PbftConfig{config_.fault_tolerance(), config_.batch_size, from_seconds(config_.batch_timeout_s),
                                  seed},
               {}, "edgehealth/validator"),
      stores_(config_.hospitals, config_.replication),
      cloud_store_(static_cast<std::uint32_t>(config_.hospitals + 2)) {
    for (std::uint32_t h = 0; h < config_.hospitals; ++h) {
        mecs_.push_back({h, crypto::generate_keypair("edgehealth/mec/" + std::to_string(h))});
        locals_.emplace_back(h, mecs_.back().keys);

        offload::RandomProblemOptions opts;
        opts.ranges = config_.devices;
        offload::OffloadProblem problem =
            offload::random_problem(config_.devices_per_hospital, Rng::derive(seed, 0x100 + h).next(), opts);
        problem.weights = config_.weights;
        offload::PsoConfig pso = config_.pso;
        pso.seed = Rng::derive(seed, 0x200 + h).next();
        decisions_.push_back(solve_hospital(problem, pso));
        problems_.push_back(std::move(problem));
    }
    std::size_t users = config_.hospitals * config_.users_per_hospital;
    for (std::uint32_t u = 0; u < users; ++u) {
        users_.push_back(crypto::generate_keypair("edgehealth/user/" + std::to_string(u)));
        user_ids_.push_back("HU-" + std::to_string(u));
    }
}

std::uint32_t HealthNetwork::home_of_user(std::uint32_t user) const {
    return static_cast<std::uint32_t>(user % config_.hospitals);
}

std::uint32_t HealthNetwork::home_of_device(std::uint32_t device) const {
    return static_cast<std::uint32_t>(device / config_.devices_per_hospital);
}

PatientAddress HealthNetwork::patient(std::uint32_t hospital, std::uint32_t index) const {
    return PatientAddress{std::to_string(index), hospital};
}

const contract::ContractState& HealthNetwork::replica(std::uint32_t hospital) const {
    return cluster_.node(hospital).state();
}

void HealthNetwork::set_link(NodeId a, NodeId b, bool up) {
    auto key = std::minmax(a, b);
    if (up) down_.erase({key.first, key.second});
    else down_.insert({key.first, key.second});
}

bool HealthNetwork::link_up(NodeId a, NodeId b) const {
    auto key = std::minmax(a, b);
    return down_.count({key.first, key.second}) == 0;
}

const LinkParams& HealthNetwork::link_params(NodeId a, NodeId b) const {
    if (a >= kUserBase || b >= kUserBase) return config_.access;
    if (a == cloud_node() || b == cloud_node()) return config_.wan;
    return config_.backbone;
}

void HealthNetwork::send(NodeId from, NodeId to, std::size_t bytes, std::size_t* hops, Next on_arrive, Next on_fail,
                         std::size_t attempt) {
    if (link_up(from, to)) {
        ++messages_;
        if (hops) ++*hops;
        sim_.schedule(transfer_time(link_params(from, to), bytes), std::move(on_arrive));
        return;
    }
    if (attempt >= config_.retry_budget) {
        on_fail();
        return;
    }
    sim_.schedule(from_seconds(config_.retry_backoff_s),
                  [this, from, to, bytes, hops, on_arrive = std::move(on_arrive), on_fail = std::move(on_fail),
                   attempt]() mutable { send(from, to, bytes, hops, std::move(on_arrive), std::move(on_fail), attempt + 1); });
}

void HealthNetwork::serve(NodeId node, double service_s, Next next) {
    SimTime duration = from_seconds(service_s);
    if (!config_.fifo_queues) {
        sim_.schedule(duration, std::move(next));
        return;
    }
    SimTime& busy = busy_until_[node];
    SimTime start = std::max(sim_.now(), busy);
    busy = start + duration;
    sim_.schedule_at(busy, std::move(next));
}

ledger::LedgerTx HealthNetwork::submit_global(TxKind kind, Bytes payload, const KeyPair& signer) {
    ledger::LedgerTx tx = ledger::make_tx(kind, std::move(payload), signer, sim_.now());
    cluster_.submit(tx, sim_.now());
    sim_.schedule(from_seconds(config_.batch_timeout_s), [this] { cluster_.tick(sim_.now()); });
    return tx;
}

crypto::Entropy HealthNetwork::fresh_entropy() {
    crypto::Entropy e;
    rng_.fill(e);
    return e;
}

double HealthNetwork::retrieval_service(std::size_t stored_bytes) const {
    return config_.retrieval_base_s + config_.retrieval_s_per_mb * static_cast<double>(stored_bytes) / 1e6;
}

std::optional<std::uint32_t> HealthNetwork::hospital_of_key(const PublicKey& pk) const {
    for (const auto& m : mecs_) {
        if (m.keys.public_key == pk) return m.id;
    }
    return std::nullopt;
}

void HealthNetwork::settle() {
    cluster_.flush();
    sim_.run();
    cluster_.flush();
}

RegistrationReceipt HealthNetwork::register_user(std::uint32_t user) {
    std::uint32_t home = home_of_user(user);
    contract::RegistrationTx tx{users_.at(user).public_key, user_ids_.at(user), sim_.now()};
    auto signed_reg = std::make_shared<Bytes>(contract::prepare_registration(tx, users_.at(user).secret_key));
    auto result = std::make_shared<RegistrationReceipt>();
    SimTime start = sim_.now();
    auto fail = [] { throw std::runtime_error("registration could not reach its MEC"); };

    send(user_node(user), mec_node(home), signed_reg->size(), nullptr, [=, this] {
        contract::Registration reg = contract::issue_receipt(*signed_reg, mecs_[home]);
        result->address = reg.address;
        result->receipt = reg.receipt;
        Bytes record = RegistrationRecord{*signed_reg, reg.receipt}.encode();
        locals_[home].record(TxKind::Registration, record, sim_.now());
        submit_global(TxKind::Registration, record, mecs_[home].keys);
        sim_.schedule(from_seconds(config_.consensus_round_s), [=, this] {
            send(mec_node(home), user_node(user), crypto::kPublicKeySize, nullptr,
                 [=, this] { result->latency_s = to_seconds(sim_.now() - start); }, fail);
        });
    }, fail);
    sim_.run();
    return *result;
}

void HealthNetwork::register_all_users() {
    for (std::uint32_t u = 0; u < users_.size(); ++u) register_user(u);
    settle();
}

StorageReceipt HealthNetwork::run_storage(std::uint32_t device, std::uint32_t patient_index,
                                          const store::HealthRecord& record) {
    if (device >= device_count()) throw std::out_of_range("unknown device");
    if (patient_index >= config_.patients_per_hospital) throw std::out_of_range("unknown patient");
    std::uint32_t home = home_of_device(device);
    std::size_t slot = device % config_.devices_per_hospital;
    const offload::DeviceCost& cost = decisions_[home].devices[slot];

    auto payload = std::make_shared<Bytes>(record.serialize());
    auto receipt = std::make_shared<StorageReceipt>();
    receipt->device = device;
    receipt->hospital = home;
    receipt->offloaded = decisions_[home].x[slot] != 0;
    receipt->record_bytes = payload->size();
    SimTime start = sim_.now();
    auto fail = [] { throw std::runtime_error("device could not reach its MEC"); };

    // Analysis runs first (on the device or at the edge, per the offloading
    // plan); the record then moves to the MEC for encryption and storage.
    sim_.schedule(from_seconds(cost.time_s), [=, this] {
        send(device_node(device), mec_node(home), payload->size(), nullptr, [=, this] {
            Ciphertext ct = crypto::encrypt(*payload, mecs_[home].keys.public_key, fresh_entropy());
            std::uint64_t ts = sim_.now();
            ContentHash h = stores_.put(home, ct, ts);
            if (mode_ == Mode::CentralCloud) cloud_store_.accept_replica(h, ts, ct.serialize());
            StorageTx stx{h, patient(home, patient_index), mecs_[home].keys.public_key, ts};
            receipt->hash = h;
            receipt->timestamp = ts;
            receipt->tx = submit_global(TxKind::Storage, stx.encode(), mecs_[home].keys);
            receipt->latency_s = to_seconds(sim_.now() - start);
        }, fail);
    });
    sim_.run();
    return *receipt;
}

contract::RequestTx HealthNetwork::make_request(const RequestSpec& spec) const {
    return contract::RequestTx{users_.at(spec.user).public_key, user_ids_.at(spec.user), spec.target,
                               from_seconds(spec.deadline_s), spec.issue_at};
}

Ciphertext HealthNetwork::seal(const contract::RequestTx& tx, const crypto::SecretKey& signer,
                               std::uint32_t hospital) {
    return contract::seal_request(tx, signer, mecs_.at(hospital).keys.public_key, fresh_entropy());
}

RequestOutcome HealthNetwork::run_request(const RequestSpec& spec) {
    return run_burst({spec}).front();
}

RequestOutcome HealthNetwork::run_sealed_request(const RequestSpec& spec, const Ciphertext& sealed) {
    auto req = std::make_shared<Request>();
    req->spec = spec;
    req->sealed = sealed;
    sim_.schedule_at(std::max(spec.issue_at, sim_.now()), [this, req] { start_request(req); });
    sim_.run();
    return req->out;
}

std::vector<RequestOutcome> HealthNetwork::run_burst(const std::vector<RequestSpec>& specs) {
    std::vector<std::shared_ptr<Request>> reqs;
    for (const auto& spec : specs) {
        auto req = std::make_shared<Request>();
        req->spec = spec;
        req->spec.issue_at = std::max(spec.issue_at, sim_.now());
        req->sealed = seal(make_request(req->spec), users_.at(spec.user).secret_key, home_of_user(spec.user));
        sim_.schedule_at(req->spec.issue_at, [this, req] { start_request(req); });
        reqs.push_back(std::move(req));
    }
    sim_.run();
    std::vector<RequestOutcome> out;
    for (auto& r : reqs) out.push_back(std::move(r->out));
    return out;
}

void HealthNetwork::start_request(const std::shared_ptr<Request>& req) {
    std::uint32_t home = home_of_user(req->spec.user);
    req->start = sim_.now();
    req->out.id = next_request_id_++;
    req->out.user = req->spec.user;
    req->out.home = home;
    req->out.target = req->spec.target;
    req->out.path = req->spec.target.hospital == home ? RequestPath::Local : RequestPath::Remote;

    auto timeout = [this, req] { finish(req, RequestStatus::Timeout, "link down"); };
    Bytes sealed = req->sealed.serialize();

    send(user_node(req->spec.user), mec_node(home), sealed.size(), &req->out.hops, [this, req, home, timeout] {
        locals_[home].record(TxKind::Request, req->sealed.serialize(), sim_.now());
        auto evaluate = [this, req, home] {
            const auto& m = mecs_[home];
            contract::Evaluation ev = replica(home).evaluate_request(req->sealed, m, m.keys.public_key, sim_.now());
            submit_global(TxKind::Access, ev.result.encode(), m.keys);
            return ev;
        };

        if (mode_ == Mode::CentralAuthority) {
            std::size_t bytes = config_.control_bytes + req->sealed.body.size();
            send(mec_node(home), ca_node(), bytes, &req->out.hops, [this, req, home, evaluate, timeout] {
                serve(ca_node(), config_.auth_service_s, [this, req, home, evaluate, timeout] {
                    auto ev = std::make_shared<contract::Evaluation>(evaluate());
                    send(ca_node(), mec_node(home), config_.control_bytes, &req->out.hops,
                         [this, req, ev] { authenticated(req, *ev); }, timeout);
                });
            }, timeout);
            return;
        }
        serve(mec_node(home), config_.auth_service_s, [this, req, evaluate] { authenticated(req, evaluate()); });
    }, timeout);
}

void HealthNetwork::authenticated(const std::shared_ptr<Request>& req, const contract::Evaluation& ev) {
    std::uint32_t home = req->out.home;
    req->out.certificate = ev.certificate;
    if (ev.result.verdict != contract::Verdict::Accepted) {
        reply(req, mec_node(home), RequestStatus::Denied, config_.control_bytes, ev.result.reason);
        return;
    }
    req->target = ev.request->target;
    try {
        req->entry = replica(home).lookup_hash(req->target);
    } catch (const contract::NotRegistered& e) {
        reply(req, mec_node(home), RequestStatus::NotRegistered, config_.control_bytes, e.what());
        return;
    }

    if (mode_ == Mode::Dht) {
        auto timeout = [this, req] { finish(req, RequestStatus::Timeout, "link down"); };
        send(mec_node(home), dht_node(), config_.control_bytes, &req->out.hops, [this, req, home, timeout] {
            serve(dht_node(), config_.lookup_service_s, [this, req, home, timeout] {
                send(dht_node(), mec_node(home), config_.control_bytes, &req->out.hops,
                     [this, req] { retrieve(req); }, timeout);
            });
        }, timeout);
        return;
    }
    retrieve(req);
}

void HealthNetwork::retrieve(const std::shared_ptr<Request>& req) {
    std::uint32_t home = req->out.home;
    auto holder = hospital_of_key(req->entry.owner);
    if (!holder) {
        reply(req, mec_node(home), RequestStatus::NotRegistered, config_.control_bytes, "record owner unknown");
        return;
    }
    auto timeout = [this, req] { finish(req, RequestStatus::Timeout, "link down"); };

    if (mode_ == Mode::CentralCloud) {
        send(mec_node(home), cloud_node(), config_.control_bytes, &req->out.hops,
             [this, req, h = *holder] { fetch_and_return(req, cloud_node(), h); }, timeout);
        return;
    }
    if (*holder == home) {
        fetch_and_return(req, mec_node(home), home);
        return;
    }

    // Case 2: the request to the holding MEC goes on-chain before any data moves.
    const auto& m = mecs_[home];
    InterMecRequestTx imr{req->target, users_[req->spec.user].public_key, m.keys.public_key, sim_.now()};
    submit_global(TxKind::InterMecRequest, imr.encode(), m.keys);
    std::uint32_t y = *holder;
    sim_.schedule(from_seconds(config_.consensus_round_s), [this, req, home, y, timeout] {
        send(mec_node(home), mec_node(y), config_.control_bytes, &req->out.hops,
             [this, req, y] { fetch_and_return(req, mec_node(y), y); }, timeout);
    });
}

void HealthNetwork::fetch_and_return(const std::shared_ptr<Request>& req, NodeId server, std::uint32_t holder) {
    std::uint32_t home = req->out.home;
    const ContentHash hash = req->entry.hash;
    bool from_cloud = server == cloud_node();

    std::size_t stored = 0;
    try {
        stored = from_cloud ? cloud_store_.stored_bytes(hash) : stores_.node(holder).stored_bytes(hash);
    } catch (const store::NotFound&) {
        // Not held locally; the lazy fetch below pulls it from a peer.
    }

    serve(server, retrieval_service(stored), [this, req, server, holder, home, hash, from_cloud] {
        auto timeout = [this, req] { finish(req, RequestStatus::Timeout, "link down"); };
        auto payload = std::make_shared<Bytes>();
        RequestStatus status = RequestStatus::Delivered;
        std::string detail;
        try {
            Ciphertext ct;
            if (from_cloud) {
                ct = cloud_store_.get(hash);
            } else {
                store::HopCounter store_hops;
                ct = stores_.get(holder, hash, store_hops);
                req->out.hops += store_hops.messages;
            }
            *payload = crypto::decrypt(ct, mecs_[holder].keys.secret_key);
        } catch (const store::IntegrityError& e) {
            status = RequestStatus::IntegrityFailure;
            detail = e.what();
        } catch (const crypto::AuthFailure& e) {
            status = RequestStatus::IntegrityFailure;
            detail = e.what();
        } catch (const store::NotFound& e) {
            status = RequestStatus::NotRegistered;
            detail = e.what();
        }

        if (status != RequestStatus::Delivered) {
            if (server == mec_node(home)) {
                reply(req, server, status, config_.control_bytes, detail);
            } else {
                send(server, mec_node(home), config_.control_bytes, &req->out.hops,
                     [this, req, home, status, detail] {
                         reply(req, mec_node(home), status, config_.control_bytes, detail);
                     },
                     timeout);
            }
            return;
        }

        // The serving MEC announces the share; for the cloud that is the home MEC.
        std::uint32_t announcer = from_cloud ? home : static_cast<std::uint32_t>(server);
        const auto& a = mecs_[announcer];
        SharingTx share{users_[req->spec.user].public_key, hash, a.keys.public_key, sim_.now()};

        auto deliver = [this, req, home, payload, timeout] {
            send(mec_node(home), user_node(req->spec.user), payload->size(), &req->out.hops,
                 [this, req, payload] {
                     req->out.payload = std::move(*payload);
                     finish(req, RequestStatus::Delivered, "");
                 },
                 timeout);
        };

        if (server == mec_node(home)) {
            submit_global(TxKind::Sharing, share.encode(), a.keys);
            deliver();
            return;
        }
        std::size_t bytes = payload->size();
        send(server, mec_node(home), bytes, &req->out.hops,
             [this, req, home, hash, holder, from_cloud, deliver] {
                 if (!from_cloud) {
                     contract::DataRelayTx relay{hash, mecs_[holder].keys.public_key,
                                                 users_[req->spec.user].public_key, sim_.now()};
                     locals_[home].record(TxKind::DataRelay, relay.encode(), sim_.now());
                 }
                 deliver();
             },
             timeout);
        submit_global(TxKind::Sharing, share.encode(), a.keys);
    });
}

void HealthNetwork::reply(const std::shared_ptr<Request>& req, NodeId from, RequestStatus status, std::size_t bytes,
                          std::string detail) {
    send(from, user_node(req->spec.user), bytes, &req->out.hops,
         [this, req, status, detail] { finish(req, status, detail); },
         [this, req] { finish(req, RequestStatus::Timeout, "link down"); });
}

void HealthNetwork::finish(const std::shared_ptr<Request>& req, RequestStatus status, std::string detail) {
    if (req->done) return;
    req->done = true;
    SimTime elapsed = sim_.now() - req->start;
    req->out.status = status;
    req->out.detail = std::move(detail);
    req->out.latency_s = to_seconds(elapsed);
    req->out.integrity = status == RequestStatus::Delivered;
    req->out.accepted = req->out.integrity && elapsed <= from_seconds(req->spec.deadline_s);
    if (!req->out.integrity) req->out.payload.clear();
}

}  // namespace edgehealth::netsim
