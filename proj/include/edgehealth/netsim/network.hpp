#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "edgehealth/common/rng.hpp"
#include "edgehealth/contract/acsc.hpp"
#include "edgehealth/ledger/ledger.hpp"
#include "edgehealth/ledger/pbft.hpp"
#include "edgehealth/netsim/simulator.hpp"
#include "edgehealth/offload/instance.hpp"
#include "edgehealth/offload/optimizer.hpp"
#include "edgehealth/store/content_store.hpp"
#include "edgehealth/store/health_record.hpp"

namespace edgehealth::netsim {

using contract::PatientAddress;
using crypto::Ciphertext;
using crypto::ContentHash;
using crypto::KeyPair;
using crypto::PublicKey;
using crypto::Signature;

/// Which architecture serves data requests.
enum class Mode {
    Decentralized,     ///< contract-indexed lookup, authentication at the home MEC
    Dht,               ///< adds a lookup round trip to a global DHT node before each get
    CentralAuthority,  ///< authentication routed through one fixed CA node
    CentralCloud,      ///< retrieval served by one remote cloud node
};
std::string to_string(Mode mode);
std::optional<Mode> parse_mode(std::string_view name);

struct LinkParams {
    double propagation_s = 0;
    double bandwidth_bps = 0;
};

/// Propagation plus serialization delay of `bytes` over the link.
SimTime transfer_time(const LinkParams& link, std::size_t bytes);

struct NetworkConfig {
    std::size_t hospitals = 4;
    std::size_t validators = 4;  // must be 3f+1 and at least `hospitals`
    std::size_t devices_per_hospital = 2;
    std::size_t patients_per_hospital = 3;
    std::size_t users_per_hospital = 3;

    LinkParams access{0.005, 20e6};    // user or device to its MEC
    LinkParams backbone{0.01, 100e6};  // MEC to MEC, CA or DHT
    LinkParams wan{0.06, 50e6};        // MEC to the remote cloud

    bool fifo_queues = false;
    double auth_service_s = 0.0354;
    double retrieval_base_s = 0.005;
    double retrieval_s_per_mb = 0.01;
    double lookup_service_s = 0.002;
    /// Charged on the request path for on-chain steps that precede data return.
    double consensus_round_s = 0.03;
    std::size_t control_bytes = 512;
    std::size_t retry_budget = 3;
    double retry_backoff_s = 0.1;

    store::ReplicationMode replication = store::ReplicationMode::Lazy;
    std::size_t batch_size = 4;
    double batch_timeout_s = 1.0;

    offload::InstanceRanges devices;
    offload::CostWeights weights;
    offload::PsoConfig pso;

    std::size_t fault_tolerance() const { return (validators - 1) / 3; }
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

enum class RequestPath { Local = 1, Remote = 2 };
enum class RequestStatus { Delivered, Denied, NotRegistered, Timeout, IntegrityFailure };
std::string to_string(RequestPath path);
std::string to_string(RequestStatus status);

struct RequestSpec {
    std::uint32_t user = 0;
    PatientAddress target;
    double deadline_s = 5.0;
    SimTime issue_at = 0;  // absolute simulated time
};

struct RequestOutcome {
    std::uint64_t id = 0;
    std::uint32_t user = 0;
    std::uint32_t home = 0;
    PatientAddress target;
    RequestPath path = RequestPath::Local;
    RequestStatus status = RequestStatus::Denied;
    std::size_t hops = 0;
    double latency_s = 0;
    bool accepted = false;   // delivered within the deadline
    bool integrity = false;  // payload passed the hash and AEAD checks
    std::optional<contract::Certificate> certificate;
    Bytes payload;
    std::string detail;
};

struct StorageReceipt {
    ContentHash hash;
    std::uint64_t timestamp = 0;
    ledger::LedgerTx tx;
    std::uint32_t device = 0;
    std::uint32_t hospital = 0;
    bool offloaded = false;
    double latency_s = 0;
    std::size_t record_bytes = 0;
};

struct RegistrationReceipt {
    contract::Address address{};
    Signature receipt{};
    double latency_s = 0;
};

/// Hospitals, MEC servers, devices and users wired over modeled links, running
/// the storage and sharing protocols on one discrete-event clock.
///
/// Hospital h hosts MEC h, store node h and validator h. Validators beyond the
/// hospital count only take part in consensus.
class HealthNetwork {
public:
    using NodeId = std::uint32_t;

    HealthNetwork(NetworkConfig config, std::uint64_t seed, Mode mode = Mode::Decentralized);
    HealthNetwork(const HealthNetwork&) = delete;
    HealthNetwork& operator=(const HealthNetwork&) = delete;

    const NetworkConfig& config() const { return config_; }
    Mode mode() const { return mode_; }
    Simulator& sim() { return sim_; }
    SimTime now() const { return sim_.now(); }

    std::size_t hospitals() const { return config_.hospitals; }
    std::size_t user_count() const { return users_.size(); }
    std::size_t device_count() const { return config_.hospitals * config_.devices_per_hospital; }
    std::uint32_t home_of_user(std::uint32_t user) const;
    std::uint32_t home_of_device(std::uint32_t device) const;
    PatientAddress patient(std::uint32_t hospital, std::uint32_t index) const;

    // Node addressing for link control.
    NodeId mec_node(std::uint32_t hospital) const { return hospital; }
    NodeId ca_node() const { return static_cast<NodeId>(config_.hospitals); }
    NodeId dht_node() const { return ca_node() + 1; }
    NodeId cloud_node() const { return ca_node() + 2; }
    NodeId user_node(std::uint32_t user) const { return kUserBase + user; }
    NodeId device_node(std::uint32_t device) const { return kDeviceBase + device; }
    void set_link(NodeId a, NodeId b, bool up);

    /// Each of these runs the event loop until the operation finishes.
    RegistrationReceipt register_user(std::uint32_t user);
    void register_all_users();
    StorageReceipt run_storage(std::uint32_t device, std::uint32_t patient_index, const store::HealthRecord& record);
    RequestOutcome run_request(const RequestSpec& spec);
    /// A request whose encrypted body the caller built (for malformed or forged requests).
    RequestOutcome run_sealed_request(const RequestSpec& spec, const Ciphertext& sealed);
    /// Issues all requests at their issue times and runs until every one finishes.
    std::vector<RequestOutcome> run_burst(const std::vector<RequestSpec>& specs);
    /// Closes all pending ledger batches and drains the event queue.
    void settle();

    /// The request body the user would send.
    contract::RequestTx make_request(const RequestSpec& spec) const;
    Ciphertext seal(const contract::RequestTx& tx, const crypto::SecretKey& signer, std::uint32_t hospital);

    const contract::MecIdentity& mec(std::uint32_t hospital) const { return mecs_.at(hospital); }
    const KeyPair& user_keys(std::uint32_t user) const { return users_.at(user); }
    const std::string& user_id(std::uint32_t user) const { return user_ids_.at(user); }
    const contract::ContractState& replica(std::uint32_t hospital) const;
    const ledger::PbftCluster& global() const { return cluster_; }
    const ledger::LocalLedger& local(std::uint32_t hospital) const { return locals_.at(hospital); }
    store::StoreCluster& stores() { return stores_; }
    const store::StoreNode& cloud_store() const { return cloud_store_; }
    const offload::OffloadDecision& offload_decision(std::uint32_t hospital) const { return decisions_.at(hospital); }
    const offload::OffloadProblem& offload_problem(std::uint32_t hospital) const { return problems_.at(hospital); }

    std::size_t messages() const { return messages_; }

private:
    static constexpr NodeId kUserBase = 1u << 20;
    static constexpr NodeId kDeviceBase = 1u << 21;

    struct Request;
    using Next = std::function<void()>;

    const LinkParams& link_params(NodeId a, NodeId b) const;
    bool link_up(NodeId a, NodeId b) const;
    /// Delivers after the link delay; retries on a down link, then calls `on_fail`.
    void send(NodeId from, NodeId to, std::size_t bytes, std::size_t* hops, Next on_arrive, Next on_fail,
              std::size_t attempt = 0);
    /// Occupies `node` for `service_s`, behind earlier work when queues are on.
    void serve(NodeId node, double service_s, Next next);
    ledger::LedgerTx submit_global(ledger::TxKind kind, Bytes payload, const KeyPair& signer);
    crypto::Entropy fresh_entropy();
    double retrieval_service(std::size_t stored_bytes) const;
    std::optional<std::uint32_t> hospital_of_key(const PublicKey& pk) const;

    void start_request(const std::shared_ptr<Request>& req);
    void authenticated(const std::shared_ptr<Request>& req, const contract::Evaluation& ev);
    void retrieve(const std::shared_ptr<Request>& req);
    void fetch_and_return(const std::shared_ptr<Request>& req, NodeId server, std::uint32_t holder);
    void reply(const std::shared_ptr<Request>& req, NodeId from, RequestStatus status, std::size_t bytes,
               std::string detail);
    void finish(const std::shared_ptr<Request>& req, RequestStatus status, std::string detail);

    NetworkConfig config_;
    Mode mode_;
    Rng rng_;
    Simulator sim_;
    std::vector<contract::MecIdentity> mecs_;
    std::vector<KeyPair> users_;
    std::vector<std::string> user_ids_;
    ledger::PbftCluster cluster_;
    std::vector<ledger::LocalLedger> locals_;
    store::StoreCluster stores_;
    store::StoreNode cloud_store_;
    std::vector<offload::OffloadProblem> problems_;
    std::vector<offload::OffloadDecision> decisions_;
    std::map<NodeId, SimTime> busy_until_;
    std::set<std::pair<NodeId, NodeId>> down_;
    std::uint64_t next_request_id_ = 0;
    std::size_t messages_ = 0;
};

}  // namespace edgehealth::netsim
