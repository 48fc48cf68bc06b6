#include "edgehealth/cli/config.hpp"

#include <fstream>
#include <concepts>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace edgehealth::cli {

using json = nlohmann::ordered_json;
using offload::Range;

ConfigError::ConfigError(std::string path, const std::string& message)
    : std::runtime_error((path.empty() ? std::string("config") : path) + ": " + message), path_(std::move(path)) {}

namespace {

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

// Reads one JSON object; every key must be consumed.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object()) throw ConfigError(path_, "expected an object");
    }

    void field(const char* key, double& out) {
        if (const json* v = take(key)) {
            if (!v->is_number()) throw ConfigError(join(path_, key), "expected a number");
            out = v->get<double>();
        }
    }
    template <std::unsigned_integral T>
    void field(const char* key, T& out) {
        if (const json* v = take(key)) out = static_cast<T>(count(*v, join(path_, key)));
    }
    void field(const char* key, bool& out) {
        if (const json* v = take(key)) {
            if (!v->is_boolean()) throw ConfigError(join(path_, key), "expected true or false");
            out = v->get<bool>();
        }
    }
    void field(const char* key, Range& out) {
        if (const json* v = take(key)) {
            std::string p = join(path_, key);
            if (v->is_number()) {
                out.lo = out.hi = v->get<double>();
            } else if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number()) {
                out.lo = (*v)[0].get<double>();
                out.hi = (*v)[1].get<double>();
            } else {
                throw ConfigError(p, "expected a number or [low, high]");
            }
            if (!(out.lo <= out.hi)) throw ConfigError(p, "low must not exceed high");
        }
    }
    void field(const char* key, std::vector<std::size_t>& out) {
        if (const json* v = take(key)) {
            std::string p = join(path_, key);
            if (!v->is_array()) throw ConfigError(p, "expected an array");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) out.push_back(count((*v)[i], p + "[" + std::to_string(i) + "]"));
        }
    }
    void field(const char* key, std::vector<double>& out) {
        if (const json* v = take(key)) {
            std::string p = join(path_, key);
            if (!v->is_array()) throw ConfigError(p, "expected an array");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i) {
                if (!(*v)[i].is_number()) throw ConfigError(p + "[" + std::to_string(i) + "]", "expected a number");
                out.push_back((*v)[i].get<double>());
            }
        }
    }
    void field(const char* key, store::ReplicationMode& out) {
        if (const json* v = take(key)) {
            std::string s = v->is_string() ? v->get<std::string>() : "";
            if (s == "lazy") out = store::ReplicationMode::Lazy;
            else if (s == "eager") out = store::ReplicationMode::Eager;
            else throw ConfigError(join(path_, key), "expected \"lazy\" or \"eager\"");
        }
    }
    void section(const char* key, const std::function<void(Reader&)>& body) {
        if (const json* v = take(key)) {
            Reader sub(*v, join(path_, key));
            body(sub);
            sub.finish();
        }
    }
    const std::string& path() const { return path_; }

    void finish() const {
        for (const auto& [key, value] : obj_.items()) {
            if (!seen_.count(key)) throw ConfigError(join(path_, key), "unknown field");
        }
    }

private:
    const json* take(const char* key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }
    static std::uint64_t count(const json& v, const std::string& path) {
        if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
            throw ConfigError(path, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

// Builds the same shape the Reader consumes.
class Writer {
public:
    explicit Writer(json& obj) : obj_(obj) { obj_ = json::object(); }

    template <typename T>
    void field(const char* key, const T& value) {
        obj_[key] = value;
    }
    void field(const char* key, const Range& r) {
        obj_[key] = r.lo == r.hi ? json(r.lo) : json::array({r.lo, r.hi});
    }
    void field(const char* key, const store::ReplicationMode& m) {
        obj_[key] = m == store::ReplicationMode::Lazy ? "lazy" : "eager";
    }
    void section(const char* key, const std::function<void(Writer&)>& body) {
        Writer sub(obj_[key]);
        body(sub);
    }

private:
    json& obj_;
};

template <typename V>
void visit_link(V& v, netsim::LinkParams& link) {
    v.field("propagation_s", link.propagation_s);
    v.field("bandwidth_bps", link.bandwidth_bps);
}

// One description of the schema, shared by reading and writing.
template <typename V>
void visit(V& v, AppConfig& c) {
    auto& net = c.scenario.network;
    auto& work = c.scenario.workload;
    v.field("seed", c.scenario.seed);
    v.section("topology", [&](V& t) {
        t.field("hospitals", net.hospitals);
        t.field("devices_per_hospital", net.devices_per_hospital);
        t.field("patients_per_hospital", net.patients_per_hospital);
        t.field("users_per_hospital", net.users_per_hospital);
        t.section("links", [&](V& l) {
            l.section("access", [&](V& s) { visit_link(s, net.access); });
            l.section("backbone", [&](V& s) { visit_link(s, net.backbone); });
            l.section("wan", [&](V& s) { visit_link(s, net.wan); });
        });
    });
    v.section("task", [&](V& t) {
        auto& r = net.devices;
        t.field("file_kb", r.file_kb);
        t.field("gigacycles", r.gigacycles);
        t.field("enc_cycles_per_bit", r.enc_cycles_per_bit);
        t.field("max_latency_s", r.max_latency_s);
        t.field("local_cpu_hz", r.local_cpu_hz);
        t.field("tx_rate_bps", r.tx_rate_bps);
        t.field("tx_power_w", r.tx_power_w);
        t.field("max_tx_power_w", r.max_tx_power_w);
        t.field("local_energy_j_per_kb", r.local_energy_j_per_kb);
        t.field("enc_energy_j_per_kb", r.enc_energy_j_per_kb);
        t.field("local_mem_base_mb", r.local_mem_base_mb);
        t.field("local_mem_mb_per_kb", r.local_mem_mb_per_kb);
        t.field("offload_mem_base_mb", r.offload_mem_base_mb);
        t.field("offload_mem_mb_per_kb", r.offload_mem_mb_per_kb);
        t.field("mem_cap_mb", r.mem_cap_mb);
        t.field("edge_budget_hz", r.edge_budget_hz);
    });
    v.section("weights", [&](V& w) {
        w.field("time", net.weights.time);
        w.field("energy", net.weights.energy);
        w.field("memory", net.weights.memory);
    });
    v.section("pso", [&](V& p) {
        p.field("swarm_size", net.pso.swarm_size);
        p.field("max_iterations", net.pso.max_iterations);
        p.field("inertia", net.pso.inertia);
        p.field("cognitive", net.pso.cognitive);
        p.field("social", net.pso.social);
        p.field("velocity_clamp", net.pso.velocity_clamp);
        p.field("penalty", net.pso.penalty);
    });
    v.section("consensus", [&](V& s) {
        s.field("validators", net.validators);
        s.field("batch_size", net.batch_size);
        s.field("batch_timeout_s", net.batch_timeout_s);
        s.field("round_s", net.consensus_round_s);
    });
    v.section("service", [&](V& s) {
        s.field("fifo_queues", net.fifo_queues);
        s.field("auth_s", net.auth_service_s);
        s.field("retrieval_base_s", net.retrieval_base_s);
        s.field("retrieval_s_per_mb", net.retrieval_s_per_mb);
        s.field("lookup_s", net.lookup_service_s);
        s.field("control_bytes", net.control_bytes);
        s.field("retry_budget", net.retry_budget);
        s.field("retry_backoff_s", net.retry_backoff_s);
        s.field("replication", net.replication);
    });
    v.section("workload", [&](V& w) {
        w.field("request_counts", work.request_counts);
        w.field("request_count", work.request_count);
        w.field("deadline_s", work.deadline_s);
        w.field("spacing_s", work.spacing_s);
        w.field("repetitions", work.repetitions);
        w.field("record_min_bytes", work.record_min_bytes);
        w.field("record_max_bytes", work.record_max_bytes);
    });
    v.section("sweep", [&](V& s) {
        s.field("sizes_kb", c.sweep.sizes_kb);
        s.field("devices", c.sweep.devices);
        s.field("repetitions", c.sweep.repetitions);
        s.field("max_latency_s", c.sweep.max_latency_s);
        s.field("mem_cap_mb", c.sweep.mem_cap_mb);
        s.field("cloud_budget_hz", c.sweep.cloud_budget_hz);
        s.field("cloud_extra_delay_s", c.sweep.cloud_extra_delay_s);
    });
    v.section("verify", [&](V& s) {
        s.field("oracle_trials", c.verify.oracle_trials);
        s.field("oracle_devices", c.verify.oracle_devices);
        s.field("roundtrips", c.verify.roundtrips);
        s.field("pbft_runs", c.verify.pbft_runs);
        s.field("silent_validators", c.verify.silent_validators);
        s.field("equivocating_validators", c.verify.equivocating_validators);
        s.field("inject_tamper", c.verify.inject_tamper);
    });
}

// Library validators report bare field names; map them back to config paths.
std::string config_path(const std::string& field) {
    static const std::map<std::string, std::string> paths = {
        {"hospitals", "topology.hospitals"},
        {"validators", "consensus.validators"},
        {"devices_per_hospital", "topology.devices_per_hospital"},
        {"patients_per_hospital", "topology.patients_per_hospital"},
        {"users_per_hospital", "topology.users_per_hospital"},
        {"access.bandwidth_bps", "topology.links.access.bandwidth_bps"},
        {"access.propagation_s", "topology.links.access.propagation_s"},
        {"backbone.bandwidth_bps", "topology.links.backbone.bandwidth_bps"},
        {"backbone.propagation_s", "topology.links.backbone.propagation_s"},
        {"wan.bandwidth_bps", "topology.links.wan.bandwidth_bps"},
        {"wan.propagation_s", "topology.links.wan.propagation_s"},
        {"auth_service_s", "service.auth_s"},
        {"retrieval_base_s", "service.retrieval_base_s"},
        {"retrieval_s_per_mb", "service.retrieval_s_per_mb"},
        {"lookup_service_s", "service.lookup_s"},
        {"consensus_round_s", "consensus.round_s"},
        {"retry_backoff_s", "service.retry_backoff_s"},
        {"batch_size", "consensus.batch_size"},
        {"batch_timeout_s", "consensus.batch_timeout_s"},
        {"weights", "weights"},
    };
    auto it = paths.find(field);
    if (it != paths.end()) return it->second;
    return field;
}

template <typename Fn>
void rethrow_at(const std::string& section, Fn&& check) {
    try {
        check();
    } catch (const std::invalid_argument& e) {
        std::string msg = e.what();
        auto colon = msg.find(": ");
        if (colon == std::string::npos) throw ConfigError(section, msg);
        std::string field = msg.substr(0, colon);
        std::string path = section.empty() ? config_path(field) : section + "." + field;
        throw ConfigError(path, msg.substr(colon + 2));
    }
}

void check_range(const std::string& path, const Range& r, double min_lo, bool strict) {
    if (strict ? !(r.lo > min_lo) : !(r.lo >= min_lo)) {
        throw ConfigError(path, strict ? "must be positive" : "must be non-negative");
    }
}

void validate(const AppConfig& c) {
    rethrow_at("", [&] { c.scenario.network.validate(); });
    rethrow_at("workload", [&] { c.scenario.workload.validate(); });

    const auto& r = c.scenario.network.devices;
    check_range("task.file_kb", r.file_kb, 0, true);
    check_range("task.gigacycles", r.gigacycles, 0, true);
    check_range("task.enc_cycles_per_bit", r.enc_cycles_per_bit, 0, false);
    check_range("task.max_latency_s", r.max_latency_s, 0, true);
    check_range("task.local_cpu_hz", r.local_cpu_hz, 0, true);
    check_range("task.tx_rate_bps", r.tx_rate_bps, 0, true);
    check_range("task.tx_power_w", r.tx_power_w, 0, false);
    check_range("task.local_energy_j_per_kb", r.local_energy_j_per_kb, 0, false);
    check_range("task.enc_energy_j_per_kb", r.enc_energy_j_per_kb, 0, false);
    check_range("task.local_mem_mb_per_kb", r.local_mem_mb_per_kb, 0, false);
    check_range("task.offload_mem_mb_per_kb", r.offload_mem_mb_per_kb, 0, false);
    check_range("task.mem_cap_mb", r.mem_cap_mb, 0, true);
    if (!(r.max_tx_power_w >= 0)) throw ConfigError("task.max_tx_power_w", "must be non-negative");
    if (!(r.edge_budget_hz > 0)) throw ConfigError("task.edge_budget_hz", "must be positive");
    if (!(r.local_mem_base_mb >= 0)) throw ConfigError("task.local_mem_base_mb", "must be non-negative");
    if (!(r.offload_mem_base_mb >= 0)) throw ConfigError("task.offload_mem_base_mb", "must be non-negative");

    const auto& s = c.sweep;
    if (s.sizes_kb.empty()) throw ConfigError("sweep.sizes_kb", "must not be empty");
    for (std::size_t i = 0; i < s.sizes_kb.size(); ++i) {
        if (!(s.sizes_kb[i] > 0)) throw ConfigError("sweep.sizes_kb[" + std::to_string(i) + "]", "must be positive");
    }
    if (s.devices == 0) throw ConfigError("sweep.devices", "must be at least 1");
    if (s.repetitions == 0) throw ConfigError("sweep.repetitions", "must be at least 1");
    if (!(s.max_latency_s > 0)) throw ConfigError("sweep.max_latency_s", "must be positive");
    if (!(s.mem_cap_mb > 0)) throw ConfigError("sweep.mem_cap_mb", "must be positive");
    if (!(s.cloud_budget_hz > 0)) throw ConfigError("sweep.cloud_budget_hz", "must be positive");
    if (!(s.cloud_extra_delay_s >= 0)) throw ConfigError("sweep.cloud_extra_delay_s", "must be non-negative");

    if (c.verify.oracle_devices > offload::kMaxExhaustiveDevices) {
        throw ConfigError("verify.oracle_devices", "at most " + std::to_string(offload::kMaxExhaustiveDevices));
    }
    std::size_t faulty = c.verify.silent_validators + c.verify.equivocating_validators;
    if (faulty >= c.scenario.network.validators) {
        throw ConfigError("verify", "silent plus equivocating validators must leave an honest leader");
    }
}

}  // namespace

AppConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    Reader root(doc, "");
    int version = 0;
    {
        std::size_t v = 0;
        root.field("schema_version", v);
        if (!doc.is_object() || !doc.contains("schema_version")) throw ConfigError("schema_version", "missing");
        version = static_cast<int>(v);
    }
    if (version != kSchemaVersion) {
        throw ConfigError("schema_version", "unsupported version " + std::to_string(version) + " (expected " +
                                                std::to_string(kSchemaVersion) + ")");
    }
    AppConfig config;
    visit(root, config);
    root.finish();
    validate(config);
    return config;
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("", "cannot read " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string default_config_json() {
    AppConfig config;
    json doc;
    Writer root(doc);
    root.field("schema_version", kSchemaVersion);
    visit(root, config);
    return doc.dump(2) + "\n";
}

}  // namespace edgehealth::cli
