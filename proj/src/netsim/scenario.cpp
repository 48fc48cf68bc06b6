#include "edgehealth/netsim/scenario.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

namespace edgehealth::netsim {

namespace {

constexpr std::uint64_t kRecordStream = 0x7265636f7264;
constexpr std::uint64_t kBurstStream = 0x6275727374;

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

}  // namespace

void WorkloadConfig::validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
        throw std::invalid_argument(field + ": " + why);
    };
    if (request_counts.empty()) fail("request_counts", "must not be empty");
    if (!(deadline_s > 0)) fail("deadline_s", "must be positive");
    if (!(spacing_s >= 0)) fail("spacing_s", "must be non-negative");
    if (repetitions == 0) fail("repetitions", "must be at least 1");
    if (record_min_bytes < 64) fail("record_min_bytes", "must be at least 64");
    if (record_max_bytes < record_min_bytes) fail("record_max_bytes", "must be at least record_min_bytes");
}

std::vector<StorageRow> populate(HealthNetwork& net, const WorkloadConfig& workload, std::uint64_t seed) {
    net.register_all_users();
    Rng rng = Rng::derive(seed, kRecordStream);
    const NetworkConfig& cfg = net.config();
    std::vector<StorageRow> rows;
    for (std::uint32_t h = 0; h < cfg.hospitals; ++h) {
        for (std::uint32_t j = 0; j < cfg.patients_per_hospital; ++j) {
            std::size_t span = workload.record_max_bytes - workload.record_min_bytes + 1;
            std::size_t size = workload.record_min_bytes + rng.below(span);
            auto series = store::synthetic_series(size, rng.next());
            PatientAddress who = net.patient(h, j);
            auto record = store::HealthRecord::from_series(who.patient_id, series);
            auto device = static_cast<std::uint32_t>(h * cfg.devices_per_hospital + j % cfg.devices_per_hospital);
            StorageReceipt r = net.run_storage(device, j, record);
            rows.push_back({device, h, j, r.offloaded, r.latency_s, r.record_bytes, r.hash.hex()});
        }
    }
    net.settle();
    return rows;
}

std::vector<RequestSpec> make_burst(const HealthNetwork& net, std::size_t count, const WorkloadConfig& workload,
                                    std::uint64_t seed) {
    Rng rng = Rng::derive(seed, kBurstStream);
    const NetworkConfig& cfg = net.config();
    SimTime start = net.now();
    std::vector<RequestSpec> burst;
    for (std::size_t i = 0; i < count; ++i) {
        RequestSpec spec;
        spec.user = static_cast<std::uint32_t>(i % net.user_count());
        auto h = static_cast<std::uint32_t>(rng.below(cfg.hospitals));
        auto j = static_cast<std::uint32_t>(rng.below(cfg.patients_per_hospital));
        spec.target = net.patient(h, j);
        spec.deadline_s = workload.deadline_s;
        spec.issue_at = start + from_seconds(workload.spacing_s * static_cast<double>(i));
        burst.push_back(spec);
    }
    return burst;
}

ScenarioResult run_scenario(const ScenarioConfig& config, Mode mode) {
    config.workload.validate();
    HealthNetwork net(config.network, config.seed, mode);
    ScenarioResult result;
    result.mode = mode;
    for (std::uint32_t h = 0; h < net.hospitals(); ++h) {
        const auto& decision = net.offload_decision(h);
        for (std::uint32_t d = 0; d < decision.devices.size(); ++d) {
            const auto& c = decision.devices[d];
            auto device = static_cast<std::uint32_t>(h * config.network.devices_per_hospital + d);
            result.offload.push_back({h, device, decision.x[d] != 0, c.time_s, c.energy_j, c.memory_mb});
        }
    }
    result.storage = populate(net, config.workload, config.seed);
    if (config.workload.request_count > 0) {
        result.requests = net.run_burst(make_burst(net, config.workload.request_count, config.workload, config.seed));
    }
    net.settle();
    return result;
}

ScenarioResult run_baseline(const ScenarioConfig& config, Mode mode) {
    if (mode == Mode::Decentralized) throw std::invalid_argument("mode: baseline must not be decentralized");
    return run_scenario(config, mode);
}

std::string offload_csv(const ScenarioResult& result) {
    std::string out = "hospital,device,offloaded,time_s,energy_j,memory_mb\n";
    for (const auto& r : result.offload) {
        out += std::to_string(r.hospital) + "," + std::to_string(r.device) + "," + (r.offloaded ? "1" : "0") + "," +
               fixed(r.time_s) + "," + fixed(r.energy_j) + "," + fixed(r.memory_mb) + "\n";
    }
    return out;
}

std::string storage_csv(const ScenarioResult& result) {
    std::string out = "device,hospital,patient,offloaded,latency_s,record_bytes,hash\n";
    for (const auto& r : result.storage) {
        out += std::to_string(r.device) + "," + std::to_string(r.hospital) + "," + std::to_string(r.patient) + "," +
               (r.offloaded ? "1" : "0") + "," + fixed(r.latency_s) + "," + std::to_string(r.record_bytes) + "," +
               r.hash + "\n";
    }
    return out;
}

std::string requests_csv(const ScenarioResult& result) {
    std::string out = "id,mode,user,home,target_hospital,target_patient,path,status,hops,latency_s,accepted,integrity\n";
    for (const auto& r : result.requests) {
        out += std::to_string(r.id) + "," + to_string(result.mode) + "," + std::to_string(r.user) + "," +
               std::to_string(r.home) + "," + std::to_string(r.target.hospital) + "," + r.target.patient_id + "," +
               to_string(r.path) + "," + to_string(r.status) + "," + std::to_string(r.hops) + "," +
               fixed(r.latency_s) + "," + (r.accepted ? "1" : "0") + "," + (r.integrity ? "1" : "0") + "\n";
    }
    return out;
}

std::vector<BenchRow> share_bench(const ScenarioConfig& config, const std::vector<Mode>& modes) {
    config.workload.validate();
    const auto& counts = config.workload.request_counts;
    // (count index, mode index) -> sums over repetitions
    std::map<std::pair<std::size_t, std::size_t>, BenchRow> sums;
    for (std::size_t rep = 0; rep < config.workload.repetitions; ++rep) {
        std::uint64_t seed = Rng::derive(config.seed, rep).next();
        for (std::size_t m = 0; m < modes.size(); ++m) {
            HealthNetwork net(config.network, seed, modes[m]);
            populate(net, config.workload, seed);
            for (std::size_t c = 0; c < counts.size(); ++c) {
                BenchRow& row = sums[{c, m}];
                if (counts[c] == 0) continue;
                auto outcomes = net.run_burst(make_burst(net, counts[c], config.workload, seed));
                net.settle();
                double latency = 0, hops = 0, accepted = 0;
                for (const auto& o : outcomes) {
                    latency += o.latency_s;
                    hops += static_cast<double>(o.hops);
                    accepted += o.accepted ? 1 : 0;
                }
                auto n = static_cast<double>(outcomes.size());
                row.mean_latency_s += latency / n;
                row.mean_hops += hops / n;
                row.total_hops += hops;
                row.acceptance += accepted / n;
            }
        }
    }
    auto reps = static_cast<double>(config.workload.repetitions);
    std::vector<BenchRow> rows;
    for (std::size_t c = 0; c < counts.size(); ++c) {
        for (std::size_t m = 0; m < modes.size(); ++m) {
            BenchRow row = sums[{c, m}];
            row.requests = counts[c];
            row.mode = modes[m];
            row.mean_latency_s /= reps;
            row.mean_hops /= reps;
            row.total_hops /= reps;
            row.acceptance = counts[c] == 0 ? 1.0 : row.acceptance / reps;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "requests,mode,mean_latency_s,mean_hops,total_hops,acceptance\n";
    for (const auto& r : rows) {
        out += std::to_string(r.requests) + "," + to_string(r.mode) + "," + fixed(r.mean_latency_s) + "," +
               fixed(r.mean_hops) + "," + fixed(r.total_hops) + "," + fixed(r.acceptance) + "\n";
    }
    return out;
}

}  // namespace edgehealth::netsim
