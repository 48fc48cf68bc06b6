#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgehealth/netsim/network.hpp"

namespace edgehealth::netsim {

struct WorkloadConfig {
    /// Load points for the sharing benchmark.
    std::vector<std::size_t> request_counts{2, 4, 6, 8, 10, 12};
    /// Requests issued by a single scenario run.
    std::size_t request_count = 12;
    double deadline_s = 5.0;
    /// Gap between consecutive request issue times; 0 issues a simultaneous burst.
    double spacing_s = 0.0;
    std::size_t repetitions = 10;
    std::size_t record_min_bytes = 100 * 1024;
    std::size_t record_max_bytes = 5 * 1024 * 1024;

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

struct ScenarioConfig {
    NetworkConfig network;
    WorkloadConfig workload;
    std::uint64_t seed = 1;
};

struct StorageRow {
    std::uint32_t device = 0;
    std::uint32_t hospital = 0;
    std::uint32_t patient = 0;
    bool offloaded = false;
    double latency_s = 0;
    std::size_t record_bytes = 0;
    std::string hash;  // hex
};

struct OffloadRow {
    std::uint32_t hospital = 0;
    std::uint32_t device = 0;
    bool offloaded = false;
    double time_s = 0;
    double energy_j = 0;
    double memory_mb = 0;
};

struct ScenarioResult {
    Mode mode = Mode::Decentralized;
    std::vector<OffloadRow> offload;
    std::vector<StorageRow> storage;
    std::vector<RequestOutcome> requests;
};

/// Registers every user and stores one record per patient, then settles.
std::vector<StorageRow> populate(HealthNetwork& net, const WorkloadConfig& workload, std::uint64_t seed);

/// `count` requests starting at the current clock. User i is i mod user count,
/// so users rotate across hospitals; targets are drawn uniformly over all
/// patients. The burst for k requests is a prefix of the burst for k+1.
std::vector<RequestSpec> make_burst(const HealthNetwork& net, std::size_t count, const WorkloadConfig& workload,
                                    std::uint64_t seed);

/// Populates a fresh network and issues one burst of `workload.request_count`.
ScenarioResult run_scenario(const ScenarioConfig& config, Mode mode = Mode::Decentralized);
/// run_scenario for one of the comparison architectures. Throws std::invalid_argument for Decentralized.
ScenarioResult run_baseline(const ScenarioConfig& config, Mode mode);

std::string offload_csv(const ScenarioResult& result);
std::string storage_csv(const ScenarioResult& result);
std::string requests_csv(const ScenarioResult& result);

struct BenchRow {
    std::size_t requests = 0;
    Mode mode = Mode::Decentralized;
    double mean_latency_s = 0;
    double mean_hops = 0;
    double total_hops = 0;
    double acceptance = 0;  // delivered within the deadline, over all issued
};

/// For each repetition and mode, one populated network runs a burst at every
/// load point; rows are averaged over repetitions, ordered by (requests, mode).
std::vector<BenchRow> share_bench(const ScenarioConfig& config, const std::vector<Mode>& modes);
std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace edgehealth::netsim
