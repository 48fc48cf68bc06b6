#pragma once

#include <cstdint>

#include "edgehealth/offload/model.hpp"

namespace edgehealth::offload {

struct Range {
    double lo = 0;
    double hi = 0;
};

// Seeded random problem instances for solver checks, fuzzing and simulated
// hospitals.
//
// Defaults follow the testbed setup: files of 200-1000 KB, 0.8-1.5 Gcycles of
// analysis work, a 1 GHz device, a 5 GHz edge split equally, at most 20 mW of
// transmit power. Latency limits are drawn between 1.5 s and 10 s so that a
// share of instances has infeasible offloads (and occasionally infeasible
// local runs). Per-KB ranges scale with the drawn file size.
struct InstanceRanges {
    Range file_kb{200, 1000};
    Range gigacycles{0.8, 1.5};
    Range enc_cycles_per_bit{2, 8};
    Range max_latency_s{1.5, 10};
    Range local_cpu_hz{0.8e9, 1.2e9};
    Range tx_rate_bps{0.5e6, 20e6};
    Range tx_power_w{0.005, 0.02};
    double max_tx_power_w = 0.02;
    Range local_energy_j_per_kb{0.002, 0.012};
    Range enc_energy_j_per_kb{0.0005, 0.004};
    double local_mem_base_mb = 20;
    Range local_mem_mb_per_kb{0.04, 0.08};
    double offload_mem_base_mb = 15;
    Range offload_mem_mb_per_kb{0.03, 0.08};
    Range mem_cap_mb{60, 128};
    double edge_budget_hz = 5e9;
};

struct RandomProblemOptions {
    bool random_weights = false;  ///< draw weights from the simplex instead of 1/3 each
    InstanceRanges ranges;
};

OffloadProblem random_problem(std::size_t devices, std::uint64_t seed, const RandomProblemOptions& options = {});

}  // namespace edgehealth::offload
