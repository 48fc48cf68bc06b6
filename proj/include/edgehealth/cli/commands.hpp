#pragma once

#include <string>
#include <vector>

#include "edgehealth/cli/config.hpp"

namespace edgehealth::cli {

/// "time,energy,memory", each weight a decimal or a fraction such as 1/3.
/// Throws ConfigError at path "weights".
offload::CostWeights parse_weights(const std::string& text);
/// The two settings of the offloading study: equal weights, and energy at 2/3.
std::vector<offload::CostWeights> default_weight_sets();

/// Comma-separated mode names. Throws ConfigError at path "modes".
std::vector<netsim::Mode> parse_modes(const std::string& text);
std::vector<netsim::Mode> all_modes();

struct SweepRow {
    double size_kb = 0;
    std::string scheme;  // local, cloud or edge
    offload::CostWeights weights;
    double offloaded = 0;  // share of devices offloading
    double time_s = 0;     // per device
    double energy_j = 0;   // per device
    double memory_mb = 0;  // per device
    double total_cost = 0; // objective summed over devices
};

/// For every file size and weight set, averages `sweep.repetitions` random
/// hospitals of `sweep.devices` devices under the local-only, cloud and edge
/// schemes. The edge and cloud schemes are solved with the binary PSO.
std::vector<SweepRow> offload_sweep(const AppConfig& config, const std::vector<offload::CostWeights>& weight_sets);
std::string sweep_csv(const std::vector<SweepRow>& rows);

}  // namespace edgehealth::cli
