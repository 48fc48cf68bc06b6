#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "edgehealth/netsim/scenario.hpp"

namespace edgehealth::cli {

inline constexpr int kSchemaVersion = 1;

/// A config field is missing, mistyped, out of range or unknown.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string path, const std::string& message);
    /// Dotted location of the offending field, e.g. "topology.links.wan.bandwidth_bps".
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

struct SweepConfig {
    std::vector<double> sizes_kb{200, 400, 600, 800, 1000};
    std::size_t devices = 10;
    std::size_t repetitions = 10;
    double max_latency_s = 10;
    /// Device memory available to the analysis (the study's phones have 2 GB).
    double mem_cap_mb = 2048;
    /// The cloud scheme reuses the edge model with less compute and a WAN delay.
    double cloud_budget_hz = 2.5e9;
    double cloud_extra_delay_s = 0.25;
};

struct VerifyConfig {
    std::size_t oracle_trials = 30;
    std::size_t oracle_devices = 8;
    std::size_t roundtrips = 20;
    std::size_t pbft_runs = 10;
    std::size_t silent_validators = 0;
    std::size_t equivocating_validators = 0;
    /// Flips one stored bit before the integrity check, which must then fail.
    bool inject_tamper = false;
};

struct AppConfig {
    netsim::ScenarioConfig scenario;
    SweepConfig sweep;
    VerifyConfig verify;
};

/// Parses and validates a JSON config. Absent sections keep their defaults.
/// Throws ConfigError.
AppConfig parse_config(const std::string& json_text);
AppConfig load_config(const std::string& path);

/// The built-in defaults as a complete JSON document.
std::string default_config_json();

}  // namespace edgehealth::cli
