#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace edgehealth::offload {

/// One health-data task Y_n. Workloads are expressed per bit so that
/// data_size * cycles_per_bit is the cycle count of the task.
struct TaskSpec {
    double data_size_bits = 0;       // D_n
    double local_cycles_per_bit = 0; // X^l_n
    double enc_cycles_per_bit = 0;   // X^enc_n
    double edge_cycles_per_bit = 0;  // X^e_n
    double max_latency_s = 0;        // T^max_n
};

/// Mobile device capabilities and its measured energy/memory profile.
/// The profile values (energies, memories) are inputs, not derived.
struct DeviceProfile {
    double local_cpu_hz = 0;    // f^l_n
    double tx_rate_bps = 0;     // R_n
    double tx_power_w = 0;      // p_n
    double max_tx_power_w = 0;  // P_n
    double local_energy_j = 0;  // E^local_n
    double enc_energy_j = 0;    // E^enc_n
    double local_mem_mb = 0;    // M^local_n
    double offload_mem_mb = 0;  // M^offload_n
    double mem_cap_mb = 0;      // M^max_n
};

enum class AllocationPolicy {
    EqualShare,      ///< f^e_n = f^e / |{n : x_n = 1}|
    FullBudgetEach,  ///< every offloader sees the whole budget (single-device replication)
};

struct EdgeProfile {
    double budget_hz = 0;  // f^e
    AllocationPolicy policy = AllocationPolicy::EqualShare;
    /// Fixed extra latency added to every offload (0 for an edge server; a WAN
    /// hop when the same model stands in for a remote cloud).
    double extra_delay_s = 0;

    /// Cycles/s granted to each of `offloaders` devices.
    double allocated_hz(std::size_t offloaders) const;
};

struct CostWeights {
    double time = 1.0 / 3;
    double energy = 1.0 / 3;
    double memory = 1.0 / 3;

    /// Checked construction: all non-negative and summing to 1 within 1e-9.
    static CostWeights make(double time, double energy, double memory);
    bool normalized() const;
};

/// Raised by TaskSpec/DeviceProfile/EdgeProfile validation.
class InvalidProfile : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class LengthMismatch : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

void validate(const TaskSpec& task);
void validate(const DeviceProfile& device);
void validate(const EdgeProfile& edge);

enum class Constraint : std::uint8_t {
    C1_Binary = 1,
    C2_Latency,
    C3_MinRate,
    C4_Memory,
    C5_TxPower,
    C6_EdgeBudget,
};

std::string to_string(Constraint c);

struct Violation {
    std::size_t device = 0;
    Constraint constraint = Constraint::C1_Binary;

    friend bool operator==(const Violation&, const Violation&) = default;
};

/// Realized per-device quantities for one decision vector.
struct DeviceCost {
    double time_s = 0;     // T_n
    double energy_j = 0;   // E_n
    double memory_mb = 0;  // M_n
    double local_time_s = 0;
    double offload_time_s = 0;
    double offload_energy_j = 0;
    double trans_energy_j = 0;
    /// f^e_n actually granted; 0 when the device runs locally.
    double edge_hz = 0;
};

struct OffloadDecision {
    std::vector<std::uint8_t> x;
    std::vector<DeviceCost> devices;
    double total_cost = 0;
    bool feasible = true;
    std::vector<Violation> violations;

    std::size_t offloaded() const;
};

struct EvaluateOptions {
    /// Per-device min-max normalization of each term over {local, offload}.
    /// Off by default: the objective sums raw seconds, joules and megabytes.
    bool normalize_terms = false;
};

double local_time(const TaskSpec& task, const DeviceProfile& dev);
double offload_time(const TaskSpec& task, const DeviceProfile& dev, double edge_hz);
double transmission_energy(const TaskSpec& task, const DeviceProfile& dev);
double offload_energy(const TaskSpec& task, const DeviceProfile& dev);

/// R^min_n = D_n / T^max_n.
double min_rate_bps(const TaskSpec& task);

/// Exact test of rate * max_latency >= data_bits over the rationals the three
/// doubles denote; no rounding is involved.
bool rate_meets_minimum(double rate_bps, double data_bits, double max_latency_s);

OffloadDecision evaluate(std::span<const TaskSpec> tasks, std::span<const DeviceProfile> devices,
                         const EdgeProfile& edge, const CostWeights& weights, std::span<const std::uint8_t> x,
                         const EvaluateOptions& options = {});

/// Bundled inputs of one offloading problem.
struct OffloadProblem {
    std::vector<TaskSpec> tasks;
    std::vector<DeviceProfile> devices;
    EdgeProfile edge;
    CostWeights weights;
    EvaluateOptions options;

    std::size_t size() const { return tasks.size(); }
    OffloadDecision evaluate(std::span<const std::uint8_t> x) const;
};

}  // namespace edgehealth::offload
