#include "edgehealth/offload/model.hpp"

#include <algorithm>
#include <cmath>

namespace edgehealth::offload {

double EdgeProfile::allocated_hz(std::size_t offloaders) const {
    if (offloaders == 0) return 0;
    switch (policy) {
        case AllocationPolicy::EqualShare:
            return budget_hz / static_cast<double>(offloaders);
        case AllocationPolicy::FullBudgetEach:
            return budget_hz;
    }
    return 0;
}

CostWeights CostWeights::make(double time, double energy, double memory) {
    CostWeights w{time, energy, memory};
    if (!w.normalized()) {
        throw std::invalid_argument("cost weights must be non-negative and sum to 1");
    }
    return w;
}

bool CostWeights::normalized() const {
    if (!(time >= 0 && energy >= 0 && memory >= 0)) return false;
    return std::abs(time + energy + memory - 1.0) <= 1e-9;
}

namespace {
void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw InvalidProfile(std::string(what) + " must be positive and finite");
}
}  // namespace

void validate(const TaskSpec& t) {
    require_positive(t.data_size_bits, "data_size_bits");
    require_positive(t.local_cycles_per_bit, "local_cycles_per_bit");
    require_positive(t.enc_cycles_per_bit, "enc_cycles_per_bit");
    require_positive(t.edge_cycles_per_bit, "edge_cycles_per_bit");
    require_positive(t.max_latency_s, "max_latency_s");
}

void validate(const DeviceProfile& d) {
    require_positive(d.local_cpu_hz, "local_cpu_hz");
    require_positive(d.tx_rate_bps, "tx_rate_bps");
    require_positive(d.tx_power_w, "tx_power_w");
    require_positive(d.max_tx_power_w, "max_tx_power_w");
    require_positive(d.local_energy_j, "local_energy_j");
    require_positive(d.enc_energy_j, "enc_energy_j");
    require_positive(d.local_mem_mb, "local_mem_mb");
    require_positive(d.offload_mem_mb, "offload_mem_mb");
    require_positive(d.mem_cap_mb, "mem_cap_mb");
    if (d.tx_power_w > d.max_tx_power_w) throw InvalidProfile("tx_power_w exceeds max_tx_power_w");
}

void validate(const EdgeProfile& e) {
    require_positive(e.budget_hz, "budget_hz");
    if (!(e.extra_delay_s >= 0)) throw InvalidProfile("extra_delay_s must be non-negative");
}

std::string to_string(Constraint c) {
    switch (c) {
        case Constraint::C1_Binary: return "C1";
        case Constraint::C2_Latency: return "C2";
        case Constraint::C3_MinRate: return "C3";
        case Constraint::C4_Memory: return "C4";
        case Constraint::C5_TxPower: return "C5";
        case Constraint::C6_EdgeBudget: return "C6";
    }
    return "?";
}

std::size_t OffloadDecision::offloaded() const {
    return static_cast<std::size_t>(std::count_if(x.begin(), x.end(), [](std::uint8_t v) { return v != 0; }));
}

double local_time(const TaskSpec& task, const DeviceProfile& dev) {
    return task.data_size_bits * task.local_cycles_per_bit / dev.local_cpu_hz;
}

double offload_time(const TaskSpec& task, const DeviceProfile& dev, double edge_hz) {
    double encryption = task.data_size_bits * task.enc_cycles_per_bit / dev.local_cpu_hz;
    double transmission = task.data_size_bits / dev.tx_rate_bps;
    double execution = task.data_size_bits * task.edge_cycles_per_bit / edge_hz;
    return encryption + transmission + execution;
}

double transmission_energy(const TaskSpec& task, const DeviceProfile& dev) {
    return dev.tx_power_w * task.data_size_bits / dev.tx_rate_bps;
}

double offload_energy(const TaskSpec& task, const DeviceProfile& dev) {
    return dev.enc_energy_j + transmission_energy(task, dev);
}

double min_rate_bps(const TaskSpec& task) {
    return task.data_size_bits / task.max_latency_s;
}

namespace {

__extension__ using u128 = unsigned __int128;

// value = mantissa * 2^exponent, exactly.
struct Dyadic {
    u128 mantissa = 0;
    int exponent = 0;
};

Dyadic decompose(double v) {
    int e = 0;
    double m = std::frexp(v, &e);  // v = m * 2^e, m in [0.5, 1)
    auto integral = static_cast<std::uint64_t>(std::ldexp(m, 53));
    return {integral, e - 53};
}

int bit_width(u128 v) {
    int w = 0;
    while (v != 0) {
        v >>= 1;
        ++w;
    }
    return w;
}

// Three-way comparison of two positive dyadic rationals.
int compare(Dyadic a, Dyadic b) {
    int wa = bit_width(a.mantissa);
    int wb = bit_width(b.mantissa);
    int top_a = wa + a.exponent;
    int top_b = wb + b.exponent;
    if (top_a != top_b) return top_a < top_b ? -1 : 1;
    // Same leading-bit position: align both mantissas to the same width.
    if (wa < wb) a.mantissa <<= (wb - wa);
    else if (wb < wa) b.mantissa <<= (wa - wb);
    if (a.mantissa == b.mantissa) return 0;
    return a.mantissa < b.mantissa ? -1 : 1;
}

}  // namespace

bool rate_meets_minimum(double rate_bps, double data_bits, double max_latency_s) {
    if (std::isnan(rate_bps) || std::isnan(data_bits) || std::isnan(max_latency_s)) return false;
    if (data_bits <= 0) return true;
    if (rate_bps <= 0 || max_latency_s <= 0) return false;
    if (std::isinf(data_bits)) return false;
    if (std::isinf(rate_bps) || std::isinf(max_latency_s)) return true;

    Dyadic r = decompose(rate_bps);
    Dyadic t = decompose(max_latency_s);
    Dyadic product{r.mantissa * t.mantissa, r.exponent + t.exponent};
    return compare(product, decompose(data_bits)) >= 0;
}

namespace {

double normalized_term(double value, double a, double b) {
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    if (hi == lo) return 0;
    return (value - lo) / (hi - lo);
}

}  // namespace

OffloadDecision evaluate(std::span<const TaskSpec> tasks, std::span<const DeviceProfile> devices,
                         const EdgeProfile& edge, const CostWeights& weights, std::span<const std::uint8_t> x,
                         const EvaluateOptions& options) {
    const std::size_t n = tasks.size();
    if (devices.size() != n || x.size() != n) {
        throw LengthMismatch("tasks, devices and decision vector must have equal length");
    }

    OffloadDecision out;
    out.x.assign(x.begin(), x.end());
    out.devices.resize(n);

    std::size_t offloaders = 0;
    for (auto v : x) offloaders += (v != 0);
    const double share = edge.allocated_hz(offloaders);
    // Hypothetical share for a device that is currently local, reported for inspection.
    const double joiner_share = edge.allocated_hz(offloaders + 1);

    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const TaskSpec& task = tasks[i];
        const DeviceProfile& dev = devices[i];
        DeviceCost& c = out.devices[i];
        const bool offloads = x[i] != 0;
        const double xi = static_cast<double>(x[i]);

        c.edge_hz = offloads ? share : 0;
        c.local_time_s = local_time(task, dev);
        c.offload_time_s = offload_time(task, dev, offloads ? share : joiner_share) + edge.extra_delay_s;
        c.trans_energy_j = transmission_energy(task, dev);
        c.offload_energy_j = dev.enc_energy_j + c.trans_energy_j;

        c.time_s = (1 - xi) * c.local_time_s + xi * c.offload_time_s;
        c.energy_j = (1 - xi) * dev.local_energy_j + xi * c.offload_energy_j;
        c.memory_mb = (1 - xi) * dev.local_mem_mb + xi * dev.offload_mem_mb;

        if (options.normalize_terms) {
            total += weights.time * normalized_term(c.time_s, c.local_time_s, c.offload_time_s) +
                     weights.energy * normalized_term(c.energy_j, dev.local_energy_j, c.offload_energy_j) +
                     weights.memory * normalized_term(c.memory_mb, dev.local_mem_mb, dev.offload_mem_mb);
        } else {
            total += weights.time * c.time_s + weights.energy * c.energy_j + weights.memory * c.memory_mb;
        }

        auto violate = [&](Constraint k) { out.violations.push_back({i, k}); };
        if (x[i] > 1) violate(Constraint::C1_Binary);
        if (!(c.time_s <= task.max_latency_s)) violate(Constraint::C2_Latency);
        if (offloads && !rate_meets_minimum(dev.tx_rate_bps, task.data_size_bits, task.max_latency_s)) {
            violate(Constraint::C3_MinRate);
        }
        if (!(c.memory_mb <= dev.mem_cap_mb)) violate(Constraint::C4_Memory);
        if (offloads && !(dev.tx_power_w > 0 && dev.tx_power_w <= dev.max_tx_power_w)) {
            violate(Constraint::C5_TxPower);
        }
        if (offloads && !(c.edge_hz > 0 && c.edge_hz <= edge.budget_hz)) violate(Constraint::C6_EdgeBudget);
    }
    out.total_cost = total;
    out.feasible = out.violations.empty();
    return out;
}

OffloadDecision OffloadProblem::evaluate(std::span<const std::uint8_t> x) const {
    return offload::evaluate(tasks, devices, edge, weights, x, options);
}

}  // namespace edgehealth::offload
