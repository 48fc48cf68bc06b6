#include "edgehealth/offload/instance.hpp"

#include "edgehealth/common/rng.hpp"

namespace edgehealth::offload {

OffloadProblem random_problem(std::size_t devices, std::uint64_t seed, const RandomProblemOptions& options) {
    const InstanceRanges& r = options.ranges;
    Rng rng(seed);
    auto draw = [&rng](const Range& range) { return rng.uniform(range.lo, range.hi); };

    OffloadProblem problem;
    problem.edge.budget_hz = r.edge_budget_hz;
    problem.edge.policy = AllocationPolicy::EqualShare;

    for (std::size_t i = 0; i < devices; ++i) {
        double kb = draw(r.file_kb);
        double bits = kb * 8000;
        double gigacycles = draw(r.gigacycles);

        TaskSpec task;
        task.data_size_bits = bits;
        task.local_cycles_per_bit = gigacycles * 1e9 / bits;
        task.enc_cycles_per_bit = draw(r.enc_cycles_per_bit);
        task.edge_cycles_per_bit = task.local_cycles_per_bit;
        task.max_latency_s = draw(r.max_latency_s);

        DeviceProfile dev;
        dev.local_cpu_hz = draw(r.local_cpu_hz);
        dev.tx_rate_bps = draw(r.tx_rate_bps);
        dev.max_tx_power_w = r.max_tx_power_w;
        dev.tx_power_w = draw(r.tx_power_w);
        dev.local_energy_j = draw(r.local_energy_j_per_kb) * kb;
        dev.enc_energy_j = draw(r.enc_energy_j_per_kb) * kb;
        dev.local_mem_mb = r.local_mem_base_mb + draw(r.local_mem_mb_per_kb) * kb;
        dev.offload_mem_mb = r.offload_mem_base_mb + draw(r.offload_mem_mb_per_kb) * kb;
        dev.mem_cap_mb = draw(r.mem_cap_mb);

        problem.tasks.push_back(task);
        problem.devices.push_back(dev);
    }

    if (options.random_weights) {
        double a = rng.uniform();
        double b = rng.uniform();
        double c = rng.uniform();
        double sum = a + b + c;
        problem.weights = CostWeights{a / sum, b / sum, c / sum};
    }
    return problem;
}

}  // namespace edgehealth::offload
