#include "edgehealth/cli/commands.hpp"

#include <charconv>
#include <cstdio>

#include "edgehealth/offload/instance.hpp"

namespace edgehealth::cli {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t end = text.find(sep, start);
        parts.push_back(text.substr(start, end - start));
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return parts;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_fraction(const std::string& s, double& out) {
    auto slash = s.find('/');
    if (slash == std::string::npos) return parse_double(s, out);
    double num = 0, den = 0;
    if (!parse_double(s.substr(0, slash), num) || !parse_double(s.substr(slash + 1), den) || den == 0) return false;
    out = num / den;
    return true;
}

std::string fixed(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

offload::OffloadDecision solve(const offload::OffloadProblem& problem, const offload::PsoConfig& pso) {
    try {
        return offload::solve_pso(problem, pso).best;
    } catch (const offload::NoFeasibleSolution& e) {
        return e.result().best;
    }
}

struct Totals {
    double offloaded = 0, time = 0, energy = 0, memory = 0, cost = 0;

    void add(const offload::OffloadDecision& d) {
        for (std::size_t i = 0; i < d.devices.size(); ++i) {
            offloaded += d.x[i];
            time += d.devices[i].time_s;
            energy += d.devices[i].energy_j;
            memory += d.devices[i].memory_mb;
        }
        cost += d.total_cost;
    }
};

}  // namespace

offload::CostWeights parse_weights(const std::string& text) {
    auto parts = split(text, ',');
    if (parts.size() != 3) throw ConfigError("weights", "expected three comma-separated weights");
    double w[3];
    for (int i = 0; i < 3; ++i) {
        if (!parse_fraction(parts[i], w[i])) throw ConfigError("weights", "cannot parse \"" + parts[i] + "\"");
    }
    try {
        return offload::CostWeights::make(w[0], w[1], w[2]);
    } catch (const std::invalid_argument& e) {
        throw ConfigError("weights", e.what());
    }
}

std::vector<offload::CostWeights> default_weight_sets() {
    return {offload::CostWeights::make(1.0 / 3, 1.0 / 3, 1.0 / 3), offload::CostWeights::make(1.0 / 6, 2.0 / 3, 1.0 / 6)};
}

std::vector<netsim::Mode> parse_modes(const std::string& text) {
    std::vector<netsim::Mode> modes;
    for (const auto& name : split(text, ',')) {
        auto mode = netsim::parse_mode(name);
        if (!mode) {
            throw ConfigError("modes", "unknown mode \"" + name +
                                           "\" (expected decentralized, dht, central-authority or central-cloud)");
        }
        modes.push_back(*mode);
    }
    return modes;
}

std::vector<netsim::Mode> all_modes() {
    return {netsim::Mode::Decentralized, netsim::Mode::Dht, netsim::Mode::CentralAuthority, netsim::Mode::CentralCloud};
}

std::vector<SweepRow> offload_sweep(const AppConfig& config, const std::vector<offload::CostWeights>& weight_sets) {
    const SweepConfig& sweep = config.sweep;
    const auto& net = config.scenario.network;
    std::vector<SweepRow> rows;
    for (const auto& weights : weight_sets) {
        if (!weights.normalized()) throw ConfigError("weights", "must be non-negative and sum to 1");
        for (std::size_t s = 0; s < sweep.sizes_kb.size(); ++s) {
            double kb = sweep.sizes_kb[s];
            offload::RandomProblemOptions options;
            options.ranges = net.devices;
            options.ranges.file_kb = {kb, kb};
            options.ranges.max_latency_s = {sweep.max_latency_s, sweep.max_latency_s};
            options.ranges.mem_cap_mb = {sweep.mem_cap_mb, sweep.mem_cap_mb};

            Totals local, cloud, edge;
            for (std::size_t rep = 0; rep < sweep.repetitions; ++rep) {
                std::uint64_t seed = Rng::derive(config.scenario.seed, s * 1'000'003 + rep).next();
                offload::OffloadProblem problem = offload::random_problem(sweep.devices, seed, options);
                problem.weights = weights;
                offload::PsoConfig pso = net.pso;
                pso.seed = seed;

                std::vector<std::uint8_t> all_local(problem.size(), 0);
                local.add(problem.evaluate(all_local));
                edge.add(solve(problem, pso));

                offload::OffloadProblem remote = problem;
                remote.edge.budget_hz = sweep.cloud_budget_hz;
                remote.edge.extra_delay_s = sweep.cloud_extra_delay_s;
                cloud.add(solve(remote, pso));
            }
            double per_device = static_cast<double>(sweep.repetitions * sweep.devices);
            double reps = static_cast<double>(sweep.repetitions);
            for (auto [name, t] : {std::pair{"local", &local}, std::pair{"cloud", &cloud}, std::pair{"edge", &edge}}) {
                rows.push_back({kb, name, weights, t->offloaded / per_device, t->time / per_device,
                                t->energy / per_device, t->memory / per_device, t->cost / reps});
            }
        }
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out =
        "size_kb,scheme,weight_time,weight_energy,weight_memory,offloaded,time_s,energy_j,memory_mb,total_cost\n";
    for (const auto& r : rows) {
        out += fixed(r.size_kb) + "," + r.scheme + "," + fixed(r.weights.time) + "," + fixed(r.weights.energy) + "," +
               fixed(r.weights.memory) + "," + fixed(r.offloaded) + "," + fixed(r.time_s) + "," + fixed(r.energy_j) +
               "," + fixed(r.memory_mb) + "," + fixed(r.total_cost) + "\n";
    }
    return out;
}

}  // namespace edgehealth::cli
