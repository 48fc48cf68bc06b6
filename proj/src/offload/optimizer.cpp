#include "edgehealth/offload/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <vector>

#include "edgehealth/common/rng.hpp"

namespace edgehealth::offload {

void PsoConfig::validate() const {
    if (swarm_size < 2) throw std::invalid_argument("swarm_size must be >= 2");
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (!(inertia >= 0 && inertia <= 1)) throw std::invalid_argument("inertia must lie in [0, 1]");
    if (!(cognitive >= 0 && social >= 0)) throw std::invalid_argument("acceleration coefficients must be >= 0");
    if (!(velocity_clamp > 0)) throw std::invalid_argument("velocity_clamp must be > 0");
    if (!(penalty > 0)) throw std::invalid_argument("penalty must be > 0");
}

NoFeasibleSolution::NoFeasibleSolution(SolveResult best)
    : std::runtime_error("no feasible offloading decision found"), result_(std::move(best)) {}

double penalized_cost(const OffloadDecision& decision, double penalty) {
    return decision.total_cost + penalty * static_cast<double>(decision.violations.size());
}

namespace {

SolveResult finish(const OffloadProblem& problem, const std::vector<std::uint8_t>& x, double penalty,
                   std::size_t iterations) {
    SolveResult result;
    result.best = problem.evaluate(x);
    result.penalized_cost = penalized_cost(result.best, penalty);
    result.iterations_used = iterations;
    if (!result.best.feasible) throw NoFeasibleSolution(std::move(result));
    return result;
}

// Swarms revisit the same vectors constantly; caching keeps the cost of a run
// bounded by the number of distinct vectors seen.
class CostCache {
public:
    CostCache(const OffloadProblem& problem, double penalty) : problem_(problem), penalty_(penalty) {}

    double operator()(const std::vector<std::uint8_t>& x) {
        if (x.size() > 64) return penalized_cost(problem_.evaluate(x), penalty_);
        std::uint64_t key = 0;
        for (std::size_t i = 0; i < x.size(); ++i) key |= static_cast<std::uint64_t>(x[i] & 1) << i;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        double cost = penalized_cost(problem_.evaluate(x), penalty_);
        memo_.emplace(key, cost);
        return cost;
    }

private:
    const OffloadProblem& problem_;
    double penalty_;
    std::unordered_map<std::uint64_t, double> memo_;
};

struct Particle {
    std::vector<std::uint8_t> position;
    std::vector<double> velocity;
    std::vector<std::uint8_t> best_position;
    double best_cost = 0;
};

}  // namespace

SolveResult solve_pso(const OffloadProblem& problem, const PsoConfig& config) {
    config.validate();
    const std::size_t n = problem.size();
    if (n == 0) return finish(problem, {}, config.penalty, 0);

    Rng rng(config.seed);
    CostCache cost(problem, config.penalty);

    std::vector<Particle> swarm(config.swarm_size);
    for (std::size_t p = 0; p < swarm.size(); ++p) {
        Particle& particle = swarm[p];
        particle.position.assign(n, 0);
        particle.velocity.assign(n, 0);
        for (std::size_t d = 0; d < n; ++d) {
            // Particle 0 is the all-local decision.
            if (p != 0) particle.position[d] = rng.bernoulli(0.5) ? 1 : 0;
            particle.velocity[d] = rng.uniform(-config.velocity_clamp, config.velocity_clamp);
        }
        particle.best_position = particle.position;
        particle.best_cost = cost(particle.position);
    }

    std::size_t leader = 0;
    for (std::size_t p = 1; p < swarm.size(); ++p) {
        if (swarm[p].best_cost < swarm[leader].best_cost) leader = p;
    }
    std::vector<std::uint8_t> global_best = swarm[leader].best_position;
    double global_cost = swarm[leader].best_cost;

    for (std::size_t iter = 0; iter < config.max_iterations; ++iter) {
        for (auto& particle : swarm) {
            for (std::size_t d = 0; d < n; ++d) {
                double r1 = rng.uniform();
                double r2 = rng.uniform();
                double x = particle.position[d];
                double v = config.inertia * particle.velocity[d] +
                           config.cognitive * r1 * (particle.best_position[d] - x) +
                           config.social * r2 * (global_best[d] - x);
                v = std::clamp(v, -config.velocity_clamp, config.velocity_clamp);
                particle.velocity[d] = v;
                double probability = 1.0 / (1.0 + std::exp(-v));
                particle.position[d] = rng.uniform() < probability ? 1 : 0;
            }
            double c = cost(particle.position);
            if (c < particle.best_cost) {
                particle.best_cost = c;
                particle.best_position = particle.position;
            }
        }
        // Strict improvement only, scanned in index order: lowest index wins ties.
        for (const auto& particle : swarm) {
            if (particle.best_cost < global_cost) {
                global_cost = particle.best_cost;
                global_best = particle.best_position;
            }
        }
    }

    return finish(problem, global_best, config.penalty, config.max_iterations);
}

SolveResult solve_exhaustive(const OffloadProblem& problem, double penalty) {
    const std::size_t n = problem.size();
    if (n > kMaxExhaustiveDevices) {
        throw ProblemTooLarge("exhaustive search is limited to " + std::to_string(kMaxExhaustiveDevices) +
                              " devices");
    }
    const std::uint64_t count = std::uint64_t{1} << n;
    std::vector<std::uint8_t> x(n, 0);
    std::vector<std::uint8_t> best_x(n, 0);
    double best_cost = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
        // Bit (n-1-i) of mask is x_i, so increasing masks walk x lexicographically.
        for (std::size_t i = 0; i < n; ++i) x[i] = static_cast<std::uint8_t>((mask >> (n - 1 - i)) & 1);
        double c = penalized_cost(problem.evaluate(x), penalty);
        if (mask == 0 || c < best_cost) {
            best_cost = c;
            best_x = x;
        }
    }
    return finish(problem, best_x, penalty, count);
}

bool confirm_against_oracle(SolveResult& candidate, const SolveResult& oracle) {
    candidate.oracle_optimal = candidate.penalized_cost == oracle.penalized_cost;
    return candidate.oracle_optimal;
}

}  // namespace edgehealth::offload
