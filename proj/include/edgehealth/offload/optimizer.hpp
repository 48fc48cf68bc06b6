#pragma once

#include <cstdint>
#include <stdexcept>

#include "edgehealth/offload/model.hpp"

namespace edgehealth::offload {

/// Hyperparameters of the sigmoid-transfer binary PSO.
struct PsoConfig {
    std::size_t swarm_size = 30;
    std::size_t max_iterations = 100;
    double inertia = 0.7;
    double cognitive = 1.5;
    double social = 1.5;
    double velocity_clamp = 4.0;
    /// Added once per violated (device, constraint) pair.
    double penalty = 1e6;
    std::uint64_t seed = 1;

    void validate() const;
};

struct SolveResult {
    OffloadDecision best;
    double penalized_cost = 0;
    /// PSO: iterations run. Exhaustive: decision vectors enumerated.
    std::size_t iterations_used = 0;
    /// Set only by confirm_against_oracle().
    bool oracle_optimal = false;
};

/// Every candidate examined violated at least one constraint. The least-bad
/// candidate is attached.
class NoFeasibleSolution : public std::runtime_error {
public:
    explicit NoFeasibleSolution(SolveResult best);
    const SolveResult& result() const { return result_; }

private:
    SolveResult result_;
};

class ProblemTooLarge : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kMaxExhaustiveDevices = 20;

double penalized_cost(const OffloadDecision& decision, double penalty);

/// Binary PSO over x. Deterministic for a fixed seed. Particle 0 starts at the
/// all-local vector, so the result never costs more than running everything
/// locally. Throws NoFeasibleSolution when the best candidate is infeasible.
SolveResult solve_pso(const OffloadProblem& problem, const PsoConfig& config = {});

/// Enumerates all 2^N vectors in lexicographic order, keeping the first
/// minimum of the penalized cost. Throws ProblemTooLarge for N > 20.
SolveResult solve_exhaustive(const OffloadProblem& problem, double penalty = PsoConfig{}.penalty);

/// Marks `candidate` optimal when its penalized cost equals the oracle's.
bool confirm_against_oracle(SolveResult& candidate, const SolveResult& oracle);

}  // namespace edgehealth::offload
