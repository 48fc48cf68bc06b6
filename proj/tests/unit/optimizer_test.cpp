#include <limits>

#include "doctest.h"
#include "edgehealth/offload/instance.hpp"
#include "edgehealth/offload/optimizer.hpp"

using namespace edgehealth::offload;

namespace {

SolveResult solve_any(const auto& solver) {
    try {
        return solver();
    } catch (const NoFeasibleSolution& e) {
        return e.result();
    }
}

// Plain enumeration, written separately from solve_exhaustive.
double brute_force_minimum(const OffloadProblem& p, double penalty) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t n = p.size();
    for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
        std::vector<std::uint8_t> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = (mask >> i) & 1;
        auto d = p.evaluate(x);
        best = std::min(best, d.total_cost + penalty * static_cast<double>(d.violations.size()));
    }
    return best;
}

}  // namespace

TEST_SUITE("optimizer") {
    TEST_CASE("exhaustive search matches brute-force enumeration") {
        RandomProblemOptions opts;
        opts.random_weights = true;
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            auto p = random_problem(7, seed, opts);
            auto r = solve_any([&] { return solve_exhaustive(p); });
            CHECK(r.penalized_cost == brute_force_minimum(p, PsoConfig{}.penalty));
            CHECK(r.iterations_used == 128);
        }
    }

    TEST_CASE("pso is never below the oracle and usually reaches it") {
        RandomProblemOptions opts;
        opts.random_weights = true;
        int optimal = 0;
        for (std::uint64_t seed = 1; seed <= 40; ++seed) {
            auto p = random_problem(10, seed, opts);
            PsoConfig cfg;
            cfg.seed = seed;
            auto pso = solve_any([&] { return solve_pso(p, cfg); });
            auto oracle = solve_any([&] { return solve_exhaustive(p); });
            CHECK(pso.penalized_cost >= oracle.penalized_cost);
            optimal += confirm_against_oracle(pso, oracle);
        }
        CHECK(optimal >= 38);
    }

    TEST_CASE("pso never does worse than all-local") {
        for (std::uint64_t seed = 1; seed <= 30; ++seed) {
            auto p = random_problem(12, seed);
            auto local = p.evaluate(std::vector<std::uint8_t>(12, 0));
            PsoConfig cfg;
            cfg.seed = seed;
            cfg.max_iterations = 3;
            auto r = solve_any([&] { return solve_pso(p, cfg); });
            CHECK(r.penalized_cost <= penalized_cost(local, cfg.penalty));
        }
    }

    TEST_CASE("pso is deterministic for a fixed seed") {
        auto p = random_problem(15, 3);
        PsoConfig cfg;
        cfg.seed = 77;
        auto a = solve_any([&] { return solve_pso(p, cfg); });
        auto b = solve_any([&] { return solve_pso(p, cfg); });
        CHECK(a.best.x == b.best.x);
        CHECK(a.penalized_cost == b.penalized_cost);
    }

    TEST_CASE("infeasible instances raise with the least-bad candidate attached") {
        auto p = random_problem(3, 5);
        for (auto& t : p.tasks) t.max_latency_s = 1e-6;
        try {
            solve_exhaustive(p);
            FAIL("expected NoFeasibleSolution");
        } catch (const NoFeasibleSolution& e) {
            CHECK_FALSE(e.result().best.feasible);
            CHECK(e.result().best.x.size() == 3);
        }
        CHECK_THROWS_AS(solve_pso(p), NoFeasibleSolution);
    }

    TEST_CASE("exhaustive search refuses large instances") {
        auto p = random_problem(kMaxExhaustiveDevices + 1, 1);
        CHECK_THROWS_AS(solve_exhaustive(p), ProblemTooLarge);
    }

    TEST_CASE("invalid pso settings are rejected") {
        PsoConfig cfg;
        cfg.swarm_size = 0;
        CHECK_THROWS(cfg.validate());
        cfg = PsoConfig{};
        cfg.velocity_clamp = -1;
        CHECK_THROWS(cfg.validate());
    }
}
