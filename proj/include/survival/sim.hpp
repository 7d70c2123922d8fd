#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "survival/model.hpp"
#include "survival/tables.hpp"

namespace survival::sim {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of stream i derived from a base seed: mix64(seed ^ mix64(i + 1)).
constexpr std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t i) { return mix64(seed ^ mix64(i + 1)); }

/// SplitMix64: the k-th output is mix64(seed + k * golden gamma), so the
/// stream depends only on the seed and the draw count.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    /// Uniform integer on [0, n), unbiased.
    std::uint64_t below(std::uint64_t n);
    /// Standard exponential.
    double exponential();

private:
    std::uint64_t state_;
};

struct RolloutStep {
    int t;
    Units budget_before;
    ActionIndex action;
    OutcomeIndex outcome;
    Units clipped_reward;
    Units budget_after;
};

struct RolloutTrace {
    std::uint64_t seed = 0;
    Units initial_budget = 0;
    std::vector<RolloutStep> steps;
    /// Budget hit 0 before step T.
    bool terminated_early = false;
    Units total_clipped_return = 0;
    /// Sum of unclipped base rewards over the steps taken.
    Units total_principal_return = 0;

    Units final_budget() const { return steps.empty() ? initial_budget : steps.back().budget_after; }
    bool survived() const { return final_budget() > 0; }
};

/// One episode from (1, b0) under `policy`, sampling with Rng(seed).
RolloutTrace rollout(const SurvivalProblem& p, const Policy& policy, std::uint64_t seed);

struct RolloutStats {
    std::size_t n = 0;
    double mean_return = 0.0;  // real units
    double std_error = 0.0;    // sample std / sqrt(n)
    double survival_rate = 0.0;
    double survival_std_error = 0.0;  // binomial: sqrt(p (1 - p) / n)
    double mean_principal_return = 0.0;
};

/// n rollouts, the i-th seeded with stream_seed(seed, i). Means use
/// compensated summation.
RolloutStats estimate(const SurvivalProblem& p, const Policy& policy, std::size_t n, std::uint64_t seed);

/// Random instance: n_outcomes = 2 * reward_span + 1 outcomes with rewards
/// -reward_span..reward_span (labels "y<reward>"), n_actions actions "a1".. each
/// supported on support_size distinct outcomes drawn uniformly, with
/// probabilities uniform on the simplex (normalized exponentials).
SurvivalProblem random_problem(std::size_t n_actions, std::size_t n_outcomes, std::size_t support_size,
                               Units reward_span, std::uint64_t seed, Units initial_budget = 1, int horizon = 1);

/// CSV: step, t, budget_before, action, outcome, clipped_reward, budget_after
/// (real units).
void write_trace_csv(std::ostream& out, const SurvivalProblem& p, const RolloutTrace& trace);

/// Header line then one data line:
/// n, mean_return, std_error, survival_rate, survival_std_error, mean_principal_return.
void write_stats_csv(std::ostream& out, const RolloutStats& stats);

}  // namespace survival::sim
