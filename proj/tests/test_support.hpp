#pragma once

// Test-only helpers: random instances and an expectimax oracle that follows
// the budget dynamics literally on real-valued budgets, with no lattice, no
// tables and no shared code with the solver.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "survival/model.hpp"

namespace survival::testing {

struct InstanceSpec {
    int max_actions = 3;
    int max_outcomes = 4;
    int max_horizon = 4;
    int min_reward = -12;
    int max_reward = 12;
    int max_initial_budget = 15;
    int max_granularity = 2;
};

/// Random problem with integer rewards in [min_reward, max_reward]/g and
/// random sparse supports.
inline SurvivalProblem random_instance(std::uint64_t seed, const InstanceSpec& spec = {}) {
    std::mt19937_64 rng(seed);
    auto uniform_int = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    RawProblem raw;
    raw.granularity = uniform_int(1, spec.max_granularity);
    const int n_outcomes = uniform_int(2, spec.max_outcomes);
    const int n_actions = uniform_int(1, spec.max_actions);
    std::vector<int> used;
    for (int y = 0; y < n_outcomes; ++y) {
        int r;
        do {
            r = uniform_int(spec.min_reward, spec.max_reward);
        } while (std::find(used.begin(), used.end(), r) != used.end());
        used.push_back(r);
        raw.outcomes.push_back({"y" + std::to_string(y), static_cast<double>(r) / static_cast<double>(raw.granularity)});
    }
    for (int a = 0; a < n_actions; ++a) {
        RawAction act;
        act.label = "a" + std::to_string(a);
        std::vector<int> idx(static_cast<std::size_t>(n_outcomes));
        for (int y = 0; y < n_outcomes; ++y) idx[static_cast<std::size_t>(y)] = y;
        std::shuffle(idx.begin(), idx.end(), rng);
        const int k = uniform_int(1, n_outcomes);
        std::vector<double> w(static_cast<std::size_t>(k));
        double total = 0.0;
        for (auto& x : w) {
            x = std::uniform_real_distribution<double>(0.05, 1.0)(rng);
            total += x;
        }
        double acc = 0.0;
        for (int i = 0; i < k; ++i) {
            double pr = (i + 1 == k) ? 1.0 - acc : w[static_cast<std::size_t>(i)] / total;
            acc += pr;
            act.probs.emplace_back("y" + std::to_string(idx[static_cast<std::size_t>(i)]), pr);
        }
        raw.actions.push_back(std::move(act));
    }
    raw.initial_budget = static_cast<double>(uniform_int(0, spec.max_initial_budget * static_cast<int>(raw.granularity))) /
                         static_cast<double>(raw.granularity);
    raw.horizon = uniform_int(1, spec.max_horizon);
    return validate_problem(raw);
}

/// Optimal expected clipped return by exhaustive expectimax over every
/// action choice and outcome path, simulating b' = b + max(-b, r) and
/// stopping at b = 0.
inline double brute_force_value(const SurvivalProblem& p, int t, double budget) {
    if (budget <= 0.0 || t > p.horizon()) return 0.0;
    const double g = static_cast<double>(p.granularity());
    double best = -1e300;
    for (ActionIndex a = 0; a < p.num_actions(); ++a) {
        double value = 0.0;
        for (const auto& e : p.action(a).support()) {
            const double r = static_cast<double>(p.reward(e.outcome, t, static_cast<Units>(std::llround(budget * g)))) / g;
            const double clipped = std::max(-budget, r);
            value += e.probability * (clipped + brute_force_value(p, t + 1, budget + clipped));
        }
        best = std::max(best, value);
    }
    return best;
}

}  // namespace survival::testing
