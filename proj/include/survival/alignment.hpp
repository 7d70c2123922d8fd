#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "survival/model.hpp"
#include "survival/solver.hpp"
#include "survival/tables.hpp"

namespace survival {

/// Principal value of a policy: while the agent is alive each step pays the
/// unclipped base reward R(Y), including the loss that terminates it. Budget
/// dynamics are the agent's.
ValueTable principal_value(const SurvivalProblem& p, const Policy& policy);

struct PrincipalSolution {
    ValueTable v;
    Policy policy;
};

/// Backward induction on the principal's objective over the agent's dynamics,
/// with the agent's tie-break rule.
PrincipalSolution solve_principal(const SurvivalProblem& p);

struct PrincipalReport {
    double agent_value = 0.0;
    double principal_value_under_agent_policy = 0.0;
    double principal_optimal_value = 0.0;
    double misalignment_gap = 0.0;
    /// Live (t, b) cells on lattice budgets where the agent's action is strictly
    /// worse for the principal than the principal-optimal action.
    std::vector<std::pair<int, Units>> divergence_cells;
};

PrincipalReport misalignment_report(const SurvivalProblem& p);

struct ShapingStep {
    Units bonus;
    double lifetime_occupancy;
    ActionIndex action_at_cell;
    bool passed;
};

struct ShapingResult {
    bool feasible = false;
    /// Set when the search reached the cap without passing verification.
    bool cap_exceeded = false;
    std::string note;
    std::optional<ActionIndex> boosted_action;
    std::vector<OutcomeIndex> boosted_outcomes;
    Units bonus = 0;
    std::optional<SurvivalProblem> shaped_problem;
    /// Lifetime probability of the avoided outcome from the queried cell under
    /// the shaped optimal policy.
    double lifetime_occupancy = 0.0;
    std::vector<ShapingStep> audit;
};

/// Searches for the smallest outcome bonus (units), applied at step t to the
/// support of an action whose support is disjoint from every action that can
/// emit `avoid_outcome`, such that the shaped optimal policy never samples
/// `avoid_outcome` from (t, budget). Search cap: 2 T max|R| units.
ShapingResult find_shaping(const SurvivalProblem& p, const std::string& avoid_outcome, int t, Units budget);

/// True when every budget reachable from (t, budget) up to step T is at most
/// |R(outcome)|, so the outcome always clips to the full budget from here on
/// and making its reward more negative cannot change q_t(budget, ·).
bool liability_insensitive(const SurvivalProblem& p, OutcomeIndex outcome, int t, Units budget);

/// True when every negative outcome of action a already clips to -budget at step t.
bool fully_clipped(const SurvivalProblem& p, ActionIndex a, int t, Units budget);

/// Heuristic number of extra horizon steps before the safe action replaces the
/// risky one at `budget`: v*_1(budget) / (P1(safe, 1) - P1(risky, 1)), with the
/// survival gap taken at the smallest positive budget and proportionality
/// constant 1. Pass tables solved at a short horizon where the risky action is optimal.
double horizon_extension_estimate(const SurvivalProblem& p, const SolveTables& tables, Units budget,
                                  ActionIndex safe_action, ActionIndex risky_action);

}  // namespace survival
