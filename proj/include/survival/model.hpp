#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace survival {

/// Rewards and budgets are exact integers counted in units of 1/granularity.
using Units = std::int64_t;
using ActionIndex = std::size_t;
using OutcomeIndex = std::size_t;

inline constexpr ActionIndex kNoAction = std::numeric_limits<ActionIndex>::max();
inline constexpr Units kUnboundedBudget = std::numeric_limits<Units>::max();

/// Thrown for malformed problem descriptions and invalid arguments to
/// model-level operations.
class ProblemError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Outcome {
    std::string label;
    Units reward = 0;

    /// Zero-reward outcomes count as desired.
    bool desired() const { return reward >= 0; }
};

class OutcomeSpace {
public:
    OutcomeSpace(std::vector<Outcome> outcomes, Units granularity);

    const std::vector<Outcome>& outcomes() const { return outcomes_; }
    std::size_t size() const { return outcomes_.size(); }
    const Outcome& operator[](OutcomeIndex i) const { return outcomes_.at(i); }
    Units granularity() const { return granularity_; }

    std::optional<OutcomeIndex> find(const std::string& label) const;
    OutcomeIndex index_of(const std::string& label) const;

    double to_real(Units u) const { return static_cast<double>(u) / static_cast<double>(granularity_); }

    /// Largest positive reward, or 0 when no reward is positive.
    Units max_positive_reward() const;
    /// Magnitude of the most negative reward, or 0 when no reward is negative.
    Units max_loss() const;
    /// Largest absolute reward.
    Units sup_norm() const;

private:
    std::vector<Outcome> outcomes_;
    Units granularity_;
};

struct SupportEntry {
    OutcomeIndex outcome;
    double probability;
};

/// An action's outcome distribution, stored sparsely with support sorted by
/// outcome index.
class ActionModel {
public:
    ActionModel(std::string label, std::vector<SupportEntry> support, std::size_t n_outcomes);

    const std::string& label() const { return label_; }
    const std::vector<SupportEntry>& support() const { return support_; }
    double probability(OutcomeIndex y) const;
    bool emits(OutcomeIndex y) const { return probability(y) > 0.0; }

private:
    std::string label_;
    std::vector<SupportEntry> support_;
};

/// Additive reward bonus on one outcome over a window of time steps and,
/// optionally, a budget range. The solver only searches outcome-level bonuses
/// but the problem accepts budget-dependent terms.
struct ShapingTerm {
    OutcomeIndex outcome = 0;
    Units bonus = 0;
    int from_t = 1;
    int to_t = std::numeric_limits<int>::max();
    Units min_budget = 1;
    Units max_budget = kUnboundedBudget;

    bool applies(OutcomeIndex y, int t, Units b) const {
        return y == outcome && t >= from_t && t <= to_t && b >= min_budget && b <= max_budget;
    }
};

class SurvivalProblem {
public:
    SurvivalProblem(OutcomeSpace outcomes, std::vector<ActionModel> actions, Units initial_budget,
                    int horizon, std::vector<ShapingTerm> shaping = {});

    const OutcomeSpace& outcome_space() const { return outcomes_; }
    const std::vector<ActionModel>& actions() const { return actions_; }
    const ActionModel& action(ActionIndex a) const;
    std::size_t num_actions() const { return actions_.size(); }
    std::size_t num_outcomes() const { return outcomes_.size(); }
    Units initial_budget() const { return initial_budget_; }
    int horizon() const { return horizon_; }
    Units granularity() const { return outcomes_.granularity(); }
    const std::vector<ShapingTerm>& shaping() const { return shaping_; }

    std::optional<ActionIndex> find_action(const std::string& label) const;
    ActionIndex action_index(const std::string& label) const;

    /// Unshaped reward R(y).
    Units base_reward(OutcomeIndex y) const { return outcomes_[y].reward; }
    /// Reward in effect at step t and budget b, shaping bonuses included.
    Units reward(OutcomeIndex y, int t, Units b) const;
    /// Upper bound on any positive reward at step t, shaping included.
    Units max_positive_reward_at(int t) const;

    /// Plain expected reward E[R(Y_a)] in real units.
    double expected_reward(ActionIndex a) const;
    /// True when some action has non-negative expected reward.
    bool has_nonnegative_action() const;

    double to_real(Units u) const { return outcomes_.to_real(u); }

    SurvivalProblem with_initial_budget(Units b0) const;
    SurvivalProblem with_horizon(int horizon) const;
    SurvivalProblem with_shaping(std::vector<ShapingTerm> shaping) const;
    SurvivalProblem with_reward(OutcomeIndex y, Units reward) const;
    SurvivalProblem without_action(ActionIndex a) const;

private:
    OutcomeSpace outcomes_;
    std::vector<ActionModel> actions_;
    Units initial_budget_;
    int horizon_;
    std::vector<ShapingTerm> shaping_;
};

// ---------------------------------------------------------------------------
// Raw (unvalidated) description, the in-memory form of the external format.

struct RawOutcome {
    std::string label;
    double reward = 0.0;
};

struct RawAction {
    std::string label;
    std::vector<std::pair<std::string, double>> probs;
};

struct RawShaping {
    std::vector<std::string> outcomes;
    double bonus = 0.0;
    int from_t = 1;
    std::optional<int> to_t;
    std::optional<double> min_budget;
    std::optional<double> max_budget;
};

struct RawProblem {
    long long granularity = 1;
    std::vector<RawOutcome> outcomes;
    std::vector<RawAction> actions;
    double initial_budget = 0.0;
    long long horizon = 1;
    std::vector<RawShaping> shaping;
};

inline constexpr double kProbabilitySumTolerance = 1e-12;
inline constexpr double kRewardGridTolerance = 1e-9;

/// Converts a real quantity to granularity units, throwing when it is not an
/// integer multiple of 1/g within kRewardGridTolerance.
Units to_units(double value, Units granularity, const std::string& what);

SurvivalProblem validate_problem(const RawProblem& raw);

// ---------------------------------------------------------------------------
// One-step quantities.

/// max(-b, r) for b > 0, and 0 once the budget is exhausted.
constexpr Units clipped_reward(Units reward, Units budget) {
    if (budget <= 0) return 0;
    return reward < -budget ? -budget : reward;
}

/// E[R~(Y_a, b)] in real units, using the rewards in effect at step t.
double expected_clipped_reward(const SurvivalProblem& p, ActionIndex a, Units budget, int t = 1);

/// R^(a): expected reward counting desired outcomes only.
double optimistic_reward(const SurvivalProblem& p, ActionIndex a);

/// P[Y_a is a desired outcome].
double desired_probability(const SurvivalProblem& p, ActionIndex a);

/// P[R(Y_a) > -b]; throws for b = 0.
double one_step_survival(const SurvivalProblem& p, ActionIndex a, Units budget, int t = 1);

class BudgetLattice {
public:
    explicit BudgetLattice(Units max_budget) : max_budget_(max_budget) {}

    Units max_budget() const { return max_budget_; }
    std::size_t size() const { return static_cast<std::size_t>(max_budget_) + 1; }
    bool contains(Units b) const { return b >= 0 && b <= max_budget_; }

private:
    Units max_budget_;
};

/// Dense lattice [0, b0 + sum_t max positive reward at t].
BudgetLattice build_budget_lattice(const SurvivalProblem& p);

struct Transition {
    Units budget;
    double mass;
};

/// Distribution of the next budget, aggregated and sorted by budget ascending.
std::vector<Transition> transition_distribution(const SurvivalProblem& p, Units budget, ActionIndex a,
                                                int t = 1);

}  // namespace survival
