#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "survival/model.hpp"
#include "survival/solver.hpp"
#include "survival/tables.hpp"

namespace survival {

struct ActionSelection {
    ActionIndex action;
    double value;
    /// Other actions within tie tolerance of `value`; the reported action is the lowest index.
    std::vector<ActionIndex> tied_with;
};

/// a* = argmax E[R(Y_a)] on unshaped rewards.
ActionSelection risk_neutral_action(const SurvivalProblem& p);
/// ā = argmax R̂(a).
ActionSelection optimistic_action(const SurvivalProblem& p);

struct BehaviorCell {
    ActionIndex action = kNoAction;
    bool risk_neutral = false;
    bool short_surv = false;
    bool long_surv = false;
    bool risk_seeking = false;
    bool tie = false;

    bool operator==(const BehaviorCell&) const = default;
};

/// Taxonomy flags for every live (t, b) cell of a solved problem. Budget-0
/// cells keep the default (no action, all flags false).
class BehaviorReport {
public:
    explicit BehaviorReport(TableShape shape) : cells_(std::move(shape)) {}

    const TableShape& shape() const { return cells_.shape(); }
    const BehaviorCell& at(int t, Units b) const { return cells_(t, b); }
    BehaviorCell& at(int t, Units b) { return cells_(t, b); }

private:
    TimeBudgetTable<BehaviorCell> cells_;
};

BehaviorReport classify_behavior(const SurvivalProblem& p, const SolveTables& tables);

/// Flags for a single live cell.
BehaviorCell classify_cell(const SurvivalProblem& p, const SolveTables& tables, int t, Units b);

/// CSV: t, budget_units, action_label, risk_neutral, short_surv, long_surv,
/// risk_seeking, tie over lattice budgets, flags as 0/1.
void write_behavior_csv(std::ostream& out, const SurvivalProblem& p, const BehaviorReport& report);

/// Budget (units) from which the optimal action at step t is risk neutral:
/// (T - t + 1) times the largest loss, so that no reachable step can clip or
/// terminate before the horizon. Non-increasing in t.
Units lemma1_threshold(const SurvivalProblem& p, int t);

enum class ConditionStatus { evaluated, premise_unmet, not_evaluable };

std::string to_string(ConditionStatus s);

struct CellVerdict {
    Units budget;
    bool holds;
    /// The solved policy shows the guaranteed behavior at this cell.
    bool verified;
};

struct ConditionReport {
    std::string condition;
    int t = 0;
    ConditionStatus status = ConditionStatus::evaluated;
    std::string note;
    /// Named intermediate quantities in evaluation order (beta_hat, epsilon_hat, v_max, ...).
    std::vector<std::pair<std::string, double>> quantities;
    double threshold = std::numeric_limits<double>::quiet_NaN();
    /// The condition holds at every covered cell.
    bool holds = false;
    /// Every covered cell where the condition holds was verified against the policy.
    bool guaranteed_behavior_verified = true;
    std::vector<CellVerdict> cells;

    /// NaN when the quantity was not computed.
    double quantity(const std::string& name) const;
};

/// Short-term risk-aversion condition at step t for budgets 1..b_hat (units).
ConditionReport check_short_term_aversion(const SurvivalProblem& p, const SolveTables& tables, int t, Units b_hat);

/// Long-term risk-aversion condition at step t, evaluated per budget 1..b_hat.
ConditionReport check_long_term_aversion(const SurvivalProblem& p, const SolveTables& tables, int t, Units b_hat);

/// Smallest loss magnitude (units) over actions that can lose; kUnboundedBudget when none can.
Units risk_seeking_budget_cap(const SurvivalProblem& p);

/// Risk-seeking condition at a single cell (t, budget).
ConditionReport check_risk_seeking(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget);

}  // namespace survival
