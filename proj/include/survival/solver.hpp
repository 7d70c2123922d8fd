#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "survival/model.hpp"
#include "survival/tables.hpp"

namespace survival {

/// Output of backward induction. Rows t = 1..T carry decisions; row T+1 is
/// the terminal boundary (v = 0, surv = 1 on live budgets).
class SolveTables {
public:
    SolveTables(TableShape shape, std::size_t num_actions);

    const TableShape& shape() const { return v_.shape(); }
    int horizon() const { return shape().horizon(); }
    std::size_t num_actions() const { return num_actions_; }

    double v(int t, Units b) const { return v_(t, b); }
    std::span<const double> q(int t, Units b) const;
    double q(int t, Units b, ActionIndex a) const { return q(t, b)[a]; }
    ActionIndex action(int t, Units b) const { return policy_.at(t, b); }
    /// Survival probability to the end of the horizon under the optimal policy.
    double surv(int t, Units b) const { return surv_(t, b); }
    /// E[return-to-go * 1{survive to T}] under the optimal policy.
    double survival_weighted_return(int t, Units b) const { return weighted_return_(t, b); }
    /// True when more than one action was within tie tolerance of the best q.
    bool tie(int t, Units b) const { return tie_(t, b) != 0; }

    const Policy& policy() const { return policy_; }
    const ValueTable& values() const { return v_; }
    const ValueTable& survival() const { return surv_; }

private:
    friend SolveTables solve(const SurvivalProblem&);

    std::size_t num_actions_;
    ValueTable v_;
    std::vector<double> q_;
    Policy policy_;
    ValueTable surv_;
    ValueTable weighted_return_;
    TimeBudgetTable<unsigned char> tie_;
};

/// Exact finite-horizon backward induction. Argmax ties (relative tolerance
/// kTieTolerance) go to the action with higher one-step survival, then to the
/// lowest index.
SolveTables solve(const SurvivalProblem& p);

struct PolicyEvalTables {
    ValueTable v;
    ValueTable surv;
};

/// Value and survival of an arbitrary deterministic policy. The policy must
/// share the problem's table shape and define every live cell.
PolicyEvalTables evaluate_policy(const SurvivalProblem& p, const Policy& policy);

/// P[survive to T | play a at (t, b), then the optimal policy].
double action_prefixed_survival(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                ActionIndex a);

struct ConditionalReturn {
    double nu;      // E[return-to-go | survive to T]
    double p_surv;  // P[survive to T]
};

struct WeightedReturn {
    double weighted;  // E[return-to-go * 1{survive to T}]
    double p_surv;    // P[survive to T]
};

/// Unnormalized form of conditional_return; defined even when survival is impossible.
WeightedReturn weighted_action_return(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                      ActionIndex a);

/// Expected return conditioned on surviving to T after playing a at (t, b)
/// and the optimal policy afterwards. Throws when survival is impossible.
ConditionalReturn conditional_return(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                     ActionIndex a);

struct HorizonGap {
    double delta_q;      // sum_b' P[b'|b,a] (v_{t+1}(b') - v_{t+2}(b'))
    double delta_v;      // min over positive budgets of v_{t+1} - v_{t+2}
    double lower_bound;  // delta_v * one-step survival of a at b
};

/// Growth of q from one extra step of horizon. v_{t+2} is the same problem
/// solved one step shorter, read off the same table; v_{T+2} is zero.
HorizonGap horizon_value_gap(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                             ActionIndex a);

struct Occupancy {
    ValueTable instantaneous;  // P[Y' at step t | budget b, policy]
    double lifetime;           // P[Y' sampled at some step from the start cell]
};

Occupancy outcome_occupancy(const SurvivalProblem& p, const Policy& policy, OutcomeIndex outcome, int start_t,
                            Units start_budget);
Occupancy outcome_occupancy(const SurvivalProblem& p, const SolveTables& tables, const std::string& outcome_label);

/// CSV: t, budget_units, budget_real, action_label, v, surv, q_<label>...;
/// lattice budgets only, t then budget ascending.
void write_tables_csv(std::ostream& out, const SurvivalProblem& p, const SolveTables& tables);

}  // namespace survival
