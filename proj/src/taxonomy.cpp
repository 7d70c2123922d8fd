#include "survival/taxonomy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

#include "survival/numeric.hpp"

namespace survival {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Lowest-index maximizer of f over actions, with the tied set.
template <class F>
ActionSelection select_max(std::size_t n, F f) {
    std::vector<double> values(n);
    for (ActionIndex a = 0; a < n; ++a) values[a] = f(a);
    const double best = *std::max_element(values.begin(), values.end());
    ActionSelection out{kNoAction, best, {}};
    for (ActionIndex a = 0; a < n; ++a) {
        if (!tied(values[a], best)) continue;
        if (out.action == kNoAction) {
            out.action = a;
        } else {
            out.tied_with.push_back(a);
        }
    }
    out.value = values[out.action];
    return out;
}

// Membership of `chosen` in argmax of `values`, up to tie tolerance.
bool in_argmax(const std::vector<double>& values, ActionIndex chosen) {
    const double best = *std::max_element(values.begin(), values.end());
    return at_least(values[chosen], best);
}

bool q_argmax_contains(const SolveTables& tables, int t, Units b, ActionIndex a) {
    const auto q = tables.q(t, b);
    const double best = *std::max_element(q.begin(), q.end());
    return at_least(q[a], best);
}

struct ValueBounds {
    double max;
    double min;
};

// Range of v*_{t+1} over positive budgets reachable in one step from budgets 1..b_top.
ValueBounds next_value_bounds(const SurvivalProblem& p, const SolveTables& tables, int t, Units b_top) {
    const Units top = std::min(tables.shape().extent(t + 1), b_top + p.max_positive_reward_at(t));
    ValueBounds vb{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    for (Units b = 1; b <= top; ++b) {
        vb.max = std::max(vb.max, tables.v(t + 1, b));
        vb.min = std::min(vb.min, tables.v(t + 1, b));
    }
    return vb;
}

// Action whose survival dominates every other action at every budget 1..lattice_max, if any.
template <class F>
std::optional<ActionIndex> survival_dominant(const SurvivalProblem& p, Units top, F survival) {
    for (ActionIndex cand = 0; cand < p.num_actions(); ++cand) {
        bool dominant = true;
        for (Units b = 1; b <= top && dominant; ++b) {
            const double s = survival(cand, b);
            for (ActionIndex a = 0; a < p.num_actions() && dominant; ++a) {
                if (a != cand && !at_least(s, survival(a, b))) dominant = false;
            }
        }
        if (dominant) return cand;
    }
    return std::nullopt;
}

void check_cell(const SolveTables& tables, int t, Units b) {
    if (t < 1 || t > tables.horizon()) throw ProblemError("time step outside 1..T");
    if (b <= 0 || !tables.shape().contains(t, b)) throw ProblemError("budget outside the solved table");
}

}  // namespace

ActionSelection risk_neutral_action(const SurvivalProblem& p) {
    return select_max(p.num_actions(), [&](ActionIndex a) { return p.expected_reward(a); });
}

ActionSelection optimistic_action(const SurvivalProblem& p) {
    return select_max(p.num_actions(), [&](ActionIndex a) { return optimistic_reward(p, a); });
}

BehaviorCell classify_cell(const SurvivalProblem& p, const SolveTables& tables, int t, Units b) {
    check_cell(tables, t, b);
    const std::size_t n = p.num_actions();
    std::vector<double> expected(n), optimistic(n), short_surv(n), long_surv(n);
    for (ActionIndex a = 0; a < n; ++a) {
        expected[a] = p.expected_reward(a);
        optimistic[a] = optimistic_reward(p, a);
        short_surv[a] = one_step_survival(p, a, b, t);
        long_surv[a] = action_prefixed_survival(p, tables, t, b, a);
    }
    BehaviorCell cell;
    cell.action = tables.action(t, b);
    cell.risk_neutral = in_argmax(expected, cell.action);
    cell.short_surv = in_argmax(short_surv, cell.action);
    cell.long_surv = in_argmax(long_surv, cell.action);
    cell.risk_seeking = in_argmax(optimistic, cell.action);
    cell.tie = tables.tie(t, b);
    return cell;
}

BehaviorReport classify_behavior(const SurvivalProblem& p, const SolveTables& tables) {
    BehaviorReport report(tables.shape());
    for (int t = 1; t <= tables.horizon(); ++t) {
        for (Units b = 1; b <= tables.shape().extent(t); ++b) report.at(t, b) = classify_cell(p, tables, t, b);
    }
    return report;
}

void write_behavior_csv(std::ostream& out, const SurvivalProblem& p, const BehaviorReport& report) {
    out << "t,budget_units,action_label,risk_neutral,short_surv,long_surv,risk_seeking,tie\n";
    const Units top = report.shape().lattice_max();
    for (int t = 1; t <= report.shape().horizon(); ++t) {
        for (Units b = 0; b <= top; ++b) {
            const auto& c = report.at(t, b);
            out << t << ',' << b << ',' << (c.action == kNoAction ? std::string("none") : p.action(c.action).label())
                << ',' << c.risk_neutral << ',' << c.short_surv << ',' << c.long_surv << ',' << c.risk_seeking << ','
                << c.tie << '\n';
        }
    }
}

Units lemma1_threshold(const SurvivalProblem& p, int t) {
    if (t < 1 || t > p.horizon()) throw ProblemError("time step outside 1..T");
    return static_cast<Units>(p.horizon() - t + 1) * p.outcome_space().max_loss();
}

std::string to_string(ConditionStatus s) {
    switch (s) {
        case ConditionStatus::evaluated: return "evaluated";
        case ConditionStatus::premise_unmet: return "premise_unmet";
        case ConditionStatus::not_evaluable: return "not_evaluable";
    }
    return "unknown";
}

double ConditionReport::quantity(const std::string& name) const {
    for (const auto& [k, v] : quantities) {
        if (k == name) return v;
    }
    return kNaN;
}

ConditionReport check_short_term_aversion(const SurvivalProblem& p, const SolveTables& tables, int t, Units b_hat) {
    check_cell(tables, t, b_hat);
    ConditionReport r;
    r.condition = "short_term_aversion";
    r.t = t;
    r.quantities.emplace_back("b_hat", p.to_real(b_hat));

    const Units top = tables.shape().lattice_max();
    const auto safe = survival_dominant(p, top, [&](ActionIndex a, Units b) { return one_step_survival(p, a, b, t); });
    if (!safe) {
        r.status = ConditionStatus::premise_unmet;
        r.note = "no action dominates one-step survival at every lattice budget";
        return r;
    }
    r.quantities.emplace_back("a_hat", static_cast<double>(*safe));

    double beta_hat = std::numeric_limits<double>::infinity();
    double eps_hat = -std::numeric_limits<double>::infinity();
    double eps_hat_printed = -std::numeric_limits<double>::infinity();
    for (Units b = 1; b <= b_hat; ++b) {
        const double s_hat = one_step_survival(p, *safe, b, t);
        const double r_hat = expected_clipped_reward(p, *safe, b, t);
        for (ActionIndex a = 0; a < p.num_actions(); ++a) {
            const double ra = expected_clipped_reward(p, a, b, t);
            eps_hat = std::max(eps_hat, ra - r_hat);
            eps_hat_printed = std::max(eps_hat_printed, r_hat - ra);
            if (a != *safe) beta_hat = std::min(beta_hat, s_hat - one_step_survival(p, a, b, t));
        }
    }
    if (p.num_actions() == 1) beta_hat = 1.0;
    const auto vb = next_value_bounds(p, tables, t, b_hat);
    r.quantities.emplace_back("beta_hat", beta_hat);
    r.quantities.emplace_back("epsilon_hat", eps_hat);
    r.quantities.emplace_back("epsilon_hat_safe_minus_other", eps_hat_printed);
    r.quantities.emplace_back("v_max_next", vb.max);
    r.quantities.emplace_back("v_min_next", vb.min);

    if (!(beta_hat > 0.0)) {
        r.status = ConditionStatus::premise_unmet;
        r.note = "survival gap is not positive on budgets up to b_hat";
        return r;
    }
    if (!(vb.max > 0.0)) {
        r.status = ConditionStatus::not_evaluable;
        r.note = "upper future value bound is not positive";
        return r;
    }
    r.threshold = (eps_hat + vb.max - vb.min) / vb.max;
    r.holds = beta_hat >= r.threshold;
    for (Units b = 1; b <= b_hat; ++b) {
        CellVerdict cell{b, r.holds, false};
        if (r.holds) {
            std::vector<double> s1(p.num_actions());
            for (ActionIndex a = 0; a < p.num_actions(); ++a) s1[a] = one_step_survival(p, a, b, t);
            cell.verified = in_argmax(s1, tables.action(t, b)) ||
                            (tables.tie(t, b) && q_argmax_contains(tables, t, b, *safe));
            r.guaranteed_behavior_verified = r.guaranteed_behavior_verified && cell.verified;
        }
        r.cells.push_back(cell);
    }
    return r;
}

ConditionReport check_long_term_aversion(const SurvivalProblem& p, const SolveTables& tables, int t, Units b_hat) {
    check_cell(tables, t, b_hat);
    ConditionReport r;
    r.condition = "long_term_aversion";
    r.t = t;
    r.quantities.emplace_back("b_hat", p.to_real(b_hat));

    const Units top = tables.shape().lattice_max();
    auto long_surv = [&](ActionIndex a, Units b) { return action_prefixed_survival(p, tables, t, b, a); };
    const auto safe = survival_dominant(p, top, long_surv);
    if (!safe) {
        r.status = ConditionStatus::premise_unmet;
        r.note = "no action dominates survival to the horizon at every lattice budget";
        return r;
    }
    const ActionIndex bar = optimistic_action(p).action;
    r.quantities.emplace_back("a_hat", static_cast<double>(*safe));
    r.quantities.emplace_back("a_bar", static_cast<double>(bar));

    double beta_hat = std::numeric_limits<double>::infinity();
    double eps_hat = -std::numeric_limits<double>::infinity();
    double eps_hat_optimistic = -std::numeric_limits<double>::infinity();
    for (Units b = 1; b <= b_hat; ++b) {
        std::vector<WeightedReturn> w(p.num_actions());
        for (ActionIndex a = 0; a < p.num_actions(); ++a) w[a] = weighted_action_return(p, tables, t, b, a);
        for (ActionIndex a = 0; a < p.num_actions(); ++a) {
            eps_hat = std::max(eps_hat, w[a].weighted - w[*safe].weighted);
            eps_hat_optimistic = std::max(eps_hat_optimistic, w[bar].weighted - w[a].weighted);
            if (a != *safe) beta_hat = std::min(beta_hat, w[*safe].p_surv - w[a].p_surv);
        }
    }
    if (p.num_actions() == 1) beta_hat = 1.0;
    r.quantities.emplace_back("beta_hat", beta_hat);
    r.quantities.emplace_back("epsilon_hat", eps_hat);
    r.quantities.emplace_back("epsilon_hat_optimistic", eps_hat_optimistic);

    if (!(beta_hat > 0.0)) {
        r.status = ConditionStatus::premise_unmet;
        r.note = "survival gap is not positive on budgets up to b_hat";
        return r;
    }
    // beta_hat >= eps_hat / b_t  <=>  b_t >= eps_hat / beta_hat
    r.threshold = eps_hat / beta_hat;
    r.holds = true;
    for (Units b = 1; b <= b_hat; ++b) {
        CellVerdict cell{b, beta_hat >= eps_hat / p.to_real(b), false};
        if (cell.holds) {
            std::vector<double> s(p.num_actions());
            for (ActionIndex a = 0; a < p.num_actions(); ++a) s[a] = long_surv(a, b);
            // Under a q-tie the survival tie-break looks one step ahead only; the
            // guarantee is that the dominant action is among the optimal ones.
            cell.verified = in_argmax(s, tables.action(t, b)) ||
                            (tables.tie(t, b) && q_argmax_contains(tables, t, b, *safe));
            r.guaranteed_behavior_verified = r.guaranteed_behavior_verified && cell.verified;
        }
        r.holds = r.holds && cell.holds;
        r.cells.push_back(cell);
    }
    return r;
}

Units risk_seeking_budget_cap(const SurvivalProblem& p) {
    Units c = kUnboundedBudget;
    for (const auto& action : p.actions()) {
        for (const auto& e : action.support()) {
            const Units r = p.base_reward(e.outcome);
            if (r < 0) c = std::min(c, -r);
        }
    }
    return c;
}

ConditionReport check_risk_seeking(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget) {
    check_cell(tables, t, budget);
    ConditionReport r;
    r.condition = "risk_seeking";
    r.t = t;
    r.quantities.emplace_back("b_t", p.to_real(budget));
    const Units c = risk_seeking_budget_cap(p);
    r.quantities.emplace_back("c", c == kUnboundedBudget ? std::numeric_limits<double>::infinity() : p.to_real(c));
    if (budget > c) {
        r.status = ConditionStatus::premise_unmet;
        r.note = "budget exceeds c";
        return r;
    }
    for (const auto& s : p.shaping()) {
        if (t >= s.from_t && t <= s.to_t) {
            r.status = ConditionStatus::not_evaluable;
            r.note = "shaping is active at this step";
            return r;
        }
    }
    const ActionIndex bar = optimistic_action(p).action;
    const auto vb = next_value_bounds(p, tables, t, budget);
    r.quantities.emplace_back("a_bar", static_cast<double>(bar));
    r.quantities.emplace_back("v_max_next", vb.max);
    r.quantities.emplace_back("v_min_next", vb.min);

    const double b_real = p.to_real(budget);
    const double r_bar = optimistic_reward(p, bar);
    const double d_bar = desired_probability(p, bar);
    double worst_slack = std::numeric_limits<double>::infinity();
    for (ActionIndex a = 0; a < p.num_actions(); ++a) {
        if (a == bar) continue;
        const double lhs = r_bar - optimistic_reward(p, a);
        const double rhs = vb.max * desired_probability(p, a) - vb.min * d_bar + b_real;
        worst_slack = std::min(worst_slack, lhs - rhs);
    }
    r.quantities.emplace_back("min_slack", worst_slack);
    r.threshold = 0.0;
    r.holds = worst_slack >= 0.0;
    CellVerdict cell{budget, r.holds, false};
    if (r.holds) {
        const ActionIndex chosen = tables.action(t, budget);
        std::vector<double> opt(p.num_actions());
        for (ActionIndex a = 0; a < p.num_actions(); ++a) opt[a] = optimistic_reward(p, a);
        cell.verified = in_argmax(opt, chosen) || (tables.tie(t, budget) && q_argmax_contains(tables, t, budget, bar));
        r.guaranteed_behavior_verified = cell.verified;
    }
    r.cells.push_back(cell);
    return r;
}

}  // namespace survival
