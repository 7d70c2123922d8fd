#include "survival/solver.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <ostream>

#include "survival/detail/transitions.hpp"
#include "survival/numeric.hpp"

namespace survival {

std::string format_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

// Continuation sums over live next budgets, ascending.
struct Continuation {
    double value = 0.0;
    double survival = 0.0;
    double alive = 0.0;
};

Continuation continue_from(std::span<const Transition> next, const ValueTable& v, const ValueTable& surv, int t1) {
    Continuation c;
    for (const auto& tr : next) {
        if (tr.budget == 0) continue;
        c.value += tr.mass * v(t1, tr.budget);
        c.survival += tr.mass * surv(t1, tr.budget);
        c.alive += tr.mass;
    }
    return c;
}

double weighted_return_from(std::span<const Transition> next, Units budget, double g, const ValueTable& surv,
                            const ValueTable& weighted, int t1) {
    double m = 0.0;
    for (const auto& tr : next) {
        if (tr.budget == 0) continue;
        m += tr.mass * (static_cast<double>(tr.budget - budget) / g * surv(t1, tr.budget) + weighted(t1, tr.budget));
    }
    return m;
}

void fill_terminal_row(ValueTable& v, ValueTable& surv, int t_end) {
    const Units top = v.shape().extent(t_end);
    for (Units b = 0; b <= top; ++b) {
        v(t_end, b) = 0.0;
        surv(t_end, b) = b > 0 ? 1.0 : 0.0;
    }
}

void require_live_cell(const SolveTables& tables, int t, Units budget) {
    if (budget <= 0) throw ProblemError("budget 0 is absorbing: the agent has stopped");
    if (t < 1 || t > tables.horizon()) throw ProblemError("time step outside 1..T");
    if (!tables.shape().contains(t, budget)) throw ProblemError("budget outside the solved table");
}

}  // namespace

SolveTables::SolveTables(TableShape shape, std::size_t num_actions)
    : num_actions_(num_actions),
      v_(shape, 0.0),
      q_(shape.total_cells() * num_actions, 0.0),
      policy_(shape),
      surv_(shape, 0.0),
      weighted_return_(shape, 0.0),
      tie_(shape, 0) {}

std::span<const double> SolveTables::q(int t, Units b) const {
    return {q_.data() + shape().cell(t, b) * num_actions_, num_actions_};
}

SolveTables solve(const SurvivalProblem& p) {
    SolveTables tables(TableShape(p), p.num_actions());
    const auto& shape = tables.shape();
    const int horizon = p.horizon();
    const auto n_actions = p.num_actions();
    const double g = static_cast<double>(p.granularity());

    fill_terminal_row(tables.v_, tables.surv_, horizon + 1);

    std::vector<std::vector<Transition>> next(n_actions);
    std::vector<Continuation> cont(n_actions);
    std::vector<double> one_step(n_actions);

    for (int t = horizon; t >= 1; --t) {
        const Units top = shape.extent(t);
        for (Units b = 1; b <= top; ++b) {
            double* q = tables.q_.data() + shape.cell(t, b) * n_actions;
            double best = -std::numeric_limits<double>::infinity();
            for (ActionIndex a = 0; a < n_actions; ++a) {
                const auto& action = p.action(a);
                detail::next_budgets(p, action, b, t, next[a]);
                cont[a] = continue_from(next[a], tables.v_, tables.surv_, t + 1);
                one_step[a] = cont[a].alive;
                q[a] = detail::expected_clipped_units(p, action, b, t) / g + cont[a].value;
                best = std::max(best, q[a]);
            }
            ActionIndex chosen = kNoAction;
            std::size_t near_best = 0;
            for (ActionIndex a = 0; a < n_actions; ++a) {
                if (!tied(q[a], best)) continue;
                ++near_best;
                if (chosen == kNoAction || (one_step[a] > one_step[chosen] && !tied(one_step[a], one_step[chosen]))) {
                    chosen = a;
                }
            }
            tables.policy_.set(t, b, chosen);
            tables.tie_(t, b) = near_best > 1 ? 1 : 0;
            tables.v_(t, b) = q[chosen];
            tables.surv_(t, b) = cont[chosen].survival;
            tables.weighted_return_(t, b) =
                weighted_return_from(next[chosen], b, g, tables.surv_, tables.weighted_return_, t + 1);
        }
    }
    return tables;
}

PolicyEvalTables evaluate_policy(const SurvivalProblem& p, const Policy& policy) {
    const TableShape shape(p);
    if (!(policy.shape() == shape)) throw ProblemError("policy table does not match the problem's table shape");
    PolicyEvalTables out{ValueTable(shape, 0.0), ValueTable(shape, 0.0)};
    const int horizon = p.horizon();
    const double g = static_cast<double>(p.granularity());
    fill_terminal_row(out.v, out.surv, horizon + 1);

    std::vector<Transition> next;
    for (int t = horizon; t >= 1; --t) {
        for (Units b = 1; b <= shape.extent(t); ++b) {
            const ActionIndex a = policy.at(t, b);
            if (a == kNoAction || a >= p.num_actions()) {
                throw ProblemError("policy is undefined or invalid at (t=" + std::to_string(t) +
                                   ", b=" + std::to_string(b) + ")");
            }
            const auto& action = p.action(a);
            detail::next_budgets(p, action, b, t, next);
            const auto c = continue_from(next, out.v, out.surv, t + 1);
            out.v(t, b) = detail::expected_clipped_units(p, action, b, t) / g + c.value;
            out.surv(t, b) = c.survival;
        }
    }
    return out;
}

double action_prefixed_survival(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                ActionIndex a) {
    require_live_cell(tables, t, budget);
    std::vector<Transition> next;
    detail::next_budgets(p, p.action(a), budget, t, next);
    double s = 0.0;
    for (const auto& tr : next) {
        if (tr.budget > 0) s += tr.mass * tables.surv(t + 1, tr.budget);
    }
    return s;
}

WeightedReturn weighted_action_return(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                      ActionIndex a) {
    require_live_cell(tables, t, budget);
    std::vector<Transition> next;
    detail::next_budgets(p, p.action(a), budget, t, next);
    const double g = static_cast<double>(p.granularity());
    WeightedReturn out{0.0, 0.0};
    for (const auto& tr : next) {
        if (tr.budget == 0) continue;
        const double s1 = tables.surv(t + 1, tr.budget);
        out.p_surv += tr.mass * s1;
        out.weighted += tr.mass * (static_cast<double>(tr.budget - budget) / g * s1 +
                                   tables.survival_weighted_return(t + 1, tr.budget));
    }
    return out;
}

ConditionalReturn conditional_return(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                                     ActionIndex a) {
    const auto w = weighted_action_return(p, tables, t, budget, a);
    if (!(w.p_surv > 0.0)) {
        throw ProblemError("survival probability is zero: the conditional return is undefined");
    }
    return {w.weighted / w.p_surv, w.p_surv};
}

HorizonGap horizon_value_gap(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget,
                             ActionIndex a) {
    require_live_cell(tables, t, budget);
    const int horizon = tables.horizon();
    auto shorter = [&](Units b) { return t + 2 <= horizon + 1 ? tables.v(t + 2, b) : 0.0; };

    std::vector<Transition> next;
    detail::next_budgets(p, p.action(a), budget, t, next);
    HorizonGap gap{0.0, std::numeric_limits<double>::infinity(), 0.0};
    double alive = 0.0;
    for (const auto& tr : next) {
        if (tr.budget == 0) continue;
        gap.delta_q += tr.mass * (tables.v(t + 1, tr.budget) - shorter(tr.budget));
        alive += tr.mass;
    }
    const auto& shape = tables.shape();
    const Units top = std::min(shape.extent(t + 1), shape.lattice_max() + p.max_positive_reward_at(t));
    for (Units b = 1; b <= top; ++b) gap.delta_v = std::min(gap.delta_v, tables.v(t + 1, b) - shorter(b));
    gap.lower_bound = gap.delta_v * alive;
    return gap;
}

Occupancy outcome_occupancy(const SurvivalProblem& p, const Policy& policy, OutcomeIndex outcome, int start_t,
                            Units start_budget) {
    if (outcome >= p.num_outcomes()) throw ProblemError("unknown outcome index");
    const auto& shape = policy.shape();
    Occupancy occ{ValueTable(shape, 0.0), 0.0};
    for (int t = 1; t <= shape.horizon(); ++t) {
        for (Units b = 1; b <= shape.extent(t); ++b) {
            const ActionIndex a = policy.at(t, b);
            if (a != kNoAction) occ.instantaneous(t, b) = p.action(a).probability(outcome);
        }
    }
    if (start_budget <= 0 || start_t > shape.horizon()) return occ;
    if (!shape.contains(start_t, start_budget)) throw ProblemError("start cell outside the policy table");

    // Forward push of the probability of being alive at (t, b) without having seen the outcome.
    std::vector<double> mass(static_cast<std::size_t>(shape.extent(start_t)) + 1, 0.0);
    mass[static_cast<std::size_t>(start_budget)] = 1.0;
    for (int t = start_t; t <= shape.horizon(); ++t) {
        std::vector<double> next(static_cast<std::size_t>(shape.extent(t + 1)) + 1, 0.0);
        for (Units b = 1; b < static_cast<Units>(mass.size()); ++b) {
            const double m = mass[static_cast<std::size_t>(b)];
            if (m == 0.0) continue;
            const ActionIndex a = policy.at(t, b);
            if (a == kNoAction) throw ProblemError("policy is undefined at a reachable cell");
            for (const auto& e : p.action(a).support()) {
                if (e.outcome == outcome) {
                    occ.lifetime += m * e.probability;
                    continue;
                }
                const Units nb = b + clipped_reward(p.reward(e.outcome, t, b), b);
                if (nb > 0) next[static_cast<std::size_t>(nb)] += m * e.probability;
            }
        }
        mass = std::move(next);
    }
    return occ;
}

Occupancy outcome_occupancy(const SurvivalProblem& p, const SolveTables& tables, const std::string& outcome_label) {
    return outcome_occupancy(p, tables.policy(), p.outcome_space().index_of(outcome_label), 1, p.initial_budget());
}

void write_tables_csv(std::ostream& out, const SurvivalProblem& p, const SolveTables& tables) {
    out << "t,budget_units,budget_real,action_label,v,surv";
    for (const auto& a : p.actions()) out << ",q_" << a.label();
    out << '\n';
    const Units top = tables.shape().lattice_max();
    for (int t = 1; t <= tables.horizon(); ++t) {
        for (Units b = 0; b <= top; ++b) {
            const ActionIndex a = tables.action(t, b);
            out << t << ',' << b << ',' << format_real(p.to_real(b)) << ','
                << (a == kNoAction ? std::string("none") : p.action(a).label()) << ',' << format_real(tables.v(t, b))
                << ',' << format_real(tables.surv(t, b));
            for (double qa : tables.q(t, b)) out << ',' << format_real(qa);
            out << '\n';
        }
    }
}

}  // namespace survival
