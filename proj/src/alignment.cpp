#include "survival/alignment.hpp"

#include <algorithm>
#include <limits>

#include "survival/detail/transitions.hpp"
#include "survival/numeric.hpp"

namespace survival {

namespace {

// Unclipped expected base reward of a, real units.
double principal_step_reward(const SurvivalProblem& p, ActionIndex a) { return p.expected_reward(a); }

double continuation(std::span<const Transition> next, const ValueTable& v, int t1) {
    double c = 0.0;
    for (const auto& tr : next) {
        if (tr.budget > 0) c += tr.mass * v(t1, tr.budget);
    }
    return c;
}

double alive_mass(std::span<const Transition> next) {
    double m = 0.0;
    for (const auto& tr : next) {
        if (tr.budget > 0) m += tr.mass;
    }
    return m;
}

struct PrincipalDp {
    PrincipalSolution solution;
    std::vector<double> q;  // cell * n_actions + a
};

PrincipalDp principal_dp(const SurvivalProblem& p) {
    const TableShape shape(p);
    const std::size_t n = p.num_actions();
    PrincipalDp dp{{ValueTable(shape, 0.0), Policy(shape)}, std::vector<double>(shape.total_cells() * n, 0.0)};
    auto& v = dp.solution.v;
    std::vector<std::vector<Transition>> next(n);
    std::vector<double> alive(n);
    for (int t = p.horizon(); t >= 1; --t) {
        for (Units b = 1; b <= shape.extent(t); ++b) {
            double* q = dp.q.data() + shape.cell(t, b) * n;
            double best = -std::numeric_limits<double>::infinity();
            for (ActionIndex a = 0; a < n; ++a) {
                detail::next_budgets(p, p.action(a), b, t, next[a]);
                alive[a] = alive_mass(next[a]);
                q[a] = principal_step_reward(p, a) + continuation(next[a], v, t + 1);
                best = std::max(best, q[a]);
            }
            ActionIndex chosen = kNoAction;
            for (ActionIndex a = 0; a < n; ++a) {
                if (!tied(q[a], best)) continue;
                if (chosen == kNoAction || (alive[a] > alive[chosen] && !tied(alive[a], alive[chosen]))) chosen = a;
            }
            dp.solution.policy.set(t, b, chosen);
            v(t, b) = q[chosen];
        }
    }
    return dp;
}

// Lifetime occupancy of `avoid` from (t, budget) under the optimal policy of `shaped`.
ShapingStep try_bonus(const SurvivalProblem& shaped, OutcomeIndex avoid, int t, Units budget, Units bonus) {
    const auto tables = solve(shaped);
    const auto occ = outcome_occupancy(shaped, tables.policy(), avoid, t, budget);
    return {bonus, occ.lifetime, tables.action(t, budget), occ.lifetime == 0.0};
}

SurvivalProblem with_bonus(const SurvivalProblem& p, const std::vector<OutcomeIndex>& outcomes, int t, Units bonus) {
    auto terms = p.shaping();
    for (OutcomeIndex y : outcomes) {
        ShapingTerm term;
        term.outcome = y;
        term.bonus = bonus;
        term.from_t = t;
        term.to_t = t;
        terms.push_back(term);
    }
    return p.with_shaping(std::move(terms));
}

bool disjoint(const ActionModel& a, const ActionModel& b) {
    for (const auto& e : a.support()) {
        if (b.emits(e.outcome)) return false;
    }
    return true;
}

struct Search {
    bool passed = false;
    Units bonus = 0;
    std::vector<ShapingStep> audit;
};

// Exponential bracketing then bisection over integer bonuses in [1, cap].
Search search_bonus(const SurvivalProblem& p, const std::vector<OutcomeIndex>& boosted, OutcomeIndex avoid, int t,
                    Units budget, Units cap) {
    Search s;
    auto probe = [&](Units bonus) {
        const auto step = try_bonus(with_bonus(p, boosted, t, bonus), avoid, t, budget, bonus);
        s.audit.push_back(step);
        return step.passed;
    };
    Units lo = 0;
    Units hi = 1;
    while (true) {
        if (hi >= cap) hi = cap;
        if (probe(hi)) break;
        if (hi == cap) return s;
        lo = hi;
        hi *= 2;
    }
    while (hi - lo > 1) {
        const Units mid = lo + (hi - lo) / 2;
        if (probe(mid)) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    s.passed = true;
    s.bonus = hi;
    return s;
}

}  // namespace

ValueTable principal_value(const SurvivalProblem& p, const Policy& policy) {
    const TableShape shape(p);
    if (!(policy.shape() == shape)) throw ProblemError("policy table does not match the problem's table shape");
    ValueTable v(shape, 0.0);
    std::vector<Transition> next;
    for (int t = p.horizon(); t >= 1; --t) {
        for (Units b = 1; b <= shape.extent(t); ++b) {
            const ActionIndex a = policy.at(t, b);
            if (a == kNoAction || a >= p.num_actions()) throw ProblemError("policy is undefined or invalid at a live cell");
            detail::next_budgets(p, p.action(a), b, t, next);
            v(t, b) = principal_step_reward(p, a) + continuation(next, v, t + 1);
        }
    }
    return v;
}

PrincipalSolution solve_principal(const SurvivalProblem& p) { return principal_dp(p).solution; }

PrincipalReport misalignment_report(const SurvivalProblem& p) {
    PrincipalReport report;
    const Units b0 = p.initial_budget();
    const auto agent = solve(p);
    const auto principal = principal_dp(p);
    const auto under_agent = principal_value(p, agent.policy());
    if (b0 > 0) {
        report.agent_value = agent.v(1, b0);
        report.principal_value_under_agent_policy = under_agent(1, b0);
        report.principal_optimal_value = principal.solution.v(1, b0);
    }
    report.misalignment_gap = report.principal_optimal_value - report.principal_value_under_agent_policy;

    const auto& shape = agent.shape();
    const std::size_t n = p.num_actions();
    for (int t = 1; t <= p.horizon(); ++t) {
        for (Units b = 1; b <= shape.lattice_max(); ++b) {
            const ActionIndex a = agent.action(t, b);
            if (a == principal.solution.policy.at(t, b)) continue;
            const double* q = principal.q.data() + shape.cell(t, b) * n;
            if (!tied(q[a], principal.solution.v(t, b))) report.divergence_cells.emplace_back(t, b);
        }
    }
    return report;
}

ShapingResult find_shaping(const SurvivalProblem& p, const std::string& avoid_outcome, int t, Units budget) {
    const OutcomeIndex avoid = p.outcome_space().index_of(avoid_outcome);
    if (t < 1 || t > p.horizon()) throw ProblemError("time step outside 1..T");
    if (budget <= 0) throw ProblemError("budget 0 is absorbing: the agent has stopped");
    if (!TableShape(p).contains(t, budget)) throw ProblemError("budget outside the solved table");

    ShapingResult result;
    std::vector<ActionIndex> emitters;
    for (ActionIndex a = 0; a < p.num_actions(); ++a) {
        if (p.action(a).emits(avoid)) emitters.push_back(a);
    }
    if (emitters.empty()) {
        result.feasible = true;
        result.shaped_problem = p;
        result.note = "no action can emit " + avoid_outcome;
        return result;
    }

    std::vector<ActionIndex> candidates;
    std::string overlaps;
    for (ActionIndex a = 0; a < p.num_actions(); ++a) {
        if (p.action(a).emits(avoid)) continue;
        const auto clash = std::find_if(emitters.begin(), emitters.end(),
                                        [&](ActionIndex e) { return !disjoint(p.action(a), p.action(e)); });
        if (clash == emitters.end()) {
            candidates.push_back(a);
            continue;
        }
        for (const auto& e : p.action(a).support()) {
            if (p.action(*clash).emits(e.outcome)) {
                if (!overlaps.empty()) overlaps += "; ";
                overlaps += p.action(a).label() + " shares " + p.outcome_space()[e.outcome].label + " with " +
                            p.action(*clash).label();
                break;
            }
        }
    }
    if (candidates.empty()) {
        result.note = "no action has support disjoint from every action that can emit " + avoid_outcome;
        if (!overlaps.empty()) result.note += " (" + overlaps + ")";
        return result;
    }
    result.feasible = true;

    // Nothing to do if the unshaped agent already avoids the outcome.
    const auto base = try_bonus(p, avoid, t, budget, 0);
    result.audit.push_back(base);
    if (base.passed) {
        result.shaped_problem = p;
        result.note = "the unshaped optimal policy already avoids " + avoid_outcome;
        return result;
    }

    const Units cap = 2 * static_cast<Units>(p.horizon()) * p.outcome_space().sup_norm();
    std::optional<Search> best;
    for (ActionIndex a : candidates) {
        std::vector<OutcomeIndex> boosted;
        for (const auto& e : p.action(a).support()) boosted.push_back(e.outcome);
        auto s = search_bonus(p, boosted, avoid, t, budget, std::max<Units>(cap, 1));
        result.audit.insert(result.audit.end(), s.audit.begin(), s.audit.end());
        if (s.passed && (!best || s.bonus < best->bonus)) {
            best = std::move(s);
            result.boosted_action = a;
            result.boosted_outcomes = std::move(boosted);
        }
    }
    if (!best) {
        result.cap_exceeded = true;
        result.note = "no bonus up to the search cap of " + format_real(p.to_real(cap)) + " passed verification";
        return result;
    }
    result.bonus = best->bonus;
    result.shaped_problem = with_bonus(p, result.boosted_outcomes, t, result.bonus);
    const auto tables = solve(*result.shaped_problem);
    result.lifetime_occupancy = outcome_occupancy(*result.shaped_problem, tables.policy(), avoid, t, budget).lifetime;
    return result;
}

bool liability_insensitive(const SurvivalProblem& p, OutcomeIndex outcome, int t, Units budget) {
    const Units r = p.base_reward(outcome);
    if (r >= 0) return false;
    Units reach = budget;
    for (int s = t; s < p.horizon(); ++s) reach += p.max_positive_reward_at(s);
    return reach <= -r;
}

bool fully_clipped(const SurvivalProblem& p, ActionIndex a, int t, Units budget) {
    for (const auto& e : p.action(a).support()) {
        const Units r = p.reward(e.outcome, t, budget);
        if (r < 0 && r > -budget) return false;
    }
    return true;
}

double horizon_extension_estimate(const SurvivalProblem& p, const SolveTables& tables, Units budget,
                                  ActionIndex safe_action, ActionIndex risky_action) {
    if (budget <= 0 || !tables.shape().contains(1, budget)) throw ProblemError("budget outside the solved table");
    const double gap = one_step_survival(p, safe_action, 1) - one_step_survival(p, risky_action, 1);
    if (!(gap > 0.0)) throw ProblemError("the safe action does not survive better at the smallest budget");
    return tables.v(1, budget) / gap;
}

}  // namespace survival
