#include <cmath>
#include <sstream>

#include "doctest.h"
#include "survival/scenarios.hpp"
#include "survival/solver.hpp"
#include "survival/taxonomy.hpp"
#include "test_support.hpp"

using namespace survival;

TEST_CASE("risk_neutral_action and optimistic_action") {
    const auto p = scenarios::assistant();
    auto sel = risk_neutral_action(p);
    CHECK(sel.action == p.action_index("a_m"));
    CHECK(sel.value == doctest::Approx(7.0).epsilon(1e-15));
    CHECK(sel.tied_with.empty());
    sel = optimistic_action(p);
    CHECK(sel.action == p.action_index("a_e"));
    CHECK(sel.value == doctest::Approx(9.5).epsilon(1e-15));

    const auto g = scenarios::gambler();
    CHECK(risk_neutral_action(g).action == g.action_index("silver"));
    CHECK(risk_neutral_action(g).value == 1.0);
    CHECK(optimistic_action(g).action == g.action_index("golden"));
    CHECK(optimistic_action(g).value == 5.0);

    RawProblem raw;
    raw.outcomes = {{"one", 1}, {"two", 2}, {"three", 3}};
    raw.actions = {{"x", {{"two", 1.0}}}, {"y", {{"three", 1.0}}}, {"z", {{"one", 1.0}}}};
    raw.initial_budget = 1;
    raw.horizon = 1;
    const auto det = validate_problem(raw);
    CHECK(risk_neutral_action(det).action == optimistic_action(det).action);

    raw.actions = {{"only", {{"one", 0.5}, {"three", 0.5}}}};
    CHECK(risk_neutral_action(validate_problem(raw)).action == 0);

    raw.actions = {{"x", {{"two", 1.0}}}, {"y", {{"one", 0.5}, {"three", 0.5}}}};
    sel = risk_neutral_action(validate_problem(raw));
    CHECK(sel.action == 0);
    REQUIRE(sel.tied_with.size() == 1);
    CHECK(sel.tied_with[0] == 1);
}

TEST_CASE("classify_behavior on the gambler") {
    auto g = scenarios::gambler(1, 3);
    auto report = classify_behavior(g, solve(g));
    CHECK(report.at(1, 1).action == g.action_index("golden"));
    CHECK(report.at(1, 1).risk_seeking);
    CHECK_FALSE(report.at(1, 1).risk_neutral);
    CHECK_FALSE(report.at(1, 1).short_surv);
    CHECK(report.at(2, 2).tie);
    CHECK(report.at(1, 0).action == kNoAction);

    g = scenarios::gambler(1, 10);
    report = classify_behavior(g, solve(g));
    CHECK(report.at(1, 1).risk_neutral);
    CHECK(report.at(1, 1).short_surv);
    CHECK_FALSE(report.at(1, 1).risk_seeking);

    std::ostringstream out;
    write_behavior_csv(out, g, report);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,budget_units,action_label,risk_neutral,short_surv,long_surv,risk_seeking,tie");
    std::getline(in, line);
    CHECK(line == "1,0,none,0,0,0,0,0");
    std::getline(in, line);
    CHECK(line == "1,1,silver,1,1,1,0,0");
}

TEST_CASE("lemma1_threshold") {
    const auto p = scenarios::assistant(10, 5);
    CHECK(lemma1_threshold(p, 3) == 300);
    CHECK(lemma1_threshold(p, 5) == 100);
    const auto g = scenarios::gambler(1, 10);
    CHECK(lemma1_threshold(g, 5) == 60);
    CHECK(lemma1_threshold(g, 10) == 10);
    for (int t = 1; t < 10; ++t) CHECK(lemma1_threshold(g, t) >= lemma1_threshold(g, t + 1));
    CHECK_THROWS_AS(lemma1_threshold(g, 11), ProblemError);
}

TEST_CASE("a budget of (T - t) times the sup norm does not force risk neutrality") {
    // Two steps, b = 10 = (T - t) * max|R|: landing exactly on 0 forfeits the last step.
    RawProblem raw;
    raw.outcomes = {{"loss", -10}, {"gain", 10}, {"small", 3}};
    raw.actions = {{"risky", {{"loss", 0.3}, {"gain", 0.7}}}, {"steady", {{"small", 1.0}}}};
    raw.initial_budget = 10;
    raw.horizon = 2;
    const auto p = validate_problem(raw);
    const auto tables = solve(p);
    CHECK(risk_neutral_action(p).action == p.action_index("risky"));
    CHECK(tables.action(1, 10) == p.action_index("steady"));
    CHECK(tables.v(1, 10) == doctest::Approx(7.0));
    CHECK(tables.action(1, lemma1_threshold(p, 1)) == p.action_index("risky"));
}

TEST_CASE("risk-neutral threshold property over random instances") {
    testing::InstanceSpec spec;
    spec.max_actions = 5;
    spec.max_outcomes = 8;
    spec.max_horizon = 12;
    for (std::uint64_t seed = 0; seed < 150; ++seed) {
        CAPTURE(seed);
        const auto p = testing::random_instance(seed, spec);
        const auto tables = solve(p);
        const auto report = classify_behavior(p, tables);
        for (int t = 1; t <= p.horizon(); ++t) {
            for (Units b = std::max<Units>(1, lemma1_threshold(p, t)); b <= tables.shape().extent(t); ++b) {
                CHECK(report.at(t, b).risk_neutral);
            }
        }
    }
}

TEST_CASE("short-term survival condition on the assistant") {
    const auto p = scenarios::assistant(10, 5);
    const auto tables = solve(p);
    const auto r = check_short_term_aversion(p, tables, 1, 20);
    CHECK(r.status == ConditionStatus::evaluated);
    CHECK(r.quantity("a_hat") == static_cast<double>(p.action_index("a_o")));
    CHECK(r.quantity("beta_hat") == doctest::Approx(0.05).epsilon(1e-12));
    // a_e over a_o peaks at b = 1: 9.5 - 0.05 - 1.
    CHECK(r.quantity("epsilon_hat") == doctest::Approx(8.45));
    CHECK(r.cells.size() == 20);
    CHECK(r.guaranteed_behavior_verified);

    // At the horizon both value bounds are zero.
    const auto last = check_short_term_aversion(p, tables, 5, 20);
    CHECK(last.status == ConditionStatus::not_evaluable);
}

TEST_CASE("short-term condition with a safe action that also pays best") {
    RawProblem raw;
    raw.outcomes = {{"crash", -4}, {"ok", 2}, {"meh", 1}};
    raw.actions = {{"safe", {{"ok", 1.0}}}, {"risky", {{"crash", 0.5}, {"meh", 0.5}}}};
    raw.initial_budget = 3;
    raw.horizon = 6;
    const auto p = validate_problem(raw);
    const auto tables = solve(p);
    for (int t = 1; t < p.horizon(); ++t) {
        const auto r = check_short_term_aversion(p, tables, t, 3);
        REQUIRE(r.status == ConditionStatus::evaluated);
        CHECK(r.quantity("epsilon_hat") <= 0.0);
        const double vmax = r.quantity("v_max_next");
        const double vmin = r.quantity("v_min_next");
        if (r.quantity("beta_hat") * vmax >= vmax - vmin) CHECK(r.holds);
        CHECK(r.guaranteed_behavior_verified);
    }
}

TEST_CASE("short-term condition reports an unmet premise") {
    const auto g = scenarios::gambler(1, 4);
    const auto tables = solve(g);
    // Silver never dies, so it dominates one-step survival.
    CHECK(check_short_term_aversion(g, tables, 1, 5).status == ConditionStatus::evaluated);
    RawProblem raw;
    raw.outcomes = {{"bad", -3}, {"good", 5}, {"worse", -1}};
    raw.actions = {{"a", {{"bad", 0.2}, {"good", 0.8}}}, {"b", {{"worse", 0.5}, {"good", 0.5}}}};
    raw.initial_budget = 2;
    raw.horizon = 3;
    const auto p = validate_problem(raw);
    // a survives better at b = 1, b survives better at b = 2.
    CHECK(check_short_term_aversion(p, solve(p), 1, 2).status == ConditionStatus::premise_unmet);
}

TEST_CASE("long-term survival condition") {
    const auto g = scenarios::gambler(1, 6);
    const auto tables = solve(g);
    for (int t = 1; t <= 6; ++t) {
        const auto r = check_long_term_aversion(g, tables, t, 15);
        if (r.status != ConditionStatus::evaluated) continue;
        CHECK(r.guaranteed_behavior_verified);
        for (const auto& c : r.cells) {
            if (c.holds) CHECK(tables.action(t, c.budget) == g.action_index("silver"));
        }
    }
    // Silver dominates at the last step and pays 1 with certainty.
    // Above b = 10 the golden coin survives its last flip too, so the gap closes there.
    CHECK(check_long_term_aversion(g, tables, 6, 15).status == ConditionStatus::premise_unmet);
    const auto r = check_long_term_aversion(g, tables, 6, 10);
    CHECK(r.status == ConditionStatus::evaluated);
    CHECK(r.quantity("a_hat") == static_cast<double>(g.action_index("silver")));
}

TEST_CASE("long-term condition holds everywhere when the dominant action also returns best") {
    RawProblem raw;
    raw.outcomes = {{"crash", -4}, {"ok", 2}, {"meh", 1}};
    raw.actions = {{"safe", {{"ok", 1.0}}}, {"risky", {{"crash", 0.5}, {"meh", 0.5}}}};
    raw.initial_budget = 3;
    raw.horizon = 5;
    const auto p = validate_problem(raw);
    const auto tables = solve(p);
    const auto r = check_long_term_aversion(p, tables, 2, 4);
    REQUIRE(r.status == ConditionStatus::evaluated);
    CHECK(r.quantity("epsilon_hat") <= 0.0);
    CHECK(r.holds);
    CHECK(r.guaranteed_behavior_verified);
}

TEST_CASE("risk-seeking condition") {
    const auto g = scenarios::gambler(1, 4);
    const auto gt = solve(g);
    CHECK(risk_seeking_budget_cap(g) == 10);
    auto r = check_risk_seeking(g, gt, 4, 1);
    CHECK(r.status == ConditionStatus::evaluated);
    CHECK(r.holds);
    CHECK(r.quantity("min_slack") == doctest::Approx(3.0));
    CHECK(gt.action(4, 1) == g.action_index("golden"));
    CHECK(r.guaranteed_behavior_verified);
    CHECK(check_risk_seeking(g, gt, 4, 11).status == ConditionStatus::premise_unmet);

    const auto p = scenarios::assistant(10, 2);
    const auto pt = solve(p);
    CHECK(risk_seeking_budget_cap(p) == 20);
    for (Units b = 1; b <= 20; ++b) CHECK(pt.action(2, b) == p.action_index("a_e"));
    for (Units b = 1; b <= 20; ++b) {
        r = check_risk_seeking(p, pt, 2, b);
        CHECK(r.status == ConditionStatus::evaluated);
        if (r.holds) CHECK(r.guaranteed_behavior_verified);
    }

    RawProblem raw;
    raw.outcomes = {{"a", 1}, {"b", 4}};
    raw.actions = {{"x", {{"a", 1.0}}}, {"y", {{"a", 0.5}, {"b", 0.5}}}};
    raw.initial_budget = 50;
    raw.horizon = 1;
    const auto np = validate_problem(raw);
    CHECK(risk_seeking_budget_cap(np) == kUnboundedBudget);
    CHECK(check_risk_seeking(np, solve(np), 1, 50).status == ConditionStatus::evaluated);
}

TEST_CASE("risk-seeking condition holds near the horizon at small budgets") {
    // With nothing left to lose after this step, the right side is just b_t.
    const auto g = scenarios::gambler(1, 2);
    const auto tables = solve(g);
    const auto r = check_risk_seeking(g, tables, 2, 1);
    CHECK(r.quantity("v_max_next") == 0.0);
    CHECK(r.quantity("v_min_next") == 0.0);
    CHECK(r.holds);
}

TEST_CASE("condition checkers are sound over random instances") {
    testing::InstanceSpec spec;
    spec.max_actions = 5;
    spec.max_outcomes = 8;
    spec.max_horizon = 12;
    int evaluated = 0, held = 0;
    for (std::uint64_t seed = 0; seed < 120; ++seed) {
        CAPTURE(seed);
        const auto p = testing::random_instance(seed, spec);
        const auto tables = solve(p);
        for (int t = 1; t <= p.horizon(); ++t) {
            for (Units b_hat : {Units{1}, Units{4}, Units{12}, tables.shape().lattice_max()}) {
                if (b_hat < 1 || b_hat > tables.shape().extent(t)) continue;
                for (const auto& r : {check_short_term_aversion(p, tables, t, b_hat),
                                      check_long_term_aversion(p, tables, t, b_hat)}) {
                    if (r.status != ConditionStatus::evaluated) continue;
                    ++evaluated;
                    for (const auto& c : r.cells) {
                        if (!c.holds) continue;
                        ++held;
                        CAPTURE(r.condition);
                        CAPTURE(t);
                        CAPTURE(c.budget);
                        CHECK(c.verified);
                    }
                    CHECK(r.guaranteed_behavior_verified);
                }
            }
            const Units cap = std::min<Units>(risk_seeking_budget_cap(p), 30);
            for (Units b = 1; b <= cap && b <= tables.shape().extent(t); ++b) {
                const auto r = check_risk_seeking(p, tables, t, b);
                if (r.status != ConditionStatus::evaluated) continue;
                ++evaluated;
                if (r.holds) {
                    ++held;
                    CHECK(r.guaranteed_behavior_verified);
                }
            }
        }
    }
    MESSAGE("evaluated reports: " << evaluated << ", holding cells: " << held);
    CHECK(held > 0);
}

TEST_CASE("behavior flags are invariant under a change of reward unit") {
    testing::InstanceSpec spec;
    spec.max_granularity = 1;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto p = testing::random_instance(seed, spec);
        RawProblem raw;
        raw.granularity = 3;
        for (const auto& o : p.outcome_space().outcomes()) raw.outcomes.push_back({o.label, p.to_real(o.reward)});
        for (const auto& a : p.actions()) {
            RawAction ra{a.label(), {}};
            for (const auto& e : a.support()) ra.probs.emplace_back(p.outcome_space()[e.outcome].label, e.probability);
            raw.actions.push_back(ra);
        }
        raw.initial_budget = p.to_real(p.initial_budget());
        raw.horizon = p.horizon();
        const auto scaled = validate_problem(raw);
        const auto r1 = classify_behavior(p, solve(p));
        const auto r3 = classify_behavior(scaled, solve(scaled));
        for (int t = 1; t <= p.horizon(); ++t) {
            for (Units b = 1; b <= r1.shape().extent(t); ++b) CHECK(r1.at(t, b) == r3.at(t, 3 * b));
        }
    }
}

TEST_CASE("short-term condition on the assistant at long horizons") {
    // T = 200 already shows the safe action at low budgets, but the sufficient
    // condition needs the value spread to shrink further relative to v_max.
    auto p = scenarios::assistant(10, 200);
    auto tables = solve(p);
    for (Units b = 1; b <= 20; ++b) CHECK(tables.action(1, b) == p.action_index("a_o"));
    auto r = check_short_term_aversion(p, tables, 1, 20);
    CHECK(r.status == ConditionStatus::evaluated);
    CHECK_FALSE(r.holds);
    CHECK(r.threshold > 0.05);

    p = scenarios::assistant(10, 500);
    tables = solve(p);
    r = check_short_term_aversion(p, tables, 1, 20);
    CHECK(r.holds);
    CHECK(r.guaranteed_behavior_verified);
    for (Units b = 1; b <= 20; ++b) CHECK(tables.action(1, b) == p.action_index("a_o"));

    const auto l = check_long_term_aversion(p, tables, 1, 5);
    CHECK(l.status == ConditionStatus::evaluated);
    CHECK(l.holds);
    CHECK(l.guaranteed_behavior_verified);
}
