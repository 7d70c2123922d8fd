#include <cmath>
#include <sstream>

#include "doctest.h"
#include "survival/scenarios.hpp"
#include "survival/sim.hpp"
#include "survival/solver.hpp"
#include "test_support.hpp"

using namespace survival;
using namespace survival::sim;

TEST_CASE("Rng streams") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 100; ++i) {
        const auto x = a.next();
        CHECK(x == b.next());
        CHECK(x != c.next());
    }
    // Reference SplitMix64 outputs for seed 0.
    Rng z(0);
    CHECK(z.next() == 0xe220a8397b1dcdafULL);
    CHECK(z.next() == 0x6e789e6aa1b965f4ULL);
    CHECK(stream_seed(7, 0) != stream_seed(7, 1));
    CHECK(stream_seed(0, 1) != stream_seed(1, 0));

    Rng r(5);
    for (int i = 0; i < 1000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        CHECK(r.below(7) < 7);
        CHECK(r.exponential() >= 0.0);
    }
    CHECK_THROWS_AS(r.below(0), ProblemError);
}

TEST_CASE("rollout examples") {
    SUBCASE("silver always") {
        const auto g = scenarios::gambler(1, 3);
        const auto silver = Policy::constant(g, g.action_index("silver"));
        for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
            const auto trace = rollout(g, silver, seed);
            REQUIRE(trace.steps.size() == 3);
            for (const auto& s : trace.steps) CHECK(s.clipped_reward == 1);
            CHECK(trace.final_budget() == 4);
            CHECK_FALSE(trace.terminated_early);
            CHECK(trace.survived());
        }
    }
    SUBCASE("golden always, first draw loses") {
        const auto g = scenarios::gambler(1, 3);
        const auto golden = Policy::constant(g, g.action_index("golden"));
        const auto bad = g.outcome_space().index_of("bad");
        std::uint64_t seed = 0;
        while (Rng(seed).uniform() >= 0.5) ++seed;
        const auto trace = rollout(g, golden, seed);
        REQUIRE(trace.steps.size() == 1);
        CHECK(trace.steps[0].outcome == bad);
        CHECK(trace.steps[0].clipped_reward == -1);
        CHECK(trace.steps[0].budget_after == 0);
        CHECK(trace.terminated_early);
        CHECK(trace.total_clipped_return == -1);
        CHECK(trace.total_principal_return == -10);
    }
    SUBCASE("death on the last step is not early") {
        const auto g = scenarios::gambler(1, 1);
        const auto golden = Policy::constant(g, g.action_index("golden"));
        std::uint64_t seed = 0;
        while (Rng(seed).uniform() >= 0.5) ++seed;
        const auto trace = rollout(g, golden, seed);
        CHECK(trace.final_budget() == 0);
        CHECK_FALSE(trace.terminated_early);
        CHECK_FALSE(trace.survived());
    }
    SUBCASE("replay") {
        const auto p = scenarios::assistant(5, 30);
        const auto policy = solve(p).policy();
        const auto first = rollout(p, policy, 2024);
        const auto second = rollout(p, policy, 2024);
        REQUIRE(first.steps.size() == second.steps.size());
        for (std::size_t i = 0; i < first.steps.size(); ++i) {
            CHECK(first.steps[i].action == second.steps[i].action);
            CHECK(first.steps[i].outcome == second.steps[i].outcome);
            CHECK(first.steps[i].budget_after == second.steps[i].budget_after);
        }
    }
    SUBCASE("undefined policy") {
        const auto g = scenarios::gambler(1, 3);
        CHECK_THROWS_AS(rollout(g, Policy(TableShape(g)), 1), ProblemError);
    }
}

TEST_CASE("trace conservation") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto p = testing::random_instance(seed);
        const auto policy = solve(p).policy();
        const auto trace = rollout(p, policy, seed);
        CHECK(trace.total_clipped_return == trace.final_budget() - p.initial_budget());
        Units b = p.initial_budget();
        for (std::size_t i = 0; i < trace.steps.size(); ++i) {
            const auto& s = trace.steps[i];
            CHECK(s.budget_before == b);
            CHECK(s.budget_after == s.budget_before + s.clipped_reward);
            CHECK(s.budget_after >= 0);
            if (s.budget_after == 0) CHECK(i + 1 == trace.steps.size());
            b = s.budget_after;
        }
        const bool early = !trace.steps.empty() && trace.final_budget() == 0 &&
                           trace.steps.back().t < p.horizon();
        CHECK(trace.terminated_early == early);
    }
}

TEST_CASE("estimate examples") {
    const auto g = scenarios::gambler(1, 3);
    const auto opt = estimate(g, solve(g).policy(), 100000, 11);
    CHECK(std::abs(opt.mean_return - 5.875) <= 3.0 * opt.std_error);

    const auto silver = estimate(g, Policy::constant(g, g.action_index("silver")), 1000, 3);
    CHECK(silver.survival_rate == 1.0);
    CHECK(silver.mean_return == 3.0);
    CHECK(silver.std_error == 0.0);

    const auto g1 = scenarios::gambler(1, 1);
    const auto coin = estimate(g1, Policy::constant(g1, g1.action_index("golden")), 100000, 5);
    CHECK(std::abs(coin.survival_rate - 0.5) <= 3.0 * coin.survival_std_error);
    CHECK(coin.mean_principal_return == doctest::Approx(0.0).epsilon(0.1).scale(10.0));

    CHECK_THROWS_AS(estimate(g, solve(g).policy(), 0, 1), ProblemError);
}

TEST_CASE("DP and Monte Carlo agree on random instances") {
    testing::InstanceSpec spec;
    spec.max_horizon = 8;
    spec.max_actions = 4;
    spec.max_outcomes = 5;
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        CAPTURE(seed);
        const auto p = testing::random_instance(1000 + seed, spec);
        if (p.initial_budget() == 0) continue;
        const auto tables = solve(p);
        const auto s = estimate(p, tables.policy(), 100000, seed);
        const double v = tables.v(1, p.initial_budget());
        const double surv = tables.surv(1, p.initial_budget());
        CHECK(std::abs(s.mean_return - v) <= 3.0 * s.std_error + 1e-12);
        const double binomial_se = std::sqrt(surv * (1.0 - surv) / static_cast<double>(s.n));
        CHECK(std::abs(s.survival_rate - surv) <= 3.0 * binomial_se + 1e-12);
    }
}

TEST_CASE("random_problem") {
    SUBCASE("shape of the ten-action instance") {
        const auto p = random_problem(10, 41, 4, 20, 7);
        REQUIRE(p.num_actions() == 10);
        REQUIRE(p.num_outcomes() == 41);
        for (OutcomeIndex y = 0; y < 41; ++y) CHECK(p.base_reward(y) == static_cast<Units>(y) - 20);
        CHECK(p.outcome_space()[0].label == "y-20");
        for (const auto& a : p.actions()) {
            CHECK(a.support().size() == 4);
            double total = 0.0;
            for (const auto& e : a.support()) total += e.probability;
            CHECK(std::abs(total - 1.0) <= 1e-12);
        }
    }
    SUBCASE("single action over everything") {
        const auto p = random_problem(1, 3, 3, 1, 0);
        REQUIRE(p.num_actions() == 1);
        CHECK(p.action(0).support().size() == 3);
    }
    SUBCASE("determinism") {
        const auto a = random_problem(10, 41, 4, 20, 123);
        const auto b = random_problem(10, 41, 4, 20, 123);
        const auto c = random_problem(10, 41, 4, 20, 124);
        bool differs = false;
        for (ActionIndex i = 0; i < 10; ++i) {
            const auto& sa = a.action(i).support();
            const auto& sb = b.action(i).support();
            const auto& sc = c.action(i).support();
            REQUIRE(sa.size() == sb.size());
            for (std::size_t k = 0; k < sa.size(); ++k) {
                CHECK(sa[k].outcome == sb[k].outcome);
                CHECK(sa[k].probability == sb[k].probability);
                if (sa[k].outcome != sc[k].outcome || sa[k].probability != sc[k].probability) differs = true;
            }
        }
        CHECK(differs);
    }
    SUBCASE("invalid sizes") {
        CHECK_THROWS_AS(random_problem(0, 3, 1, 1, 0), ProblemError);
        CHECK_THROWS_AS(random_problem(2, 4, 2, 1, 0), ProblemError);
        CHECK_THROWS_AS(random_problem(2, 3, 4, 1, 0), ProblemError);
        CHECK_THROWS_AS(random_problem(2, 3, 0, 1, 0), ProblemError);
    }
}

TEST_CASE("generator marginals") {
    constexpr std::size_t kSeeds = 2000;
    constexpr std::size_t kActions = 10, kOutcomes = 41, kSupport = 4;
    std::vector<double> hits(kOutcomes, 0.0);
    std::vector<double> slot_weight(kSupport, 0.0);
    for (std::uint64_t seed = 0; seed < kSeeds; ++seed) {
        const auto p = random_problem(kActions, kOutcomes, kSupport, 20, seed);
        for (const auto& a : p.actions()) {
            for (std::size_t k = 0; k < kSupport; ++k) {
                hits[a.support()[k].outcome] += 1.0;
                slot_weight[k] += a.support()[k].probability;
            }
        }
    }
    const double draws = static_cast<double>(kSeeds * kActions);
    const double p_hit = static_cast<double>(kSupport) / kOutcomes;
    const double se_hit = std::sqrt(p_hit * (1.0 - p_hit) / draws);
    for (std::size_t y = 0; y < kOutcomes; ++y) {
        CAPTURE(y);
        CHECK(std::abs(hits[y] / draws - p_hit) <= 4.5 * se_hit);
    }
    // Each coordinate of a uniform 4-simplex point has mean 1/4 and variance 3/80.
    const double se_w = std::sqrt(3.0 / 80.0 / draws);
    for (std::size_t k = 0; k < kSupport; ++k) {
        CAPTURE(k);
        CHECK(std::abs(slot_weight[k] / draws - 0.25) <= 4.5 * se_w);
    }
}

TEST_CASE("CSV export") {
    const auto g = scenarios::gambler(1, 3);
    const auto trace = rollout(g, Policy::constant(g, g.action_index("silver")), 0);
    std::ostringstream out;
    write_trace_csv(out, g, trace);
    CHECK(out.str() ==
          "step,t,budget_before,action,outcome,clipped_reward,budget_after\n"
          "1,1,1,silver,safe,1,2\n"
          "2,2,2,silver,safe,1,3\n"
          "3,3,3,silver,safe,1,4\n");

    RolloutStats s;
    s.n = 4;
    s.mean_return = 2.5;
    s.survival_rate = 0.75;
    std::ostringstream stats;
    write_stats_csv(stats, s);
    CHECK(stats.str() ==
          "n,mean_return,std_error,survival_rate,survival_std_error,mean_principal_return\n"
          "4,2.5,0,0.75,0,0\n");
}
