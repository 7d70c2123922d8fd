#include "survival/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "survival/io.hpp"
#include "survival/numeric.hpp"
#include "survival/scenarios.hpp"
#include "survival/sim.hpp"

namespace survival::experiments {

namespace {

using json = nlohmann::json;

std::string label_of(const SurvivalProblem& p, ActionIndex a) {
    return a == kNoAction ? std::string("none") : p.action(a).label();
}

template <class T>
std::vector<T> grid_values(const json& v, const char* name) {
    std::vector<T> out;
    try {
        if (v.is_array()) {
            for (const auto& x : v) out.push_back(x.get<T>());
        } else if (v.is_object()) {
            const T from = v.at("from").get<T>();
            const T to = v.at("to").get<T>();
            const T step = v.contains("step") ? v.at("step").get<T>() : T{1};
            if (!(step > T{0})) throw ProblemError(std::string(name) + " step must be positive");
            // Index-based so real-valued ranges do not accumulate drift.
            for (long long i = 0;; ++i) {
                const T x = static_cast<T>(from + static_cast<T>(i) * step);
                if (x > to + (std::is_floating_point_v<T> ? step * 1e-9 : T{0})) break;
                out.push_back(x);
            }
        } else {
            throw ProblemError(std::string(name) + " must be a list or a {from, to, step} range");
        }
    } catch (const json::exception& e) {
        throw ProblemError(std::string("invalid ") + name + ": " + e.what());
    }
    return out;
}

void write_file(const std::filesystem::path& path, const auto& writer, std::vector<std::filesystem::path>& written) {
    std::ofstream out(path);
    if (!out) throw ProblemError("cannot write " + path.string());
    writer(out);
    out.close();
    if (!out) throw ProblemError("failed writing " + path.string());
    written.push_back(path);
}

}  // namespace

double optimal_mean_reward(const SurvivalProblem& p) {
    double best = -std::numeric_limits<double>::infinity();
    for (ActionIndex a = 0; a < p.num_actions(); ++a) best = std::max(best, p.expected_reward(a));
    return best;
}

Regret regret(const SurvivalProblem& p, const ValueTable& v, int t, Units budget) {
    if (t < 1 || t > p.horizon()) throw ProblemError("time step outside 1..T");
    if (!v.shape().contains(t, budget)) throw ProblemError("budget outside the value table");
    const int steps = p.horizon() - t + 1;
    const double r = v(t, budget) - steps * optimal_mean_reward(p);
    return {r, r / steps};
}

Regret regret(const SurvivalProblem& p, const SolveTables& tables, int t, Units budget) {
    return regret(p, tables.values(), t, budget);
}

std::vector<GridRow> sweep(const SurvivalProblem& p, const std::vector<int>& horizons,
                           const std::vector<Units>& budgets) {
    if (horizons.empty() || budgets.empty()) throw ProblemError("sweep needs at least one horizon and one budget");
    for (int T : horizons) {
        if (T < 1) throw ProblemError("horizons must be positive");
    }
    for (Units b : budgets) {
        if (b <= 0) throw ProblemError("sweep budgets must be positive");
    }
    const Units b_max = *std::max_element(budgets.begin(), budgets.end());
    const int t_max = *std::max_element(horizons.begin(), horizons.end());

    std::vector<GridRow> rows;
    rows.reserve(horizons.size() * budgets.size());
    auto emit = [&](const SurvivalProblem& q, const SolveTables& tables, int T, int t) {
        for (Units b : budgets) {
            rows.push_back({T, b, tables.v(t, b), tables.surv(t, b), classify_cell(q, tables, t, b),
                            regret(q, tables, t, b)});
        }
    };
    if (p.shaping().empty()) {
        const auto q = p.with_initial_budget(b_max).with_horizon(t_max);
        const auto tables = solve(q);
        for (int T : horizons) emit(q, tables, T, t_max - T + 1);
    } else {
        for (int T : horizons) {
            const auto q = p.with_initial_budget(b_max).with_horizon(T);
            emit(q, solve(q), T, 1);
        }
    }
    return rows;
}

void write_policy_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows) {
    out << "horizon,t,budget,action,v,surv\n";
    for (const auto& r : rows) {
        out << r.horizon << ",1," << format_real(p.to_real(r.budget)) << ',' << label_of(p, r.behavior.action) << ','
            << format_real(r.v) << ',' << format_real(r.surv) << '\n';
    }
}

void write_behavior_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows) {
    out << "horizon,budget,action,risk_neutral,short_surv,long_surv,risk_seeking,tie\n";
    for (const auto& r : rows) {
        const auto& c = r.behavior;
        out << r.horizon << ',' << format_real(p.to_real(r.budget)) << ',' << label_of(p, c.action) << ','
            << c.risk_neutral << ',' << c.short_surv << ',' << c.long_surv << ',' << c.risk_seeking << ',' << c.tie
            << '\n';
    }
}

void write_regret_grid(std::ostream& out, const SurvivalProblem& p, const std::vector<GridRow>& rows) {
    out << "budget,horizon,regret,regret_rate,first_action\n";
    for (const auto& r : rows) {
        out << format_real(p.to_real(r.budget)) << ',' << r.horizon << ',' << format_real(r.regret.regret) << ','
            << format_real(r.regret.rate) << ',' << label_of(p, r.behavior.action) << '\n';
    }
}

ScenarioConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ProblemError(std::string("invalid config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ProblemError("config must be a JSON object");
    ScenarioConfig c;
    try {
        c.scenario = doc.at("scenario").get<std::string>();
        if (doc.contains("horizons")) c.horizons = grid_values<int>(doc["horizons"], "horizons");
        if (doc.contains("budgets")) c.budgets = grid_values<double>(doc["budgets"], "budgets");
        if (doc.contains("seeds")) c.seeds = grid_values<std::uint64_t>(doc["seeds"], "seeds");
        if (doc.contains("output_dir")) c.output_dir = doc["output_dir"].get<std::string>();
        if (doc.contains("problem")) {
            c.problem_path = doc["problem"].get<std::string>();
            if (c.problem_path.is_relative() && !base_dir.empty()) c.problem_path = base_dir / c.problem_path;
        }
        if (doc.contains("random")) {
            const auto& r = doc["random"];
            c.random.n_actions = r.value("n_actions", c.random.n_actions);
            c.random.n_outcomes = r.value("n_outcomes", c.random.n_outcomes);
            c.random.support_size = r.value("support_size", c.random.support_size);
            c.random.reward_span = r.value("reward_span", c.random.reward_span);
        }
    } catch (const json::exception& e) {
        throw ProblemError(std::string("invalid config: ") + e.what());
    }
    return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open config " + path.string());
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config(text, path.parent_path());
}

void validate_config(const ScenarioConfig& c) {
    static const std::vector<std::string> known{"assistant", "gambler", "random10", "file"};
    if (std::find(known.begin(), known.end(), c.scenario) == known.end()) {
        throw ProblemError("unknown scenario \"" + c.scenario + "\" (expected assistant, gambler, random10 or file)");
    }
    if (c.horizons.empty()) throw ProblemError("config needs at least one horizon");
    if (c.budgets.empty()) throw ProblemError("config needs at least one budget");
    if (c.scenario == "random10" && c.seeds.empty()) throw ProblemError("random10 needs at least one seed");
    if (c.scenario == "file" && c.problem_path.empty()) throw ProblemError("scenario \"file\" needs \"problem\"");
}

SurvivalProblem scenario_problem(const ScenarioConfig& c, std::uint64_t seed) {
    if (c.scenario == "assistant") return scenarios::assistant(1, 1);
    if (c.scenario == "gambler") return scenarios::gambler(1, 1);
    if (c.scenario == "random10") {
        return sim::random_problem(c.random.n_actions, c.random.n_outcomes, c.random.support_size,
                                   c.random.reward_span, seed);
    }
    if (c.scenario == "file") return io::load_problem(c.problem_path.string());
    throw ProblemError("unknown scenario \"" + c.scenario + "\"");
}

std::vector<std::filesystem::path> run_scenario(const ScenarioConfig& c) {
    validate_config(c);
    std::error_code ec;
    std::filesystem::create_directories(c.output_dir, ec);
    if (ec) throw ProblemError("cannot create output directory " + c.output_dir.string() + ": " + ec.message());

    std::vector<std::filesystem::path> written;
    const bool generated = c.scenario == "random10";
    const std::vector<std::uint64_t> seeds = generated ? c.seeds : std::vector<std::uint64_t>{0};
    for (std::uint64_t seed : seeds) {
        const auto p = scenario_problem(c, seed);
        std::vector<Units> budgets;
        for (double b : c.budgets) budgets.push_back(to_units(b, p.granularity(), "budget"));
        const auto rows = sweep(p, c.horizons, budgets);
        const std::string name = generated ? c.scenario + "_seed" + std::to_string(seed) : c.scenario;
        const auto base = c.output_dir / name;
        if (generated) {
            write_file(base.string() + "_problem.json", [&](std::ostream& o) { io::write_problem(o, p); }, written);
        }
        write_file(base.string() + "_policy.csv", [&](std::ostream& o) { write_policy_grid(o, p, rows); }, written);
        write_file(base.string() + "_behavior.csv", [&](std::ostream& o) { write_behavior_grid(o, p, rows); },
                   written);
        write_file(base.string() + "_regret.csv", [&](std::ostream& o) { write_regret_grid(o, p, rows); }, written);
    }
    return written;
}

}  // namespace survival::experiments
