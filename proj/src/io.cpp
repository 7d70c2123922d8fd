#include "survival/io.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "survival/numeric.hpp"

namespace survival::io {

namespace {

using json = nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ProblemError(where + " must be an object");
    const auto it = obj.find(key);
    if (it == obj.end()) throw ProblemError(where + " is missing \"" + key + "\"");
    return *it;
}

double number(const json& v, const std::string& what) {
    if (!v.is_number()) throw ProblemError(what + " must be a number");
    return v.get<double>();
}

long long integer(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw ProblemError(what + " must be an integer");
    return v.get<long long>();
}

std::string text(const json& v, const std::string& what) {
    if (!v.is_string()) throw ProblemError(what + " must be a string");
    return v.get<std::string>();
}

const json& array(const json& v, const std::string& what) {
    if (!v.is_array()) throw ProblemError(what + " must be an array");
    return v;
}

RawProblem from_json(const json& doc) {
    RawProblem raw;
    if (!doc.is_object()) throw ProblemError("problem document must be a JSON object");
    if (doc.contains("granularity")) raw.granularity = integer(doc["granularity"], "granularity");
    for (const auto& o : array(require(doc, "outcomes", "problem"), "outcomes")) {
        raw.outcomes.push_back({text(require(o, "label", "outcome"), "outcome label"),
                                number(require(o, "reward", "outcome"), "outcome reward")});
    }
    for (const auto& a : array(require(doc, "actions", "problem"), "actions")) {
        RawAction action;
        action.label = text(require(a, "label", "action"), "action label");
        const auto& probs = require(a, "probs", "action " + action.label);
        if (!probs.is_object()) throw ProblemError("probs of action " + action.label + " must be an object");
        for (const auto& [label, prob] : probs.items()) {
            action.probs.emplace_back(label, number(prob, "probability of " + label));
        }
        raw.actions.push_back(std::move(action));
    }
    raw.initial_budget = number(require(doc, "initial_budget", "problem"), "initial_budget");
    raw.horizon = integer(require(doc, "horizon", "problem"), "horizon");
    if (doc.contains("shaping")) {
        for (const auto& s : array(doc["shaping"], "shaping")) {
            RawShaping term;
            for (const auto& y : array(require(s, "outcomes", "shaping entry"), "shaping outcomes")) {
                term.outcomes.push_back(text(y, "shaping outcome"));
            }
            term.bonus = number(require(s, "bonus", "shaping entry"), "shaping bonus");
            if (s.contains("from_t")) term.from_t = static_cast<int>(integer(s["from_t"], "from_t"));
            if (s.contains("to_t")) term.to_t = static_cast<int>(integer(s["to_t"], "to_t"));
            if (s.contains("min_budget")) term.min_budget = number(s["min_budget"], "min_budget");
            if (s.contains("max_budget")) term.max_budget = number(s["max_budget"], "max_budget");
            raw.shaping.push_back(std::move(term));
        }
    }
    return raw;
}

json to_json(const SurvivalProblem& p) {
    json doc;
    doc["granularity"] = p.granularity();
    json outcomes = json::array();
    for (const auto& o : p.outcome_space().outcomes()) {
        outcomes.push_back({{"label", o.label}, {"reward", p.to_real(o.reward)}});
    }
    doc["outcomes"] = std::move(outcomes);
    json actions = json::array();
    for (const auto& a : p.actions()) {
        json probs = json::object();
        for (const auto& e : a.support()) probs[p.outcome_space()[e.outcome].label] = e.probability;
        actions.push_back({{"label", a.label()}, {"probs", std::move(probs)}});
    }
    doc["actions"] = std::move(actions);
    doc["initial_budget"] = p.to_real(p.initial_budget());
    doc["horizon"] = p.horizon();
    if (!p.shaping().empty()) {
        json shaping = json::array();
        for (const auto& s : p.shaping()) {
            json term;
            term["outcomes"] = json::array({p.outcome_space()[s.outcome].label});
            term["bonus"] = p.to_real(s.bonus);
            term["from_t"] = s.from_t;
            if (s.to_t != std::numeric_limits<int>::max()) term["to_t"] = s.to_t;
            if (s.min_budget != 1) term["min_budget"] = p.to_real(s.min_budget);
            if (s.max_budget != kUnboundedBudget) term["max_budget"] = p.to_real(s.max_budget);
            shaping.push_back(std::move(term));
        }
        doc["shaping"] = std::move(shaping);
    }
    return doc;
}

}  // namespace

RawProblem parse_problem(std::istream& in) {
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw ProblemError(std::string("invalid JSON: ") + e.what());
    }
    return from_json(doc);
}

RawProblem parse_problem(const std::string& text) {
    std::istringstream in(text);
    return parse_problem(in);
}

SurvivalProblem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ProblemError("cannot open problem file " + path);
    return validate_problem(parse_problem(in));
}

void write_problem(std::ostream& out, const SurvivalProblem& p) { out << to_json(p).dump(2) << '\n'; }

void save_problem(const std::string& path, const SurvivalProblem& p) {
    std::ofstream out(path);
    if (!out) throw ProblemError("cannot write " + path);
    write_problem(out, p);
}

void write_misalignment(std::ostream& out, const SurvivalProblem& p, const PrincipalReport& report) {
    json doc;
    doc["initial_budget"] = p.to_real(p.initial_budget());
    doc["horizon"] = p.horizon();
    doc["agent_value"] = report.agent_value;
    doc["principal_value_under_agent_policy"] = report.principal_value_under_agent_policy;
    doc["principal_optimal_value"] = report.principal_optimal_value;
    doc["misalignment_gap"] = report.misalignment_gap;
    json cells = json::array();
    for (const auto& [t, b] : report.divergence_cells) cells.push_back(json::array({t, p.to_real(b)}));
    doc["divergence_cells"] = std::move(cells);
    out << doc.dump(2) << '\n';
}

void write_shaping(std::ostream& out, const SurvivalProblem& p, const ShapingResult& result) {
    json doc;
    doc["feasible"] = result.feasible;
    doc["cap_exceeded"] = result.cap_exceeded;
    doc["note"] = result.note;
    doc["boosted_action"] = result.boosted_action ? json(p.action(*result.boosted_action).label()) : json(nullptr);
    json outcomes = json::array();
    for (OutcomeIndex y : result.boosted_outcomes) outcomes.push_back(p.outcome_space()[y].label);
    doc["boosted_outcomes"] = std::move(outcomes);
    doc["bonus"] = p.to_real(result.bonus);
    doc["lifetime_occupancy"] = result.lifetime_occupancy;
    doc["shaped_problem"] = result.shaped_problem ? to_json(*result.shaped_problem) : json(nullptr);
    out << doc.dump(2) << '\n';
}

void write_shaping_audit_csv(std::ostream& out, const SurvivalProblem& p, const ShapingResult& result) {
    out << "bonus,lifetime_occupancy,action,passed\n";
    for (const auto& s : result.audit) {
        out << format_real(p.to_real(s.bonus)) << ',' << format_real(s.lifetime_occupancy) << ','
            << (s.action_at_cell == kNoAction ? std::string("none") : p.action(s.action_at_cell).label()) << ','
            << (s.passed ? 1 : 0) << '\n';
    }
}

}  // namespace survival::io
