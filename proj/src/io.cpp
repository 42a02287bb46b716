#include "menuforge/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "menuforge/numeric.hpp"

namespace menuforge {

using nlohmann::json;

namespace {

const json& require(const json& obj, const std::string& key, const std::string& pointer) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(pointer + "/" + key, "required field is missing");
    return *it;
}

std::vector<std::string> string_array(const json& value, const std::string& pointer) {
    if (!value.is_array()) throw SchemaError(pointer, "expected an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_string())
            throw SchemaError(pointer + "/" + std::to_string(i), "expected a string");
        out.push_back(value[i].get<std::string>());
    }
    return out;
}

double number_at(const json& value, const std::string& pointer) {
    if (!value.is_number()) throw SchemaError(pointer, "expected a number");
    return value.get<double>();
}

std::vector<double> number_array(const json& value, const std::string& pointer) {
    if (!value.is_array()) throw SchemaError(pointer, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < value.size(); ++i)
        out.push_back(number_at(value[i], pointer + "/" + std::to_string(i)));
    return out;
}

Belief belief_at(const json& value, std::size_t dim, const std::string& pointer) {
    std::vector<double> w = number_array(value, pointer);
    if (w.size() != dim)
        throw SchemaError(pointer, "expected " + std::to_string(dim) + " entries, got " +
                                       std::to_string(w.size()));
    try {
        return Belief(std::move(w));
    } catch (const ValidationError& e) {
        throw SchemaError(pointer, e.what());
    }
}

struct RawFile {
    std::vector<std::string> outcomes;
    std::vector<std::string> signals;  // {"_"} when the field is absent
    bool had_signals = false;
    std::vector<std::string> action_names;
    std::vector<double> action_costs;
    std::vector<double> q;
    std::vector<std::vector<Belief>> conditionals;  // [action][signal]
    double kappa = 0.0;
    std::optional<Plan> plan;
};

RawFile parse_raw(const json& root) {
    if (!root.is_object()) throw SchemaError("", "instance file must be a JSON object");
    RawFile raw;

    raw.outcomes = string_array(require(root, "outcomes", ""), "/outcomes");
    if (raw.outcomes.size() < 2) throw SchemaError("/outcomes", "need at least two outcomes");

    if (root.contains("signals")) {
        raw.had_signals = true;
        raw.signals = string_array(root["signals"], "/signals");
        if (raw.signals.empty()) throw SchemaError("/signals", "need at least one signal");
    } else {
        raw.signals = {"_"};
    }

    const json& actions = require(root, "actions", "");
    if (!actions.is_array() || actions.empty())
        throw SchemaError("/actions", "expected a non-empty array");
    for (std::size_t i = 0; i < actions.size(); ++i) {
        std::string p = "/actions/" + std::to_string(i);
        if (!actions[i].is_object()) throw SchemaError(p, "expected {name, cost}");
        const json& name = require(actions[i], "name", p);
        if (!name.is_string()) throw SchemaError(p + "/name", "expected a string");
        raw.action_names.push_back(name.get<std::string>());
        double cost = number_at(require(actions[i], "cost", p), p + "/cost");
        if (!(cost >= 0.0)) throw SchemaError(p + "/cost", "cost must be non-negative");
        raw.action_costs.push_back(cost);
    }

    if (root.contains("q")) {
        raw.q = number_array(root["q"], "/q");
    } else if (!raw.had_signals) {
        raw.q = {1.0};
    } else {
        throw SchemaError("/q", "required field is missing");
    }
    if (raw.q.size() != raw.signals.size())
        throw SchemaError("/q", "expected " + std::to_string(raw.signals.size()) +
                                    " entries, got " + std::to_string(raw.q.size()));
    double qsum = 0.0;
    for (std::size_t i = 0; i < raw.q.size(); ++i) {
        if (raw.q[i] < 0.0)
            throw SchemaError("/q/" + std::to_string(i), "probability must be non-negative");
        qsum += raw.q[i];
    }
    if (std::fabs(qsum - 1.0) > kAbsTol)
        throw SchemaError("/q", "entries sum to " + std::to_string(qsum) + ", expected 1");

    if (root.contains("kappa")) {
        raw.kappa = number_at(root["kappa"], "/kappa");
        if (!(raw.kappa >= 0.0)) throw SchemaError("/kappa", "kappa must be non-negative");
    }
    if (!raw.had_signals && raw.kappa != 0.0)
        throw SchemaError("/kappa", "kappa must be 0 when the file has no signals");

    const json& cond = require(root, "conditionals", "");
    if (!cond.is_object()) throw SchemaError("/conditionals", "expected an object");
    raw.conditionals.resize(raw.action_names.size());
    std::size_t used = 0;
    for (std::size_t a = 0; a < raw.action_names.size(); ++a) {
        raw.conditionals[a].reserve(raw.signals.size());
        for (std::size_t s = 0; s < raw.signals.size(); ++s) {
            std::string key = raw.action_names[a] + "|" + raw.signals[s];
            std::string alt = raw.had_signals ? key : raw.action_names[a];
            const json* entry = nullptr;
            if (cond.contains(key)) entry = &cond[key];
            else if (!raw.had_signals && cond.contains(alt)) entry = &cond[alt];
            if (entry == nullptr)
                throw SchemaError("/conditionals/" + alt, "required distribution is missing");
            raw.conditionals[a].push_back(
                belief_at(*entry, raw.outcomes.size(), "/conditionals/" + alt));
            ++used;
        }
    }
    if (cond.size() != used)
        throw SchemaError("/conditionals",
                          "unexpected extra keys (expected exactly one per action/signal pair)");

    if (root.contains("plan")) {
        const json& plan = root["plan"];
        if (!plan.is_object()) throw SchemaError("/plan", "expected an object");
        Plan p;
        const json& acq = require(plan, "acquire", "/plan");
        if (!acq.is_boolean()) throw SchemaError("/plan/acquire", "expected a boolean");
        p.acquire = acq.get<bool>();
        const json& f = require(plan, "f", "/plan");
        if (!f.is_object()) throw SchemaError("/plan/f", "expected an object signal -> action");
        if (f.size() != raw.signals.size())
            throw SchemaError("/plan/f", "expected " + std::to_string(raw.signals.size()) +
                                             " entries, got " + std::to_string(f.size()));
        for (const auto& s : raw.signals) {
            if (!f.contains(s))
                throw SchemaError("/plan/f/" + s, "no action assigned to this signal");
            if (!f[s].is_string()) throw SchemaError("/plan/f/" + s, "expected an action name");
            std::string name = f[s].get<std::string>();
            auto it = std::find(raw.action_names.begin(), raw.action_names.end(), name);
            if (it == raw.action_names.end())
                throw SchemaError("/plan/f/" + s, "unknown action '" + name + "'");
            p.action_by_signal.push_back(static_cast<int>(it - raw.action_names.begin()));
        }
        raw.plan = std::move(p);
    }

    static const char* known[] = {"outcomes", "signals", "actions", "q",
                                  "conditionals", "kappa", "plan"};
    for (const auto& [key, value] : root.items()) {
        (void)value;
        bool ok = false;
        for (const char* k : known) ok = ok || key == k;
        if (!ok) throw SchemaError("/" + key, "unknown field");
    }
    return raw;
}

bool all_costs_zero(const RawFile& raw) {
    for (double c : raw.action_costs)
        if (c != 0.0) return false;
    return true;
}

ParsedInstance build_ia(RawFile raw) {
    ParsedInstance out;
    out.regime = Regime::InformationAcquisition;
    out.had_signals_field = raw.had_signals;
    out.plan = raw.plan;

    // Posteriors of the single action. Drop unreachable signals first, then
    // outcomes no posterior can produce.
    std::vector<std::string> signals;
    std::vector<double> q;
    std::vector<Belief> posteriors;
    for (std::size_t s = 0; s < raw.signals.size(); ++s) {
        if (raw.q[s] == 0.0) {
            out.warnings.push_back("removed zero-probability signal '" + raw.signals[s] + "'");
            continue;
        }
        signals.push_back(raw.signals[s]);
        q.push_back(raw.q[s]);
        posteriors.push_back(raw.conditionals[0][s]);
    }
    if (signals.empty()) throw SchemaError("/q", "every signal has probability zero");

    std::vector<double> mass(raw.outcomes.size(), 0.0);
    for (std::size_t s = 0; s < q.size(); ++s)
        for (std::size_t w = 0; w < mass.size(); ++w) mass[w] += q[s] * posteriors[s][w];
    std::vector<std::size_t> keep;
    for (std::size_t w = 0; w < mass.size(); ++w) {
        if (mass[w] <= 0.0)
            out.warnings.push_back("removed zero-mass outcome '" + raw.outcomes[w] + "'");
        else
            keep.push_back(w);
    }
    if (keep.size() < 2)
        throw SchemaError("/outcomes", "fewer than two outcomes have positive prior mass");
    if (keep.size() < raw.outcomes.size()) {
        std::vector<std::string> labels;
        for (std::size_t w : keep) labels.push_back(raw.outcomes[w]);
        std::vector<Belief> reduced;
        for (const auto& p : posteriors) {
            std::vector<double> v;
            v.reserve(keep.size());
            for (std::size_t w : keep) v.push_back(p[w]);
            reduced.emplace_back(std::move(v));
        }
        raw.outcomes = std::move(labels);
        posteriors = std::move(reduced);
    }

    out.ia.emplace(OutcomeSpace(raw.outcomes), std::move(signals), std::move(q),
                   std::move(posteriors), raw.kappa);
    return out;
}

ParsedInstance build_contract(RawFile raw) {
    ParsedInstance out;
    out.regime = Regime::Contract;
    out.had_signals_field = raw.had_signals;
    out.plan = raw.plan;
    if (!raw.plan)
        throw SchemaError("/plan", "the contract regime needs a plan naming the target action");
    std::size_t target = static_cast<std::size_t>(raw.plan->action_by_signal.front());
    std::vector<Belief> beliefs;
    for (std::size_t a = 0; a < raw.action_names.size(); ++a)
        beliefs.push_back(raw.conditionals[a][0]);
    out.contract.emplace(OutcomeSpace(raw.outcomes), raw.action_names, std::move(beliefs),
                         raw.action_costs, target);
    return out;
}

ParsedInstance build_general(RawFile raw) {
    ParsedInstance out;
    out.regime = Regime::General;
    out.had_signals_field = raw.had_signals;
    out.plan = raw.plan;
    if (!raw.plan) throw SchemaError("/plan", "the general regime needs a plan");
    out.general.emplace(OutcomeSpace(raw.outcomes), raw.signals, raw.action_names, raw.q,
                        raw.conditionals, raw.action_costs, raw.kappa);
    return out;
}

}  // namespace

ParsedInstance load_instance_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    RawFile raw = parse_raw(root);
    if (raw.action_names.size() == 1 && all_costs_zero(raw) && raw.had_signals)
        return build_ia(std::move(raw));
    if (!raw.had_signals || (raw.signals.size() == 1 && raw.kappa == 0.0))
        return build_contract(std::move(raw));
    return build_general(std::move(raw));
}

ParsedInstance load_instance_file(const std::string& path) {
    return load_instance_text(read_file(path));
}

ProblemInstance ParsedInstance::embedding() const {
    switch (regime) {
        case Regime::InformationAcquisition: return ia->to_problem();
        case Regime::Contract: return contract->to_problem();
        case Regime::General: return *general;
    }
    throw Error("unreachable");
}

Plan ParsedInstance::verification_plan() const {
    switch (regime) {
        case Regime::InformationAcquisition: return ia->canonical_plan();
        case Regime::Contract: return contract->canonical_plan();
        case Regime::General: return *plan;
    }
    throw Error("unreachable");
}

std::string format_number(double x) {
    if (x == 0.0) x = 0.0;  // normalize -0
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string number_list(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ", ";
        out += format_number(xs[i]);
    }
    return out;
}

}  // namespace

std::string certificate_to_json(const Certificate& cert, const ProblemInstance& inst) {
    std::ostringstream os;
    os << "{\n";
    os << "    \"plan_utility\": " << format_number(cert.plan_utility) << ",\n";
    const DeviationStrategy& dev = cert.best_deviation;
    os << "    \"best_deviation\": {\"acquire\": " << (dev.acquire ? "true" : "false")
       << ", \"utility\": " << format_number(dev.utility) << ", \"choices\": [";
    for (std::size_t i = 0; i < dev.choices.size(); ++i) {
        if (i) os << ", ";
        os << "{";
        if (dev.acquire) os << "\"signal\": \"" << json_escape(inst.signals()[i]) << "\", ";
        os << "\"action\": \"" << json_escape(inst.actions()[dev.choices[i].first])
           << "\", \"contract\": " << dev.choices[i].second << "}";
    }
    os << "]},\n";
    os << "    \"slacks\": {";
    for (std::size_t i = 0; i < cert.slacks.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << json_escape(cert.slacks[i].first)
           << "\": " << format_number(cert.slacks[i].second);
    }
    os << "},\n";
    os << "    \"tolerance\": " << format_number(cert.tolerance) << ",\n";
    os << "    \"verdict\": \"" << (cert.pass ? "pass" : "fail") << "\"\n";
    os << "  }";
    return os.str();
}

std::string report_to_json(const SolveReport& report, const ProblemInstance& inst) {
    std::ostringstream os;
    os << "{\n";
    os << "  \"menu\": [\n";
    for (std::size_t i = 0; i < report.menu.pieces.size(); ++i) {
        Contract t = report.menu.pieces[i].to_contract();
        os << "    {\"payments\": [" << number_list(t.payments()) << "]}";
        os << (i + 1 < report.menu.pieces.size() ? ",\n" : "\n");
    }
    os << "  ],\n";
    os << "  \"objective\": " << format_number(report.objective) << ",\n";
    os << "  \"binding\": {";
    for (std::size_t i = 0; i < report.binding.size(); ++i) {
        if (i) os << ", ";
        os << "\"" << json_escape(report.binding[i].first)
           << "\": " << (report.binding[i].second ? "true" : "false");
    }
    os << "},\n";
    os << "  \"certificate\": ";
    if (report.certificate)
        os << certificate_to_json(*report.certificate, inst);
    else
        os << "null";
    if (!report.note.empty()) os << ",\n  \"note\": \"" << json_escape(report.note) << "\"";
    os << "\n}\n";
    return os.str();
}

std::string error_report_json(const std::string& reason) {
    return "{\n  \"error\": \"" + json_escape(reason) + "\"\n}\n";
}

Menu menu_from_json_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
    const json* arr = nullptr;
    std::string pointer;
    if (root.is_object() && root.contains("menu")) {
        arr = &root["menu"];
        pointer = "/menu";
    } else if (root.is_array()) {
        arr = &root;
    } else {
        throw SchemaError("", "expected a menu array or an object with a 'menu' field");
    }
    if (!arr->is_array() || arr->empty())
        throw SchemaError(pointer, "expected a non-empty array of contracts");
    Menu menu;
    for (std::size_t i = 0; i < arr->size(); ++i) {
        std::string p = pointer + "/" + std::to_string(i);
        const json& item = (*arr)[i];
        if (!item.is_object() || !item.contains("payments"))
            throw SchemaError(p, "expected {\"payments\": [...]}");
        std::vector<double> pay = number_array(item["payments"], p + "/payments");
        if (pay.empty()) throw SchemaError(p + "/payments", "expected at least one payment");
        if (i > 0 && pay.size() != menu.pieces.front().slope.size())
            throw SchemaError(p + "/payments", "contracts disagree on outcome count");
        try {
            menu.pieces.push_back(AffinePiece::from_contract(Contract(std::move(pay))));
        } catch (const ValidationError& e) {
            throw SchemaError(p + "/payments", e.what());
        }
    }
    return menu;
}

Menu menu_from_json_file(const std::string& path) { return menu_from_json_text(read_file(path)); }

namespace {

void append_instance_core(std::ostringstream& os,
                          const std::vector<std::string>& outcomes,
                          const std::vector<std::string>* signals,
                          const std::vector<std::string>& actions,
                          const std::vector<double>& costs,
                          const std::vector<double>* q,
                          const std::vector<std::vector<const Belief*>>& conditionals,
                          double kappa) {
    os << "{\n  \"outcomes\": [";
    for (std::size_t i = 0; i < outcomes.size(); ++i)
        os << (i ? ", " : "") << "\"" << json_escape(outcomes[i]) << "\"";
    os << "],\n";
    if (signals) {
        os << "  \"signals\": [";
        for (std::size_t i = 0; i < signals->size(); ++i)
            os << (i ? ", " : "") << "\"" << json_escape((*signals)[i]) << "\"";
        os << "],\n";
    }
    os << "  \"actions\": [";
    for (std::size_t i = 0; i < actions.size(); ++i) {
        os << (i ? ", " : "") << "{\"name\": \"" << json_escape(actions[i])
           << "\", \"cost\": " << format_number(costs[i]) << "}";
    }
    os << "],\n";
    if (q) os << "  \"q\": [" << number_list(*q) << "],\n";
    os << "  \"conditionals\": {\n";
    bool first = true;
    for (std::size_t a = 0; a < actions.size(); ++a) {
        for (std::size_t s = 0; s < conditionals[a].size(); ++s) {
            if (!first) os << ",\n";
            first = false;
            std::string key = signals ? actions[a] + "|" + (*signals)[s] : actions[a];
            os << "    \"" << json_escape(key) << "\": ["
               << number_list(conditionals[a][s]->weights()) << "]";
        }
    }
    os << "\n  },\n";
    os << "  \"kappa\": " << format_number(kappa);
}

void append_plan(std::ostringstream& os,
                 const Plan& plan,
                 const std::vector<std::string>& signals,
                 const std::vector<std::string>& actions) {
    os << ",\n  \"plan\": {\"acquire\": " << (plan.acquire ? "true" : "false") << ", \"f\": {";
    for (std::size_t s = 0; s < signals.size(); ++s) {
        if (s) os << ", ";
        os << "\"" << json_escape(signals[s]) << "\": \""
           << json_escape(actions[plan.action_by_signal[s]]) << "\"";
    }
    os << "}}";
}

}  // namespace

std::string serialize_instance(const ParsedInstance& parsed) {
    std::ostringstream os;
    if (parsed.regime == Regime::InformationAcquisition) {
        const IAInstance& inst = *parsed.ia;
        std::vector<std::vector<const Belief*>> cond(1);
        for (std::size_t s = 0; s < inst.signal_count(); ++s)
            cond[0].push_back(&inst.posterior(s));
        append_instance_core(os, inst.outcomes().labels(), &inst.signals(), {"report"}, {0.0},
                             &inst.q(), cond, inst.kappa());
        if (parsed.plan) append_plan(os, *parsed.plan, inst.signals(), {"report"});
    } else if (parsed.regime == Regime::Contract) {
        // Canonical form of the hidden-action regime is signal-free,
        // whatever the input looked like.
        const ContractInstance& inst = *parsed.contract;
        std::vector<std::vector<const Belief*>> cond(inst.action_count());
        for (std::size_t a = 0; a < inst.action_count(); ++a) cond[a].push_back(&inst.belief(a));
        append_instance_core(os, inst.outcomes().labels(), nullptr, inst.actions(), inst.costs(),
                             nullptr, cond, 0.0);
        if (parsed.plan) append_plan(os, *parsed.plan, {"_"}, inst.actions());
    } else {
        const ProblemInstance& inst = *parsed.general;
        std::vector<std::vector<const Belief*>> cond(inst.action_count());
        for (std::size_t a = 0; a < inst.action_count(); ++a)
            for (std::size_t s = 0; s < inst.signal_count(); ++s)
                cond[a].push_back(&inst.conditional(a, s));
        append_instance_core(os, inst.outcomes().labels(), &inst.signals(), inst.actions(),
                             inst.costs(), &inst.q(), cond, inst.kappa());
        if (parsed.plan) append_plan(os, *parsed.plan, inst.signals(), inst.actions());
    }
    os << "\n}\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace menuforge
