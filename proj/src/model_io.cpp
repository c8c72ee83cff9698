#include "satrisk/model_io.hpp"

#include "satrisk/errors.hpp"

#include <json.hpp>

#include <map>
#include <set>
#include <utility>

namespace satrisk {
namespace {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end())
        throw input_error(std::string(where) + ": missing required key '" + key + "'");
    return *it;
}

double as_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw input_error(path + ": expected a number");
    return j.get<double>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw input_error(path + ": expected a string");
    return j.get<std::string>();
}

int lookup_state(const Mdp& mdp, const std::string& name, const std::string& path) {
    const int idx = mdp.state_index(name);
    if (idx < 0) throw input_error(path + ": unknown state '" + name + "'");
    return idx;
}

Policy policy_from_json(const json& jpol, const Mdp& mdp, const std::string& where) {
    if (!jpol.is_object()) throw input_error(where + ": expected an object");
    Policy pol;
    pol.rule.resize(mdp.states.size());
    for (std::size_t x = 0; x < mdp.states.size(); ++x)
        pol.rule[x].assign(mdp.states[x].actions.size(), 0.0);

    std::set<int> covered;
    for (auto it = jpol.begin(); it != jpol.end(); ++it) {
        const std::string path = where + "." + it.key();
        const int x = lookup_state(mdp, it.key(), path);
        covered.insert(x);
        if (!it.value().is_object()) throw input_error(path + ": expected an object");
        for (auto ait = it.value().begin(); ait != it.value().end(); ++ait) {
            const int k = mdp.action_index(x, ait.key());
            if (k < 0)
                throw input_error(path + ": action '" + ait.key() +
                                  "' is not allowable in state " + it.key());
            pol.rule[x][static_cast<std::size_t>(k)] =
                as_number(ait.value(), path + "." + ait.key());
        }
    }
    for (std::size_t x = 0; x < mdp.states.size(); ++x)
        if (!covered.count(static_cast<int>(x)))
            throw input_error(where + ": no rule for state " + mdp.states[x].name);
    pol.validate_for(mdp);
    return pol;
}

} // namespace

ParsedModel parse_model(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("model file syntax error: ") + e.what());
    }
    if (!j.is_object()) throw input_error("model file: top level must be an object");

    Mdp mdp;
    mdp.gamma = as_number(require(j, "gamma", "model file"), "gamma");

    const json& jstates = require(j, "states", "model file");
    if (!jstates.is_array() || jstates.empty())
        throw input_error("states: expected a nonempty list of strings");
    for (std::size_t i = 0; i < jstates.size(); ++i) {
        StateNode st;
        st.name = as_string(jstates[i], "states[" + std::to_string(i) + "]");
        mdp.states.push_back(std::move(st));
    }

    const json& jactions = require(j, "actions", "model file");
    if (!jactions.is_object()) throw input_error("actions: expected an object");
    for (auto it = jactions.begin(); it != jactions.end(); ++it) {
        const std::string path = "actions." + it.key();
        const int x = lookup_state(mdp, it.key(), path);
        if (!it.value().is_array()) throw input_error(path + ": expected a list");
        for (std::size_t i = 0; i < it.value().size(); ++i) {
            ActionNode a;
            a.name = as_string(it.value()[i], path + "[" + std::to_string(i) + "]");
            mdp.states[x].actions.push_back(std::move(a));
        }
    }

    const json& jtrans = require(j, "transitions", "model file");
    if (!jtrans.is_array()) throw input_error("transitions: expected a list");
    for (std::size_t i = 0; i < jtrans.size(); ++i) {
        const std::string path = "transitions[" + std::to_string(i) + "]";
        const json& t = jtrans[i];
        if (!t.is_object()) throw input_error(path + ": expected an object");
        const int x = lookup_state(mdp, as_string(require(t, "from", path.c_str()), path + ".from"), path);
        const std::string aname = as_string(require(t, "action", path.c_str()), path + ".action");
        const int k = mdp.action_index(x, aname);
        if (k < 0)
            throw input_error(path + ": action '" + aname + "' is not allowable in state " +
                              mdp.states[x].name);
        const int y = lookup_state(mdp, as_string(require(t, "to", path.c_str()), path + ".to"), path);
        Outcome o;
        o.to = y;
        o.prob = as_number(require(t, "prob", path.c_str()), path + ".prob");
        auto& outcomes = mdp.states[x].actions[k].outcomes;
        for (const auto& prev : outcomes)
            if (prev.to == y) throw input_error(path + ": duplicate transition entry");
        outcomes.push_back(std::move(o));
    }

    const json& jrewards = require(j, "rewards", "model file");
    if (!jrewards.is_array()) throw input_error("rewards: expected a list");
    for (std::size_t i = 0; i < jrewards.size(); ++i) {
        const std::string path = "rewards[" + std::to_string(i) + "]";
        const json& r = jrewards[i];
        if (!r.is_object()) throw input_error(path + ": expected an object");
        const int x = lookup_state(mdp, as_string(require(r, "from", path.c_str()), path + ".from"), path);
        const std::string aname = as_string(require(r, "action", path.c_str()), path + ".action");
        const int k = mdp.action_index(x, aname);
        if (k < 0)
            throw input_error(path + ": action '" + aname + "' is not allowable in state " +
                              mdp.states[x].name);
        const int y = lookup_state(mdp, as_string(require(r, "to", path.c_str()), path + ".to"), path);
        Outcome* branch = nullptr;
        for (auto& o : mdp.states[x].actions[k].outcomes)
            if (o.to == y) branch = &o;
        if (branch == nullptr)
            throw input_error(path + ": no transition entry for this (from, action, to)");
        RewardAtom atom;
        atom.value = as_number(require(r, "value", path.c_str()), path + ".value");
        atom.prob = as_number(require(r, "prob", path.c_str()), path + ".prob");
        for (const auto& prev : branch->rewards)
            if (prev.value == atom.value)
                throw input_error(path + ": duplicate reward value for this transition");
        branch->rewards.push_back(atom);
    }

    const json& jinit = require(j, "initial", "model file");
    if (!jinit.is_object()) throw input_error("initial: expected an object");
    mdp.initial.assign(mdp.states.size(), 0.0);
    for (auto it = jinit.begin(); it != jinit.end(); ++it) {
        const std::string path = "initial." + it.key();
        mdp.initial[static_cast<std::size_t>(lookup_state(mdp, it.key(), path))] =
            as_number(it.value(), path);
    }

    if (auto it = j.find("reward_support"); it != j.end()) {
        if (!it->is_array()) throw input_error("reward_support: expected a list of numbers");
        for (std::size_t i = 0; i < it->size(); ++i)
            mdp.reward_support.push_back(
                as_number((*it)[i], "reward_support[" + std::to_string(i) + "]"));
    }

    mdp.validate();

    ParsedModel out;
    if (auto it = j.find("policy"); it != j.end())
        out.policy = policy_from_json(*it, mdp, "policy");
    out.mdp = std::move(mdp);
    return out;
}

Policy parse_policy(const std::string& text, const Mdp& mdp) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw input_error(std::string("policy file syntax error: ") + e.what());
    }
    if (j.is_object() && j.contains("policy")) return policy_from_json(j["policy"], mdp, "policy");
    return policy_from_json(j, mdp, "policy");
}

std::string render_model(const Mdp& mdp, const Policy* policy) {
    ordered_json j;
    j["gamma"] = mdp.gamma;

    ordered_json states = ordered_json::array();
    for (const auto& st : mdp.states) states.push_back(st.name);
    j["states"] = std::move(states);

    ordered_json actions = ordered_json::object();
    for (const auto& st : mdp.states) {
        ordered_json names = ordered_json::array();
        for (const auto& a : st.actions) names.push_back(a.name);
        actions[st.name] = std::move(names);
    }
    j["actions"] = std::move(actions);

    ordered_json transitions = ordered_json::array();
    ordered_json rewards = ordered_json::array();
    for (const auto& st : mdp.states) {
        for (const auto& a : st.actions) {
            for (const auto& o : a.outcomes) {
                transitions.push_back({{"from", st.name},
                                       {"action", a.name},
                                       {"to", mdp.states[o.to].name},
                                       {"prob", o.prob}});
                for (const auto& atom : o.rewards)
                    rewards.push_back({{"from", st.name},
                                       {"action", a.name},
                                       {"to", mdp.states[o.to].name},
                                       {"value", atom.value},
                                       {"prob", atom.prob}});
            }
        }
    }
    j["transitions"] = std::move(transitions);
    j["rewards"] = std::move(rewards);

    ordered_json initial = ordered_json::object();
    for (std::size_t x = 0; x < mdp.states.size(); ++x)
        if (mdp.initial[x] > 0.0) initial[mdp.states[x].name] = mdp.initial[x];
    j["initial"] = std::move(initial);

    if (policy != nullptr) {
        ordered_json jpol = ordered_json::object();
        for (std::size_t x = 0; x < mdp.states.size(); ++x) {
            ordered_json row = ordered_json::object();
            for (std::size_t k = 0; k < mdp.states[x].actions.size(); ++k)
                if (policy->rule[x][k] > 0.0)
                    row[mdp.states[x].actions[k].name] = policy->rule[x][k];
            jpol[mdp.states[x].name] = std::move(row);
        }
        j["policy"] = std::move(jpol);
    }
    return j.dump(2) + "\n";
}

std::string render_chain(const DetChain& chain) {
    Mdp mdp;
    mdp.gamma = chain.gamma;
    mdp.initial = chain.initial;
    mdp.states.resize(chain.size());
    for (std::size_t x = 0; x < chain.size(); ++x) {
        mdp.states[x].name = chain.state_names[x];
        ActionNode step;
        step.name = "step";
        for (const auto& [y, p] : chain.rows[x])
            step.outcomes.push_back({y, p, {{chain.reward[x], 1.0}}});
        mdp.states[x].actions.push_back(std::move(step));
    }
    mdp.validate();
    Policy pol;
    pol.rule.assign(chain.size(), {1.0});
    return render_model(mdp, &pol);
}

} // namespace satrisk
