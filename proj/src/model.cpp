#include "satrisk/model.hpp"

#include "satrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

namespace satrisk {
namespace {

// Row sums within kProbTol of 1 are accepted; sums farther than kExactWindow
// from 1 are rescaled. Sums inside the window are kept bit-identical so that
// rendering and reparsing a model reproduces it exactly.
constexpr double kProbTol = 1e-9;
constexpr double kExactWindow = 1e-12;

double row_sum(const std::vector<double>& row) {
    double s = 0.0;
    for (double p : row) s += p;
    return s;
}

void normalize_row(std::vector<double>& row, const std::string& what) {
    for (double p : row)
        if (!(p >= 0.0) || !std::isfinite(p))
            throw input_error(what + ": negative or non-finite probability");
    const double s = row_sum(row);
    const double residual = s - 1.0;
    if (std::fabs(residual) > kProbTol)
        throw input_error(what + ": probabilities sum to " + std::to_string(s) +
                          " (residual " + std::to_string(residual) +
                          " exceeds tolerance 1e-9)");
    if (std::fabs(residual) > kExactWindow)
        for (double& p : row) p /= s;
}

void check_finite(double v, const std::string& what) {
    if (!std::isfinite(v)) throw input_error(what + ": non-finite value");
}

} // namespace

int Mdp::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < states.size(); ++i)
        if (states[i].name == name) return static_cast<int>(i);
    return -1;
}

int Mdp::action_index(int state, std::string_view name) const {
    if (state < 0 || state >= static_cast<int>(states.size())) return -1;
    const auto& acts = states[state].actions;
    for (std::size_t k = 0; k < acts.size(); ++k)
        if (acts[k].name == name) return static_cast<int>(k);
    return -1;
}

int DetChain::state_index(std::string_view name) const {
    for (std::size_t i = 0; i < state_names.size(); ++i)
        if (state_names[i] == name) return static_cast<int>(i);
    return -1;
}

void Mdp::validate() {
    if (states.empty()) throw input_error("model has no states");
    const int n = static_cast<int>(states.size());

    std::unordered_set<std::string> seen;
    for (const auto& st : states) {
        if (st.name.empty()) throw input_error("empty state identifier");
        if (!seen.insert(st.name).second)
            throw input_error("duplicate state identifier: " + st.name);
        if (st.actions.empty())
            throw input_error("state " + st.name + " has an empty action set");
        std::unordered_set<std::string> act_seen;
        for (const auto& a : st.actions) {
            if (a.name.empty())
                throw input_error("state " + st.name + " has an action with an empty name");
            if (!act_seen.insert(a.name).second)
                throw input_error("state " + st.name + " has a duplicate action: " + a.name);
        }
    }

    if (!(gamma > 0.0 && gamma < 1.0))
        throw input_error("gamma must lie strictly inside (0,1), got " + std::to_string(gamma));

    if (static_cast<int>(initial.size()) != n)
        throw input_error("initial distribution must assign a value to every state");
    normalize_row(initial, "initial distribution");

    for (auto& st : states) {
        for (auto& act : st.actions) {
            const std::string where = "(" + st.name + ", " + act.name + ")";
            for (auto& o : act.outcomes) {
                if (o.to < 0 || o.to >= n)
                    throw input_error("transition " + where + ": unknown target state");
            }
            std::sort(act.outcomes.begin(), act.outcomes.end(),
                      [](const Outcome& a, const Outcome& b) { return a.to < b.to; });
            for (std::size_t i = 1; i < act.outcomes.size(); ++i)
                if (act.outcomes[i].to == act.outcomes[i - 1].to)
                    throw input_error("duplicate transition " + where + " -> " +
                                      states[act.outcomes[i].to].name);

            std::vector<double> probs;
            probs.reserve(act.outcomes.size());
            for (const auto& o : act.outcomes) probs.push_back(o.prob);
            normalize_row(probs, "transition row " + where);
            for (std::size_t i = 0; i < probs.size(); ++i) act.outcomes[i].prob = probs[i];

            // Zero-probability branches carry no mass; drop them so that
            // downstream construction only ever walks the support.
            act.outcomes.erase(std::remove_if(act.outcomes.begin(), act.outcomes.end(),
                                              [](const Outcome& o) { return o.prob == 0.0; }),
                               act.outcomes.end());

            for (auto& o : act.outcomes) {
                const std::string branch =
                    where + " -> " + states[o.to].name;
                if (o.rewards.empty())
                    throw input_error("reward distribution missing for transition " + branch);
                for (auto& atom : o.rewards) check_finite(atom.value, "reward on " + branch);
                std::sort(o.rewards.begin(), o.rewards.end(),
                          [](const RewardAtom& a, const RewardAtom& b) {
                              return a.value < b.value;
                          });
                for (std::size_t i = 1; i < o.rewards.size(); ++i)
                    if (o.rewards[i].value == o.rewards[i - 1].value)
                        throw input_error("duplicate reward value on " + branch);
                std::vector<double> rp;
                rp.reserve(o.rewards.size());
                for (const auto& atom : o.rewards) rp.push_back(atom.prob);
                normalize_row(rp, "reward distribution on " + branch);
                for (std::size_t i = 0; i < rp.size(); ++i) o.rewards[i].prob = rp[i];
                o.rewards.erase(std::remove_if(o.rewards.begin(), o.rewards.end(),
                                               [](const RewardAtom& a) { return a.prob == 0.0; }),
                                o.rewards.end());
                if (o.rewards.empty())
                    throw input_error("reward distribution on " + branch + " has no mass");
            }
        }
    }

    // Derive the reward support from the used values, or check membership
    // against an explicitly provided one.
    std::set<double> used;
    for (const auto& st : states)
        for (const auto& act : st.actions)
            for (const auto& o : act.outcomes)
                for (const auto& atom : o.rewards) used.insert(atom.value);
    if (reward_support.empty()) {
        reward_support.assign(used.begin(), used.end());
    } else {
        std::sort(reward_support.begin(), reward_support.end());
        reward_support.erase(std::unique(reward_support.begin(), reward_support.end()),
                             reward_support.end());
        for (double v : used)
            if (!std::binary_search(reward_support.begin(), reward_support.end(), v))
                throw input_error("reward value " + std::to_string(v) +
                                  " is not a member of the declared reward support");
    }
}

void Policy::validate_for(const Mdp& mdp) {
    if (rule.size() != mdp.states.size())
        throw input_error("policy must provide a rule for every state");
    for (std::size_t x = 0; x < rule.size(); ++x) {
        if (rule[x].size() != mdp.states[x].actions.size())
            throw input_error("policy rule for state " + mdp.states[x].name +
                              " does not match its action set");
        normalize_row(rule[x], "policy rule for state " + mdp.states[x].name);
    }
}

void validate_chain(const DetChain& chain) {
    const int n = static_cast<int>(chain.size());
    if (n == 0) throw input_error("chain has no states");
    if (chain.rows.size() != chain.size() || chain.reward.size() != chain.size() ||
        chain.initial.size() != chain.size())
        throw input_error("chain fields have inconsistent sizes");
    if (!(chain.gamma > 0.0 && chain.gamma < 1.0))
        throw input_error("chain gamma must lie strictly inside (0,1)");
    if (chain.reward_epoch_offset != 0 && chain.reward_epoch_offset != 1)
        throw input_error("chain reward_epoch_offset must be 0 or 1");
    if (!chain.sat_tags.empty() && chain.sat_tags.size() != chain.size())
        throw input_error("chain annotations have inconsistent size");

    double init_sum = 0.0;
    for (int x = 0; x < n; ++x) {
        const double mu = chain.initial[x];
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw input_error("chain initial mass must be nonnegative");
        init_sum += mu;
        if (chain.reward_epoch_offset == 1 && mu > 0.0 && chain.reward[x] != 0.0)
            throw input_error("offset-1 chain starts in a reward-bearing state: " +
                              chain.state_names[x]);
        double s = 0.0;
        for (const auto& [y, p] : chain.rows[x]) {
            if (y < 0 || y >= n) throw input_error("chain transition targets unknown state");
            if (!(p >= 0.0) || !std::isfinite(p))
                throw input_error("chain transition probability must be nonnegative");
            s += p;
        }
        if (std::fabs(s - 1.0) > kProbTol)
            throw input_error("chain row for " + chain.state_names[x] + " sums to " +
                              std::to_string(s));
    }
    if (std::fabs(init_sum - 1.0) > kProbTol)
        throw input_error("chain initial distribution sums to " + std::to_string(init_sum));
}

RewardProcess induce(const Mdp& mdp, const Policy& policy) {
    Policy pol = policy;
    pol.validate_for(mdp);

    const int n = static_cast<int>(mdp.states.size());
    RewardProcess rp;
    rp.gamma = mdp.gamma;
    rp.initial = mdp.initial;
    rp.state_names.reserve(n);
    for (const auto& st : mdp.states) rp.state_names.push_back(st.name);
    rp.rows.resize(n);

    for (int x = 0; x < n; ++x) {
        // Joint mass over (y, j); the conditional law per branch comes out
        // by dividing through the mixed transition probability.
        std::map<int, double> pmix;
        std::map<int, std::map<double, double>> joint;
        const auto& acts = mdp.states[x].actions;
        for (std::size_t k = 0; k < acts.size(); ++k) {
            const double w = pol.rule[x][k];
            if (w == 0.0) continue;
            for (const auto& o : acts[k].outcomes) {
                pmix[o.to] += w * o.prob;
                for (const auto& atom : o.rewards)
                    joint[o.to][atom.value] += w * o.prob * atom.prob;
            }
        }
        for (const auto& [y, p] : pmix) {
            if (p == 0.0) continue;
            Outcome out;
            out.to = y;
            out.prob = p;
            for (const auto& [value, mass] : joint[y])
                if (mass > 0.0) out.rewards.push_back({value, mass / p});
            rp.rows[x].push_back(std::move(out));
        }
        if (rp.rows[x].empty())
            throw input_error("state " + mdp.states[x].name +
                              " has no outgoing transition under the policy");
    }
    return rp;
}

DetChain simplify_reward(const Mdp& mdp, const Policy& policy) {
    Policy pol = policy;
    pol.validate_for(mdp);
    const RewardProcess rp = induce(mdp, pol);

    const int n = static_cast<int>(mdp.states.size());
    DetChain chain;
    chain.gamma = mdp.gamma;
    chain.initial = mdp.initial;
    chain.state_names = rp.state_names;
    chain.reward_epoch_offset = 0;
    chain.reward.assign(n, 0.0);
    chain.rows.resize(n);

    for (int x = 0; x < n; ++x) {
        double expected = 0.0;
        const auto& acts = mdp.states[x].actions;
        for (std::size_t k = 0; k < acts.size(); ++k) {
            const double w = pol.rule[x][k];
            if (w == 0.0) continue;
            for (const auto& o : acts[k].outcomes)
                for (const auto& atom : o.rewards)
                    expected += atom.value * w * o.prob * atom.prob;
        }
        chain.reward[x] = expected;
        chain.rows[x].reserve(rp.rows[x].size());
        for (const auto& o : rp.rows[x]) chain.rows[x].emplace_back(o.to, o.prob);
    }
    validate_chain(chain);
    return chain;
}

} // namespace satrisk
