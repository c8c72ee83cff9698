#include "satrisk/sat.hpp"

#include "satrisk/errors.hpp"
#include "satrisk/format.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace satrisk {

AugMdp transform_mdp(const Mdp& mdp) {
    const int n = static_cast<int>(mdp.states.size());
    AugMdp aug;
    aug.source_state_count = n;
    aug.mdp.gamma = mdp.gamma;

    // Tuple states, in (prev, action, landing, reward) enumeration order.
    // tuple_index mirrors the source layout so rows can be wired up below.
    std::vector<std::vector<std::vector<std::vector<int>>>> tuple_index(n);
    std::vector<char> landed(n, 0);
    for (int x = 0; x < n; ++x) {
        const auto& acts = mdp.states[x].actions;
        tuple_index[x].resize(acts.size());
        for (std::size_t k = 0; k < acts.size(); ++k) {
            tuple_index[x][k].resize(acts[k].outcomes.size());
            for (std::size_t oi = 0; oi < acts[k].outcomes.size(); ++oi) {
                const Outcome& o = acts[k].outcomes[oi];
                landed[o.to] = 1;
                for (const auto& atom : o.rewards) {
                    const int id = static_cast<int>(aug.mdp.states.size());
                    tuple_index[x][k][oi].push_back(id);
                    StateNode st;
                    st.name = mdp.states[x].name + "-" + acts[k].name + "-" +
                              mdp.states[o.to].name + "-" + fmt_value(atom.value);
                    aug.mdp.states.push_back(std::move(st));
                    aug.back_map.push_back({false, x, static_cast<int>(k), o.to, atom.value});
                }
            }
        }
    }
    aug.tuple_count = static_cast<int>(aug.mdp.states.size());

    // One null start state per state that carries initial mass or is ever
    // landed on; isolated unreachable states get none.
    std::vector<int> null_index(n, -1);
    for (int x = 0; x < n; ++x) {
        if (!(mdp.initial[x] > 0.0) && !landed[x]) continue;
        null_index[x] = static_cast<int>(aug.mdp.states.size());
        StateNode st;
        st.name = "null-" + mdp.states[x].name;
        aug.mdp.states.push_back(std::move(st));
        aug.back_map.push_back({true, x, -1, x, 0.0});
    }

    // The action set and outgoing rows of an augmented state are those of
    // its anchor; every branch carries a point mass on the source reward.
    for (std::size_t i = 0; i < aug.mdp.states.size(); ++i) {
        const int anchor = aug.back_map[i].landing;
        const double own_reward = aug.back_map[i].reward;
        const auto& acts = mdp.states[anchor].actions;
        for (std::size_t k = 0; k < acts.size(); ++k) {
            ActionNode node;
            node.name = acts[k].name;
            for (std::size_t oi = 0; oi < acts[k].outcomes.size(); ++oi) {
                const Outcome& o = acts[k].outcomes[oi];
                for (std::size_t ai = 0; ai < o.rewards.size(); ++ai) {
                    Outcome branch;
                    branch.to = tuple_index[anchor][k][oi][ai];
                    branch.prob = o.prob * o.rewards[ai].prob;
                    branch.rewards = {{own_reward, 1.0}};
                    node.outcomes.push_back(std::move(branch));
                }
            }
            aug.mdp.states[i].actions.push_back(std::move(node));
        }
    }

    aug.mdp.initial.assign(aug.mdp.states.size(), 0.0);
    for (int x = 0; x < n; ++x)
        if (mdp.initial[x] > 0.0) {
            if (null_index[x] < 0)
                throw input_error("internal: missing null state for " + mdp.states[x].name);
            aug.mdp.initial[static_cast<std::size_t>(null_index[x])] = mdp.initial[x];
        }

    std::set<double> support(mdp.reward_support.begin(), mdp.reward_support.end());
    support.insert(0.0);
    aug.mdp.reward_support.assign(support.begin(), support.end());

    aug.mdp.validate();
    if (aug.mdp.states.size() != aug.back_map.size())
        throw input_error("internal: augmented state bookkeeping out of sync");
    return aug;
}

Policy lift_policy(const AugMdp& aug, const Policy& policy) {
    if (policy.rule.size() != static_cast<std::size_t>(aug.source_state_count))
        throw input_error("policy does not match the source model of this transformation");
    Policy lifted;
    lifted.rule.reserve(aug.back_map.size());
    for (const auto& info : aug.back_map) {
        if (policy.rule[info.landing].size() !=
            aug.mdp.states[lifted.rule.size()].actions.size())
            throw input_error("policy does not match the action set of state " +
                              aug.mdp.states[lifted.rule.size()].name);
        lifted.rule.push_back(policy.rule[info.landing]);
    }
    lifted.validate_for(aug.mdp);
    return lifted;
}

DetChain transform_process(const Mdp& mdp, const Policy& policy) {
    Policy pol = policy;
    pol.validate_for(mdp);

    const AugMdp aug = transform_mdp(mdp);
    const Policy lifted = lift_policy(aug, pol);

    const std::size_t n = aug.mdp.states.size();
    DetChain chain;
    chain.gamma = aug.mdp.gamma;
    chain.initial = aug.mdp.initial;
    chain.reward_epoch_offset = 1;
    chain.state_names.reserve(n);
    chain.reward.reserve(n);
    chain.sat_tags.reserve(n);
    chain.rows.resize(n);

    for (std::size_t i = 0; i < n; ++i) {
        chain.state_names.push_back(aug.mdp.states[i].name);
        chain.reward.push_back(aug.back_map[i].reward);
        chain.sat_tags.push_back(
            {aug.back_map[i].landing, aug.back_map[i].reward, aug.back_map[i].null_state});

        std::map<int, double> row;
        const auto& acts = aug.mdp.states[i].actions;
        for (std::size_t k = 0; k < acts.size(); ++k) {
            const double w = lifted.rule[i][k];
            if (w == 0.0) continue;
            for (const auto& o : acts[k].outcomes) row[o.to] += w * o.prob;
        }
        chain.rows[i].assign(row.begin(), row.end());
    }

    validate_chain(chain);
    return chain;
}

} // namespace satrisk
