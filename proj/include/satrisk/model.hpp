#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Core domain types: a finite MDP whose reward is a random variable drawn
// per transition, the processes induced by fixing a randomized policy, and
// the deterministic-reward chain the rest of the library evaluates.
// All values are immutable after validation and safe to share across threads.

namespace satrisk {

/// One atom of a conditional reward distribution: P(R = value) = prob.
struct RewardAtom {
    double value = 0.0;
    double prob = 0.0;
};

/// One (to, prob) branch of a transition row together with the conditional
/// reward law attached to that branch. `rewards` sums to 1.
struct Outcome {
    int to = -1;
    double prob = 0.0;
    std::vector<RewardAtom> rewards;
};

struct ActionNode {
    std::string name;
    std::vector<Outcome> outcomes; // support of p(.|x,a), sorted by `to`
};

struct StateNode {
    std::string name;
    std::vector<ActionNode> actions; // allowable actions A_x, nonempty
};

/// Finite MDP with a stochastic transition-based reward distribution.
struct Mdp {
    std::vector<StateNode> states;
    std::vector<double> initial;        // one entry per state, sums to 1
    std::vector<double> reward_support; // sorted distinct reward values
    double gamma = 0.9;                 // in (0,1)

    int state_index(std::string_view name) const; // -1 when absent
    int action_index(int state, std::string_view name) const;

    /// Checks every structural invariant, sorts rows/atoms into canonical
    /// order, renormalizes probability rows within tolerance and derives
    /// reward_support when empty. Throws input_error on violation.
    void validate();
};

/// Stationary randomized decision rule. rule[x][k] is the probability of
/// the k-th action of state x; each row sums to 1.
struct Policy {
    std::vector<std::vector<double>> rule;

    /// Checks shape against `mdp` and normalizes rows. Throws input_error.
    void validate_for(const Mdp& mdp);
};

/// Markov reward process induced by fixing a policy: transition p_pi and
/// the policy-mixed conditional reward law d_pi on each branch.
struct RewardProcess {
    std::vector<std::string> state_names;
    std::vector<std::vector<Outcome>> rows;
    std::vector<double> initial;
    double gamma = 0.0;
};

/// Provenance of one augmented-chain state: the original state whose
/// action set and outgoing row it copies, and its deterministic reward.
struct SatTag {
    int anchor = -1;
    double reward = 0.0;
    bool null_state = false;
};

/// Markov chain with a deterministic state-based reward.
///
/// reward_epoch_offset selects the reward clock: 0 means reward(X_t) is
/// discounted by gamma^(t-1) starting at t = 1; 1 means the chain starts in
/// a zero-reward bookkeeping state at epoch 0 and the first discounted
/// reward is collected one step later.
struct DetChain {
    std::vector<std::string> state_names;
    std::vector<std::vector<std::pair<int, double>>> rows; // sparse, sorted by target
    std::vector<double> reward;
    std::vector<double> initial;
    double gamma = 0.0;
    int reward_epoch_offset = 0;
    std::vector<SatTag> sat_tags; // empty unless produced by transform_process

    std::size_t size() const { return state_names.size(); }
    int state_index(std::string_view name) const; // -1 when absent
};

/// Row-stochasticity, initial distribution and offset invariants.
/// Throws input_error on violation.
void validate_chain(const DetChain& chain);

/// The Markov reward process of (mdp, policy):
/// p_pi(y|x) = sum_a pi(a|x) p(y|x,a) and
/// d_pi(j|x,y) = sum_a pi(a|x) p(y|x,a) d(j|x,a,y) / p_pi(y|x).
RewardProcess induce(const Mdp& mdp, const Policy& policy);

/// Baseline that replaces the stochastic reward by its conditional
/// expectation per state: r'(x) = sum_{a,y,j} j pi(a|x) p(y|x,a) d(j|x,a,y).
/// Deliberately preserves only the mean of the return, not its law.
DetChain simplify_reward(const Mdp& mdp, const Policy& policy);

} // namespace satrisk
