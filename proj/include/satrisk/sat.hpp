#pragma once

#include "satrisk/model.hpp"

// State-augmentation transformation. An MDP with a stochastic transition
// reward is mapped to an MDP over augmented states (prev, action, landing,
// reward) plus one zero-reward null start state per original state, whose
// reward is a deterministic function of the state. Only tuples on the
// support of p(y|x,a) d(j|x,a,y) are materialized. The transition row out
// of an augmented state depends only on its landing (anchor) state, which
// is what the lumping fast path exploits.

namespace satrisk {

/// Back-map entry for one augmented state.
struct AugState {
    bool null_state = false;
    int prev = -1;       // original source state (tuples), anchor for nulls
    int action = -1;     // local action index at prev (tuples only)
    int landing = -1;    // anchor: the original state whose actions apply
    double reward = 0.0; // deterministic reward of this augmented state
};

struct AugMdp {
    Mdp mdp;                        // augmented MDP with point-mass rewards
    std::vector<AugState> back_map; // parallel to mdp.states
    int tuple_count = 0;            // back_map[0..tuple_count) are tuples
    int source_state_count = 0;
};

/// Builds the augmented MDP. Tuple states are named
/// "prev-action-landing-reward"; null states "null-<state>". Null states
/// are materialized for every state that carries initial mass or is the
/// landing state of a support transition.
AugMdp transform_mdp(const Mdp& mdp);

/// Lifts a policy of the source MDP: the lifted rule at an augmented state
/// is the source rule at its anchor state.
Policy lift_policy(const AugMdp& aug, const Policy& policy);

/// The chain induced by (transform_mdp, lift_policy): deterministic
/// state-based rewards, initial mass on the null states and
/// reward_epoch_offset = 1. Carries sat_tags for the lumping fast path.
DetChain transform_process(const Mdp& mdp, const Policy& policy);

} // namespace satrisk
