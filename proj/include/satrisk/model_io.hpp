#pragma once

#include "satrisk/model.hpp"

#include <optional>
#include <string>

// Model-file ingestion and rendering. A model file is a JSON object with
// the keys gamma, states, actions, transitions, rewards, initial and an
// optional policy; see README for the exact schema. Rendering emits
// shortest round-trip decimals, so parse(render(m)) reproduces m exactly.

namespace satrisk {

struct ParsedModel {
    Mdp mdp;
    std::optional<Policy> policy;
};

/// Parses and validates a model file. Throws input_error with the offending
/// field path on syntax, schema or invariant violations.
ParsedModel parse_model(const std::string& text);

/// Parses a policy for `mdp`, either from a bare {state: {action: prob}}
/// object or from the "policy" key of a full model file.
Policy parse_policy(const std::string& text, const Mdp& mdp);

/// Renders a validated model (and optionally a policy) in canonical key
/// and row order.
std::string render_model(const Mdp& mdp, const Policy* policy = nullptr);

/// Renders a deterministic-reward chain as a model file with a single
/// "step" action per state and a point-mass reward on each transition.
/// Note the chain's reward clock is not representable in the format: a
/// reparsed offset-1 chain evaluates with its bookkeeping epoch included.
std::string render_chain(const DetChain& chain);

} // namespace satrisk
