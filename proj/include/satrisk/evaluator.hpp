#pragma once

#include "satrisk/model.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

// Exact return moments of a deterministic-reward chain via the pair of
// discounted linear systems
//     v   = r + gamma   P v
//     psi = u + gamma^2 P psi,  u(x) = gamma^2 (E[v(Y)^2|x] - E[v(Y)|x]^2),
// and the two law-invariant risk functionals built on them. Systems are
// solved by dense LU up to `dense_limit` states and by fixed-point
// iteration above it; both paths end with a residual check.

namespace satrisk {

struct EvalResult {
    double mean = 0.0;
    double variance = 0.0;
    std::vector<double> per_state_value;
    std::vector<double> per_state_variance;
    std::string pipeline;
};

struct EvalOptions {
    std::size_t dense_limit = 2000;
};

/// Expected discounted return per start state, reward collected at the
/// first epoch. Residual bound 1e-10 (numeric_error beyond).
std::vector<double> value_vector(const DetChain& chain, const EvalOptions& opts = {});

/// Return variance per start state; requires v = value_vector(chain).
/// Entries within round-off below zero are clamped to 0.
std::vector<double> variance_vector(const DetChain& chain, const std::vector<double>& value,
                                    const EvalOptions& opts = {});

/// (mean, variance) of the return under the chain's initial distribution,
/// honoring reward_epoch_offset: offset-1 chains mix over the one-step
/// distribution out of the bookkeeping states.
std::pair<double, double> return_moments(const DetChain& chain, const EvalOptions& opts = {});

EvalResult evaluate_chain(const DetChain& chain, std::string pipeline,
                          const EvalOptions& opts = {});

/// mean - k * sqrt(variance). Risk-averse for k > 0.
double mean_variance_risk(double mean, double variance, double k);

/// Second-order expansion of the exponential utility: mean + (beta/2) * variance.
/// Exact at beta = 0; the truncation error grows with |beta|.
double utility_taylor(double mean, double variance, double beta);

} // namespace satrisk
