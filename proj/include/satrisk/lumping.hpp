#pragma once

#include "satrisk/model.hpp"

#include <string>
#include <vector>

// Isotopic-state lumping. Two chain states are isotopic when they carry the
// same reward and the same transition probability to every third state;
// merging them preserves the distribution of the reward sequence, hence
// every law-invariant risk of the return. The sat-key strategy exploits the
// augmented-chain structure: states sharing (landing state, reward) have
// identical outgoing rows, so whole classes merge in one pass.

namespace satrisk {

enum class LumpStrategy { pairwise, sat_key };

const char* lump_strategy_name(LumpStrategy s);

struct LumpReport {
    std::vector<std::vector<std::string>> classes; // member names per class
    DetChain merged_chain;
    std::size_t size_before = 0;
    std::size_t size_after = 0;
    LumpStrategy strategy = LumpStrategy::pairwise;
};

/// Reward equality is exact; transition probabilities are compared
/// within 1e-12. Throws input_error on unknown or equal state indices.
bool are_isotopic(const DetChain& chain, int xi, int xj);
bool are_isotopic(const DetChain& chain, const std::string& xi, const std::string& xj);

/// Merges xj into xi: incoming mass is redirected, initial mass summed,
/// everything else copied. Refuses (input_error) when not isotopic.
DetChain lump_pair(const DetChain& chain, int xi, int xj);
DetChain lump_pair(const DetChain& chain, const std::string& xi, const std::string& xj);

/// Repeatedly merges the lexicographically first isotopic pair (by state
/// name, smaller name survives) until none remains.
LumpReport lump_all(const DetChain& chain);

/// One-pass merge of states grouped by (anchor state, reward). Requires a
/// chain produced by transform_process; every group is re-verified against
/// the pairwise isotopy test before merging.
LumpReport sat_fast_lump(const DetChain& chain);

} // namespace satrisk
