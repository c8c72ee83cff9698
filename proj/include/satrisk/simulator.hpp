#pragma once

#include "satrisk/model.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

// Seeded Monte-Carlo sampling of truncated discounted returns, the grouped
// empirical risk estimators, and the exact finite-horizon enumeration
// oracle used throughout the test suite.
//
// Determinism contract: the random stream of simulation (group, sim) is
// derived from (seed, group, sim) alone, so results are independent of
// execution order; identical inputs give bit-identical outputs.

namespace satrisk {

/// L x M matrix of realized truncated discounted returns, group-major.
struct SampleGroups {
    std::vector<double> returns;
    int groups = 0;    // L
    int per_group = 0; // M
    int horizon = 0;   // N
    std::uint64_t seed = 0;
    std::string process_tag;

    double at(int group, int sim) const {
        return returns[static_cast<std::size_t>(group) * per_group + sim];
    }
};

/// Exact distribution of the truncated discounted return; atoms sorted by
/// value, probabilities sum to 1 within 1e-12.
struct TruncatedDistribution {
    std::vector<std::pair<double, double>> atoms; // (value, probability)
    int horizon = 0;
};

/// xoshiro256++ with splitmix64 seeding: cheap to construct, so a fresh
/// engine per simulation is affordable, which is what makes the per-(group,
/// sim) stream derivation practical.
class SimRng {
  public:
    explicit SimRng(std::uint64_t seed);
    std::uint64_t operator()();

  private:
    std::uint64_t state_[4];
};

/// Counter-derived engine for simulation (group, sim) under `seed`.
SimRng sim_stream(std::uint64_t seed, std::uint64_t group, std::uint64_t sim);

/// Uniform draw in [0,1) using the engine's top 53 bits.
double u01(SimRng& eng);

/// One truncated return phi = sum_{t=1..N} gamma^(t-1) R_t. Offset-1 chains
/// first step out of their bookkeeping start state before rewards count.
double sample_return(const RewardProcess& process, int horizon, SimRng& eng);
double sample_return(const DetChain& chain, int horizon, SimRng& eng);

SampleGroups run_groups(const RewardProcess& process, int groups, int per_group, int horizon,
                        std::uint64_t seed, std::string process_tag = "original");
SampleGroups run_groups(const DetChain& chain, int groups, int per_group, int horizon,
                        std::uint64_t seed, std::string process_tag = "chain");

struct Estimate {
    double value = 0.0;
    double stderr_ = 0.0; // std dev of the group statistics / sqrt(L)
};

/// Per group i: mean_i - k * sd_i (sample sd, M-1 denominator), averaged
/// over groups. k = 0 recovers plain group-mean averaging. Requires M >= 2.
Estimate empirical_mean_variance(const SampleGroups& groups, double k);

/// Per group i: beta^-1 log( mean_t exp(beta phi_it) ), computed with a
/// max-shift so it cannot overflow. beta = 0 returns the analytic limit
/// (the group mean).
Estimate empirical_utility(const SampleGroups& groups, double beta);

/// Exact truncated return distribution by support enumeration. Guarded:
/// at most 12 support branches per step and horizon <= 10.
TruncatedDistribution enumerate_truncated(const RewardProcess& process, int horizon);

/// Exact truncated return distribution by dynamic programming over
/// (state, accumulated value); horizon <= 400, bounded atom count.
TruncatedDistribution enumerate_truncated(const DetChain& chain, int horizon);

std::string to_csv(const SampleGroups& groups);
std::string to_csv(const TruncatedDistribution& dist);

} // namespace satrisk
