#include "satrisk/simulator.hpp"

#include "satrisk/errors.hpp"
#include "satrisk/format.hpp"
#include "satrisk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace satrisk {
namespace {

constexpr double kAtomMergeTol = 1e-12;
constexpr int kMaxEnumBranches = 12;
constexpr int kMaxEnumHorizon = 10;
constexpr int kMaxDpHorizon = 400;
constexpr std::size_t kMaxDpAtoms = 2000000;

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

int draw_initial(const std::vector<double>& mu, double u) {
    double cum = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        cum += mu[i];
        if (u < cum) return static_cast<int>(i);
    }
    return static_cast<int>(mu.size()) - 1;
}

// Sorted (value, prob) list -> clustered atoms. Values within the merge
// tolerance of a cluster's first value collapse into a probability-weighted
// mean, so two enumerations of the same law produce identical atom lists.
std::vector<std::pair<double, double>> merge_atoms(std::vector<std::pair<double, double>> raw) {
    std::sort(raw.begin(), raw.end());
    std::vector<std::pair<double, double>> merged;
    double anchor_value = 0.0;
    for (const auto& [value, prob] : raw) {
        if (!merged.empty() && value - anchor_value <= kAtomMergeTol) {
            auto& [mv, mp] = merged.back();
            mv = (mv * mp + value * prob) / (mp + prob);
            mp += prob;
        } else {
            merged.emplace_back(value, prob);
            anchor_value = value;
        }
    }
    return merged;
}

struct Branch {
    int to;
    double reward;
    double prob;
};

std::vector<std::vector<Branch>> flatten(const RewardProcess& process) {
    std::vector<std::vector<Branch>> rows(process.rows.size());
    for (std::size_t x = 0; x < process.rows.size(); ++x)
        for (const auto& o : process.rows[x])
            for (const auto& atom : o.rewards)
                rows[x].push_back({o.to, atom.value, o.prob * atom.prob});
    return rows;
}

void check_enum_guard(const std::vector<std::vector<Branch>>& rows, int horizon) {
    if (horizon < 1) throw input_error("enumeration horizon must be at least 1");
    std::size_t max_branches = 0;
    for (const auto& row : rows) max_branches = std::max(max_branches, row.size());
    if (max_branches > kMaxEnumBranches || horizon > kMaxEnumHorizon)
        throw input_error("enumeration guard exceeded: " + std::to_string(max_branches) +
                          " branches per step at horizon " + std::to_string(horizon));
    double paths = 1.0;
    for (int t = 0; t < horizon; ++t) paths *= static_cast<double>(max_branches);
    if (paths > 6.7e7) throw input_error("enumeration would visit too many paths");
}

void enumerate_rec(const std::vector<std::vector<Branch>>& rows, int state, int epoch,
                   int horizon, double discount, double gamma, double value, double prob,
                   std::vector<std::pair<double, double>>& out) {
    if (epoch > horizon) {
        out.emplace_back(value, prob);
        return;
    }
    for (const auto& br : rows[static_cast<std::size_t>(state)])
        enumerate_rec(rows, br.to, epoch + 1, horizon, discount * gamma, gamma,
                      value + discount * br.reward, prob * br.prob, out);
}

std::vector<double> chain_start_distribution(const DetChain& chain) {
    if (chain.reward_epoch_offset == 0) return chain.initial;
    std::vector<double> q(chain.size(), 0.0);
    for (std::size_t x = 0; x < chain.size(); ++x) {
        const double mu = chain.initial[x];
        if (mu == 0.0) continue;
        for (const auto& [y, p] : chain.rows[x]) q[static_cast<std::size_t>(y)] += mu * p;
    }
    return q;
}

double group_mean(const SampleGroups& g, int i) {
    const double* slice = g.returns.data() + static_cast<std::size_t>(i) * g.per_group;
    return kernels::reduce_sum(slice, static_cast<std::size_t>(g.per_group)) / g.per_group;
}

Estimate aggregate(const std::vector<double>& stats) {
    const std::size_t l = stats.size();
    Estimate e;
    e.value = kernels::reduce_sum(stats.data(), l) / static_cast<double>(l);
    if (l > 1) {
        const double ss = kernels::sumsq_dev(stats.data(), l, e.value);
        e.stderr_ = std::sqrt(ss / static_cast<double>(l - 1)) /
                    std::sqrt(static_cast<double>(l));
    }
    return e;
}

} // namespace

namespace {

std::uint64_t rotl64(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

std::uint64_t splitmix_next(std::uint64_t& s) {
    s += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

SimRng::SimRng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix_next(s);
}

std::uint64_t SimRng::operator()() {
    const std::uint64_t result = rotl64(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl64(state_[3], 45);
    return result;
}

SimRng sim_stream(std::uint64_t seed, std::uint64_t group, std::uint64_t sim) {
    std::uint64_t h = mix64(seed);
    h = mix64(h + group);
    h = mix64(h + sim);
    return SimRng(h);
}

double u01(SimRng& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double sample_return(const RewardProcess& process, int horizon, SimRng& eng) {
    if (horizon < 1) throw input_error("horizon must be at least 1");
    int state = draw_initial(process.initial, u01(eng));
    double value = 0.0;
    double discount = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        const auto& row = process.rows[static_cast<std::size_t>(state)];
        double u = u01(eng);
        double cum = 0.0;
        const Outcome* picked = &row.back();
        for (const auto& o : row) {
            cum += o.prob;
            if (u < cum) {
                picked = &o;
                break;
            }
        }
        u = u01(eng);
        cum = 0.0;
        double reward = picked->rewards.back().value;
        for (const auto& atom : picked->rewards) {
            cum += atom.prob;
            if (u < cum) {
                reward = atom.value;
                break;
            }
        }
        value += discount * reward;
        discount *= process.gamma;
        state = picked->to;
    }
    return value;
}

double sample_return(const DetChain& chain, int horizon, SimRng& eng) {
    if (horizon < 1) throw input_error("horizon must be at least 1");
    auto step = [&](int state) {
        const auto& row = chain.rows[static_cast<std::size_t>(state)];
        const double u = u01(eng);
        double cum = 0.0;
        for (const auto& [y, p] : row) {
            cum += p;
            if (u < cum) return y;
        }
        return row.back().first;
    };
    int state = draw_initial(chain.initial, u01(eng));
    if (chain.reward_epoch_offset == 1) state = step(state);
    double value = 0.0;
    double discount = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        value += discount * chain.reward[static_cast<std::size_t>(state)];
        discount *= chain.gamma;
        if (t < horizon) state = step(state);
    }
    return value;
}

namespace {

template <class Process>
SampleGroups run_groups_impl(const Process& process, int groups, int per_group, int horizon,
                             std::uint64_t seed, std::string tag) {
    if (groups < 1 || per_group < 1) throw input_error("L and M must be at least 1");
    SampleGroups out;
    out.groups = groups;
    out.per_group = per_group;
    out.horizon = horizon;
    out.seed = seed;
    out.process_tag = std::move(tag);
    out.returns.resize(static_cast<std::size_t>(groups) * per_group);
    for (int i = 0; i < groups; ++i)
        for (int t = 0; t < per_group; ++t) {
            SimRng eng = sim_stream(seed, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(t));
            out.returns[static_cast<std::size_t>(i) * per_group + t] =
                sample_return(process, horizon, eng);
        }
    return out;
}

} // namespace

SampleGroups run_groups(const RewardProcess& process, int groups, int per_group, int horizon,
                        std::uint64_t seed, std::string process_tag) {
    return run_groups_impl(process, groups, per_group, horizon, seed, std::move(process_tag));
}

SampleGroups run_groups(const DetChain& chain, int groups, int per_group, int horizon,
                        std::uint64_t seed, std::string process_tag) {
    return run_groups_impl(chain, groups, per_group, horizon, seed, std::move(process_tag));
}

Estimate empirical_mean_variance(const SampleGroups& groups, double k) {
    if (groups.per_group < 2)
        throw input_error("group standard deviation needs at least two simulations per group");
    std::vector<double> stats(static_cast<std::size_t>(groups.groups));
    for (int i = 0; i < groups.groups; ++i) {
        const double* slice =
            groups.returns.data() + static_cast<std::size_t>(i) * groups.per_group;
        const double mean = group_mean(groups, i);
        const double ss =
            kernels::sumsq_dev(slice, static_cast<std::size_t>(groups.per_group), mean);
        const double sd = std::sqrt(ss / (groups.per_group - 1));
        stats[static_cast<std::size_t>(i)] = mean - k * sd;
    }
    return aggregate(stats);
}

Estimate empirical_utility(const SampleGroups& groups, double beta) {
    if (groups.per_group < 1) throw input_error("empty sample groups");
    std::vector<double> stats(static_cast<std::size_t>(groups.groups));
    for (int i = 0; i < groups.groups; ++i) {
        if (beta == 0.0) {
            stats[static_cast<std::size_t>(i)] = group_mean(groups, i);
            continue;
        }
        const double* slice =
            groups.returns.data() + static_cast<std::size_t>(i) * groups.per_group;
        const std::size_t m = static_cast<std::size_t>(groups.per_group);
        // Factor out max_t beta*phi before exponentiating.
        const double extreme =
            beta > 0.0 ? kernels::reduce_max(slice, m) : kernels::reduce_min(slice, m);
        const double shift = beta * extreme;
        double sum = 0.0;
        for (std::size_t t = 0; t < m; ++t) {
            const double phi = slice[t];
            if (!std::isfinite(phi)) throw input_error("non-finite sample return");
            sum += std::exp(beta * phi - shift);
        }
        stats[static_cast<std::size_t>(i)] =
            (shift + std::log(sum / static_cast<double>(m))) / beta;
    }
    return aggregate(stats);
}

TruncatedDistribution enumerate_truncated(const RewardProcess& process, int horizon) {
    const auto rows = flatten(process);
    check_enum_guard(rows, horizon);
    std::vector<std::pair<double, double>> raw;
    for (std::size_t x = 0; x < process.initial.size(); ++x)
        if (process.initial[x] > 0.0)
            enumerate_rec(rows, static_cast<int>(x), 1, horizon, 1.0, process.gamma, 0.0,
                          process.initial[x], raw);
    TruncatedDistribution dist;
    dist.horizon = horizon;
    dist.atoms = merge_atoms(std::move(raw));
    return dist;
}

TruncatedDistribution enumerate_truncated(const DetChain& chain, int horizon) {
    if (horizon < 1) throw input_error("enumeration horizon must be at least 1");
    if (horizon > kMaxDpHorizon)
        throw input_error("enumeration horizon exceeds the dynamic-programming guard");

    const std::size_t n = chain.size();
    // dist[x]: atoms of (accumulated value, probability) among paths
    // standing at x before collecting the epoch's reward.
    std::vector<std::vector<std::pair<double, double>>> dist(n);
    const std::vector<double> start = chain_start_distribution(chain);
    for (std::size_t x = 0; x < n; ++x)
        if (start[x] > 0.0) dist[x].emplace_back(0.0, start[x]);

    double discount = 1.0;
    std::vector<std::pair<double, double>> final_raw;
    for (int t = 1; t <= horizon; ++t) {
        std::vector<std::vector<std::pair<double, double>>> next(n);
        std::size_t total = 0;
        for (std::size_t x = 0; x < n; ++x) {
            if (dist[x].empty()) continue;
            const double step_reward = discount * chain.reward[x];
            for (const auto& [value, prob] : dist[x]) {
                const double v = value + step_reward;
                if (t == horizon) {
                    final_raw.emplace_back(v, prob);
                    continue;
                }
                for (const auto& [y, p] : chain.rows[x])
                    next[static_cast<std::size_t>(y)].emplace_back(v, prob * p);
            }
        }
        if (t < horizon) {
            for (std::size_t y = 0; y < n; ++y) {
                next[y] = merge_atoms(std::move(next[y]));
                total += next[y].size();
            }
            if (total > kMaxDpAtoms)
                throw input_error("enumeration exceeded the atom budget; "
                                  "reduce the horizon");
            dist = std::move(next);
        }
        discount *= chain.gamma;
    }

    TruncatedDistribution out;
    out.horizon = horizon;
    out.atoms = merge_atoms(std::move(final_raw));
    return out;
}

std::string to_csv(const SampleGroups& groups) {
    std::string out = "group,sim,return\n";
    for (int i = 0; i < groups.groups; ++i)
        for (int t = 0; t < groups.per_group; ++t) {
            out += std::to_string(i);
            out += ',';
            out += std::to_string(t);
            out += ',';
            out += fmt_value(groups.at(i, t));
            out += '\n';
        }
    return out;
}

std::string to_csv(const TruncatedDistribution& dist) {
    std::string out = "value,probability\n";
    for (const auto& [value, prob] : dist.atoms) {
        out += fmt_value(value);
        out += ',';
        out += fmt_value(prob);
        out += '\n';
    }
    return out;
}

} // namespace satrisk
