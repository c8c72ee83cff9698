#include "oracle.hpp"

#include "satrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace testoracle {
namespace {

using satrisk::ActionNode;
using satrisk::DetChain;
using satrisk::Mdp;
using satrisk::Outcome;
using satrisk::Policy;
using satrisk::RewardProcess;
using satrisk::StateNode;

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

std::vector<double> chain_start(const DetChain& chain) {
    if (chain.reward_epoch_offset == 0) return chain.initial;
    std::vector<double> q(chain.size(), 0.0);
    for (std::size_t x = 0; x < chain.size(); ++x) {
        if (chain.initial[x] == 0.0) continue;
        for (const auto& [y, p] : chain.rows[x])
            q[static_cast<std::size_t>(y)] += chain.initial[x] * p;
    }
    return q;
}

std::pair<double, double> finish(const std::vector<double>& s1, const std::vector<double>& s2) {
    double mean = 0.0, second = 0.0;
    for (double v : s1) mean += v;
    for (double v : s2) second += v;
    return {mean, second - mean * mean};
}

} // namespace

std::pair<double, double> truncated_moments(const RewardProcess& process, int horizon) {
    const auto rows = flatten(process);
    const std::size_t n = rows.size();
    std::vector<double> w = process.initial, s1(n, 0.0), s2(n, 0.0);
    double g = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        std::vector<double> w2(n, 0.0), s1n(n, 0.0), s2n(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            if (w[x] == 0.0 && s1[x] == 0.0 && s2[x] == 0.0) continue;
            for (const auto& br : rows[x]) {
                const double gr = g * br.reward;
                const std::size_t y = static_cast<std::size_t>(br.to);
                w2[y] += w[x] * br.prob;
                s1n[y] += br.prob * (s1[x] + w[x] * gr);
                s2n[y] += br.prob * (s2[x] + 2.0 * gr * s1[x] + gr * gr * w[x]);
            }
        }
        w.swap(w2);
        s1.swap(s1n);
        s2.swap(s2n);
        g *= process.gamma;
    }
    return finish(s1, s2);
}

std::pair<double, double> truncated_moments(const DetChain& chain, int horizon) {
    const std::size_t n = chain.size();
    std::vector<double> w = chain_start(chain), s1(n, 0.0), s2(n, 0.0);
    double g = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        for (std::size_t x = 0; x < n; ++x) {
            const double gr = g * chain.reward[x];
            s2[x] += 2.0 * gr * s1[x] + gr * gr * w[x];
            s1[x] += w[x] * gr;
        }
        if (t < horizon) {
            std::vector<double> w2(n, 0.0), s1n(n, 0.0), s2n(n, 0.0);
            for (std::size_t x = 0; x < n; ++x) {
                if (w[x] == 0.0 && s1[x] == 0.0 && s2[x] == 0.0) continue;
                for (const auto& [y, p] : chain.rows[x]) {
                    const std::size_t j = static_cast<std::size_t>(y);
                    w2[j] += w[x] * p;
                    s1n[j] += s1[x] * p;
                    s2n[j] += s2[x] * p;
                }
            }
            w.swap(w2);
            s1.swap(s1n);
            s2.swap(s2n);
        }
        g *= chain.gamma;
    }
    return finish(s1, s2);
}

StateMoments truncated_state_moments(const DetChain& chain, int horizon) {
    const std::size_t n = chain.size();
    StateMoments m;
    m.mean.assign(n, 0.0);
    m.second.assign(n, 0.0);
    const double g = chain.gamma;
    for (int t = 0; t < horizon; ++t) {
        std::vector<double> vn(n, 0.0), sn(n, 0.0);
        for (std::size_t x = 0; x < n; ++x) {
            const double r = chain.reward[x];
            double ev = 0.0, es = 0.0;
            for (const auto& [y, p] : chain.rows[x]) {
                ev += p * m.mean[static_cast<std::size_t>(y)];
                es += p * m.second[static_cast<std::size_t>(y)];
            }
            vn[x] = r + g * ev;
            sn[x] = r * r + 2.0 * g * r * ev + g * g * es;
        }
        m.mean.swap(vn);
        m.second.swap(sn);
    }
    return m;
}

std::vector<double> expected_reward_value(const RewardProcess& process) {
    const std::size_t n = process.rows.size();
    std::vector<double> rbar(n, 0.0);
    for (std::size_t x = 0; x < n; ++x)
        for (const auto& o : process.rows[x])
            for (const auto& atom : o.rewards) rbar[x] += o.prob * atom.prob * atom.value;

    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (int it = 0; it < 1000000; ++it) {
        double delta = 0.0;
        for (std::size_t x = 0; x < n; ++x) {
            double ev = 0.0;
            for (const auto& o : process.rows[x]) ev += o.prob * v[static_cast<std::size_t>(o.to)];
            next[x] = rbar[x] + process.gamma * ev;
            delta = std::max(delta, std::fabs(next[x] - v[x]));
        }
        v.swap(next);
        if (delta < 1e-14) return v;
    }
    throw std::runtime_error("expected_reward_value did not converge");
}

double conditional_expected_reward(const Mdp& mdp, const Policy& policy, int state) {
    double sum = 0.0;
    const auto& acts = mdp.states[static_cast<std::size_t>(state)].actions;
    for (std::size_t k = 0; k < acts.size(); ++k)
        for (const auto& o : acts[k].outcomes)
            for (const auto& atom : o.rewards)
                sum += atom.value * policy.rule[static_cast<std::size_t>(state)][k] * o.prob *
                       atom.prob;
    return sum;
}

double max_abs_reward(const Mdp& mdp) {
    double m = 0.0;
    for (double v : mdp.reward_support) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs_reward(const RewardProcess& process) {
    double m = 0.0;
    for (const auto& row : process.rows)
        for (const auto& o : row)
            for (const auto& atom : o.rewards) m = std::max(m, std::fabs(atom.value));
    return m;
}

double max_abs_reward(const DetChain& chain) {
    double m = 0.0;
    for (double v : chain.reward) m = std::max(m, std::fabs(v));
    return m;
}

double tail_bound(double gamma, double max_reward, int horizon) {
    return std::pow(gamma, horizon) * max_reward / (1.0 - gamma);
}

namespace {

int pick(std::mt19937_64& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

double grid_reward(std::mt19937_64& rng, bool avoid_zero) {
    for (;;) {
        const int m = pick(rng, 33) - 16; // [-16, 16]
        if (avoid_zero && m == 0) continue;
        return static_cast<double>(m) / 8.0;
    }
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& x : w) {
        x = static_cast<double>(1 + pick(rng, 9));
        sum += x;
    }
    for (double& x : w) x /= sum;
    return w;
}

std::vector<int> random_subset(std::mt19937_64& rng, int n, bool full) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
        if (full || (rng() & 1u)) out.push_back(i);
    if (out.empty()) out.push_back(pick(rng, n));
    return out;
}

} // namespace

Mdp random_mdp(std::mt19937_64& rng, const InstanceParams& params) {
    const int ns = params.full_support ? params.max_states : 1 + pick(rng, params.max_states);
    const int nj = params.full_support ? params.max_rewards : 1 + pick(rng, params.max_rewards);

    std::set<double> support;
    while (static_cast<int>(support.size()) < nj)
        support.insert(grid_reward(rng, params.avoid_zero_reward));
    const std::vector<double> values(support.begin(), support.end());

    Mdp mdp;
    mdp.gamma = params.gamma;
    const char* action_names[] = {"a", "b", "c", "d"};
    for (int x = 0; x < ns; ++x) {
        StateNode st;
        st.name = "q" + std::to_string(x);
        const int na = params.full_support ? params.max_actions : 1 + pick(rng, params.max_actions);
        for (int k = 0; k < na; ++k) {
            ActionNode act;
            act.name = action_names[k];
            const std::vector<int> targets = random_subset(rng, ns, params.full_support);
            const std::vector<double> probs = random_weights(rng, targets.size());
            for (std::size_t i = 0; i < targets.size(); ++i) {
                Outcome o;
                o.to = targets[i];
                o.prob = probs[i];
                const std::vector<int> atoms =
                    random_subset(rng, static_cast<int>(values.size()), params.full_support);
                const std::vector<double> ap = random_weights(rng, atoms.size());
                for (std::size_t j = 0; j < atoms.size(); ++j)
                    o.rewards.push_back({values[static_cast<std::size_t>(atoms[j])], ap[j]});
                act.outcomes.push_back(std::move(o));
            }
            st.actions.push_back(std::move(act));
        }
        mdp.states.push_back(std::move(st));
    }

    if (params.point_mass_initial || (rng() & 1u)) {
        mdp.initial.assign(static_cast<std::size_t>(ns), 0.0);
        mdp.initial[static_cast<std::size_t>(pick(rng, ns))] = 1.0;
    } else {
        mdp.initial = random_weights(rng, static_cast<std::size_t>(ns));
    }

    mdp.validate();
    return mdp;
}

Policy random_policy(std::mt19937_64& rng, const Mdp& mdp) {
    Policy pol;
    for (const auto& st : mdp.states) {
        if (st.actions.size() > 1 && pick(rng, 10) < 3) {
            std::vector<double> row(st.actions.size(), 0.0);
            row[static_cast<std::size_t>(pick(rng, static_cast<int>(st.actions.size())))] = 1.0;
            pol.rule.push_back(std::move(row));
        } else {
            pol.rule.push_back(random_weights(rng, st.actions.size()));
        }
    }
    pol.validate_for(mdp);
    return pol;
}

bool same_distribution(const satrisk::TruncatedDistribution& a,
                       const satrisk::TruncatedDistribution& b, double tol, std::string* why) {
    if (a.atoms.size() != b.atoms.size()) {
        if (why)
            *why = "atom counts differ: " + std::to_string(a.atoms.size()) + " vs " +
                   std::to_string(b.atoms.size());
        return false;
    }
    for (std::size_t i = 0; i < a.atoms.size(); ++i) {
        if (std::fabs(a.atoms[i].first - b.atoms[i].first) > tol ||
            std::fabs(a.atoms[i].second - b.atoms[i].second) > tol) {
            if (why)
                *why = "atom " + std::to_string(i) + " differs: (" +
                       std::to_string(a.atoms[i].first) + ", " + std::to_string(a.atoms[i].second) +
                       ") vs (" + std::to_string(b.atoms[i].first) + ", " +
                       std::to_string(b.atoms[i].second) + ")";
            return false;
        }
    }
    return true;
}

} // namespace testoracle
