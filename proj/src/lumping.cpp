#include "satrisk/lumping.hpp"

#include "satrisk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace satrisk {
namespace {

constexpr double kRowTol = 1e-12;

void check_state(const DetChain& chain, int x) {
    if (x < 0 || x >= static_cast<int>(chain.size()))
        throw input_error("unknown state index " + std::to_string(x));
}

int require_index(const DetChain& chain, const std::string& name) {
    const int idx = chain.state_index(name);
    if (idx < 0) throw input_error("unknown state identifier: " + name);
    return idx;
}

} // namespace

const char* lump_strategy_name(LumpStrategy s) {
    return s == LumpStrategy::sat_key ? "sat-key" : "pairwise";
}

bool are_isotopic(const DetChain& chain, int xi, int xj) {
    check_state(chain, xi);
    check_state(chain, xj);
    if (xi == xj) throw input_error("isotopy is defined for two distinct states");

    if (chain.reward[xi] != chain.reward[xj]) return false;

    // Condition 2 constrains transitions to third states only.
    std::map<int, double> pi, pj;
    for (const auto& [y, p] : chain.rows[xi])
        if (y != xi && y != xj) pi[y] = p;
    for (const auto& [y, p] : chain.rows[xj])
        if (y != xi && y != xj) pj[y] = p;
    for (const auto& [y, p] : pi) {
        const auto it = pj.find(y);
        const double q = it == pj.end() ? 0.0 : it->second;
        if (std::fabs(p - q) > kRowTol) return false;
    }
    for (const auto& [y, q] : pj)
        if (!pi.count(y) && std::fabs(q) > kRowTol) return false;
    return true;
}

bool are_isotopic(const DetChain& chain, const std::string& xi, const std::string& xj) {
    return are_isotopic(chain, require_index(chain, xi), require_index(chain, xj));
}

DetChain lump_pair(const DetChain& chain, int xi, int xj) {
    if (!are_isotopic(chain, xi, xj))
        throw input_error("states are not isotopic: " + chain.state_names[xi] + ", " +
                          chain.state_names[xj]);

    const int n = static_cast<int>(chain.size());
    std::vector<int> remap(n);
    int next = 0;
    for (int x = 0; x < n; ++x) remap[x] = x == xj ? -1 : next++;
    remap[xj] = remap[xi];

    DetChain out;
    out.gamma = chain.gamma;
    out.reward_epoch_offset = chain.reward_epoch_offset;
    out.rows.resize(static_cast<std::size_t>(n - 1));
    // A pairwise-merged chain is no longer a pristine augmented image, so
    // the sat annotations are dropped rather than guessed.
    for (int x = 0; x < n; ++x) {
        if (x == xj) continue;
        out.state_names.push_back(chain.state_names[x]);
        out.reward.push_back(chain.reward[x]);
        out.initial.push_back(chain.initial[x]);
        std::map<int, double> row;
        for (const auto& [y, p] : chain.rows[x]) row[remap[y]] += p;
        out.rows[static_cast<std::size_t>(remap[x])].assign(row.begin(), row.end());
    }
    out.initial[static_cast<std::size_t>(remap[xi])] += chain.initial[xj];
    validate_chain(out);
    return out;
}

DetChain lump_pair(const DetChain& chain, const std::string& xi, const std::string& xj) {
    return lump_pair(chain, require_index(chain, xi), require_index(chain, xj));
}

LumpReport lump_all(const DetChain& chain) {
    validate_chain(chain);
    LumpReport report;
    report.strategy = LumpStrategy::pairwise;
    report.size_before = chain.size();

    DetChain work = chain;
    std::vector<std::vector<std::string>> members;
    for (const auto& name : work.state_names) members.push_back({name});

    for (;;) {
        // Scan candidate pairs in lexicographic name order; the smaller
        // name survives so the result is order-independent of input layout.
        const int n = static_cast<int>(work.size());
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return work.state_names[static_cast<std::size_t>(a)] <
                   work.state_names[static_cast<std::size_t>(b)];
        });

        int keep = -1, drop = -1;
        for (int a = 0; a < n && keep < 0; ++a)
            for (int b = a + 1; b < n; ++b)
                if (are_isotopic(work, order[static_cast<std::size_t>(a)],
                                 order[static_cast<std::size_t>(b)])) {
                    keep = order[static_cast<std::size_t>(a)];
                    drop = order[static_cast<std::size_t>(b)];
                    break;
                }
        if (keep < 0) break;

        auto absorbed = std::move(members[static_cast<std::size_t>(drop)]);
        members[static_cast<std::size_t>(keep)].insert(
            members[static_cast<std::size_t>(keep)].end(), absorbed.begin(), absorbed.end());
        members.erase(members.begin() + drop);
        work = lump_pair(work, keep, drop);
    }

    report.merged_chain = std::move(work);
    report.classes = std::move(members);
    report.size_after = report.merged_chain.size();
    return report;
}

LumpReport sat_fast_lump(const DetChain& chain) {
    validate_chain(chain);
    if (chain.sat_tags.size() != chain.size())
        throw input_error("chain lacks state-augmentation annotations; "
                          "use the pairwise strategy instead");

    const int n = static_cast<int>(chain.size());
    std::map<std::pair<int, double>, std::vector<int>> groups;
    for (int x = 0; x < n; ++x)
        groups[{chain.sat_tags[x].anchor, chain.sat_tags[x].reward}].push_back(x);

    // The sufficient condition is re-verified against the definition before
    // any merge; a failure means the annotations do not fit the chain.
    std::vector<int> rep_of(n, -1);
    std::vector<int> reps;
    for (const auto& [key, states] : groups) {
        const int rep = states.front();
        for (int member : states) {
            if (member != rep && !are_isotopic(chain, rep, member))
                throw input_error("annotations are inconsistent with the chain: " +
                                  chain.state_names[rep] + " vs " +
                                  chain.state_names[member]);
            rep_of[member] = rep;
        }
    }
    for (int x = 0; x < n; ++x)
        if (rep_of[x] == x) reps.push_back(x);
    // reps in state order
    std::sort(reps.begin(), reps.end());

    std::vector<int> new_index(n, -1);
    for (std::size_t i = 0; i < reps.size(); ++i) new_index[reps[i]] = static_cast<int>(i);

    LumpReport report;
    report.strategy = LumpStrategy::sat_key;
    report.size_before = chain.size();
    report.size_after = reps.size();

    DetChain out;
    out.gamma = chain.gamma;
    out.reward_epoch_offset = chain.reward_epoch_offset;
    out.rows.resize(reps.size());
    report.classes.resize(reps.size());
    for (int rep : reps) {
        const std::size_t i = static_cast<std::size_t>(new_index[rep]);
        out.state_names.push_back(chain.state_names[rep]);
        out.reward.push_back(chain.reward[rep]);
        out.sat_tags.push_back(chain.sat_tags[rep]);
        std::map<int, double> row;
        for (const auto& [y, p] : chain.rows[rep]) row[new_index[rep_of[y]]] += p;
        out.rows[i].assign(row.begin(), row.end());
    }
    out.initial.assign(reps.size(), 0.0);
    for (int x = 0; x < n; ++x) {
        out.initial[static_cast<std::size_t>(new_index[rep_of[x]])] += chain.initial[x];
        report.classes[static_cast<std::size_t>(new_index[rep_of[x]])].push_back(
            chain.state_names[x]);
    }

    validate_chain(out);
    report.merged_chain = std::move(out);
    return report;
}

} // namespace satrisk
