#include "satrisk/simulator.hpp"

#include "fixtures.hpp"
#include "oracle.hpp"
#include "satrisk/errors.hpp"
#include "satrisk/evaluator.hpp"
#include "satrisk/lumping.hpp"
#include "satrisk/sat.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace satrisk;

TEST_SUITE("simulator") {

TEST_CASE("streams are deterministic and order-independent") {
    auto a = sim_stream(42, 3, 7);
    auto b = sim_stream(42, 3, 7);
    CHECK(a() == b());
    CHECK(a() == b());
    auto c = sim_stream(42, 3, 8);
    CHECK(a() != c());

    const ParsedModel parsed = fixtures::ref1();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g1 = run_groups(rp, 3, 5, 4, 99);
    const SampleGroups g2 = run_groups(rp, 3, 5, 4, 99);
    CHECK(g1.returns == g2.returns);

    const SampleGroups single1 = run_groups(rp, 1, 1, 1, 7);
    const SampleGroups single2 = run_groups(rp, 1, 1, 1, 7);
    CHECK(single1.returns == single2.returns);
    CHECK(single1.returns.size() == 1);
}

TEST_CASE("pinned regression value stays put") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    auto eng = sim_stream(42, 0, 0);
    CHECK(sample_return(rp, 200, eng) == fixtures::kRef2PinnedSample);
}

TEST_CASE("ref1 single-step returns are fair coin flips") {
    const ParsedModel parsed = fixtures::ref1();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g = run_groups(rp, 1, 10000, 1, 11);
    int plus = 0;
    for (double phi : g.returns) {
        CHECK((phi == 1.0 || phi == -1.0));
        plus += phi > 0 ? 1 : 0;
    }
    // 3 sigma of a fair count over 10^4 draws
    CHECK(std::fabs(plus / 10000.0 - 0.5) <= 0.015);
}

TEST_CASE("ref1 two-step enumeration gives four uniform atoms") {
    const ParsedModel parsed = fixtures::ref1();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const TruncatedDistribution dist = enumerate_truncated(rp, 2);
    REQUIRE(dist.atoms.size() == 4);
    const double expected[] = {-1.5, -0.5, 0.5, 1.5};
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(dist.atoms[i].first == doctest::Approx(expected[i]).epsilon(1e-14));
        CHECK(dist.atoms[i].second == doctest::Approx(0.25).epsilon(1e-14));
    }
    // the augmented chain enumerates to the same law
    const DetChain chain = transform_process(parsed.mdp, *parsed.policy);
    std::string why;
    CHECK_MESSAGE(
        testoracle::same_distribution(dist, enumerate_truncated(chain, 2), 1e-12, &why), why);
}

TEST_CASE("ref2 distributions: original vs augmented vs lumped at horizon 6") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const DetChain chain = transform_process(parsed.mdp, *parsed.policy);
    const TruncatedDistribution base = enumerate_truncated(rp, 6);
    std::string why;
    CHECK_MESSAGE(
        testoracle::same_distribution(base, enumerate_truncated(chain, 6), 1e-12, &why), why);
    const DetChain lumped = sat_fast_lump(chain).merged_chain;
    CHECK_MESSAGE(
        testoracle::same_distribution(base, enumerate_truncated(lumped, 6), 1e-12, &why), why);
}

TEST_CASE("enumeration guards reject intractable requests") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    CHECK_THROWS_AS(enumerate_truncated(rp, 11), input_error);
    CHECK_THROWS_AS(enumerate_truncated(rp, 0), input_error);
    const DetChain chain = transform_process(parsed.mdp, *parsed.policy);
    CHECK_THROWS_AS(enumerate_truncated(chain, 401), input_error);
}

TEST_CASE("desk protocol group means bracket the exact mean") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g = run_groups(rp, 20, 500, 200, 4242);
    const Estimate e = empirical_mean_variance(g, 0.0);
    CHECK(std::fabs(e.value - fixtures::kRef2Mean) <= 3.0 * e.stderr_);
    // sampled returns respect the hard bound max|J|/(1-gamma)
    const double bound = 5.0 / (1.0 - 0.9) + 1e-9;
    for (double phi : g.returns) CHECK(std::fabs(phi) <= bound);
}

TEST_CASE("estimators on crafted sample groups") {
    SampleGroups g;
    g.groups = 1;
    g.per_group = 4;
    g.returns = {1.0, 2.0, 3.0, 4.0};

    const Estimate k0 = empirical_mean_variance(g, 0.0);
    CHECK(k0.value == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(k0.stderr_ == 0.0); // single group

    // with equal group sizes, k = 0 averages down to the grand mean
    SampleGroups multi;
    multi.groups = 3;
    multi.per_group = 2;
    multi.returns = {0.5, 1.5, -2.0, 4.0, 0.25, 0.75};
    double grand = 0.0;
    for (double phi : multi.returns) grand += phi;
    grand /= 6.0;
    CHECK(std::fabs(empirical_mean_variance(multi, 0.0).value - grand) <= 1e-15);

    const double sd = std::sqrt(5.0 / 3.0);
    const Estimate k2 = empirical_mean_variance(g, 2.0);
    CHECK(k2.value == doctest::Approx(2.5 - 2.0 * sd).epsilon(1e-14));

    // beta = 0 returns the analytic limit: the group-mean average
    const Estimate u0 = empirical_utility(g, 0.0);
    CHECK(u0.value == k0.value);

    // M = 1 collapses the log-mean-exp to the sample itself
    SampleGroups one;
    one.groups = 2;
    one.per_group = 1;
    one.returns = {0.75, -1.25};
    for (double beta : {-3.0, -0.1, 0.4, 2.0}) {
        const Estimate e = empirical_utility(one, beta);
        CHECK(e.value == doctest::Approx((0.75 - 1.25) / 2).epsilon(1e-12));
    }
    CHECK_THROWS_AS(empirical_mean_variance(one, 0.0), input_error);

    // max-shift keeps extreme exponents finite
    SampleGroups wide;
    wide.groups = 1;
    wide.per_group = 2;
    wide.returns = {500.0, 400.0};
    const Estimate up = empirical_utility(wide, 2.0);
    CHECK(std::isfinite(up.value));
    CHECK(up.value == doctest::Approx(500.0 - std::log(2.0) / 2.0).epsilon(1e-12));
    const Estimate down = empirical_utility(wide, -2.0);
    CHECK(std::isfinite(down.value));
    CHECK(down.value == doctest::Approx(400.0 + std::log(2.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("constant-return process has zero spread for every k") {
    DetChain chain;
    chain.state_names = {"only"};
    chain.rows = {{{0, 1.0}}};
    chain.reward = {1.5};
    chain.initial = {1.0};
    chain.gamma = 0.5;
    const SampleGroups g = run_groups(chain, 4, 16, 30, 3);
    for (double k : {0.0, 1.0, 7.0}) {
        const Estimate e = empirical_mean_variance(g, k);
        CHECK(e.value == doctest::Approx(3.0).epsilon(1e-9));
        CHECK(e.stderr_ <= 1e-12);
    }
}

TEST_CASE("ref1 mean-variance estimate approaches the closed form") {
    const ParsedModel parsed = fixtures::ref1();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g = run_groups(rp, 20, 2000, 40, 7);
    const Estimate e = empirical_mean_variance(g, 1.0);
    CHECK(std::fabs(e.value - (-2.0 / std::sqrt(3.0))) <= 3.0 * e.stderr_);
}

TEST_CASE("ref2 utility estimate matches the Taylor value in the small-beta regime") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g = run_groups(rp, 20, 500, 200, 42);
    const Estimate e = empirical_utility(g, -0.05);
    const double taylor =
        utility_taylor(fixtures::kRef2Mean, fixtures::kRef2SatVariance, -0.05);
    CHECK(std::fabs(e.value - taylor) <= 3.0 * e.stderr_);
}

TEST_CASE("small-beta utility estimates converge to the mean estimate") {
    const ParsedModel parsed = fixtures::ref2();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const SampleGroups g = run_groups(rp, 5, 200, 50, 8);
    const Estimate mean = empirical_mean_variance(g, 0.0);
    const Estimate tiny = empirical_utility(g, 1e-9);
    CHECK(std::fabs(tiny.value - mean.value) <= 1e-6);
    CHECK(empirical_utility(g, 0.0).value == mean.value);
}

TEST_CASE("truncation error obeys the analytic tail bound") {
    std::mt19937_64 rng(2718);
    for (int i = 0; i < 10; ++i) {
        const Mdp mdp = testoracle::random_mdp(rng);
        const Policy pol = testoracle::random_policy(rng, mdp);
        const RewardProcess rp = induce(mdp, pol);
        const double exact_mean = return_moments(transform_process(mdp, pol)).first;
        const double max_r = testoracle::max_abs_reward(rp);
        for (int horizon : {5, 10, 20}) {
            const auto [tm, tv] = testoracle::truncated_moments(rp, horizon);
            CHECK(std::fabs(tm - exact_mean) <=
                  testoracle::tail_bound(mdp.gamma, max_r, horizon) + 1e-12);
        }
    }
}

TEST_CASE("estimates sharpen as the group size grows") {
    const ParsedModel parsed = fixtures::ref1();
    const RewardProcess rp = induce(parsed.mdp, *parsed.policy);
    const double target = -2.0 / std::sqrt(3.0);

    int close_small = 0, close_big = 0;
    double err_small = 0.0, err_big = 0.0;
    for (int run = 0; run < 100; ++run) {
        const std::uint64_t seed = 1000 + static_cast<std::uint64_t>(run);
        const SampleGroups small = run_groups(rp, 20, 100, 20, seed);
        const SampleGroups big = run_groups(rp, 20, 10000, 20, seed);
        const Estimate es = empirical_mean_variance(small, 1.0);
        const Estimate eb = empirical_mean_variance(big, 1.0);
        err_small += std::fabs(es.value - target);
        err_big += std::fabs(eb.value - target);
        close_small += std::fabs(es.value - target) <= 3.0 * es.stderr_ ? 1 : 0;
        close_big += std::fabs(eb.value - target) <= 3.0 * eb.stderr_ ? 1 : 0;
    }
    CHECK(err_big < err_small);
    CHECK(close_small >= 99);
    CHECK(close_big >= 99);
}

TEST_CASE("csv exports") {
    SampleGroups g;
    g.groups = 1;
    g.per_group = 2;
    g.returns = {0.5, -1.25};
    CHECK(to_csv(g) == "group,sim,return\n0,0,0.5\n0,1,-1.25\n");

    TruncatedDistribution d;
    d.horizon = 1;
    d.atoms = {{-1.0, 0.5}, {1.0, 0.5}};
    CHECK(to_csv(d) == "value,probability\n-1,0.5\n1,0.5\n");
}

} // TEST_SUITE
