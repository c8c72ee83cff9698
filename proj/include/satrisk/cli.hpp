#pragma once

#include "satrisk/evaluator.hpp"
#include "satrisk/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Command surface behind the satrisk tool: validate, eval, transform, lump,
// simulate and sweep. Everything here is deterministic given its arguments;
// sweeps over exact pipelines involve no random numbers at all.

namespace satrisk {

/// Parameter sweep emitting one CSV row per parameter value and one column
/// per pipeline (plus a stderr column, and for beta sweeps a footnote
/// column with the analytic beta=0 limit of the empirical estimator).
struct SweepSpec {
    enum class Param { k, beta };
    Param parameter = Param::k;
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
    std::vector<std::string> pipelines; // subset of {sat, sat-lumped, simplified, empirical}
    int sims_groups = 20;    // L
    int sims_per_group = 500; // M
    int sims_horizon = 200;  // N
    std::uint64_t seed = 42;

    void validate() const; // throws input_error
};

/// Exact pipelines: "sat", "sat-lumped" (sat-key strategy), "simplified".
EvalResult eval_pipeline(const Mdp& mdp, const Policy& policy, const std::string& pipeline);

std::string sweep_csv(const Mdp& mdp, const Policy& policy, const SweepSpec& spec);

/// Full command-line entry point. Returns the process exit code:
/// 0 ok, 1 input error, 2 numerical error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace satrisk
