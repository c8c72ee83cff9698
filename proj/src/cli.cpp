#include "satrisk/cli.hpp"

#include "satrisk/errors.hpp"
#include "satrisk/format.hpp"
#include "satrisk/lumping.hpp"
#include "satrisk/model_io.hpp"
#include "satrisk/sat.hpp"
#include "satrisk/simulator.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

namespace satrisk {
namespace {

const std::vector<std::string> kExactPipelines = {"sat", "sat-lumped", "simplified"};
const std::vector<std::string> kAllPipelines = {"sat", "sat-lumped", "simplified", "empirical"};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot write file: " + path);
    out << text;
}

/// Writes to `path` when nonempty, otherwise to the stream.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty())
        out << text;
    else
        write_file(path, text);
}

struct LoadedModel {
    Mdp mdp;
    std::optional<Policy> policy;
};

LoadedModel load_model(const std::string& model_path, const std::string& policy_path,
                       double gamma_override) {
    ParsedModel parsed = parse_model(read_file(model_path));
    LoadedModel loaded{std::move(parsed.mdp), std::move(parsed.policy)};
    if (!policy_path.empty())
        loaded.policy = parse_policy(read_file(policy_path), loaded.mdp);
    if (gamma_override >= 0.0) {
        if (!(gamma_override > 0.0 && gamma_override < 1.0))
            throw input_error("--gamma-override must lie strictly inside (0,1)");
        loaded.mdp.gamma = gamma_override;
    }
    return loaded;
}

const Policy& require_policy(const LoadedModel& loaded) {
    if (!loaded.policy)
        throw input_error("no policy: provide one in the model file or via --policy");
    return *loaded.policy;
}

DetChain chain_for(const Mdp& mdp, const Policy& policy, const std::string& pipeline) {
    if (pipeline == "sat") return transform_process(mdp, policy);
    if (pipeline == "sat-lumped") return sat_fast_lump(transform_process(mdp, policy)).merged_chain;
    if (pipeline == "simplified") return simplify_reward(mdp, policy);
    throw input_error("unknown pipeline: " + pipeline);
}

LumpStrategy strategy_from(const std::string& name) {
    if (name == "pairwise") return LumpStrategy::pairwise;
    if (name == "sat-key") return LumpStrategy::sat_key;
    throw input_error("unknown lump strategy: " + name);
}

LumpReport lump_with(const DetChain& chain, LumpStrategy strategy) {
    return strategy == LumpStrategy::sat_key ? sat_fast_lump(chain) : lump_all(chain);
}

} // namespace

void SweepSpec::validate() const {
    if (!(from < to)) throw input_error("sweep: 'from' must be less than 'to'");
    if (!(step > 0.0)) throw input_error("sweep: 'step' must be positive");
    if (pipelines.empty()) throw input_error("sweep: select at least one pipeline");
    for (const auto& p : pipelines) {
        bool known = false;
        for (const auto& k : kAllPipelines) known = known || k == p;
        if (!known) throw input_error("sweep: unknown pipeline: " + p);
    }
    for (const auto& p : pipelines)
        if (p == "empirical") {
            if (sims_groups < 1 || sims_per_group < 2 || sims_horizon < 1)
                throw input_error("sweep: empirical pipeline needs L >= 1, M >= 2, N >= 1");
        }
}

EvalResult eval_pipeline(const Mdp& mdp, const Policy& policy, const std::string& pipeline) {
    return evaluate_chain(chain_for(mdp, policy, pipeline), pipeline);
}

std::string sweep_csv(const Mdp& mdp, const Policy& policy, const SweepSpec& spec) {
    spec.validate();
    const bool is_beta = spec.parameter == SweepSpec::Param::beta;

    auto wants = [&](const std::string& name) {
        for (const auto& p : spec.pipelines)
            if (p == name) return true;
        return false;
    };

    std::vector<std::string> exact_cols;
    std::vector<std::pair<double, double>> exact_moments;
    for (const auto& name : kExactPipelines)
        if (wants(name)) {
            const EvalResult r = eval_pipeline(mdp, policy, name);
            exact_cols.push_back(name);
            exact_moments.emplace_back(r.mean, r.variance);
        }

    const bool empirical = wants("empirical");
    SampleGroups groups;
    if (empirical)
        groups = run_groups(induce(mdp, policy), spec.sims_groups, spec.sims_per_group,
                            spec.sims_horizon, spec.seed, "original");

    std::vector<double> values;
    for (int i = 0;; ++i) {
        double v = spec.from + i * spec.step;
        if (v > spec.to + spec.step * 1e-9) break;
        if (std::fabs(v) < spec.step * 1e-9) v = 0.0;
        values.push_back(v);
    }

    const std::size_t rows = values.size();
    std::vector<std::vector<double>> exact_vals(exact_cols.size(), std::vector<double>(rows));
    std::vector<double> emp_vals(rows), emp_se(rows);
    int zero_row = -1;
    for (std::size_t r = 0; r < rows; ++r) {
        const double v = values[r];
        if (v == 0.0) zero_row = static_cast<int>(r);
        for (std::size_t c = 0; c < exact_cols.size(); ++c) {
            const auto& [mean, var] = exact_moments[c];
            exact_vals[c][r] =
                is_beta ? utility_taylor(mean, var, v) : mean_variance_risk(mean, var, v);
        }
        if (empirical) {
            const Estimate e =
                is_beta ? empirical_utility(groups, v) : empirical_mean_variance(groups, v);
            emp_vals[r] = e.value;
            emp_se[r] = e.stderr_;
        }
    }

    // The empirical utility has no direct beta = 0 evaluation in the swept
    // formula; the emitted row is the average of its two neighbors, with the
    // analytic limit (the plain group-mean average) kept in a footnote column.
    const bool footnote = is_beta && empirical;
    std::string beta0_limit;
    if (footnote && zero_row >= 0) {
        const std::size_t z = static_cast<std::size_t>(zero_row);
        beta0_limit = fmt_value(emp_vals[z]);
        if (zero_row > 0 && z + 1 < rows) {
            emp_vals[z] = 0.5 * (emp_vals[z - 1] + emp_vals[z + 1]);
            emp_se[z] = 0.5 * (emp_se[z - 1] + emp_se[z + 1]);
        }
    }

    std::string csv = is_beta ? "beta" : "k";
    for (const auto& name : exact_cols) csv += "," + name;
    if (empirical) csv += ",empirical,empirical_stderr";
    if (footnote) csv += ",empirical_beta0_limit";
    csv += '\n';
    for (std::size_t r = 0; r < rows; ++r) {
        csv += fmt_value(values[r]);
        for (std::size_t c = 0; c < exact_cols.size(); ++c) csv += "," + fmt_value(exact_vals[c][r]);
        if (empirical) {
            csv += "," + fmt_value(emp_vals[r]);
            csv += "," + fmt_value(emp_se[r]);
        }
        if (footnote)
            csv += "," + (static_cast<int>(r) == zero_row ? beta0_limit : std::string());
        csv += '\n';
    }
    return csv;
}

namespace {

std::string eval_report(const std::vector<EvalResult>& results, double k, double beta,
                        const std::string& format) {
    std::string text;
    if (format == "csv") {
        text = "pipeline,mean,variance,mean_variance_risk,utility_taylor\n";
        for (const auto& r : results)
            text += r.pipeline + "," + fmt_value(r.mean) + "," + fmt_value(r.variance) + "," +
                    fmt_value(mean_variance_risk(r.mean, r.variance, k)) + "," +
                    fmt_value(utility_taylor(r.mean, r.variance, beta)) + "\n";
        return text;
    }
    for (const auto& r : results) {
        text += "pipeline=" + r.pipeline;
        text += " mean=" + fmt_value(r.mean);
        text += " variance=" + fmt_value(r.variance);
        text += " mean_variance_risk[k=" + fmt_value(k) +
                "]=" + fmt_value(mean_variance_risk(r.mean, r.variance, k));
        text += " utility_taylor[beta=" + fmt_value(beta) +
                "]=" + fmt_value(utility_taylor(r.mean, r.variance, beta));
        text += '\n';
    }
    return text;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"law-invariant risk of the discounted return in finite MDPs "
                 "with stochastic transition rewards"};
    app.require_subcommand(1);

    struct {
        std::string model, policy, out, format = "text";
        double gamma_override = -1.0;
        double k = 1.0, beta = -0.1;
        std::vector<std::string> pipelines = {"sat"};
        std::string process = "original", strategy = "sat-key", parameter = "k";
        bool lump = false;
        int L = 20, M = 500, N = 200;
        std::uint64_t seed = 42;
        double from = 0.0, to = 0.0, step = 0.0;
    } o;

    auto add_model = [&](CLI::App* cmd) {
        cmd->add_option("model", o.model, "model file")->required();
        cmd->add_option("--policy", o.policy, "policy file (overrides the in-file policy)");
        cmd->add_option("--gamma-override", o.gamma_override,
                        "replace the model's discount factor");
    };
    auto add_sims = [&](CLI::App* cmd) {
        cmd->add_option("--L", o.L, "number of simulation groups");
        cmd->add_option("--M", o.M, "simulations per group");
        cmd->add_option("--N", o.N, "time horizon per simulation");
        cmd->add_option("--seed", o.seed, "random seed");
    };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out, "write output to this path instead of stdout");
    };

    CLI::App* c_validate = app.add_subcommand("validate", "parse a model file and check invariants");
    add_model(c_validate);

    CLI::App* c_eval = app.add_subcommand("eval", "exact risk values per pipeline");
    add_model(c_eval);
    add_out(c_eval);
    c_eval->add_option("--pipeline", o.pipelines, "sat | sat-lumped | simplified")
        ->delimiter(',')
        ->check(CLI::IsMember(kExactPipelines));
    c_eval->add_option("-k,--k", o.k, "mean-variance risk parameter");
    c_eval->add_option("--beta", o.beta, "exponential-utility risk parameter");
    c_eval->add_option("--format", o.format, "text | csv")
        ->check(CLI::IsMember({"text", "csv"}));

    CLI::App* c_transform =
        app.add_subcommand("transform", "write the augmented (optionally lumped) model");
    add_model(c_transform);
    add_out(c_transform);
    c_transform->add_flag("--lump", o.lump, "lump isotopic states (needs a policy)");
    c_transform->add_option("--lump-strategy", o.strategy, "pairwise | sat-key")
        ->check(CLI::IsMember({"pairwise", "sat-key"}));

    CLI::App* c_lump = app.add_subcommand("lump", "report isotopic classes of the augmented chain");
    add_model(c_lump);
    add_out(c_lump);
    c_lump->add_option("--lump-strategy", o.strategy, "pairwise | sat-key")
        ->check(CLI::IsMember({"pairwise", "sat-key"}));

    CLI::App* c_simulate = app.add_subcommand("simulate", "empirical risk estimates");
    add_model(c_simulate);
    add_out(c_simulate);
    add_sims(c_simulate);
    c_simulate->add_option("--process", o.process, "original | sat | sat-lumped | simplified")
        ->check(CLI::IsMember({"original", "sat", "sat-lumped", "simplified"}));
    c_simulate->add_option("-k,--k", o.k, "mean-variance risk parameter");
    c_simulate->add_option("--beta", o.beta, "exponential-utility risk parameter");

    CLI::App* c_sweep = app.add_subcommand("sweep", "risk curves along k or beta as CSV");
    add_model(c_sweep);
    add_out(c_sweep);
    add_sims(c_sweep);
    c_sweep->add_option("--parameter", o.parameter, "k | beta")
        ->required()
        ->check(CLI::IsMember({"k", "beta"}));
    c_sweep->add_option("--from", o.from, "first parameter value")->required();
    c_sweep->add_option("--to", o.to, "last parameter value")->required();
    c_sweep->add_option("--step", o.step, "grid step")->required();
    c_sweep->add_option("--pipeline", o.pipelines,
                        "sat | sat-lumped | simplified | empirical")
        ->delimiter(',')
        ->check(CLI::IsMember(kAllPipelines));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*c_validate) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            std::size_t actions = 0, rewards = 0;
            for (const auto& st : loaded.mdp.states) actions += st.actions.size();
            rewards = loaded.mdp.reward_support.size();
            out << "ok: states=" << loaded.mdp.states.size() << " actions=" << actions
                << " reward_values=" << rewards << " gamma=" << fmt_value(loaded.mdp.gamma)
                << " policy=" << (loaded.policy ? "present" : "absent") << "\n";
        } else if (*c_eval) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            const Policy& pol = require_policy(loaded);
            std::vector<EvalResult> results;
            for (const auto& p : o.pipelines)
                results.push_back(eval_pipeline(loaded.mdp, pol, p));
            emit(eval_report(results, o.k, o.beta, o.format), o.out, out);
        } else if (*c_transform) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            const AugMdp aug = transform_mdp(loaded.mdp);
            std::string stats = "original_states=" + std::to_string(loaded.mdp.states.size()) +
                                " augmented_states=" + std::to_string(aug.mdp.states.size());
            std::string rendered;
            if (o.lump) {
                const DetChain chain = transform_process(loaded.mdp, require_policy(loaded));
                const LumpReport report = lump_with(chain, strategy_from(o.strategy));
                stats += " lumped_states=" + std::to_string(report.size_after) +
                         " strategy=" + lump_strategy_name(report.strategy);
                rendered = render_chain(report.merged_chain);
            } else if (loaded.policy) {
                const Policy lifted = lift_policy(aug, *loaded.policy);
                rendered = render_model(aug.mdp, &lifted);
            } else {
                rendered = render_model(aug.mdp);
            }
            if (o.out.empty()) {
                out << rendered;
                err << stats << "\n";
            } else {
                write_file(o.out, rendered);
                out << stats << "\n";
            }
        } else if (*c_lump) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            const DetChain chain = transform_process(loaded.mdp, require_policy(loaded));
            const LumpReport report = lump_with(chain, strategy_from(o.strategy));
            out << "strategy=" << lump_strategy_name(report.strategy)
                << " size_before=" << report.size_before << " size_after=" << report.size_after
                << "\n";
            for (std::size_t c = 0; c < report.classes.size(); ++c) {
                out << "class " << c + 1 << ":";
                for (const auto& name : report.classes[c]) out << " " << name;
                out << "\n";
            }
            if (!o.out.empty()) write_file(o.out, render_chain(report.merged_chain));
        } else if (*c_simulate) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            const Policy& pol = require_policy(loaded);
            SampleGroups groups;
            if (o.process == "original")
                groups = run_groups(induce(loaded.mdp, pol), o.L, o.M, o.N, o.seed, "original");
            else
                groups = run_groups(chain_for(loaded.mdp, pol, o.process), o.L, o.M, o.N, o.seed,
                                    o.process);
            const Estimate mv = empirical_mean_variance(groups, o.k);
            const Estimate ut = empirical_utility(groups, o.beta);
            out << "process=" << groups.process_tag << " L=" << o.L << " M=" << o.M
                << " N=" << o.N << " seed=" << o.seed << "\n";
            out << "empirical_mean_variance[k=" << fmt_value(o.k) << "]=" << fmt_value(mv.value)
                << " stderr=" << fmt_value(mv.stderr_) << "\n";
            out << "empirical_utility[beta=" << fmt_value(o.beta) << "]=" << fmt_value(ut.value)
                << " stderr=" << fmt_value(ut.stderr_) << "\n";
            if (!o.out.empty()) write_file(o.out, to_csv(groups));
        } else if (*c_sweep) {
            const LoadedModel loaded = load_model(o.model, o.policy, o.gamma_override);
            const Policy& pol = require_policy(loaded);
            SweepSpec spec;
            spec.parameter = o.parameter == "beta" ? SweepSpec::Param::beta : SweepSpec::Param::k;
            spec.from = o.from;
            spec.to = o.to;
            spec.step = o.step;
            spec.pipelines = o.pipelines;
            spec.sims_groups = o.L;
            spec.sims_per_group = o.M;
            spec.sims_horizon = o.N;
            spec.seed = o.seed;
            emit(sweep_csv(loaded.mdp, pol, spec), o.out, out);
        }
        return 0;
    } catch (const numeric_error& e) {
        err << "numerical error: " << e.what() << "\n";
        return 2;
    } catch (const input_error& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace satrisk
