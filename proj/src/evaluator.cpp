#include "satrisk/evaluator.hpp"

#include "satrisk/errors.hpp"
#include "satrisk/kernels.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <utility>

namespace satrisk {
namespace {

constexpr double kResidualBound = 1e-10;
constexpr double kIterResidual = 1e-12;
constexpr std::size_t kIterCap = 1000000;
constexpr double kVarianceSlack = 1e-10;

std::vector<double> dense_matrix(const DetChain& chain) {
    const std::size_t n = chain.size();
    std::vector<double> p(n * n, 0.0);
    for (std::size_t x = 0; x < n; ++x)
        for (const auto& [y, q] : chain.rows[x]) p[x * n + static_cast<std::size_t>(y)] += q;
    return p;
}

void sparse_mat_vec(const DetChain& chain, const std::vector<double>& x,
                    std::vector<double>& y) {
    const std::size_t n = chain.size();
    for (std::size_t r = 0; r < n; ++r) {
        double s = 0.0;
        for (const auto& [c, q] : chain.rows[r]) s += q * x[static_cast<std::size_t>(c)];
        y[r] = s;
    }
}

// Solves x = b + c P x. The dense path factorizes I - cP; the fallback
// iterates the contraction, which needs no matrix storage.
std::vector<double> solve_discounted(const DetChain& chain, double c,
                                     const std::vector<double>& b, const EvalOptions& opts) {
    const std::size_t n = chain.size();
    std::vector<double> x(n, 0.0);

    if (n <= opts.dense_limit) {
        const std::vector<double> p = dense_matrix(chain);
        Eigen::MatrixXd a = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n),
                                                      static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t col = 0; col < n; ++col)
                a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) -=
                    c * p[r * n + col];
        Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) rhs(static_cast<Eigen::Index>(r)) = b[r];
        const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
        for (std::size_t r = 0; r < n; ++r) x[r] = sol(static_cast<Eigen::Index>(r));

        // Residual check through the kernel path: ||x - cPx - b||_inf.
        std::vector<double> px(n), lhs(n);
        kernels::mat_vec(p.data(), n, n, x.data(), px.data());
        kernels::axpby(lhs.data(), 1.0, x.data(), -c, px.data(), n);
        const double residual = kernels::max_abs_diff(lhs.data(), b.data(), n);
        if (!(residual < kResidualBound))
            throw numeric_error("linear solve residual " + std::to_string(residual) +
                                " exceeds bound");
        return x;
    }

    x = b;
    std::vector<double> px(n), next(n);
    for (std::size_t it = 0; it < kIterCap; ++it) {
        sparse_mat_vec(chain, x, px);
        kernels::axpby(next.data(), 1.0, b.data(), c, px.data(), n);
        const double delta = kernels::max_abs_diff(next.data(), x.data(), n);
        x.swap(next);
        // The residual of the new iterate is bounded by c * delta.
        if (c * delta < kIterResidual) return x;
    }
    throw numeric_error("fixed-point solve did not converge within iteration cap");
}

void check_residual(const DetChain& chain, double c, const std::vector<double>& b,
                    const std::vector<double>& x) {
    const std::size_t n = chain.size();
    std::vector<double> px(n), lhs(n);
    sparse_mat_vec(chain, x, px);
    kernels::axpby(lhs.data(), 1.0, x.data(), -c, px.data(), n);
    const double residual = kernels::max_abs_diff(lhs.data(), b.data(), n);
    if (!(residual < kResidualBound))
        throw numeric_error("solution residual " + std::to_string(residual) + " exceeds bound");
}

double clamp_variance(double v, const char* what) {
    if (v < -kVarianceSlack)
        throw numeric_error(std::string(what) + " is negative beyond round-off: " +
                            std::to_string(v));
    return v < 0.0 ? 0.0 : v;
}

// Start-epoch state distribution: the initial distribution itself, or its
// one-step push-forward when the chain begins in bookkeeping states.
std::vector<double> start_distribution(const DetChain& chain) {
    if (chain.reward_epoch_offset == 0) return chain.initial;
    std::vector<double> q(chain.size(), 0.0);
    for (std::size_t x = 0; x < chain.size(); ++x) {
        const double mu = chain.initial[x];
        if (mu == 0.0) continue;
        for (const auto& [y, p] : chain.rows[x]) q[static_cast<std::size_t>(y)] += mu * p;
    }
    return q;
}

std::pair<double, double> mix_moments(const DetChain& chain, const std::vector<double>& v,
                                      const std::vector<double>& psi) {
    const std::size_t n = chain.size();
    const std::vector<double> w = start_distribution(chain);
    const double mean = kernels::dot(w.data(), v.data(), n);
    std::vector<double> second(n);
    for (std::size_t i = 0; i < n; ++i) second[i] = psi[i] + v[i] * v[i];
    const double mix2 = kernels::dot(w.data(), second.data(), n);
    const double variance = clamp_variance(mix2 - mean * mean, "return variance");
    return {mean, variance};
}

} // namespace

std::vector<double> value_vector(const DetChain& chain, const EvalOptions& opts) {
    validate_chain(chain);
    std::vector<double> v = solve_discounted(chain, chain.gamma, chain.reward, opts);
    check_residual(chain, chain.gamma, chain.reward, v);
    return v;
}

std::vector<double> variance_vector(const DetChain& chain, const std::vector<double>& value,
                                    const EvalOptions& opts) {
    const std::size_t n = chain.size();
    if (value.size() != n) throw input_error("value vector does not match the chain");

    const double g2 = chain.gamma * chain.gamma;
    std::vector<double> u(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        double ev = 0.0, ev2 = 0.0;
        for (const auto& [y, p] : chain.rows[x]) {
            const double vy = value[static_cast<std::size_t>(y)];
            ev += p * vy;
            ev2 += p * vy * vy;
        }
        u[x] = g2 * (ev2 - ev * ev);
        if (u[x] < 0.0) u[x] = u[x] < -kVarianceSlack ? u[x] : 0.0;
    }

    std::vector<double> psi = solve_discounted(chain, g2, u, opts);
    check_residual(chain, g2, u, psi);
    for (double& e : psi) e = clamp_variance(e, "per-state variance");
    return psi;
}

std::pair<double, double> return_moments(const DetChain& chain, const EvalOptions& opts) {
    const std::vector<double> v = value_vector(chain, opts);
    const std::vector<double> psi = variance_vector(chain, v, opts);
    return mix_moments(chain, v, psi);
}

EvalResult evaluate_chain(const DetChain& chain, std::string pipeline, const EvalOptions& opts) {
    EvalResult result;
    result.per_state_value = value_vector(chain, opts);
    result.per_state_variance = variance_vector(chain, result.per_state_value, opts);
    const auto [mean, variance] = mix_moments(chain, result.per_state_value,
                                              result.per_state_variance);
    result.mean = mean;
    result.variance = variance;
    result.pipeline = std::move(pipeline);
    return result;
}

double mean_variance_risk(double mean, double variance, double k) {
    if (variance < 0.0) throw input_error("variance must be nonnegative");
    return mean - k * std::sqrt(variance);
}

double utility_taylor(double mean, double variance, double beta) {
    if (variance < 0.0) throw input_error("variance must be nonnegative");
    return mean + 0.5 * beta * variance;
}

} // namespace satrisk
