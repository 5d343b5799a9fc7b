#include "sphtrunc/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sphtrunc/errors.hpp"

namespace sphtrunc {

namespace {

constexpr double kDivergenceFactor = 1e6;

double sup_norm(std::span<const double> x) {
    double m = 0.0;
    for (double e : x) m = std::max(m, std::abs(e));
    return m;
}

bool diverged(std::span<const double> x, double ceiling) {
    return std::any_of(x.begin(), x.end(), [&](double e) {
        return !std::isfinite(e) || !(e > 0.0) || e > ceiling;
    });
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::gj:
            return "gj";
        case Scheme::gjor:
            return "gjor";
        case Scheme::boosted:
            return "boosted";
    }
    return "?";
}

Scheme parse_scheme(std::string_view name) {
    if (name == "gj") return Scheme::gj;
    if (name == "gjor") return Scheme::gjor;
    if (name == "boosted") return Scheme::boosted;
    throw DomainError("unknown scheme '" + std::string(name) + "'");
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged:
            return "converged";
        case SolveStatus::diverged:
            return "diverged";
        case SolveStatus::max_iter:
            return "max_iter";
    }
    return "?";
}

std::vector<double> fixed_point_map(std::span<const double> lambda, const TruncatedSpectrum& mu,
                                    double epsilon) {
    if (lambda.size() != mu.mu.size()) {
        throw std::invalid_argument("fixed_point_map: dimension mismatch");
    }
    const auto ints = eval_integrals_relative(lambda, mu.rho, epsilon, Want::alpha_and_k);
    std::vector<double> t(lambda.size());
    for (std::size_t k = 0; k < lambda.size(); ++k) t[k] = mu.mu[k] * ints.alpha / ints.alpha_k[k];
    return t;
}

double omega_opt(double sigma) {
    if (!(sigma >= 0.0) || !(sigma < 1.0)) {
        throw DomainError("omega_opt: spectral-radius surrogate must lie in [0, 1), got " +
                          std::to_string(sigma));
    }
    return 2.0 / (1.0 + std::sqrt(1.0 - sigma * sigma));
}

JacobianInfo jacobian(std::span<const double> lambda, double rho, double epsilon) {
    const std::size_t v = lambda.size();
    const auto ints = eval_integrals_relative(lambda, rho, epsilon, Want::all);
    JacobianInfo info{Matrix(v, v), SymMatrix(v), 0.0};
    const double a = ints.alpha;
    for (std::size_t k = 0; k < v; ++k) {
        for (std::size_t l = k; l < v; ++l) {
            info.omega.set(k, l,
                           0.5 * (ints.alpha_jk(k, l) / a - ints.alpha_k[k] * ints.alpha_k[l] / (a * a)));
        }
    }
    for (std::size_t k = 0; k < v; ++k)
        for (std::size_t l = 0; l < v; ++l) info.j(k, l) = info.omega(k, l) * lambda[l] / lambda[k];
    info.inf_norm_j = inf_norm(info.j.transposed());
    return info;
}

SolverTrace solve(const TruncatedSpectrum& mu, const SolverConfig& config) {
    if (!(config.eps_t > 0.0)) throw DomainError("solve: eps_t must be positive");
    if (config.beta < 0.0) throw DomainError("solve: beta must be non-negative");
    const auto feasibility = check_feasibility(mu.mu, mu.rho);
    if (!feasibility.in_h) {
        throw DomainError("solve: truncated spectrum violates the " +
                          std::string(to_string(feasibility.violated.front().kind)) + " bound");
    }

    const std::size_t v = mu.mu.size();
    SolverTrace trace;
    double omega = 1.0;
    if (config.scheme != Scheme::gj) {
        omega = config.omega ? *config.omega
                             : omega_opt(jacobian(mu.mu, mu.rho, config.epsilon).inf_norm_j);
    }
    trace.omega = omega;

    std::vector<double> current = mu.mu;
    std::vector<double> next(v);
    std::vector<double> weights(v, omega);
    const double ceiling = kDivergenceFactor * sup_norm(mu.mu);
    if (config.keep_history) trace.iterates.push_back(current);

    for (std::size_t n = 1; n <= config.max_iter; ++n) {
        if (config.scheme == Scheme::boosted && n == config.warmup + 1) {
            for (std::size_t k = 0; k < v; ++k) {
                weights[k] = (1.0 + config.beta * static_cast<double>(k + 1)) * omega;
            }
        }
        const auto t = fixed_point_map(current, mu, config.epsilon);
        for (std::size_t k = 0; k < v; ++k) next[k] = current[k] + weights[k] * (t[k] - current[k]);

        if (config.keep_history) trace.iterates.push_back(next);
        if (diverged(next, ceiling)) {
            trace.status = SolveStatus::diverged;
            trace.n_it = n;
            trace.lambda_hat = next;
            return trace;
        }

        double step = 0.0;
        for (std::size_t k = 0; k < v; ++k) step = std::max(step, std::abs(next[k] - current[k]));
        const double rel = step / sup_norm(current);
        current.swap(next);
        if (rel < config.eps_t) {
            trace.status = SolveStatus::converged;
            trace.n_it = n;
            trace.lambda_hat = current;
            return trace;
        }
    }
    trace.status = SolveStatus::max_iter;
    trace.n_it = config.max_iter;
    trace.lambda_hat = current;
    return trace;
}

}  // namespace sphtrunc
