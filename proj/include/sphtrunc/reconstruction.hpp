#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sphtrunc/linalg.hpp"
#include "sphtrunc/ruben.hpp"
#include "sphtrunc/truncation.hpp"

namespace sphtrunc {

enum class Scheme { gj, gjor, boosted };

std::string_view to_string(Scheme scheme);
/// Accepts "gj", "gjor", "boosted".
Scheme parse_scheme(std::string_view name);

struct SolverConfig {
    Scheme scheme = Scheme::gjor;
    /// Relaxation factor for GJOR/Boosted; computed from ‖J‖_∞ at mu when unset.
    std::optional<double> omega;
    /// Boost slope: omega_k = (1 + beta k) omega for the 1-based ascending index k.
    double beta = 0.0;
    double eps_t = 1e-7;
    std::size_t max_iter = 1'000'000;
    /// Iterations run with the plain omega before beta is switched on.
    std::size_t warmup = 40;
    double epsilon = kDefaultEpsilon;
    bool keep_history = false;
};

enum class SolveStatus { converged, diverged, max_iter };

std::string_view to_string(SolveStatus status);

struct SolverTrace {
    /// lambda^(0) = mu, lambda^(1), ... when keep_history is set.
    std::vector<std::vector<double>> iterates;
    std::size_t n_it = 0;
    SolveStatus status = SolveStatus::max_iter;
    std::vector<double> lambda_hat;
    /// Relaxation factor in effect (1 for GJ).
    double omega = 1.0;
};

struct JacobianInfo {
    /// J(k, l) = d mu_l / d lambda_k
    Matrix j;
    /// Omega(k, l) = (alpha_kl / alpha - alpha_k alpha_l / alpha^2) / 2
    SymMatrix omega;
    /// max_l sum_k |J(k, l)|, the infinity norm of d mu / d lambda with outputs as rows.
    double inf_norm_j = 0.0;
};

/// T_k(lambda) = mu_k alpha / alpha_k(rho; lambda).
std::vector<double> fixed_point_map(std::span<const double> lambda, const TruncatedSpectrum& mu,
                                    double epsilon = kDefaultEpsilon);

/// Inverts the truncation map by (over-relaxed, optionally boosted) fixed-point iteration
/// from lambda^(0) = mu. Stops at the first n with
/// ‖lambda^(n) - lambda^(n-1)‖_∞ / ‖lambda^(n-1)‖_∞ < eps_t.
///
/// An iterate with a non-finite or non-positive component, or one exceeding
/// 1e6 max(mu), ends the run as diverged. Throws DomainError if mu is infeasible.
SolverTrace solve(const TruncatedSpectrum& mu, const SolverConfig& config);

JacobianInfo jacobian(std::span<const double> lambda, double rho,
                      double epsilon = kDefaultEpsilon);

/// 2 / (1 + sqrt(1 - sigma^2)); throws DomainError unless 0 <= sigma < 1.
double omega_opt(double sigma);

}  // namespace sphtrunc
