#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "sphtrunc/linalg.hpp"
#include "sphtrunc/ruben.hpp"

namespace sphtrunc {

/// Absolute slack applied when checking feasibility bounds.
inline constexpr double kBoundSlack = 1e-12;

/// Eigenvalues of the second-moment matrix of N(0, Σ) conditioned on the ball x'x < rho.
struct TruncatedSpectrum {
    std::vector<double> mu;
    double rho = 0.0;
};

/// mu_k = lambda_k alpha_k / alpha, for any positive (not necessarily sorted) lambda.
std::vector<double> truncation_map(std::span<const double> lambda, double rho,
                                   double epsilon = kDefaultEpsilon);

TruncatedSpectrum truncate_spectrum(const Spectrum& lambda, double rho,
                                    double epsilon = kDefaultEpsilon);

/// Second-moment matrix R diag(mu) Rᵀ of the truncated law, (lambda, R) = eigh(sigma).
/// Throws DomainError if sigma is not positive definite.
SymMatrix truncate_matrix(const SymMatrix& sigma, double rho, double epsilon = kDefaultEpsilon);

enum class BoundKind { positivity, sum, per_index, rho_third };

std::string_view to_string(BoundKind kind);

struct Violation {
    BoundKind kind;
    /// Position in ascending order of mu for per-index/rho_third/positivity; unused for sum.
    std::size_t rank = 0;
    double value = 0.0;
    double limit = 0.0;
};

/// Membership of mu in the set of spectra reachable by truncation (necessary condition):
/// sum mu <= rho and sorted mu_(k) <= min(rho/3, rho/(v-k+1)).
struct FeasibilityReport {
    bool in_h = true;
    std::vector<Violation> violated;
};

FeasibilityReport check_feasibility(std::span<const double> mu, double rho);

struct MuBound {
    double lower = 0.0;
    double upper = 0.0;
};

/// Per-index bounds: lower_k = rho / r(v, rho / (2 lambda_k)), upper_k = min(rho/3,
/// rho/(v - rank_k + 1)) where rank_k is the 1-based ascending rank of lambda_k.
std::vector<MuBound> mu_bounds(std::span<const double> lambda, double rho);

}  // namespace sphtrunc
