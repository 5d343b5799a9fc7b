#pragma once

// Independent reference computations for tests. Nothing here shares code with the
// series evaluator beyond the special functions.

#include <cstddef>
#include <span>
#include <vector>

#include "sphtrunc/rng.hpp"

namespace sphtrunc {

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
    std::size_t n_accepted = 0;
};

struct McMoments {
    McEstimate alpha;
    std::vector<McEstimate> mu;
};

/// Rejection sampling of N(0, diag(lambda)) restricted to x'x < rho.
/// Throws DomainError for n < 10^4, DegenerateSampleError when nothing is accepted.
McMoments mc_truncated_moments(std::span<const double> lambda, double rho, std::size_t n,
                               RngStream& rng);

struct QuadratureMoments {
    double alpha = 0.0;
    /// alpha_k = E[x_k^2 / lambda_k; x'x < rho]
    std::vector<double> alpha_k;
};

/// Tensor Gauss-Legendre in spherical coordinates, v in {1, 2, 3}.
QuadratureMoments quadrature_moments(std::span<const double> lambda, double rho,
                                     std::size_t nodes = 200);
double quadrature_alpha(std::span<const double> lambda, double rho, std::size_t nodes = 200);

/// c F_{v+2}(rho/c) / F_v(rho/c)
double tallis_mu(double c, int v, double rho);

/// Level lambda with tallis_mu(lambda, v, rho) = m, by bisection on [m, 1e6 m].
/// Throws DomainError if m is outside (0, rho/3) or the bracket fails.
double bisect_isotropic(double m, int v, double rho);

}  // namespace sphtrunc
