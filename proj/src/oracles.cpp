#include "sphtrunc/oracles.hpp"

#include <boost/math/special_functions/legendre.hpp>

#include <cmath>
#include <numbers>
#include <string>

#include "sphtrunc/errors.hpp"
#include "sphtrunc/specfun.hpp"

namespace sphtrunc {

namespace {

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// Gauss-Legendre rule mapped to [lo, hi].
Rule gauss_legendre(std::size_t n, double lo, double hi) {
    const auto positive = boost::math::legendre_p_zeros<double>(static_cast<int>(n));
    Rule rule;
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    auto add = [&](double t) {
        const double dp = boost::math::legendre_p_prime(static_cast<int>(n), t);
        rule.x.push_back(mid + half * t);
        rule.w.push_back(half * 2.0 / ((1.0 - t * t) * dp * dp));
    };
    for (double t : positive) {
        if (t == 0.0) {
            add(0.0);
        } else {
            add(t);
            add(-t);
        }
    }
    return rule;
}

void check_lambda(std::span<const double> lambda) {
    if (lambda.empty()) throw DomainError("oracle: empty spectrum");
    for (double l : lambda) {
        if (!(l > 0.0) || !std::isfinite(l)) throw DomainError("oracle: eigenvalues must be positive");
    }
}

}  // namespace

McMoments mc_truncated_moments(std::span<const double> lambda, double rho, std::size_t n,
                               RngStream& rng) {
    check_lambda(lambda);
    if (n < 10000) throw DomainError("mc_truncated_moments: need at least 1e4 samples");
    if (!(rho > 0.0)) throw DomainError("mc_truncated_moments: rho must be positive");
    const std::size_t v = lambda.size();
    std::vector<double> sd(v);
    for (std::size_t k = 0; k < v; ++k) sd[k] = std::sqrt(lambda[k]);

    std::vector<double> sum(v, 0.0), sum_sq(v, 0.0), x(v);
    std::size_t accepted = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < v; ++k) {
            x[k] = sd[k] * rng.normal();
            r2 += x[k] * x[k];
        }
        if (r2 >= rho) continue;
        ++accepted;
        for (std::size_t k = 0; k < v; ++k) {
            const double q = x[k] * x[k];
            sum[k] += q;
            sum_sq[k] += q * q;
        }
    }
    if (accepted == 0) throw DegenerateSampleError("mc_truncated_moments: no sample accepted");

    McMoments out;
    const double p = static_cast<double>(accepted) / static_cast<double>(n);
    out.alpha = {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, accepted};
    const auto na = static_cast<double>(accepted);
    for (std::size_t k = 0; k < v; ++k) {
        const double mean = sum[k] / na;
        double se = 0.0;
        if (accepted >= 2) {
            const double var = (sum_sq[k] - na * mean * mean) / (na - 1.0);
            se = std::sqrt(std::max(var, 0.0) / na);
        }
        out.mu.push_back({mean, se, n, accepted});
    }
    return out;
}

QuadratureMoments quadrature_moments(std::span<const double> lambda, double rho,
                                     std::size_t nodes) {
    check_lambda(lambda);
    if (!(rho > 0.0)) throw DomainError("quadrature: rho must be positive");
    if (nodes < 2) throw DomainError("quadrature: need at least 2 nodes");
    const std::size_t v = lambda.size();
    const double r_max = std::sqrt(rho);
    const auto radial = gauss_legendre(nodes, 0.0, r_max);
    double norm = std::pow(2.0 * std::numbers::pi, -0.5 * static_cast<double>(v));
    for (double l : lambda) norm /= std::sqrt(l);

    // Unit directions u with their surface weights.
    std::vector<std::vector<double>> dirs;
    std::vector<double> dir_w;
    switch (v) {
        case 1:
            dirs = {{1.0}, {-1.0}};
            dir_w = {1.0, 1.0};
            break;
        case 2: {
            const auto phi = gauss_legendre(nodes, 0.0, 2.0 * std::numbers::pi);
            for (std::size_t i = 0; i < phi.x.size(); ++i) {
                dirs.push_back({std::cos(phi.x[i]), std::sin(phi.x[i])});
                dir_w.push_back(phi.w[i]);
            }
            break;
        }
        case 3: {
            const auto theta = gauss_legendre(nodes, 0.0, std::numbers::pi);
            const auto phi = gauss_legendre(nodes, 0.0, 2.0 * std::numbers::pi);
            for (std::size_t i = 0; i < theta.x.size(); ++i) {
                const double st = std::sin(theta.x[i]);
                const double ct = std::cos(theta.x[i]);
                for (std::size_t j = 0; j < phi.x.size(); ++j) {
                    dirs.push_back({st * std::cos(phi.x[j]), st * std::sin(phi.x[j]), ct});
                    dir_w.push_back(theta.w[i] * phi.w[j] * st);
                }
            }
            break;
        }
        default:
            throw DomainError("quadrature: only v <= 3 is supported, got v = " +
                              std::to_string(v));
    }

    QuadratureMoments out;
    out.alpha_k.assign(v, 0.0);
    for (std::size_t d = 0; d < dirs.size(); ++d) {
        const auto& u = dirs[d];
        double q = 0.0;
        for (std::size_t k = 0; k < v; ++k) q += u[k] * u[k] / lambda[k];
        double a = 0.0;
        double a2 = 0.0;
        for (std::size_t i = 0; i < radial.x.size(); ++i) {
            const double r = radial.x[i];
            const double f = radial.w[i] * std::pow(r, static_cast<double>(v) - 1.0) *
                             std::exp(-0.5 * r * r * q);
            a += f;
            a2 += f * r * r;
        }
        out.alpha += dir_w[d] * a;
        for (std::size_t k = 0; k < v; ++k) {
            out.alpha_k[k] += dir_w[d] * a2 * u[k] * u[k] / lambda[k];
        }
    }
    out.alpha *= norm;
    for (auto& x : out.alpha_k) x *= norm;
    return out;
}

double quadrature_alpha(std::span<const double> lambda, double rho, std::size_t nodes) {
    return quadrature_moments(lambda, rho, nodes).alpha;
}

double tallis_mu(double c, int v, double rho) {
    if (!(c > 0.0) || !(rho > 0.0)) throw DomainError("tallis_mu: c and rho must be positive");
    const double x = rho / c;
    return c * chi_square_cdf(Dof(v + 2), x) / chi_square_cdf(Dof(v), x);
}

double bisect_isotropic(double m, int v, double rho) {
    if (!(m > 0.0) || !(m < rho / 3.0)) {
        throw DomainError("bisect_isotropic: level must lie in (0, rho/3)");
    }
    double lo = m;
    double hi = 1e6 * m;
    if (tallis_mu(lo, v, rho) > m || tallis_mu(hi, v, rho) < m) {
        throw DomainError("bisect_isotropic: level not bracketed, infeasible m = " +
                          std::to_string(m));
    }
    while (hi - lo > 1e-12 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (tallis_mu(mid, v, rho) < m) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace sphtrunc
