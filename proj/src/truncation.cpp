#include "sphtrunc/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sphtrunc/errors.hpp"
#include "sphtrunc/specfun.hpp"

namespace sphtrunc {

namespace {

std::vector<std::size_t> ascending_order(std::span<const double> x) {
    std::vector<std::size_t> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
    return order;
}

double per_index_limit(double rho, std::size_t v, std::size_t rank) {
    // rank is 0-based here; the 1-based bound is rho / (v - k + 1).
    return std::min(rho / 3.0, rho / static_cast<double>(v - rank));
}

}  // namespace

std::vector<double> truncation_map(std::span<const double> lambda, double rho, double epsilon) {
    const auto ints = eval_integrals_relative(lambda, rho, epsilon, Want::alpha_and_k);
    std::vector<double> mu(lambda.size());
    for (std::size_t k = 0; k < lambda.size(); ++k) mu[k] = lambda[k] * ints.alpha_k[k] / ints.alpha;
    return mu;
}

TruncatedSpectrum truncate_spectrum(const Spectrum& lambda, double rho, double epsilon) {
    return {truncation_map(lambda.values(), rho, epsilon), rho};
}

SymMatrix truncate_matrix(const SymMatrix& sigma, double rho, double epsilon) {
    const auto eig = eigh(sigma);
    if (!(eig.values.front() > 0.0)) {
        throw DomainError("truncate_matrix: covariance is not positive definite");
    }
    const auto mu = truncation_map(eig.values, rho, epsilon);
    return compose(mu, eig.vectors);
}

std::string_view to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::positivity:
            return "positivity";
        case BoundKind::sum:
            return "sum";
        case BoundKind::per_index:
            return "per-index";
        case BoundKind::rho_third:
            return "rho/3";
    }
    return "?";
}

FeasibilityReport check_feasibility(std::span<const double> mu, double rho) {
    if (!(rho > 0.0)) throw DomainError("check_feasibility: rho must be positive");
    FeasibilityReport report;
    const std::size_t v = mu.size();
    const auto order = ascending_order(mu);

    const double total = std::accumulate(mu.begin(), mu.end(), 0.0);
    if (total > rho + kBoundSlack) report.violated.push_back({BoundKind::sum, 0, total, rho});

    for (std::size_t rank = 0; rank < v; ++rank) {
        const double x = mu[order[rank]];
        if (!(x > 0.0)) {
            report.violated.push_back({BoundKind::positivity, rank, x, 0.0});
            continue;
        }
        if (x > rho / 3.0 + kBoundSlack) {
            report.violated.push_back({BoundKind::rho_third, rank, x, rho / 3.0});
        }
        const double limit = rho / static_cast<double>(v - rank);
        if (limit < rho / 3.0 && x > limit + kBoundSlack) {
            report.violated.push_back({BoundKind::per_index, rank, x, limit});
        }
    }
    report.in_h = report.violated.empty();
    return report;
}

std::vector<MuBound> mu_bounds(std::span<const double> lambda, double rho) {
    if (!(rho > 0.0)) throw DomainError("mu_bounds: rho must be positive");
    const std::size_t v = lambda.size();
    const auto order = ascending_order(lambda);
    std::vector<MuBound> out(v);
    for (std::size_t rank = 0; rank < v; ++rank) {
        const std::size_t k = order[rank];
        if (!(lambda[k] > 0.0)) throw DomainError("mu_bounds: eigenvalues must be positive");
        out[k].lower = rho / bound_ratio_r(static_cast<int>(v), rho / (2.0 * lambda[k]));
        out[k].upper = per_index_limit(rho, v, rank);
    }
    return out;
}

}  // namespace sphtrunc
