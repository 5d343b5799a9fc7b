#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sphtrunc/ensembles.hpp"
#include "sphtrunc/errors.hpp"
#include "sphtrunc/oracles.hpp"
#include "sphtrunc/reconstruction.hpp"
#include "sphtrunc/truncation.hpp"

using namespace sphtrunc;

namespace {

double rel_sup_error(std::span<const double> a, std::span<const double> b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / den;
}

}  // namespace

TEST_CASE("omega_opt") {
    CHECK(omega_opt(0.0) == 1.0);
    CHECK(omega_opt(0.6) == doctest::Approx(2.0 / 1.8));
    CHECK(omega_opt(0.99) == doctest::Approx(1.75274).epsilon(1e-5));
    CHECK_THROWS_AS(omega_opt(1.0), DomainError);
    CHECK_THROWS_AS(omega_opt(-0.1), DomainError);
}

TEST_CASE("fixed-point map") {
    const Spectrum lam({0.5, 1.0, 1.5});
    const auto mu = truncate_spectrum(lam, 1.0);
    const auto alpha = eval_integrals(lam.values(), 1.0).alpha;
    const auto t = fixed_point_map(lam.values(), mu);
    for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(t[k] - lam[k]) <= 2e-14 / alpha + 1e-15);
    const auto first = fixed_point_map(mu.mu, mu);
    for (std::size_t k = 0; k < 3; ++k) CHECK(first[k] > mu.mu[k]);

    const TruncatedSpectrum iso{std::vector<double>(3, 0.2), 1.0};
    const auto ti = fixed_point_map(iso.mu, iso);
    CHECK(ti[0] == doctest::Approx(ti[1]).epsilon(1e-14));
    CHECK(ti[1] == doctest::Approx(ti[2]).epsilon(1e-14));
}

TEST_CASE("GJ round trip on a weakly truncated spectrum") {
    const Spectrum lam({0.5, 1.0, 1.5});
    const auto mu = truncate_spectrum(lam, 1.0);
    SolverConfig cfg;
    cfg.scheme = Scheme::gj;
    cfg.keep_history = true;
    const auto trace = solve(mu, cfg);
    REQUIRE(trace.status == SolveStatus::converged);
    // The relative-step rule at eps_t bounds the residual, not the distance to lambda.
    const auto back = truncation_map(trace.lambda_hat, 1.0);
    CHECK(rel_sup_error(back, mu.mu) <= 10.0 * cfg.eps_t);
    CHECK(rel_sup_error(trace.lambda_hat, lam.vec()) < 1e-5);

    for (std::size_t n = 1; n < trace.iterates.size(); ++n) {
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(trace.iterates[n][k] >= trace.iterates[n - 1][k]);
            CHECK(trace.iterates[n][k] <= lam[k] + 1e-12);
        }
    }
    const auto& last = trace.iterates.back();
    const auto& prev = trace.iterates[trace.iterates.size() - 2];
    CHECK(rel_sup_error(last, prev) < cfg.eps_t);
    CHECK(trace.iterates.size() == trace.n_it + 1);

    cfg.eps_t = 1e-11;
    cfg.keep_history = false;
    CHECK(rel_sup_error(solve(mu, cfg).lambda_hat, lam.vec()) < 1e-6);
}

TEST_CASE("isotropic reconstruction matches scalar bisection") {
    for (int v : {2, 4}) {
        // Isotropic levels above rho/(v+2) have no preimage.
        const double m = tallis_mu(1.3, v, 1.0);
        const TruncatedSpectrum mu{std::vector<double>(v, m), 1.0};
        SolverConfig cfg;
        cfg.eps_t = 1e-12;
        const auto trace = solve(mu, cfg);
        REQUIRE(trace.status == SolveStatus::converged);
        const double ref = bisect_isotropic(m, v, 1.0);
        for (double x : trace.lambda_hat) CHECK(std::abs(x - ref) <= 1e-6 * ref);
    }
}

TEST_CASE("schemes agree and over-relaxation helps") {
    const auto cfg_w = WishartConfig::make(10);
    RngStream rng(5, 0);
    const auto lam = sample_spectrum(cfg_w, rng);
    const auto mu = truncate_spectrum(lam, reference_modes(10)->front());
    SolverConfig gj;
    gj.scheme = Scheme::gj;
    SolverConfig gjor;
    SolverConfig boosted;
    boosted.scheme = Scheme::boosted;
    boosted.beta = 1.0;
    const auto a = solve(mu, gj);
    const auto b = solve(mu, gjor);
    const auto c = solve(mu, boosted);
    REQUIRE(a.status == SolveStatus::converged);
    REQUIRE(b.status == SolveStatus::converged);
    REQUIRE(c.status == SolveStatus::converged);
    CHECK(b.n_it < a.n_it);
    CHECK(b.omega > 1.0);
    CHECK(rel_sup_error(a.lambda_hat, c.lambda_hat) < 1e-3);
    CHECK(rel_sup_error(b.lambda_hat, c.lambda_hat) < 1e-3);
}

TEST_CASE("solver failure modes") {
    const TruncatedSpectrum bad{{0.3, 0.5}, 1.0};
    CHECK_THROWS_AS(solve(bad, SolverConfig{}), DomainError);

    const auto mu = truncate_spectrum(Spectrum({0.5, 1.0, 1.5}), 1.0);
    SolverConfig few;
    few.scheme = Scheme::gj;
    few.max_iter = 3;
    const auto t = solve(mu, few);
    CHECK(t.status == SolveStatus::max_iter);
    CHECK(t.n_it == 3);

    SolverConfig wild;
    wild.omega = 40.0;
    CHECK(solve(mu, wild).status == SolveStatus::diverged);
}

TEST_CASE("Jacobian against finite differences") {
    const auto cfg = WishartConfig::make(4);
    for (std::uint64_t i = 0; i < 4; ++i) {
        RngStream rng(17, i);
        const auto lam = sample_spectrum(cfg, rng).vec();
        const double rho = 0.9;
        const auto info = jacobian(lam, rho);
        for (std::size_t k = 0; k < 4; ++k) {
            auto up = lam, down = lam;
            const double h = 1e-5 * lam[k];
            up[k] += h;
            down[k] -= h;
            const auto mu_up = truncation_map(up, rho);
            const auto mu_down = truncation_map(down, rho);
            for (std::size_t l = 0; l < 4; ++l) {
                CHECK(std::abs(info.j(k, l) - (mu_up[l] - mu_down[l]) / (2.0 * h)) < 1e-5);
            }
        }
        CHECK(eigh(info.omega).values.front() > 0.0);
        CHECK(info.inf_norm_j < 1.0);
    }
    const auto iso = jacobian(std::vector<double>(3, 0.7), 1.0);
    CHECK(iso.j(0, 0) == doctest::Approx(iso.j(2, 2)));
    CHECK(iso.j(0, 1) == doctest::Approx(iso.j(1, 2)));
    CHECK(iso.j(0, 1) == doctest::Approx(iso.j(1, 0)));
}
