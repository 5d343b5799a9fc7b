#include <doctest.h>

#include <cmath>
#include <sstream>

#include "sphtrunc/errors.hpp"
#include "sphtrunc/experiments.hpp"

using namespace sphtrunc;

namespace {

// Runs with n_it chosen so that the converged mean at rho is mean(rho).
std::vector<ExperimentRecord> synthetic(std::span<const double> rhos, double a, double b,
                                        std::size_t n) {
    std::vector<ExperimentRecord> out;
    for (double rho : rhos) {
        ExperimentRecord rec{rho, 0.0, {}};
        const auto target = static_cast<std::size_t>(std::llround(std::exp(a) * std::pow(rho, -b)));
        for (std::size_t i = 0; i < n; ++i) {
            rec.runs.push_back({rho, 0.0, i, RunStatus::converged, target, 1.0});
        }
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace

TEST_CASE("scaling fit on exact power-law data") {
    const std::vector<double> rhos{0.05, 0.1, 0.2, 0.4, 0.8, 1.0, 2.0};
    // Large a keeps the rounding of n_it to integers negligible.
    const auto recs = synthetic(rhos, 15.0, 0.9, 6);
    const auto fit = fit_scaling(recs);
    CHECK(fit.a.value == doctest::Approx(15.0).epsilon(1e-6));
    CHECK(fit.b.value == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(fit.a.error < 1e-9);
    CHECK(fit.b.error < 1e-9);
    CHECK(fit.points.size() == 6);
    for (const auto& pt : fit.points) CHECK(std::abs(pt.residual) < 1e-6);
}

TEST_CASE("scaling fit excludes failures and needs two points") {
    auto recs = synthetic(std::vector<double>{0.1, 0.5}, 8.0, 1.0, 4);
    recs[0].runs[0].status = RunStatus::diverged;
    recs[0].runs[0].n_it = 999999;
    CHECK(recs[0].failures() == 1);
    CHECK(recs[0].mean_n_it() == doctest::Approx(std::llround(std::exp(8.0) / 0.1)));
    const auto fit = fit_scaling(recs);
    CHECK(fit.b.value == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(fit.a.error >= 0.0);

    const auto one = synthetic(std::vector<double>{0.1, 3.0}, 8.0, 1.0, 4);
    CHECK_THROWS_AS(fit_scaling(one), FitError);
}

TEST_CASE("jackknife reflects spread across spectra") {
    std::vector<ExperimentRecord> recs;
    for (double rho : {0.1, 0.3, 1.0}) {
        ExperimentRecord rec{rho, 0.0, {}};
        for (std::size_t i = 0; i < 10; ++i) {
            const double scale = 1.0 + 0.1 * static_cast<double>(i);
            rec.runs.push_back({rho, 0.0, i, RunStatus::converged,
                                static_cast<std::size_t>(1000.0 * scale / std::pow(rho, 1.0 + 0.05 * i)), 1.0});
        }
        recs.push_back(std::move(rec));
    }
    const auto fit = fit_scaling(recs);
    CHECK(fit.b.error > 0.0);
    CHECK(fit.a.error > 0.0);
}

TEST_CASE("kappa fit") {
    std::vector<int> v{3, 4, 5, 6};
    std::vector<ScalingFit> fits;
    for (int x : v) {
        ScalingFit f;
        f.a.value = 2.0 + 0.3 * x;
        fits.push_back(f);
    }
    const auto k = fit_kappa(v, fits);
    CHECK(k.kappa == doctest::Approx(0.3));
    CHECK(k.a0 == doctest::Approx(2.0));
    CHECK(k.c == doctest::Approx(std::exp(2.0)));
    CHECK_THROWS_AS(fit_kappa(std::span<const int>(v).first(2), std::span<const ScalingFit>(fits).first(2)),
                    FitError);
}

TEST_CASE("study is deterministic and round-trips through CSV") {
    ExperimentConfig cfg;
    cfg.v = 3;
    cfg.n = 6;
    cfg.rho_values = {0.3, 1.5};
    cfg.scheme = Scheme::boosted;
    cfg.beta_grid = {0.0, 1.0};
    cfg.seed = 42;

    std::ostringstream one, many;
    const auto recs = run_convergence_study(cfg, &one);
    cfg.threads = 4;
    run_convergence_study(cfg, &many);
    CHECK(one.str() == many.str());
    REQUIRE(recs.size() == 4);
    CHECK(recs[1].rho == 0.3);
    CHECK(recs[1].beta == 1.0);
    for (const auto& r : recs) CHECK(r.converged() == 6);

    std::istringstream in(one.str());
    const auto csv = read_study_csv(in);
    CHECK(csv.v == 3);
    CHECK(csv.p == 6);
    CHECK(csv.scheme == "boosted");
    CHECK(csv.seed == 42);
    REQUIRE(csv.runs.size() == 24);
    const auto grouped = group_runs(csv.runs);
    REQUIRE(grouped.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(grouped[i].rho == recs[i].rho);
        CHECK(grouped[i].mean_n_it() == recs[i].mean_n_it());
    }
    // Same spectrum across rho: condition numbers repeat.
    CHECK(csv.runs[0].n_cond == csv.runs[12].n_cond);
}

TEST_CASE("config validation and CSV errors") {
    ExperimentConfig cfg;
    cfg.rho_values = {1.0};
    cfg.n = 1;
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    cfg.n = 4;
    cfg.rho_values = {};
    CHECK_THROWS_AS(cfg.validate(), DomainError);
    CHECK(default_beta_grid().size() == 11);
    CHECK(default_beta_grid().back() == doctest::Approx(2.0));

    std::istringstream bad_header("a,b\n");
    CHECK_THROWS(read_study_csv(bad_header));
    std::istringstream short_row(std::string(kStudyCsvHeader) + "\n3,6,0.5\n");
    CHECK_THROWS(read_study_csv(short_row));
}
