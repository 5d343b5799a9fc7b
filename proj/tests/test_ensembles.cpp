#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "sphtrunc/ensembles.hpp"
#include "sphtrunc/errors.hpp"

using namespace sphtrunc;

TEST_CASE("Wishart config") {
    CHECK(WishartConfig::make(4).p == 8);
    CHECK(WishartConfig::make(4, 5).p == 5);
    CHECK_THROWS_AS(WishartConfig::make(4, 3), DomainError);
    CHECK_THROWS_AS(WishartConfig::make(0), DomainError);
}

TEST_CASE("Bartlett draws have Wishart moments") {
    for (auto [v, p] : {std::pair{1, 2}, std::pair{3, 6}, std::pair{4, 5}}) {
        const auto cfg = WishartConfig::make(v, p);
        const std::size_t n = 100000;
        const auto dim = static_cast<std::size_t>(v);
        // raw moments 1..4 of each entry
        std::vector<std::array<double, 4>> mom(dim * dim, {0.0, 0.0, 0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            RngStream rng(2024, i);
            const auto s = bartlett_sample(cfg, rng);
            for (std::size_t a = 0; a < dim; ++a)
                for (std::size_t b = 0; b < dim; ++b) {
                    double x = 1.0;
                    for (auto& m : mom[a * dim + b]) m += (x *= s(a, b));
                }
        }
        for (std::size_t a = 0; a < dim; ++a) {
            for (std::size_t b = 0; b < dim; ++b) {
                const auto& m = mom[a * dim + b];
                const double m1 = m[0] / n, m2 = m[1] / n, m3 = m[2] / n, m4 = m[3] / n;
                const double var = m2 - m1 * m1;
                const double central4 =
                    m4 - 4.0 * m1 * m3 + 6.0 * m1 * m1 * m2 - 3.0 * m1 * m1 * m1 * m1;
                const double target_var = (1.0 + (a == b)) / p;
                CAPTURE(v);
                CHECK(std::abs(m1 - (a == b)) <= 3.0 * std::sqrt(var / n));
                CHECK(std::abs(var - target_var) <= 3.0 * std::sqrt((central4 - var * var) / n));
            }
        }
    }
}

TEST_CASE("spectra are ascending, positive and reproducible") {
    const auto cfg = WishartConfig::make(5);
    double trace_sum = 0.0;
    const std::size_t n = 10000;
    for (std::size_t i = 0; i < n; ++i) {
        RngStream rng(8, i);
        const auto s = sample_spectrum(cfg, rng);
        CHECK(s[0] > 0.0);
        for (double x : s.values()) trace_sum += x;
    }
    // var(trace) = 2v/p = 1
    CHECK(std::abs(trace_sum / n - 5.0) <= 3.0 * std::sqrt(1.0 / n));

    RngStream a(77, 3), b(77, 3), c(77, 4);
    const auto sa = bartlett_sample(cfg, a);
    const auto sb = bartlett_sample(cfg, b);
    const auto sc = bartlett_sample(cfg, c);
    CHECK(sa.dense() == sb.dense());
    CHECK_FALSE(sa.dense() == sc.dense());
}

TEST_CASE("Grenander estimator") {
    std::vector<double> x;
    for (int i = 0; i < 500; ++i) x.push_back(std::pow(i / 499.0, 3.0));
    const double m = grenander_mode(x, 5, 2.0);
    std::vector<double> shifted, scaled, reversed(x.rbegin(), x.rend());
    for (double xi : x) {
        shifted.push_back(xi + 3.0);
        scaled.push_back(2.5 * xi);
    }
    CHECK(grenander_mode(shifted, 5, 2.0) == doctest::Approx(m + 3.0).epsilon(1e-12));
    CHECK(grenander_mode(scaled, 5, 2.0) == doctest::Approx(2.5 * m).epsilon(1e-12));
    CHECK(grenander_mode(reversed, 5, 2.0) == doctest::Approx(m).epsilon(1e-12));

    CHECK_THROWS_AS(grenander_mode(std::vector<double>(10, 1.0), 2, 2.0), DegenerateSampleError);
    CHECK_THROWS_AS(grenander_mode(std::vector<double>{1.0, 3.0, 2.0}, 1, 2.0), DomainError);
    CHECK_THROWS_AS(grenander_mode(x, 0, 2.0), DomainError);
    CHECK(default_grenander_lag(50) == 1);
    CHECK(default_grenander_lag(100000) == 1000);
}

TEST_CASE("mode table and rho grid") {
    const auto cfg = WishartConfig::make(4);
    const auto t1 = mode_table(cfg, 20000, std::nullopt, kDefaultGrenanderExponent, 5, 1);
    const auto t4 = mode_table(cfg, 20000, std::nullopt, kDefaultGrenanderExponent, 5, 4);
    CHECK(t1.modes == t4.modes);
    CHECK(std::is_sorted(t1.modes.begin(), t1.modes.end()));
    CHECK(t1.r == 200);

    std::ostringstream os;
    write_mode_table_csv(os, t1);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "v,p,k,mode,r,s,N,seed");
    int rows = 0;
    while (std::getline(is, line)) ++rows;
    CHECK(rows == 4);

    const auto grid = rho_grid(*reference_modes(3));
    const std::vector<double> expected{0.0784, 0.1568, 0.6724, 1.6671, 3.3342};
    REQUIRE(grid.size() == expected.size());
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK(grid[i] == doctest::Approx(expected[i]));
    for (int v = 3; v <= 10; ++v) {
        const auto ref = reference_modes(v);
        REQUIRE(ref);
        CHECK(ref->size() == static_cast<std::size_t>(v));
        CHECK(std::is_sorted(ref->begin(), ref->end()));
        CHECK(rho_grid(*ref).size() == static_cast<std::size_t>(v + 2));
    }
    CHECK_FALSE(reference_modes(2));
}
