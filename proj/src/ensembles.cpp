#include "sphtrunc/ensembles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "sphtrunc/errors.hpp"
#include "sphtrunc/io.hpp"

namespace sphtrunc {

WishartConfig WishartConfig::make(int v, std::optional<int> p) {
    WishartConfig cfg{v, p.value_or(2 * v)};
    if (cfg.v < 1) throw DomainError("Wishart dimension must be >= 1");
    if (cfg.p < cfg.v) {
        throw DomainError("Wishart degrees of freedom p = " + std::to_string(cfg.p) +
                          " must be >= v = " + std::to_string(cfg.v));
    }
    return cfg;
}

SymMatrix bartlett_sample(const WishartConfig& cfg, RngStream& rng) {
    const auto v = static_cast<std::size_t>(cfg.v);
    Matrix a(v, v);
    for (std::size_t i = 0; i < v; ++i) {
        a(i, i) = std::sqrt(rng.chi_square(static_cast<double>(cfg.p) - static_cast<double>(i)));
        for (std::size_t j = 0; j < i; ++j) a(i, j) = rng.normal();
    }
    SymMatrix sigma(v);
    const double inv_p = 1.0 / cfg.p;
    for (std::size_t i = 0; i < v; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k <= j; ++k) acc += a(i, k) * a(j, k);
            sigma.set(i, j, acc * inv_p);
        }
    }
    return sigma;
}

Spectrum sample_spectrum(const WishartConfig& cfg, RngStream& rng) {
    return Spectrum(eigh(bartlett_sample(cfg, rng)).values);
}

std::size_t default_grenander_lag(std::size_t n) { return std::max<std::size_t>(1, n / 100); }

double grenander_mode(std::span<const double> x, std::size_t r, double s) {
    if (r < 1) throw DomainError("grenander_mode: lag r must be >= 1");
    if (!(s > 0.0)) throw DomainError("grenander_mode: exponent s must be positive");
    if (x.size() <= r) throw DegenerateSampleError("grenander_mode: sample shorter than lag");
    const bool ascending = std::is_sorted(x.begin(), x.end());
    const bool descending = std::is_sorted(x.begin(), x.end(), std::greater<>());
    if (!ascending && !descending) throw DomainError("grenander_mode: sample must be sorted");

    // Weights |gap|^{-s} are formed relative to the smallest gap to stay finite.
    double min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + r < x.size(); ++i) {
        const double gap = std::abs(x[i] - x[i + r]);
        if (gap > 0.0) min_gap = std::min(min_gap, gap);
    }
    if (!std::isfinite(min_gap)) {
        throw DegenerateSampleError("grenander_mode: all lag-r gaps are zero");
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i + r < x.size(); ++i) {
        const double gap = std::abs(x[i] - x[i + r]);
        if (gap == 0.0) continue;
        const double w = std::pow(min_gap / gap, s);
        num += (x[i] + x[i + r]) * w;
        den += w;
    }
    return 0.5 * num / den;
}

ModeTable mode_table(const WishartConfig& cfg, std::size_t n, std::optional<std::size_t> r,
                     double s, std::uint64_t seed, unsigned threads) {
    const auto v = static_cast<std::size_t>(cfg.v);
    // samples[k][i] = k-th ordered eigenvalue of draw i
    std::vector<std::vector<double>> samples(v, std::vector<double>(n));
    parallel_for(n, threads, [&](std::size_t i) {
        RngStream rng(seed, i);
        const auto spec = sample_spectrum(cfg, rng);
        for (std::size_t k = 0; k < v; ++k) samples[k][i] = spec[k];
    });

    ModeTable table;
    table.v = cfg.v;
    table.p = cfg.p;
    table.n = n;
    table.r = r.value_or(default_grenander_lag(n));
    table.s = s;
    table.seed = seed;
    for (auto& column : samples) {
        std::sort(column.begin(), column.end());
        table.modes.push_back(grenander_mode(column, table.r, s));
    }
    return table;
}

void write_mode_table_csv(std::ostream& os, const ModeTable& table, bool header) {
    if (header) os << "v,p,k,mode,r,s,N,seed\n";
    for (std::size_t k = 0; k < table.modes.size(); ++k) {
        os << table.v << ',' << table.p << ',' << (k + 1) << ',' << format_double(table.modes[k])
           << ',' << table.r << ',' << format_double(table.s) << ',' << table.n << ','
           << table.seed << '\n';
    }
}

std::optional<std::vector<double>> reference_modes(int v) {
    switch (v) {
        case 3:
            return std::vector<double>{0.1568, 0.6724, 1.6671};
        case 4:
            return std::vector<double>{0.1487, 0.4921, 1.0112, 1.8507};
        case 5:
            return std::vector<double>{0.1435, 0.4017, 0.7528, 1.2401, 2.0150};
        case 6:
            return std::vector<double>{0.1383, 0.3424, 0.6071, 0.9621, 1.4434, 2.1356};
        case 7:
            return std::vector<double>{0.1344, 0.3039, 0.5138, 0.7854, 1.1269, 1.5789, 2.2190};
        case 8:
            return std::vector<double>{0.1310, 0.2745, 0.4543, 0.6684,
                                       0.9263, 1.2559, 1.6764, 2.2763};
        case 9:
            return std::vector<double>{0.1269, 0.2554, 0.4048, 0.5858, 0.7956,
                                       1.0527, 1.3673, 1.7687, 2.3210};
        case 10:
            return std::vector<double>{0.1258, 0.2399, 0.3693, 0.5288, 0.7032,
                                       0.9111, 1.1603, 1.4624, 1.8473, 2.3775};
        default:
            return std::nullopt;
    }
}

std::vector<double> rho_grid(std::span<const double> modes) {
    if (modes.empty()) throw DomainError("rho_grid: no modes");
    std::vector<double> sorted(modes.begin(), modes.end());
    std::sort(sorted.begin(), sorted.end());
    std::vector<double> grid;
    grid.reserve(sorted.size() + 2);
    grid.push_back(0.5 * sorted.front());
    grid.insert(grid.end(), sorted.begin(), sorted.end());
    grid.push_back(2.0 * sorted.back());
    return grid;
}

std::vector<double> rho_grid(const ModeTable& table) { return rho_grid(table.modes); }

}  // namespace sphtrunc
