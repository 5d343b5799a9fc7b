#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "sphtrunc/linalg.hpp"
#include "sphtrunc/rng.hpp"
#include "sphtrunc/ruben.hpp"

namespace sphtrunc {

/// Wishart law W_v(p, I/p): E[Σ_ij] = δ_ij, var(Σ_ij) = (1 + δ_ij) / p.
struct WishartConfig {
    int v = 3;
    int p = 6;

    /// p defaults to 2v. Throws DomainError unless 1 <= v <= p.
    static WishartConfig make(int v, std::optional<int> p = std::nullopt);
};

/// Σ = A Aᵀ / p with A lower triangular, A_ii = sqrt(chi2(p - i + 1)) (1-based i) and
/// standard normal entries below the diagonal.
SymMatrix bartlett_sample(const WishartConfig& cfg, RngStream& rng);

/// Ascending eigenvalues of a Bartlett draw.
Spectrum sample_spectrum(const WishartConfig& cfg, RngStream& rng);

/// Grenander's mode estimator on a sorted sample (either direction):
///
///   (1/2) sum_i (x_i + x_{i+r}) |x_i - x_{i+r}|^{-s} / sum_i |x_i - x_{i+r}|^{-s}
///
/// Pairs with a zero lag-r gap are skipped; if every gap is zero the sample is
/// degenerate.
double grenander_mode(std::span<const double> sorted_sample, std::size_t r, double s);

/// Default Grenander lag for a sample of size n: max(1, n / 100).
std::size_t default_grenander_lag(std::size_t n);
inline constexpr double kDefaultGrenanderExponent = 5.0;

struct ModeTable {
    int v = 0;
    int p = 0;
    std::size_t n = 0;
    std::vector<double> modes;
    std::size_t r = 0;
    double s = 0.0;
    std::uint64_t seed = 0;
};

/// Modes of the ordered eigenvalues from n spectra; spectrum i is drawn from
/// RngStream(seed, i). Sampling is spread over `threads` workers without affecting
/// the result.
ModeTable mode_table(const WishartConfig& cfg, std::size_t n, std::optional<std::size_t> r,
                     double s, std::uint64_t seed, unsigned threads = 1);

/// CSV with header v,p,k,mode,r,s,N,seed and one row per eigenvalue index (1-based k).
void write_mode_table_csv(std::ostream& os, const ModeTable& table, bool header = true);

/// Tabulated reference modes of W_v(2v, I/(2v)) for v = 3..10.
std::optional<std::vector<double>> reference_modes(int v);

/// {Mo_1, ..., Mo_v} ∪ {Mo_1 / 2, 2 Mo_v}, ascending.
std::vector<double> rho_grid(std::span<const double> modes);
std::vector<double> rho_grid(const ModeTable& table);

}  // namespace sphtrunc
