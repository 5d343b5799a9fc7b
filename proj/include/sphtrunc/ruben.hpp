#pragma once

// Chi-square series for Gaussian integrals over the centered ball x'x < rho:
//
//   alpha      = sum_m c_m      F_{v+2m}(rho/s)
//   alpha_k    = sum_m c_{k;m}  F_{v+2(m+1)}(rho/s)
//   alpha_jk   = sum_m c_{jk;m} F_{v+2(m+2)}(rho/s)
//
// alpha is the probability content of the ball under N(0, diag(lambda)); alpha_k and
// alpha_jk insert one or two factors x_q^2 / lambda_q under the integral sign.
// Every series is cut at the first length k_th whose rigorous tail bound falls
// below the requested absolute tolerance.

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "sphtrunc/linalg.hpp"

namespace sphtrunc {

inline constexpr double kDefaultEpsilon = 1e-14;
inline constexpr std::size_t kMaxSeriesTerms = 100000;

/// Positive eigenvalues in ascending order.
class Spectrum {
public:
    /// Throws DomainError unless every entry is finite, positive, and the order ascending.
    explicit Spectrum(std::vector<double> lambda);
    /// Sorts a copy before validating.
    static Spectrum sorted(std::vector<double> lambda);

    [[nodiscard]] std::span<const double> values() const noexcept { return lambda_; }
    [[nodiscard]] const std::vector<double>& vec() const noexcept { return lambda_; }
    [[nodiscard]] std::size_t dim() const noexcept { return lambda_.size(); }
    double operator[](std::size_t i) const { return lambda_[i]; }
    /// lambda_v / lambda_1
    [[nodiscard]] double condition_number() const;

private:
    std::vector<double> lambda_;
};

enum class IntegralKind { alpha, alpha_k, alpha_jk };

/// Which integral a series represents. Indices are 0-based; for alpha_jk, j <= k.
struct SeriesId {
    IntegralKind kind = IntegralKind::alpha;
    std::size_t j = 0;
    std::size_t k = 0;

    static SeriesId alpha() { return {}; }
    static SeriesId single(std::size_t k) { return {IntegralKind::alpha_k, k, k}; }
    static SeriesId pair(std::size_t j, std::size_t k);

    /// Number of extra chi-square degrees-of-freedom pairs: 0, 1 or 2.
    [[nodiscard]] int shift() const noexcept;

    friend auto operator<=>(const SeriesId&, const SeriesId&) = default;
};

/// s = 2 lambda_min lambda_max / (lambda_min + lambda_max).
double choose_scale(std::span<const double> lambda);

/// max_i |1 - s / lambda_i|
double eta_of(std::span<const double> lambda, double s);

/// c_0 .. c_{n-1} of the alpha expansion.
std::vector<double> coeffs_alpha(std::span<const double> lambda, double s, std::size_t n);
/// c_{k;0} .. c_{k;n-1}; k is 0-based.
std::vector<double> coeffs_alpha_k(std::span<const double> lambda, double s, std::size_t k,
                                   std::size_t n);
/// c_{jk;0} .. c_{jk;n-1}; j, k are 0-based and may be equal.
std::vector<double> coeffs_alpha_jk(std::span<const double> lambda, double s, std::size_t j,
                                    std::size_t k, std::size_t n);

/// Coefficients of any series kind.
std::vector<double> coeffs(std::span<const double> lambda, double s, SeriesId id,
                           std::size_t n);

struct RubenSeries {
    SeriesId id;
    std::size_t dim = 0;
    double s = 0.0;
    double eta = 0.0;
    std::vector<double> c;
    std::size_t k_th = 0;
    double epsilon = kDefaultEpsilon;
};

/// Upper bound on |sum_{m >= n} c_{X;m} F(rho/s)| for the series' kind.
/// Throws DomainError when eta >= 1.
double residual_bound(const RubenSeries& series, double rho, std::size_t n);

/// Smallest n >= 1 whose residual bound is below epsilon. Throws ConvergenceError past
/// kMaxSeriesTerms.
std::size_t k_threshold(std::span<const double> lambda, double rho, SeriesId id,
                        double epsilon = kDefaultEpsilon);

/// Series truncated at k_th, with extra_terms further coefficients kept for inspection.
RubenSeries make_series(std::span<const double> lambda, double rho, SeriesId id,
                        double epsilon = kDefaultEpsilon, std::size_t extra_terms = 0);

/// sum_{m < n_terms} c_m F_{v + 2(m + shift)}(rho / s); n_terms <= series.c.size().
double partial_sum(const RubenSeries& series, double rho, std::size_t n_terms);

enum class Want { alpha, alpha_and_k, all };

struct BallIntegrals {
    double alpha = 0.0;
    std::vector<double> alpha_k;
    SymMatrix alpha_jk;
    double rho = 0.0;
    double epsilon = kDefaultEpsilon;
    std::size_t k_th_alpha = 0;
    std::size_t k_th_max = 0;
};

/// Evaluates ball integrals for one spectrum at many radii, reusing coefficient arrays.
///
/// Coefficient arrays are cached per series and grown geometrically. Cached arrays
/// are immutable once published; growth swaps in a longer copy, so concurrent calls
/// always see a consistent array.
class RubenEvaluator {
public:
    /// lambda need not be sorted but must be positive.
    explicit RubenEvaluator(std::vector<double> lambda, double epsilon = kDefaultEpsilon);

    [[nodiscard]] BallIntegrals integrals(double rho, Want want) const;

    [[nodiscard]] double scale() const noexcept { return s_; }
    [[nodiscard]] double eta() const noexcept { return eta_; }
    [[nodiscard]] std::span<const double> lambda() const noexcept { return lambda_; }

    /// Cached coefficient length for a series (0 if not yet computed).
    [[nodiscard]] std::size_t cached_length(SeriesId id) const;

private:
    using Coeffs = std::shared_ptr<const std::vector<double>>;
    std::vector<Coeffs> coefficients(std::span<const SeriesId> ids,
                                     std::span<const std::size_t> min_lengths) const;

    std::vector<double> lambda_;
    double epsilon_;
    double s_;
    double eta_;
    mutable std::mutex mutex_;
    mutable std::map<SeriesId, Coeffs> cache_;
};

/// One-shot evaluation of alpha (and optionally alpha_k, alpha_jk) with certified
/// absolute error epsilon per entry.
BallIntegrals eval_integrals(std::span<const double> lambda, double rho,
                             double epsilon = kDefaultEpsilon, Want want = Want::alpha_and_k);

/// As eval_integrals, with the tolerance tightened until it is at most epsilon * alpha.
/// Ratios such as alpha_k / alpha then carry relative error of order epsilon; the
/// returned epsilon field holds the tolerance actually used.
BallIntegrals eval_integrals_relative(std::span<const double> lambda, double rho,
                                      double epsilon = kDefaultEpsilon,
                                      Want want = Want::alpha_and_k);

}  // namespace sphtrunc
