#pragma once

#include <cstddef>
#include <vector>

namespace sphtrunc {

/// Degrees of freedom of a chi-square law.
class Dof {
public:
    explicit Dof(int n);
    [[nodiscard]] int value() const noexcept { return n_; }
    [[nodiscard]] double half() const noexcept { return 0.5 * n_; }

private:
    int n_;
};

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
///
/// Series for x < a + 1, Lentz continued fraction for the complement otherwise.
double gamma_p(double a, double x);

/// ln P(a, x), finite wherever P(a, x) underflows.
double log_gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// x^a e^{-x} / Γ(a+1), evaluated without forming the two large factors separately.
double gamma_prefix(double a, double x);

/// F_n(x) = P(n/2, x/2).
double chi_square_cdf(Dof dof, double x);

/// F_{n0}(x), F_{n0+2}(x), ..., F_{n0+2(count-1)}(x).
///
/// The top entry is evaluated directly and the rest follow from the downward
/// recurrence F_n = F_{n+2} + (x/2)^{n/2} e^{-x/2} / Γ(n/2 + 1), which only adds
/// positive terms.
std::vector<double> chi_square_cdf_ladder(Dof first, double x, std::size_t count);

/// Kummer's confluent hypergeometric function M(a, b, z) for a >= 0, b > 0, z >= 0.
double kummer_m(double a, double b, double z);

/// r(v, z) = (2v+1) M(v, v+1/2, z) / M(v, v+3/2, z).
double bound_ratio_r(int v, double z);

}  // namespace sphtrunc
