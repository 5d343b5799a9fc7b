#pragma once

// Taylor coefficients of the closed-form generating functions of the series
// coefficients, extracted numerically by the trapezoid rule on a circle |z| = R.

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

#include "sphtrunc/ruben.hpp"

namespace taylor {

using cplx = std::complex<double>;

// prod_i (s/lambda_i)^{p_i/2} [1 - (1 - s/lambda_i) z]^{-p_i/2}, p_i = 1 except at the
// marked indices.
inline cplx generating_function(std::span<const double> lambda, double s, sphtrunc::SeriesId id,
                                cplx z) {
    cplx out = 1.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
        double power = 1.0;
        switch (id.kind) {
            case sphtrunc::IntegralKind::alpha:
                break;
            case sphtrunc::IntegralKind::alpha_k:
                if (i == id.k) power = 3.0;
                break;
            case sphtrunc::IntegralKind::alpha_jk:
                if (id.j == id.k && i == id.k) power = 5.0;
                if (id.j != id.k && (i == id.j || i == id.k)) power = 3.0;
                break;
        }
        const double q = s / lambda[i];
        out *= std::pow(q, 0.5 * power) * std::pow(1.0 - (1.0 - q) * z, -0.5 * power);
    }
    if (id.kind == sphtrunc::IntegralKind::alpha_jk && id.j == id.k) out *= 3.0;
    return out;
}

inline std::vector<double> coefficients(std::span<const double> lambda, double s,
                                        sphtrunc::SeriesId id, std::size_t count,
                                        std::size_t points = 256) {
    double eta = 0.0;
    for (double l : lambda) eta = std::max(eta, std::abs(1.0 - s / l));
    const double radius = eta > 0.0 ? std::min(1.0, 0.5 / eta) : 1.0;
    std::vector<cplx> values(points);
    for (std::size_t p = 0; p < points; ++p) {
        const double theta = 2.0 * std::numbers::pi * static_cast<double>(p) / points;
        values[p] = generating_function(lambda, s, id, std::polar(radius, theta));
    }
    std::vector<double> out(count);
    for (std::size_t m = 0; m < count; ++m) {
        cplx acc = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
            const double theta = 2.0 * std::numbers::pi * static_cast<double>(p * m) / points;
            acc += values[p] * std::polar(1.0, -theta);
        }
        out[m] = acc.real() / (static_cast<double>(points) * std::pow(radius, static_cast<double>(m)));
    }
    return out;
}

}  // namespace taylor
