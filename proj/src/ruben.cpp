#include "sphtrunc/ruben.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sphtrunc/errors.hpp"
#include "sphtrunc/specfun.hpp"

namespace sphtrunc {

namespace {

void check_lambda(std::span<const double> lambda) {
    if (lambda.empty()) throw DomainError("spectrum must not be empty");
    for (double x : lambda) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            throw DomainError("spectrum entries must be finite and positive");
        }
    }
}

void check_index(std::size_t idx, std::size_t dim) {
    if (idx >= dim) {
        throw std::out_of_range("series index " + std::to_string(idx) +
                                " out of range for dimension " + std::to_string(dim));
    }
}

void check_id(SeriesId id, std::size_t dim) {
    if (id.kind == IntegralKind::alpha) return;
    check_index(id.j, dim);
    check_index(id.k, dim);
}

// a_i = 1 - s / lambda_i and their powers a_i^m for m < length, plus g_m = sum_i a_i^m.
struct PowerTable {
    std::vector<std::vector<double>> pow;
    std::vector<double> g;

    PowerTable(std::span<const double> lambda, double s, std::size_t length)
        : pow(lambda.size(), std::vector<double>(length)), g(length, 0.0) {
        for (std::size_t i = 0; i < lambda.size(); ++i) {
            const double a = 1.0 - s / lambda[i];
            double p = 1.0;
            for (std::size_t m = 0; m < length; ++m) {
                pow[i][m] = p;
                g[m] += p;
                p *= a;
            }
        }
    }

    [[nodiscard]] std::size_t length() const { return g.size(); }

    // g_{X;m} = sum_i e_{X;i} a_i^m
    [[nodiscard]] double g_of(SeriesId id, std::size_t m) const {
        switch (id.kind) {
            case IntegralKind::alpha:
                return g[m];
            case IntegralKind::alpha_k:
                return g[m] + 2.0 * pow[id.k][m];
            case IntegralKind::alpha_jk:
                if (id.j == id.k) return g[m] + 4.0 * pow[id.k][m];
                return g[m] + 2.0 * pow[id.j][m] + 2.0 * pow[id.k][m];
        }
        return 0.0;
    }
};

double base_c0(std::span<const double> lambda, double s) {
    double log_c0 = 0.0;
    for (double x : lambda) log_c0 += 0.5 * std::log(s / x);
    return std::exp(log_c0);
}

// c_{X;0} / c_0
double leading_factor(std::span<const double> lambda, double s, SeriesId id) {
    switch (id.kind) {
        case IntegralKind::alpha:
            return 1.0;
        case IntegralKind::alpha_k:
            return s / lambda[id.k];
        case IntegralKind::alpha_jk: {
            const double f = (s / lambda[id.j]) * (s / lambda[id.k]);
            return id.j == id.k ? 3.0 * f : f;
        }
    }
    return 1.0;
}

// Extends c to new_length terms with c_n = (1/2n) sum_{r<n} g_{n-r} c_r.
void extend_coefficients(std::vector<double>& c, SeriesId id, const PowerTable& table,
                         double c0, std::size_t new_length) {
    if (new_length == 0) return;
    if (c.empty()) c.push_back(c0);
    c.reserve(new_length);
    for (std::size_t n = c.size(); n < new_length; ++n) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += table.g_of(id, n - r) * c[r];
        c.push_back(acc / (2.0 * static_cast<double>(n)));
    }
}

// Residual bound without the c_{X;0} prefactor:
//   Γ(v/2+n+d) / (Γ_den n!) η^n (1-η)^{-(v/2+n+d)} F_{v+2(n+d)}((1-η) rho / s)
// with Γ_den = min(Γ(v/2), Γ(v/2+d)).
class UnitBound {
public:
    UnitBound(std::size_t dim, double s, double eta, double rho, int shift)
        : half_v_(0.5 * static_cast<double>(dim)),
          eta_(eta),
          shift_(shift),
          y_half_(0.5 * (1.0 - eta) * rho / s) {
        if (!(eta < 1.0)) {
            throw DomainError("residual bound requires eta < 1, got " + std::to_string(eta));
        }
        log_gamma_den_ = std::min(std::lgamma(half_v_), std::lgamma(half_v_ + shift));
    }

    [[nodiscard]] double operator()(std::size_t n) const {
        if (eta_ == 0.0) return 0.0;
        const double a = half_v_ + static_cast<double>(n) + shift_;
        if (y_half_ == 0.0) return 0.0;
        const double log_u = std::lgamma(a) - log_gamma_den_ -
                             std::lgamma(static_cast<double>(n) + 1.0) +
                             static_cast<double>(n) * std::log(eta_) - a * std::log1p(-eta_) +
                             log_gamma_p(a, y_half_);
        return std::exp(log_u);
    }

private:
    double half_v_;
    double eta_;
    int shift_;
    double y_half_;
    double log_gamma_den_ = 0.0;
};

std::size_t first_below(const UnitBound& unit, double c_lead, double epsilon) {
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    for (std::size_t n = 1; n <= kMaxSeriesTerms; ++n) {
        if (c_lead * unit(n) < epsilon) return n;
    }
    throw ConvergenceError("Ruben series: residual bound did not reach epsilon within " +
                           std::to_string(kMaxSeriesTerms) + " terms");
}

void check_rho(double rho) {
    if (!(rho > 0.0) || !std::isfinite(rho)) {
        throw DomainError("ball radius-squared rho must be finite and positive");
    }
}

}  // namespace

Spectrum::Spectrum(std::vector<double> lambda) : lambda_(std::move(lambda)) {
    check_lambda(lambda_);
    if (!std::is_sorted(lambda_.begin(), lambda_.end())) {
        throw DomainError("spectrum must be in ascending order");
    }
}

Spectrum Spectrum::sorted(std::vector<double> lambda) {
    std::sort(lambda.begin(), lambda.end());
    return Spectrum(std::move(lambda));
}

double Spectrum::condition_number() const { return lambda_.back() / lambda_.front(); }

SeriesId SeriesId::pair(std::size_t j, std::size_t k) {
    return {IntegralKind::alpha_jk, std::min(j, k), std::max(j, k)};
}

int SeriesId::shift() const noexcept {
    switch (kind) {
        case IntegralKind::alpha:
            return 0;
        case IntegralKind::alpha_k:
            return 1;
        case IntegralKind::alpha_jk:
            return 2;
    }
    return 0;
}

double choose_scale(std::span<const double> lambda) {
    check_lambda(lambda);
    const auto [lo, hi] = std::minmax_element(lambda.begin(), lambda.end());
    return 2.0 * (*lo) * (*hi) / (*lo + *hi);
}

double eta_of(std::span<const double> lambda, double s) {
    double eta = 0.0;
    for (double x : lambda) eta = std::max(eta, std::abs(1.0 - s / x));
    return eta;
}

std::vector<double> coeffs(std::span<const double> lambda, double s, SeriesId id,
                           std::size_t n) {
    check_lambda(lambda);
    check_id(id, lambda.size());
    if (!(s > 0.0)) throw DomainError("scale s must be positive");
    const PowerTable table(lambda, s, n);
    std::vector<double> c;
    extend_coefficients(c, id, table, base_c0(lambda, s) * leading_factor(lambda, s, id), n);
    return c;
}

std::vector<double> coeffs_alpha(std::span<const double> lambda, double s, std::size_t n) {
    return coeffs(lambda, s, SeriesId::alpha(), n);
}

std::vector<double> coeffs_alpha_k(std::span<const double> lambda, double s, std::size_t k,
                                   std::size_t n) {
    return coeffs(lambda, s, SeriesId::single(k), n);
}

std::vector<double> coeffs_alpha_jk(std::span<const double> lambda, double s, std::size_t j,
                                    std::size_t k, std::size_t n) {
    return coeffs(lambda, s, SeriesId::pair(j, k), n);
}

double residual_bound(const RubenSeries& series, double rho, std::size_t n) {
    check_rho(rho);
    if (series.c.empty()) throw DomainError("residual_bound: series has no coefficients");
    const UnitBound unit(series.dim, series.s, series.eta, rho, series.id.shift());
    return series.c.front() * unit(n);
}

std::size_t k_threshold(std::span<const double> lambda, double rho, SeriesId id,
                        double epsilon) {
    check_lambda(lambda);
    check_id(id, lambda.size());
    check_rho(rho);
    const double s = choose_scale(lambda);
    const double eta = eta_of(lambda, s);
    const UnitBound unit(lambda.size(), s, eta, rho, id.shift());
    const double lead = base_c0(lambda, s) * leading_factor(lambda, s, id);
    return first_below(unit, lead, epsilon);
}

RubenSeries make_series(std::span<const double> lambda, double rho, SeriesId id,
                        double epsilon, std::size_t extra_terms) {
    RubenSeries out;
    out.id = id;
    out.dim = lambda.size();
    out.s = choose_scale(lambda);
    out.eta = eta_of(lambda, out.s);
    out.epsilon = epsilon;
    out.k_th = k_threshold(lambda, rho, id, epsilon);
    out.c = coeffs(lambda, out.s, id, out.k_th + extra_terms);
    return out;
}

double partial_sum(const RubenSeries& series, double rho, std::size_t n_terms) {
    check_rho(rho);
    if (n_terms > series.c.size()) {
        throw std::out_of_range("partial_sum: more terms requested than coefficients held");
    }
    const int shift = series.id.shift();
    const auto f = chi_square_cdf_ladder(Dof(static_cast<int>(series.dim) + 2 * shift),
                                         rho / series.s, n_terms);
    double acc = 0.0;
    for (std::size_t m = 0; m < n_terms; ++m) acc += series.c[m] * f[m];
    return acc;
}

RubenEvaluator::RubenEvaluator(std::vector<double> lambda, double epsilon)
    : lambda_(std::move(lambda)), epsilon_(epsilon) {
    check_lambda(lambda_);
    if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
    s_ = choose_scale(lambda_);
    eta_ = eta_of(lambda_, s_);
}

std::size_t RubenEvaluator::cached_length(SeriesId id) const {
    std::lock_guard lock(mutex_);
    const auto it = cache_.find(id);
    return it == cache_.end() ? 0 : it->second->size();
}

std::vector<RubenEvaluator::Coeffs> RubenEvaluator::coefficients(
    std::span<const SeriesId> ids, std::span<const std::size_t> min_lengths) const {
    std::lock_guard lock(mutex_);
    std::vector<Coeffs> out(ids.size());
    std::vector<std::size_t> targets(ids.size(), 0);
    std::size_t table_length = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto it = cache_.find(ids[i]);
        const std::size_t old = it == cache_.end() ? 0 : it->second->size();
        if (old >= min_lengths[i]) {
            out[i] = it->second;
            continue;
        }
        targets[i] = std::max(min_lengths[i], 2 * old);
        table_length = std::max(table_length, targets[i]);
    }
    if (table_length == 0) return out;

    // One power table serves every series that has to grow.
    const PowerTable table(lambda_, s_, table_length);
    const double c0 = base_c0(lambda_, s_);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (out[i]) continue;
        auto& slot = cache_[ids[i]];
        auto grown = slot ? std::vector<double>(*slot) : std::vector<double>{};
        extend_coefficients(grown, ids[i], table, c0 * leading_factor(lambda_, s_, ids[i]),
                            targets[i]);
        slot = std::make_shared<const std::vector<double>>(std::move(grown));
        out[i] = slot;
    }
    return out;
}

BallIntegrals RubenEvaluator::integrals(double rho, Want want) const {
    check_rho(rho);
    const std::size_t v = lambda_.size();

    std::vector<SeriesId> ids{SeriesId::alpha()};
    if (want != Want::alpha) {
        for (std::size_t k = 0; k < v; ++k) ids.push_back(SeriesId::single(k));
    }
    if (want == Want::all) {
        for (std::size_t j = 0; j < v; ++j)
            for (std::size_t k = j; k < v; ++k) ids.push_back(SeriesId::pair(j, k));
    }

    const double c0 = base_c0(lambda_, s_);
    const UnitBound units[3] = {UnitBound(v, s_, eta_, rho, 0), UnitBound(v, s_, eta_, rho, 1),
                                UnitBound(v, s_, eta_, rho, 2)};

    // Every series of the same shift shares one unit-bound sequence; scan it once per
    // shift up to the longest threshold any of its series needs.
    std::vector<std::size_t> k_th(ids.size());
    for (int shift = 0; shift < 3; ++shift) {
        std::vector<std::size_t> members;
        for (std::size_t i = 0; i < ids.size(); ++i) {
            if (ids[i].shift() != shift) continue;
            members.push_back(i);
        }
        if (members.empty()) continue;
        std::size_t pending = members.size();
        std::vector<bool> done(members.size(), false);
        for (std::size_t n = 1; pending > 0; ++n) {
            if (n > kMaxSeriesTerms) {
                throw ConvergenceError("Ruben series: residual bound did not reach epsilon");
            }
            const double u = units[shift](n);
            for (std::size_t m = 0; m < members.size(); ++m) {
                if (done[m]) continue;
                const double lead = c0 * leading_factor(lambda_, s_, ids[members[m]]);
                if (lead * u < epsilon_) {
                    k_th[members[m]] = n;
                    done[m] = true;
                    --pending;
                }
            }
        }
    }

    const std::size_t k_max = *std::max_element(k_th.begin(), k_th.end());
    const auto ladder = chi_square_cdf_ladder(Dof(static_cast<int>(v)), rho / s_, k_max + 2);

    BallIntegrals out;
    out.rho = rho;
    out.epsilon = epsilon_;
    out.k_th_alpha = k_th[0];
    out.k_th_max = k_max;
    if (want != Want::alpha) out.alpha_k.assign(v, 0.0);
    if (want == Want::all) out.alpha_jk = SymMatrix(v);

    const auto coeff_arrays = coefficients(ids, k_th);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto& c = coeff_arrays[i];
        const int shift = ids[i].shift();
        double acc = 0.0;
        for (std::size_t m = 0; m < k_th[i]; ++m) acc += (*c)[m] * ladder[m + shift];
        switch (ids[i].kind) {
            case IntegralKind::alpha:
                out.alpha = acc;
                break;
            case IntegralKind::alpha_k:
                out.alpha_k[ids[i].k] = acc;
                break;
            case IntegralKind::alpha_jk:
                out.alpha_jk.set(ids[i].j, ids[i].k, acc);
                break;
        }
    }
    return out;
}

BallIntegrals eval_integrals(std::span<const double> lambda, double rho, double epsilon,
                             Want want) {
    const RubenEvaluator evaluator(std::vector<double>(lambda.begin(), lambda.end()), epsilon);
    return evaluator.integrals(rho, want);
}

BallIntegrals eval_integrals_relative(std::span<const double> lambda, double rho,
                                      double epsilon, Want want) {
    auto ints = eval_integrals(lambda, rho, epsilon, want);
    for (int pass = 0; pass < 20; ++pass) {
        const double floor = ints.alpha - ints.epsilon;
        const double target = floor > 0.0 ? epsilon * floor : ints.epsilon * 1e-6;
        if (ints.epsilon <= target) return ints;
        if (!(target > 0.0)) break;
        ints = eval_integrals(lambda, rho, target, want);
    }
    throw ConvergenceError("ball integrals: alpha too small to resolve relative to epsilon");
}

}  // namespace sphtrunc
