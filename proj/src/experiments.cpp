#include "sphtrunc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <string>

#include "sphtrunc/ensembles.hpp"
#include "sphtrunc/errors.hpp"
#include "sphtrunc/io.hpp"
#include "sphtrunc/truncation.hpp"

namespace sphtrunc {

namespace {

struct Line {
    double intercept = 0.0;
    double slope = 0.0;
};

Line least_squares(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("least squares: abscissae are all equal");
    const double slope = sxy / sxx;
    return {my - slope * mx, slope};
}

RunStatus from_solve(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged:
            return RunStatus::converged;
        case SolveStatus::diverged:
            return RunStatus::diverged;
        case SolveStatus::max_iter:
            return RunStatus::max_iter;
    }
    return RunStatus::error;
}

// Mean n_it of converged runs, optionally skipping one stream.
std::pair<double, std::size_t> converged_mean(const ExperimentRecord& rec,
                                              std::optional<std::uint64_t> skip) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& run : rec.runs) {
        if (run.status != RunStatus::converged) continue;
        if (skip && run.stream_index == *skip) continue;
        sum += static_cast<double>(run.n_it);
        ++count;
    }
    if (count == 0) return {std::numeric_limits<double>::quiet_NaN(), 0};
    return {sum / static_cast<double>(count), count};
}

ValueError jackknife(double full, std::span<const double> replicates) {
    const auto n = static_cast<double>(replicates.size());
    double mean = 0.0;
    for (double r : replicates) mean += r;
    mean /= n;
    double ss = 0.0;
    for (double r : replicates) ss += (r - mean) * (r - mean);
    return {full, std::sqrt((n - 1.0) / n * ss)};
}

}  // namespace

void ExperimentConfig::validate() const {
    WishartConfig::make(v, p);
    if (n < 2) throw DomainError("study: need at least 2 spectra per rho");
    if (rho_values.empty()) throw DomainError("study: no rho values");
    for (double r : rho_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("study: rho must be positive");
    }
    if (!(eps_t > 0.0) || !(epsilon > 0.0)) throw DomainError("study: tolerances must be positive");
    if (max_iter < 1) throw DomainError("study: max_iter must be >= 1");
    if (scheme == Scheme::boosted) {
        if (beta_grid.empty()) throw DomainError("study: empty beta grid");
        for (double b : beta_grid) {
            if (!(b >= 0.0)) throw DomainError("study: beta must be non-negative");
        }
    }
}

std::vector<double> ExperimentConfig::effective_betas() const {
    if (scheme == Scheme::boosted) return beta_grid;
    return {0.0};
}

std::vector<double> default_beta_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(i / 5.0);
    return grid;
}

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::converged:
            return "converged";
        case RunStatus::diverged:
            return "diverged";
        case RunStatus::max_iter:
            return "max_iter";
        case RunStatus::error:
            return "error";
    }
    return "error";
}

RunStatus parse_run_status(std::string_view text) {
    for (auto s : {RunStatus::converged, RunStatus::diverged, RunStatus::max_iter,
                   RunStatus::error}) {
        if (to_string(s) == text) return s;
    }
    throw std::runtime_error("unknown run status '" + std::string(text) + "'");
}

std::size_t ExperimentRecord::failures() const { return runs.size() - converged(); }

std::size_t ExperimentRecord::converged() const {
    return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) {
        return r.status == RunStatus::converged;
    }));
}

double ExperimentRecord::mean_n_it() const { return converged_mean(*this, std::nullopt).first; }

void write_study_csv_row(std::ostream& os, const ExperimentConfig& cfg, const RunResult& run) {
    os << cfg.v << ',' << cfg.dof() << ',' << format_double(run.rho) << ','
       << format_double(run.beta) << ',' << to_string(cfg.scheme) << ',' << run.stream_index
       << ',' << to_string(run.status) << ',' << run.n_it << ',' << format_double(run.n_cond)
       << ',' << cfg.seed << '\n';
}

std::vector<ExperimentRecord> run_convergence_study(const ExperimentConfig& cfg,
                                                   std::ostream* csv) {
    cfg.validate();
    const auto wishart = WishartConfig::make(cfg.v, cfg.p);
    const auto betas = cfg.effective_betas();

    std::vector<Spectrum> spectra;
    spectra.reserve(cfg.n);
    for (std::size_t i = 0; i < cfg.n; ++i) {
        RngStream rng(cfg.seed, i);
        spectra.push_back(sample_spectrum(wishart, rng));
    }

    if (csv) *csv << kStudyCsvHeader << '\n';
    std::vector<ExperimentRecord> records;
    for (double rho : cfg.rho_values) {
        // block[b][i]
        std::vector<std::vector<RunResult>> block(betas.size(), std::vector<RunResult>(cfg.n));
        parallel_for(cfg.n, cfg.threads, [&](std::size_t i) {
            const auto& lambda = spectra[i];
            for (std::size_t b = 0; b < betas.size(); ++b) {
                auto& run = block[b][i];
                run.rho = rho;
                run.beta = betas[b];
                run.stream_index = i;
                run.n_cond = lambda.condition_number();
            }
            std::optional<TruncatedSpectrum> mu;
            try {
                mu = truncate_spectrum(lambda, rho, cfg.epsilon);
            } catch (const std::exception&) {
                return;
            }
            for (std::size_t b = 0; b < betas.size(); ++b) {
                auto& run = block[b][i];
                SolverConfig solver;
                solver.scheme = cfg.scheme;
                solver.beta = betas[b];
                solver.eps_t = cfg.eps_t;
                solver.epsilon = cfg.epsilon;
                solver.warmup = cfg.warmup;
                solver.max_iter = cfg.max_iter;
                try {
                    const auto trace = solve(*mu, solver);
                    run.status = from_solve(trace.status);
                    run.n_it = trace.n_it;
                } catch (const std::exception&) {
                    run.status = RunStatus::error;
                }
            }
        });
        for (std::size_t b = 0; b < betas.size(); ++b) {
            if (csv) {
                for (const auto& run : block[b]) write_study_csv_row(*csv, cfg, run);
            }
            records.push_back({rho, betas[b], std::move(block[b])});
        }
        if (csv) csv->flush();
    }
    return records;
}

StudyCsv read_study_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("study csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kStudyCsvHeader) throw std::runtime_error("study csv: unexpected header");
    StudyCsv out;
    bool first = true;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv_line(line);
        if (f.size() != 10) {
            throw std::runtime_error("study csv: line " + std::to_string(line_no) +
                                     " has " + std::to_string(f.size()) + " fields");
        }
        try {
            const int v = std::stoi(f[0]);
            const int p = std::stoi(f[1]);
            const std::uint64_t seed = std::stoull(f[9]);
            if (first) {
                out.v = v;
                out.p = p;
                out.scheme = f[4];
                out.seed = seed;
                first = false;
            } else if (v != out.v || p != out.p || f[4] != out.scheme || seed != out.seed) {
                throw std::runtime_error("rows mix different v, p, scheme or seed");
            }
            RunResult run;
            run.rho = parse_double(f[2]);
            run.beta = parse_double(f[3]);
            run.stream_index = std::stoull(f[5]);
            run.status = parse_run_status(f[6]);
            run.n_it = std::stoull(f[7]);
            run.n_cond = parse_double(f[8]);
            out.runs.push_back(run);
        } catch (const std::exception& e) {
            throw std::runtime_error("study csv: line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
    }
    return out;
}

std::vector<ExperimentRecord> group_runs(std::span<const RunResult> runs) {
    std::map<std::pair<double, double>, ExperimentRecord> groups;
    for (const auto& run : runs) {
        auto& rec = groups[{run.rho, run.beta}];
        rec.rho = run.rho;
        rec.beta = run.beta;
        rec.runs.push_back(run);
    }
    std::vector<ExperimentRecord> out;
    for (auto& [key, rec] : groups) out.push_back(std::move(rec));
    return out;
}

ScalingFit fit_scaling(std::span<const ExperimentRecord> records, double rho_max) {
    ScalingFit fit;
    fit.rho_max = rho_max;
    std::vector<const ExperimentRecord*> used;
    std::set<std::uint64_t> streams;
    for (const auto& rec : records) {
        if (!used.empty() && rec.beta != used.front()->beta) {
            throw FitError("fit_scaling: records mix different beta values");
        }
        if (rec.rho > rho_max) continue;
        if (rec.converged() < 2) continue;
        used.push_back(&rec);
        for (const auto& run : rec.runs) streams.insert(run.stream_index);
    }
    if (used.size() < 2) {
        throw FitError("fit_scaling: need at least two rho <= " + format_double(rho_max) +
                       " with two converged runs each");
    }
    fit.beta = used.front()->beta;

    auto fit_line = [&](std::optional<std::uint64_t> skip) {
        std::vector<double> x, y;
        for (const auto* rec : used) {
            const auto [mean, count] = converged_mean(*rec, skip);
            if (count == 0) throw FitError("fit_scaling: jackknife replicate lost a point");
            x.push_back(std::log(rec->rho));
            y.push_back(std::log(mean));
        }
        return least_squares(x, y);
    };

    const auto full = fit_line(std::nullopt);
    std::vector<double> a_rep, b_rep;
    for (auto s : streams) {
        const auto line = fit_line(s);
        a_rep.push_back(line.intercept);
        b_rep.push_back(-line.slope);
    }
    fit.a = jackknife(full.intercept, a_rep);
    fit.b = jackknife(-full.slope, b_rep);
    for (const auto* rec : used) {
        const double mean = rec->mean_n_it();
        fit.points.push_back({rec->rho, mean, rec->converged(), rec->failures(),
                              std::log(mean) - (full.intercept + full.slope * std::log(rec->rho))});
    }
    return fit;
}

KappaFit fit_kappa(std::span<const int> v, std::span<const ScalingFit> fits) {
    if (v.size() != fits.size()) throw FitError("fit_kappa: size mismatch");
    if (v.size() < 3) throw FitError("fit_kappa: need at least three dimensions");
    KappaFit out;
    out.beta = fits.front().beta;
    std::vector<double> x;
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.v.push_back(v[i]);
        out.a.push_back(fits[i].a.value);
        x.push_back(v[i]);
    }
    const auto line = least_squares(x, out.a);
    out.a0 = line.intercept;
    out.kappa = line.slope;
    out.c = std::exp(out.a0);
    return out;
}

}  // namespace sphtrunc
