#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sphtrunc/reconstruction.hpp"

namespace sphtrunc {

struct ExperimentConfig {
    int v = 3;
    /// Wishart degrees of freedom; 2v when unset.
    std::optional<int> p;
    /// Spectra per rho.
    std::size_t n = 100;
    std::vector<double> rho_values;
    Scheme scheme = Scheme::gjor;
    /// Only the boosted scheme uses beta; other schemes run once with beta = 0.
    std::vector<double> beta_grid{0.0};
    double eps_t = 1e-7;
    double epsilon = kDefaultEpsilon;
    std::size_t warmup = 40;
    std::size_t max_iter = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    /// Throws DomainError on an unusable configuration.
    void validate() const;
    [[nodiscard]] int dof() const { return p.value_or(2 * v); }
    /// beta_grid for the boosted scheme, {0} otherwise.
    [[nodiscard]] std::vector<double> effective_betas() const;
};

/// 0, 0.2, ..., 2.0
std::vector<double> default_beta_grid();

enum class RunStatus { converged, diverged, max_iter, error };

std::string_view to_string(RunStatus status);
RunStatus parse_run_status(std::string_view text);

/// One solver run: spectrum stream_index truncated at rho and reconstructed with beta.
struct RunResult {
    double rho = 0.0;
    double beta = 0.0;
    std::uint64_t stream_index = 0;
    RunStatus status = RunStatus::error;
    std::size_t n_it = 0;
    double n_cond = 0.0;
};

/// All runs sharing (rho, beta).
struct ExperimentRecord {
    double rho = 0.0;
    double beta = 0.0;
    std::vector<RunResult> runs;

    [[nodiscard]] std::size_t failures() const;
    [[nodiscard]] std::size_t converged() const;
    /// Mean n_it over converged runs; NaN when none converged.
    [[nodiscard]] double mean_n_it() const;
};

/// Header of the study CSV.
inline constexpr std::string_view kStudyCsvHeader =
    "v,p,rho,beta,scheme,stream_index,status,n_it,n_cond,seed";

/// Runs every (rho, beta, stream) combination. Spectrum i is drawn from RngStream(seed, i)
/// and reused across rho and beta. When csv is given, rows are written per rho block in
/// (rho, beta, stream_index) order as soon as the block is finished, so output does not
/// depend on the thread count. Failed runs are recorded, never thrown.
std::vector<ExperimentRecord> run_convergence_study(const ExperimentConfig& cfg,
                                                   std::ostream* csv = nullptr);

void write_study_csv_row(std::ostream& os, const ExperimentConfig& cfg, const RunResult& run);

struct StudyCsv {
    int v = 0;
    int p = 0;
    std::string scheme;
    std::uint64_t seed = 0;
    std::vector<RunResult> runs;
};

/// Parses a study CSV. Throws std::runtime_error on a malformed file or on rows mixing
/// different v, p, scheme or seed.
StudyCsv read_study_csv(std::istream& is);

/// Groups runs by (rho, beta) in ascending order.
std::vector<ExperimentRecord> group_runs(std::span<const RunResult> runs);

struct ValueError {
    double value = 0.0;
    double error = 0.0;
};

struct ScalingPoint {
    double rho = 0.0;
    double mean_n_it = 0.0;
    std::size_t converged = 0;
    std::size_t failures = 0;
    double residual = 0.0;
};

/// log n̄_it = a - b log rho over the points with rho <= rho_max.
struct ScalingFit {
    ValueError a;
    ValueError b;
    double beta = 0.0;
    double rho_max = 1.0;
    std::vector<ScalingPoint> points;
};

/// Least squares on (log rho, log n̄_it) for records sharing one beta. Errors come from a
/// leave-one-spectrum-out jackknife. Throws FitError with fewer than two usable rho
/// points (each needs two converged runs).
ScalingFit fit_scaling(std::span<const ExperimentRecord> records, double rho_max = 1.0);

struct KappaFit {
    double beta = 0.0;
    double a0 = 0.0;
    double kappa = 0.0;
    /// exp(a0)
    double c = 0.0;
    std::vector<int> v;
    std::vector<double> a;
};

/// Ordinary least squares a = a0 + kappa v over at least three dimensions.
KappaFit fit_kappa(std::span<const int> v, std::span<const ScalingFit> fits);

}  // namespace sphtrunc
