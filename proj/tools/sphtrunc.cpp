// Command-line front end: modes, truncate, reconstruct, study, fit.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sphtrunc/ensembles.hpp"
#include "sphtrunc/errors.hpp"
#include "sphtrunc/experiments.hpp"
#include "sphtrunc/reconstruction.hpp"
#include "sphtrunc/ruben.hpp"
#include "sphtrunc/truncation.hpp"

using json = nlohmann::ordered_json;
using namespace sphtrunc;

namespace {

constexpr const char* kRngDescription =
    "std::mt19937_64 seeded by std::seed_seq{seed_lo, seed_hi, stream_lo, stream_hi}; "
    "boost::random normal and chi_squared distributions";

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw std::runtime_error("cannot open '" + path + "' for writing");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

void emit_json(const std::string& path, const json& doc) {
    Output out(path);
    out.stream() << doc.dump(2) << '\n';
}

json violations_json(const FeasibilityReport& report) {
    json arr = json::array();
    for (const auto& v : report.violated) {
        arr.push_back({{"bound", to_string(v.kind)},
                       {"rank", v.rank + 1},
                       {"value", v.value},
                       {"limit", v.limit}});
    }
    return arr;
}

struct ModesArgs {
    int v = 3;
    std::optional<int> p;
    std::size_t n = 100000;
    std::optional<std::size_t> lag;
    double exponent = kDefaultGrenanderExponent;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
};

int run_modes(const ModesArgs& a) {
    const auto cfg = WishartConfig::make(a.v, a.p);
    const auto table = mode_table(cfg, a.n, a.lag, a.exponent, a.seed, a.threads);
    Output out(a.out);
    write_mode_table_csv(out.stream(), table);
    return 0;
}

struct TruncateArgs {
    std::vector<double> lambda;
    double rho = 1.0;
    double epsilon = kDefaultEpsilon;
    std::string out;
};

int run_truncate(const TruncateArgs& a) {
    const auto lambda = Spectrum::sorted(a.lambda);
    const auto ints = eval_integrals(lambda.values(), a.rho, a.epsilon, Want::alpha_and_k);
    const auto mu = truncate_spectrum(lambda, a.rho, a.epsilon);
    const auto report = check_feasibility(mu.mu, a.rho);
    json doc;
    doc["config"] = {{"lambda", lambda.vec()}, {"rho", a.rho}, {"epsilon", a.epsilon}};
    doc["mu"] = mu.mu;
    doc["alpha"] = ints.alpha;
    doc["alpha_k"] = ints.alpha_k;
    doc["k_th_alpha"] = ints.k_th_alpha;
    doc["in_h"] = report.in_h;
    doc["violations"] = violations_json(report);
    emit_json(a.out, doc);
    return 0;
}

struct ReconstructArgs {
    std::vector<double> mu;
    double rho = 1.0;
    std::string scheme = "gjor";
    std::optional<double> omega;
    double beta = 0.0;
    double eps_t = 1e-7;
    double epsilon = kDefaultEpsilon;
    std::size_t warmup = 40;
    std::size_t max_iter = 1'000'000;
    bool history = false;
    std::string out;
};

int run_reconstruct(const ReconstructArgs& a) {
    TruncatedSpectrum mu{a.mu, a.rho};
    SolverConfig cfg;
    cfg.scheme = parse_scheme(a.scheme);
    cfg.omega = a.omega;
    cfg.beta = a.beta;
    cfg.eps_t = a.eps_t;
    cfg.epsilon = a.epsilon;
    cfg.warmup = a.warmup;
    cfg.max_iter = a.max_iter;
    cfg.keep_history = a.history;

    const auto report = check_feasibility(mu.mu, mu.rho);
    json doc;
    doc["config"] = {{"mu", a.mu},          {"rho", a.rho},         {"scheme", a.scheme},
                     {"beta", a.beta},      {"eps_t", a.eps_t},     {"epsilon", a.epsilon},
                     {"warmup", a.warmup},  {"max_iter", a.max_iter}};
    if (a.omega) doc["config"]["omega"] = *a.omega;
    if (!report.in_h) {
        doc["in_h"] = false;
        doc["violations"] = violations_json(report);
        emit_json(a.out, doc);
        return 2;
    }
    const auto trace = solve(mu, cfg);
    doc["in_h"] = true;
    doc["status"] = to_string(trace.status);
    doc["n_it"] = trace.n_it;
    doc["omega"] = trace.omega;
    doc["lambda_hat"] = trace.lambda_hat;
    if (a.history) doc["iterates"] = trace.iterates;
    emit_json(a.out, doc);
    return trace.status == SolveStatus::converged ? 0 : 1;
}

struct StudyArgs {
    int v = 3;
    std::optional<int> p;
    std::size_t n = 100;
    std::vector<double> rho;
    bool rho_from_modes = false;
    bool rho_from_table = false;
    std::size_t mode_samples = 100000;
    std::string scheme = "gjor";
    std::optional<double> beta;
    std::vector<double> beta_grid;
    double eps_t = 1e-7;
    double epsilon = kDefaultEpsilon;
    std::size_t warmup = 40;
    std::size_t max_iter = 1'000'000;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::string out;
    std::string manifest;
};

int run_study(const StudyArgs& a) {
    ExperimentConfig cfg;
    cfg.v = a.v;
    cfg.p = a.p;
    cfg.n = a.n;
    cfg.scheme = parse_scheme(a.scheme);
    cfg.eps_t = a.eps_t;
    cfg.epsilon = a.epsilon;
    cfg.warmup = a.warmup;
    cfg.max_iter = a.max_iter;
    cfg.seed = a.seed;
    cfg.threads = a.threads;
    if (!a.beta_grid.empty()) {
        cfg.beta_grid = a.beta_grid;
    } else if (a.beta) {
        cfg.beta_grid = {*a.beta};
    } else if (cfg.scheme == Scheme::boosted) {
        cfg.beta_grid = default_beta_grid();
    }

    std::string rho_source = "explicit";
    std::vector<double> modes;
    if (a.rho_from_table) {
        const auto ref = reference_modes(a.v);
        if (!ref) throw DomainError("no tabulated modes for v = " + std::to_string(a.v));
        modes = *ref;
        cfg.rho_values = rho_grid(modes);
        rho_source = "table";
    } else if (a.rho_from_modes) {
        const auto table = mode_table(WishartConfig::make(a.v, a.p), a.mode_samples, std::nullopt,
                                      kDefaultGrenanderExponent, a.seed, a.threads);
        modes = table.modes;
        cfg.rho_values = rho_grid(modes);
        rho_source = "modes";
    } else {
        cfg.rho_values = a.rho;
    }
    cfg.validate();

    {
        Output out(a.out);
        run_convergence_study(cfg, &out.stream());
    }

    if (!a.manifest.empty()) {
        json doc;
        doc["config"] = {{"v", cfg.v},
                         {"p", cfg.dof()},
                         {"n_samples", cfg.n},
                         {"rho", cfg.rho_values},
                         {"rho_source", rho_source},
                         {"scheme", to_string(cfg.scheme)},
                         {"beta_grid", cfg.effective_betas()},
                         {"eps_t", cfg.eps_t},
                         {"epsilon", cfg.epsilon},
                         {"warmup", cfg.warmup},
                         {"max_iter", cfg.max_iter},
                         {"seed", cfg.seed},
                         {"threads", cfg.threads}};
        if (!modes.empty()) doc["config"]["modes"] = modes;
        if (rho_source == "modes") doc["config"]["mode_samples"] = a.mode_samples;
        doc["rng"] = kRngDescription;
        doc["csv"] = a.out.empty() ? "-" : a.out;
        emit_json(a.manifest, doc);
    }
    return 0;
}

struct FitArgs {
    std::vector<std::string> inputs;
    double rho_max = 1.0;
    std::string out;
};

json scaling_json(int v, const ScalingFit& fit) {
    json points = json::array();
    for (const auto& pt : fit.points) {
        points.push_back({{"rho", pt.rho},
                          {"mean_n_it", pt.mean_n_it},
                          {"converged", pt.converged},
                          {"failures", pt.failures},
                          {"residual", pt.residual}});
    }
    return {{"v", v},
            {"beta", fit.beta},
            {"a", fit.a.value},
            {"a_err", fit.a.error},
            {"b", fit.b.value},
            {"b_err", fit.b.error},
            {"points", points}};
}

int run_fit(const FitArgs& a) {
    json doc;
    doc["config"] = {{"inputs", a.inputs}, {"rho_max", a.rho_max}};
    doc["fits"] = json::array();
    doc["kappa"] = json::array();
    doc["errors"] = json::array();

    // beta -> (v, fit)
    std::map<double, std::vector<std::pair<int, ScalingFit>>> by_beta;
    for (const auto& path : a.inputs) {
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open '" + path + "'");
        const auto csv = read_study_csv(in);
        const auto records = group_runs(csv.runs);
        std::map<double, std::vector<ExperimentRecord>> per_beta;
        for (const auto& rec : records) per_beta[rec.beta].push_back(rec);
        for (const auto& [beta, recs] : per_beta) {
            try {
                auto fit = fit_scaling(recs, a.rho_max);
                doc["fits"].push_back(scaling_json(csv.v, fit));
                by_beta[beta].emplace_back(csv.v, std::move(fit));
            } catch (const FitError& e) {
                doc["errors"].push_back({{"input", path}, {"beta", beta}, {"message", e.what()}});
            }
        }
    }
    for (auto& [beta, entries] : by_beta) {
        if (entries.size() < 3) continue;
        std::vector<int> vs;
        std::vector<ScalingFit> fits;
        for (auto& [v, fit] : entries) {
            vs.push_back(v);
            fits.push_back(fit);
        }
        const auto k = fit_kappa(vs, fits);
        doc["kappa"].push_back({{"beta", beta}, {"a0", k.a0}, {"kappa", k.kappa}, {"c", k.c},
                                {"v", k.v}, {"a", k.a}});
    }
    emit_json(a.out, doc);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical truncation of Gaussian covariance spectra"};
    app.require_subcommand(1);

    ModesArgs modes;
    auto* sub_modes = app.add_subcommand("modes", "Grenander modes of Wishart eigenvalues (CSV)");
    sub_modes->add_option("--v", modes.v, "Dimension")->required();
    sub_modes->add_option("--p", modes.p, "Degrees of freedom (default 2v)");
    sub_modes->add_option("--n-samples", modes.n, "Number of Wishart draws");
    sub_modes->add_option("--lag", modes.lag, "Grenander lag r (default max(1, N/100))");
    sub_modes->add_option("--exponent", modes.exponent, "Grenander exponent s");
    sub_modes->add_option("--seed", modes.seed);
    sub_modes->add_option("--threads", modes.threads)->check(CLI::PositiveNumber);
    sub_modes->add_option("--out", modes.out, "Output file (stdout if omitted)");

    TruncateArgs trunc;
    auto* sub_trunc = app.add_subcommand("truncate", "Truncated spectrum of lambda (JSON)");
    sub_trunc->add_option("--lambda", trunc.lambda, "Eigenvalues")->required()->delimiter(',');
    sub_trunc->add_option("--rho", trunc.rho, "Squared ball radius")->required();
    sub_trunc->add_option("--epsilon", trunc.epsilon, "Series tolerance");
    sub_trunc->add_option("--out", trunc.out);

    ReconstructArgs rec;
    auto* sub_rec = app.add_subcommand("reconstruct", "Recover lambda from a truncated spectrum (JSON)");
    sub_rec->add_option("--mu", rec.mu, "Truncated eigenvalues")->required()->delimiter(',');
    sub_rec->add_option("--rho", rec.rho)->required();
    sub_rec->add_option("--scheme", rec.scheme)->check(CLI::IsMember({"gj", "gjor", "boosted"}));
    sub_rec->add_option("--omega", rec.omega, "Relaxation factor (default from ‖J‖_∞ at mu)");
    sub_rec->add_option("--beta", rec.beta);
    sub_rec->add_option("--eps-t", rec.eps_t);
    sub_rec->add_option("--epsilon", rec.epsilon);
    sub_rec->add_option("--warmup", rec.warmup);
    sub_rec->add_option("--max-iter", rec.max_iter);
    sub_rec->add_flag("--history", rec.history, "Include every iterate");
    sub_rec->add_option("--out", rec.out);

    StudyArgs study;
    auto* sub_study = app.add_subcommand("study", "Convergence study over Wishart spectra (CSV)");
    sub_study->add_option("--v", study.v)->required();
    sub_study->add_option("--p", study.p);
    sub_study->add_option("--n-samples", study.n, "Spectra per rho");
    auto* opt_rho = sub_study->add_option("--rho", study.rho, "Radius (repeatable)")->delimiter(',');
    auto* opt_modes = sub_study->add_flag("--rho-from-modes", study.rho_from_modes,
                                          "Grid from freshly estimated modes");
    auto* opt_table = sub_study->add_flag("--rho-from-table", study.rho_from_table,
                                          "Grid from tabulated reference modes");
    opt_rho->excludes(opt_modes)->excludes(opt_table);
    opt_modes->excludes(opt_table);
    sub_study->add_option("--mode-samples", study.mode_samples, "Draws for --rho-from-modes");
    sub_study->add_option("--scheme", study.scheme)->check(CLI::IsMember({"gj", "gjor", "boosted"}));
    auto* opt_beta = sub_study->add_option("--beta", study.beta);
    sub_study->add_option("--beta-grid", study.beta_grid)->delimiter(',')->excludes(opt_beta);
    sub_study->add_option("--eps-t", study.eps_t);
    sub_study->add_option("--epsilon", study.epsilon);
    sub_study->add_option("--warmup", study.warmup);
    sub_study->add_option("--max-iter", study.max_iter);
    sub_study->add_option("--seed", study.seed);
    sub_study->add_option("--threads", study.threads)->check(CLI::PositiveNumber);
    sub_study->add_option("--out", study.out);
    sub_study->add_option("--manifest", study.manifest, "JSON file recording the full config");

    FitArgs fit;
    auto* sub_fit = app.add_subcommand("fit", "Scaling-law and kappa fits from study CSVs (JSON)");
    sub_fit->add_option("inputs", fit.inputs, "Study CSV files")->required();
    sub_fit->add_option("--rho-max", fit.rho_max, "Upper end of the fit window");
    sub_fit->add_option("--out", fit.out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sub_modes) return run_modes(modes);
        if (*sub_trunc) return run_truncate(trunc);
        if (*sub_rec) return run_reconstruct(rec);
        if (*sub_study) {
            if (study.rho.empty() && !study.rho_from_modes && !study.rho_from_table) {
                std::cerr << "study: give --rho, --rho-from-modes or --rho-from-table\n";
                return 2;
            }
            return run_study(study);
        }
        if (*sub_fit) return run_fit(fit);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
