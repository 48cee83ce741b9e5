#pragma once

// Experiment orchestration: sample replicates of an ensemble, compare their
// spectra with the graphon predictions (moments, smoothed CDF, density), and
// assemble a self-describing JSON report.

#include <Eigen/Dense>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "homdensity.hpp"
#include "io.hpp"
#include "models.hpp"
#include "parallel.hpp"
#include "qve.hpp"
#include "spectra.hpp"

#ifndef GRAPHON_SPECTRA_VERSION
#define GRAPHON_SPECTRA_VERSION "0.1.0"
#endif

namespace graphon_spectra {

inline constexpr const char* kToolName = "graphon-spectra";
inline constexpr const char* kToolVersion = GRAPHON_SPECTRA_VERSION;

/// FNV-1a, 64 bit.
inline std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t x) {
    static constexpr char digits[] = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i, x >>= 4) s[static_cast<std::size_t>(i)] = digits[x & 0xf];
    return s;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Spectrum vs prediction

struct CompareOptions {
    int max_order = 6;
    double eta = 0.05;
    std::size_t bins = 60;
    double cdf_step = 0.005;
    GramMode gram;
    QveOptions qve;
};

/// Everything about the limit law that does not depend on the sample.
struct PredictionSummary {
    MomentTable moments;
    std::optional<PredictedCdf> cdf;
    DensityCurve density;
    double range_lo = 0.0;
    double range_hi = 0.0;
    bool qve_converged = true;
};

inline PredictionSummary summarize_prediction(const StepGraphon& w, const CompareOptions& opt) {
    PredictionSummary p;
    if (opt.max_order < 0) throw ValidationError("max order must be non-negative");
    p.moments = opt.gram.enabled ? gram_moments(opt.max_order, w, opt.gram.aspect) : wigner_moments(opt.max_order, w);
    p.cdf.emplace(predicted_cdf(w, opt.eta, opt.gram, opt.cdf_step, opt.qve));
    const double sup = w.sup_norm();
    if (opt.gram.enabled) {
        const double y = opt.gram.aspect;
        p.range_lo = -0.25;
        p.range_hi = sup * (1.0 + y) * (1.0 + y) / y + 0.25;
    } else {
        p.range_hi = 2.0 * std::sqrt(sup) + 0.25;
        p.range_lo = -p.range_hi;
    }
    p.density = density_curve(w, p.range_lo, p.range_hi, 4 * opt.bins + 1, opt.eta, opt.gram, opt.qve);
    p.qve_converged = p.density.all_converged();
    return p;
}

struct CompareResult {
    MomentTable empirical;
    std::map<int, double> abs_delta;
    std::map<int, double> rel_delta;  // only where the prediction is nonzero
    double ks = 0.0;
    double l1 = 0.0;
};

inline CompareResult compare_spectrum(const Spectrum& sp, const PredictionSummary& pred, const CompareOptions& opt) {
    CompareResult r;
    r.empirical = esd_moments(sp, opt.max_order);
    for (const auto& [k, v] : pred.moments.entries) {
        const double e = r.empirical.at(k);
        r.abs_delta[k] = std::abs(e - v);
        if (std::abs(v) > 1e-12) r.rel_delta[k] = std::abs(e - v) / std::abs(v);
    }
    r.ks = kolmogorov_distance_to(sp, *pred.cdf);
    r.l1 = l1_density_distance(histogram_density(sp, opt.bins, pred.range_lo, pred.range_hi), pred.density);
    return r;
}

inline json moments_json(const std::map<int, double>& m) {
    json j = json::object();
    for (const auto& [k, v] : m) j[std::to_string(k)] = v;
    return j;
}

inline json to_json(const CompareResult& r) {
    return {{"moments", moments_json(r.empirical.entries)},
            {"moment_abs_deltas", moments_json(r.abs_delta)},
            {"moment_rel_deltas", moments_json(r.rel_delta)},
            {"ks_distance", r.ks},
            {"l1_density_distance", r.l1}};
}

// ---------------------------------------------------------------------------
// Configuration

struct PredictionConfig {
    std::optional<json> graphon;  // inline override of the ensemble's own limit
    std::string graphon_path;     // or a graphon file
    int max_order = 6;
    double eta = 0.05;
    std::size_t panels = 256;
    std::size_t bins = 60;
    double cdf_step = 0.005;
};

struct Tolerances {
    std::optional<double> moment_rel = 0.05;
    std::optional<double> ks = 0.05;
    std::optional<double> l1 = 0.1;
};

struct DiagnosticsConfig {
    bool levy_bound = false;  // L^3(primary, centered) <= (1/n) tr((primary - centered)^2)
    bool rank_bound = false;  // SBM: KS(A~, A~ - EA~) <= d/n
};

struct ExperimentConfig {
    std::string name;
    std::string description;
    EnsembleSpec ensemble;
    std::string analyze = "primary";
    PredictionConfig prediction;
    Tolerances tolerances;
    DiagnosticsConfig diagnostics;
    std::vector<std::uint64_t> seeds;
    std::string report_path;
};

inline json optional_json(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

inline json to_json(const ExperimentConfig& c) {
    json pred = {{"max_order", c.prediction.max_order}, {"eta", c.prediction.eta},
                 {"panels", c.prediction.panels},       {"bins", c.prediction.bins},
                 {"cdf_step", c.prediction.cdf_step}};
    if (c.prediction.graphon) pred["graphon"] = *c.prediction.graphon;
    if (!c.prediction.graphon_path.empty()) pred["graphon_path"] = c.prediction.graphon_path;
    json ens = to_json(c.ensemble);
    ens.erase("seed");
    json j = {{"name", c.name},
              {"description", c.description},
              {"ensemble", ens},
              {"analyze", c.analyze},
              {"prediction", pred},
              {"tolerances",
               {{"moment_rel", optional_json(c.tolerances.moment_rel)},
                {"ks", optional_json(c.tolerances.ks)},
                {"l1", optional_json(c.tolerances.l1)}}},
              {"diagnostics", {{"levy_bound", c.diagnostics.levy_bound}, {"rank_bound", c.diagnostics.rank_bound}}},
              {"seeds", c.seeds}};
    if (!c.report_path.empty()) j["output"] = {{"report", c.report_path}};
    return j;
}

namespace detail {

inline std::optional<double> read_tolerance(const json& t, const char* key, std::optional<double> fallback) {
    if (!t.contains(key)) return fallback;
    if (t[key].is_null()) return std::nullopt;
    if (!t[key].is_number() || !(t[key].get<double>() > 0.0)) {
        throw ConfigError(std::string("tolerance '") + key + "' must be a positive number or null");
    }
    return t[key].get<double>();
}

}  // namespace detail

/// Parses and validates a config. Relative graphon paths resolve against `base_dir`.
inline ExperimentConfig experiment_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw ConfigError("experiment config must be a JSON object");
    ExperimentConfig c;
    try {
        c.name = j.value("name", std::string("experiment"));
        c.description = j.value("description", std::string());
        if (!j.contains("ensemble")) throw ConfigError("experiment config needs an 'ensemble' section");
        c.ensemble = spec_from_json(j["ensemble"]);
        c.analyze = j.value("analyze", std::string("primary"));
        if (j.contains("prediction")) {
            const json& p = j["prediction"];
            if (p.contains("graphon")) c.prediction.graphon = p["graphon"];
            if (p.contains("graphon_path")) {
                std::filesystem::path gp = p["graphon_path"].get<std::string>();
                if (gp.is_relative() && !base_dir.empty()) gp = base_dir / gp;
                c.prediction.graphon_path = gp.string();
            }
            c.prediction.max_order = p.value("max_order", c.prediction.max_order);
            c.prediction.eta = p.value("eta", c.prediction.eta);
            c.prediction.panels = p.value("panels", c.prediction.panels);
            c.prediction.bins = p.value("bins", c.prediction.bins);
            c.prediction.cdf_step = p.value("cdf_step", c.prediction.cdf_step);
        }
        if (j.contains("tolerances")) {
            const json& t = j["tolerances"];
            c.tolerances.moment_rel = detail::read_tolerance(t, "moment_rel", c.tolerances.moment_rel);
            c.tolerances.ks = detail::read_tolerance(t, "ks", c.tolerances.ks);
            c.tolerances.l1 = detail::read_tolerance(t, "l1", c.tolerances.l1);
        }
        if (j.contains("diagnostics")) {
            c.diagnostics.levy_bound = j["diagnostics"].value("levy_bound", false);
            c.diagnostics.rank_bound = j["diagnostics"].value("rank_bound", false);
        }
        if (j.contains("seeds")) c.seeds = j["seeds"].get<std::vector<std::uint64_t>>();
        if (j.contains("output")) c.report_path = j["output"].value("report", std::string());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid experiment config: ") + e.what());
    }
    if (!(c.prediction.eta > 0.0)) throw ConfigError("prediction.eta must be positive");
    if (c.prediction.max_order < 0 || c.prediction.max_order > 24) {
        throw ConfigError("prediction.max_order must be in [0, 24]");
    }
    if (c.prediction.bins == 0) throw ConfigError("prediction.bins must be >= 1");
    if (!c.prediction.graphon_path.empty() && !std::filesystem::exists(c.prediction.graphon_path)) {
        throw ConfigError("graphon file not found: '" + c.prediction.graphon_path + "'");
    }
    const std::set<std::uint64_t> distinct(c.seeds.begin(), c.seeds.end());
    if (distinct.size() != c.seeds.size()) throw ConfigError("replicate seeds must be distinct");
    return c;
}

inline ExperimentConfig load_experiment(const std::string& path) {
    return experiment_from_json(read_json_file(path, "experiment config"),
                                std::filesystem::path(path).parent_path());
}

/// Canonical config hash: FNV-1a 64 of the compact JSON dump (keys sorted).
inline std::string config_hash(const ExperimentConfig& c) { return "fnv1a64:" + hex64(fnv1a64(to_json(c).dump())); }

// ---------------------------------------------------------------------------
// Running

namespace detail {

// Re-raises module errors with the failing stage named, keeping the
// non-convergence category distinct from configuration problems.
template <class F>
auto staged(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(stage + ": " + e.what(), e.last_residual(), e.iterations());
    } catch (const ConfigError& e) {
        throw ConfigError(stage + ": " + e.what());
    } catch (const Error& e) {
        throw ConfigError(stage + ": " + e.what());
    }
}

}  // namespace detail

/// The graphon and Gram mode the analyzed matrix is compared against.
inline std::pair<StepGraphon, GramMode> experiment_target(const ExperimentConfig& c) {
    Prediction pr = prediction_for(c.ensemble, c.prediction.panels);
    StepGraphon w = pr.graphon;
    if (c.prediction.graphon) w = step_graphon_from_json(*c.prediction.graphon, c.prediction.panels);
    if (!c.prediction.graphon_path.empty()) {
        w = step_graphon_from_json(read_json_file(c.prediction.graphon_path, "graphon file"), c.prediction.panels);
    }
    GramMode gram;
    if (c.ensemble.kind == EnsembleKind::Gram && c.analyze == "gram") gram = pr.gram;
    return {std::move(w), gram};
}

struct ReplicateResult {
    std::uint64_t seed = 0;
    CompareResult compare;
    json record;
};

inline json run_experiment(const ExperimentConfig& c) {
    const auto [w, gram] = detail::staged("prediction", [&] { return experiment_target(c); });
    CompareOptions opt;
    opt.max_order = c.prediction.max_order;
    opt.eta = c.prediction.eta;
    opt.bins = c.prediction.bins;
    opt.cdf_step = c.prediction.cdf_step;
    opt.gram = gram;
    const PredictionSummary pred = detail::staged("prediction", [&] { return summarize_prediction(w, opt); });
    if (!pred.qve_converged) {
        throw NonConvergenceError("prediction: QVE did not converge on the density grid", 0.0, 0);
    }

    std::vector<ReplicateResult> reps(c.seeds.size());
    const bool need_variants =
        c.analyze != "primary" || c.diagnostics.levy_bound || c.diagnostics.rank_bound;
    parallel_for(c.seeds.size(), [&](std::size_t r) {
        EnsembleSpec spec = c.ensemble;
        spec.seed = c.seeds[r];
        const std::string tag = "replicate seed " + std::to_string(spec.seed);
        const EnsembleSample s = detail::staged(tag + " / sample", [&] {
            return sample(spec, SampleOptions{need_variants});
        });
        const Eigen::MatrixXd& target = c.analyze == "primary" ? s.matrix : s.variant(c.analyze).matrix;
        const Spectrum sp = detail::staged(tag + " / eigenvalues", [&] { return eigenvalues_symmetric(target); });
        ReplicateResult& out = reps[r];
        out.seed = spec.seed;
        out.compare = detail::staged(tag + " / compare", [&] { return compare_spectrum(sp, pred, opt); });
        json rec = to_json(out.compare);
        rec["seed"] = spec.seed;
        rec["analyzed"] = c.analyze;
        rec["normalization"] = c.analyze == "primary" ? s.normalization.formula
                                                      : s.variant(c.analyze).normalization.formula;
        rec["dimension"] = target.rows();
        rec["in_scope"] = s.in_scope;
        if (!s.in_scope) rec["scope_note"] = s.scope_note;
        rec["certificate_residual"] = sp.certificate_residual;
        rec["eigenvalue_min"] = sp.eigenvalues.front();
        rec["eigenvalue_max"] = sp.eigenvalues.back();
        if (!s.diagnostics.empty()) rec["sample_diagnostics"] = s.diagnostics;
        if (c.diagnostics.levy_bound && s.has_variant("centered")) {
            const Eigen::MatrixXd& centered = s.variant("centered").matrix;
            const Spectrum sc = c.analyze == "centered" ? sp : eigenvalues_symmetric(centered);
            const Spectrum sa = c.analyze == "primary" ? sp : eigenvalues_symmetric(s.matrix);
            const double l = levy_distance(sa, sc);
            const double bound = levy_cube_bound(s.matrix, centered);
            rec["levy_bound"] = {{"levy_cubed", l * l * l}, {"bound", bound}, {"holds", l * l * l <= bound}};
            if (c.analyze != "primary") rec["primary_ks"] = kolmogorov_distance_to(sa, *pred.cdf);
        }
        if (c.diagnostics.rank_bound && s.has_variant("augmented")) {
            const Spectrum a = eigenvalues_symmetric(s.variant("augmented").matrix);
            const Spectrum ac = eigenvalues_symmetric(s.variant("augmented-centered").matrix);
            const double ks = kolmogorov_distance(a, ac);
            const double bound =
                static_cast<double>(c.ensemble.sizes.size()) / static_cast<double>(s.matrix.rows());
            rec["rank_bound"] = {{"ks", ks}, {"bound", bound}, {"holds", ks <= bound}};
        }
        out.record = std::move(rec);
    });

    // reduction in seed order
    json report;
    report["tool"] = {{"name", kToolName}, {"version", kToolVersion}};
    report["experiment"] = c.name;
    report["config"] = to_json(c);
    report["config_hash"] = config_hash(c);
    report["timestamp"] = utc_timestamp();
    report["prediction"] = {{"moments", moments_json(pred.moments.entries)},
                            {"moment_source", to_string(pred.moments.source)},
                            {"blocks", w.blocks()},
                            {"gram", gram.enabled},
                            {"aspect", gram.enabled ? gram.aspect : 0.0},
                            {"eta", opt.eta},
                            {"density_mass", pred.density.integral()}};
    json replicates = json::array();
    for (const auto& r : reps) replicates.push_back(r.record);
    report["replicates"] = replicates;

    json checks = json::array();
    bool pass = true;
    if (!reps.empty()) {
        std::map<int, double> mean_moments;
        double ks = 0.0;
        double l1 = 0.0;
        for (const auto& r : reps) {
            for (const auto& [k, v] : r.compare.empirical.entries) mean_moments[k] += v / static_cast<double>(reps.size());
            ks += r.compare.ks / static_cast<double>(reps.size());
            l1 += r.compare.l1 / static_cast<double>(reps.size());
        }
        std::map<int, double> rel;
        for (const auto& [k, v] : pred.moments.entries) {
            if (k >= 1 && std::abs(v) > 1e-12) rel[k] = std::abs(mean_moments[k] - v) / std::abs(v);
        }
        auto add_check = [&](const std::string& name, double value, std::optional<double> tol) {
            if (!tol) return;
            const bool ok = value <= *tol;
            pass = pass && ok;
            checks.push_back({{"name", name}, {"value", value}, {"tolerance", *tol}, {"pass", ok}});
        };
        for (const auto& [k, v] : rel) add_check("moment_" + std::to_string(k) + "_rel", v, c.tolerances.moment_rel);
        add_check("ks_mean", ks, c.tolerances.ks);
        add_check("l1_mean", l1, c.tolerances.l1);
        for (const auto& r : reps) {
            for (const char* key : {"levy_bound", "rank_bound"}) {
                if (r.record.contains(key)) {
                    const bool ok = r.record[key]["holds"].get<bool>();
                    pass = pass && ok;
                    checks.push_back({{"name", std::string(key) + "_seed_" + std::to_string(r.seed)}, {"pass", ok}});
                }
            }
        }
        report["summary"] = {{"mean_moments", moments_json(mean_moments)},
                             {"moment_rel_deltas", moments_json(rel)},
                             {"ks_mean", ks},
                             {"l1_mean", l1}};
    } else {
        report["summary"] = {{"note", "no replicates; prediction only"}};
    }
    report["checks"] = checks;
    report["pass"] = pass;
    return report;
}

/// Report text with the timestamp removed, for reproducibility comparisons.
inline std::string report_fingerprint(json report) {
    report.erase("timestamp");
    return report.dump(2);
}

// ---------------------------------------------------------------------------
// Builtin catalog

inline std::vector<ExperimentConfig> builtin_experiments() {
    std::vector<ExperimentConfig> out;
    auto make = [&](std::string name, std::string description) -> ExperimentConfig& {
        ExperimentConfig c;
        c.name = std::move(name);
        c.description = std::move(description);
        c.seeds = {1, 2, 3};
        out.push_back(std::move(c));
        return out.back();
    };

    {
        auto& c = make("semicircle-gw", "generalized Wigner matrix with constant profile; semicircle law");
        c.ensemble.kind = EnsembleKind::GeneralizedWigner;
        c.ensemble.n = 2000;
        c.ensemble.profile = StepGraphon::constant(1.0);
    }
    {
        auto& c = make("inhomog-degree", "inhomogeneous random graph with roughly equal expected degrees; semicircle");
        c.ensemble.kind = EnsembleKind::InhomogeneousGraph;
        c.ensemble.sizes = {500, 500};
        c.ensemble.n = 1000;
        Eigen::MatrixXd p(2, 2);
        p << 0.06, 0.04, 0.04, 0.06;
        c.ensemble.block_weights = p;
        c.prediction.max_order = 4;
        c.tolerances.moment_rel = 0.1;
        c.tolerances.ks = 0.05;
        c.tolerances.l1 = 0.15;
        c.analyze = "centered";
        c.diagnostics.levy_bound = true;
    }
    {
        auto& c = make("w-random-sparse", "sparse W-random graph, product kernel, rho = n^(-1/2)");
        c.ensemble.kind = EnsembleKind::WRandomGraph;
        c.ensemble.n = 1000;
        c.ensemble.graphon = AnalyticGraphon::product();
        c.ensemble.sparsity = 1.0 / std::sqrt(1000.0);
        c.prediction.panels = 128;
        c.prediction.max_order = 4;
        c.tolerances.moment_rel = 0.15;
        c.tolerances.ks = 0.05;
        c.tolerances.l1 = 0.3;
        c.analyze = "centered";
        c.diagnostics.levy_bound = true;
    }
    {
        auto& c = make("block-fixed-d", "random block matrix with three fixed blocks");
        c.ensemble.kind = EnsembleKind::BlockMatrix;
        c.ensemble.sizes = {300, 300, 400};
        c.ensemble.n = 1000;
        Eigen::MatrixXd s(3, 3);
        s << 1.0, 2.0, 0.5, 2.0, 1.0, 1.0, 0.5, 1.0, 3.0;
        c.ensemble.block_weights = s;
        c.tolerances.l1 = 0.15;
    }
    {
        auto& c = make("block-growing-d", "random block matrix with geometric class sizes alpha_i = C / 2^i");
        const BlockDesign d = growing_block_design(
            1000, 2.0, 1.0, 0, [](std::size_t k, std::size_t l) { return (k + l) % 2 == 0 ? 1.5 : 0.5; },
            [](std::size_t) { return 1.0; }, 1.0);
        c.ensemble.kind = EnsembleKind::BlockMatrix;
        c.ensemble.sizes = d.sizes;
        c.ensemble.n = 1000;
        c.ensemble.block_weights = d.weights;
        c.prediction.graphon = to_json(d.limit);
        c.tolerances.l1 = 0.15;
    }
    {
        auto& c = make("sbm-sparse", "sparse SBM, 32 blocks, p_kl in {0.3, 0.7} n^(-1/2)");
        const std::size_t n = 1024;
        const std::size_t d = 32;
        c.ensemble.kind = EnsembleKind::Sbm;
        c.ensemble.n = n;
        c.ensemble.sizes.assign(d, n / d);
        Eigen::MatrixXd p(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        const double scale = 1.0 / std::sqrt(static_cast<double>(n));
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
            for (Eigen::Index l = 0; l < p.cols(); ++l) p(k, l) = ((k + l) % 2 == 0 ? 0.7 : 0.3) * scale;
        }
        c.ensemble.block_weights = p;
        c.prediction.max_order = 4;
        c.tolerances.moment_rel = 0.15;
        c.tolerances.ks = 0.05;
        c.tolerances.l1 = 0.3;
        c.analyze = "centered";
        c.diagnostics.levy_bound = true;
    }
    {
        auto& c = make("sbm-dense", "dense SBM with d = floor(sqrt(n)) blocks; mean removed by the rank inequality");
        const std::size_t n = 1000;
        const std::size_t d = 31;
        c.ensemble.kind = EnsembleKind::Sbm;
        c.ensemble.n = n;
        for (std::size_t b = 0; b < d; ++b) c.ensemble.sizes.push_back(n / d + (b < n % d ? 1 : 0));
        Eigen::MatrixXd p(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
        for (Eigen::Index k = 0; k < p.rows(); ++k) {
            for (Eigen::Index l = 0; l < p.cols(); ++l) p(k, l) = (k + l) % 2 == 0 ? 0.5 : 0.3;
        }
        c.ensemble.block_weights = p;
        c.prediction.max_order = 4;
        c.tolerances.moment_rel = std::nullopt;  // the rank-d mean shifts moments, not the CDF
        c.tolerances.ks = 0.06;
        c.tolerances.l1 = std::nullopt;
        c.diagnostics.levy_bound = true;
        c.diagnostics.rank_bound = true;
    }
    {
        auto& c = make("gram-mp", "Gram matrix with unit profile and y = 1; Marchenko-Pastur law");
        c.ensemble.kind = EnsembleKind::Gram;
        c.ensemble.m = 1000;
        c.ensemble.n = 1000;
        c.ensemble.gram_profile = GramProfile::constant(1.0);
        c.analyze = "gram";
        c.prediction.eta = 0.005;
        c.prediction.cdf_step = 0.0025;
        c.prediction.max_order = 4;
        c.tolerances.l1 = 0.15;
    }
    {
        auto& c = make("gram-profile", "Gram matrix with a two-by-two block profile and y = 0.6");
        c.ensemble.kind = EnsembleKind::Gram;
        c.ensemble.m = 600;
        c.ensemble.n = 1000;
        Eigen::MatrixXd s(2, 2);
        s << 1.0, 2.0, 0.5, 1.5;
        c.ensemble.gram_profile = GramProfile{Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.5, 0.5), s};
        c.analyze = "gram";
        c.prediction.eta = 0.005;
        c.prediction.cdf_step = 0.0025;
        c.prediction.max_order = 4;
        c.tolerances.l1 = 0.15;
    }
    return out;
}

inline ExperimentConfig builtin_experiment(const std::string& name) {
    for (auto& c : builtin_experiments()) {
        if (c.name == name) return c;
    }
    throw ConfigError("unknown builtin experiment '" + name + "'");
}

}  // namespace graphon_spectra
