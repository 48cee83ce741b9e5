// graphon-spectra command line tool.
//
// Exit codes: 0 success/pass, 2 tolerance failure, 3 configuration or input
// error, 4 numerical non-convergence.

#include <CLI11.hpp>
#include <graphon_spectra.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gs = graphon_spectra;
using gs::json;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitTolerance = 2;
constexpr int kExitConfig = 3;
constexpr int kExitNonConvergence = 4;

// Writes to `path`, or stdout for "" / "-".
class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw gs::ConfigError("cannot write output file '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// Options shared by the graphon-driven subcommands.
struct GraphonArgs {
    std::string path;
    std::size_t panels = 256;
    bool gram = false;
    double aspect = 1.0;

    gs::StepGraphon load() const {
        return gs::step_graphon_from_json(gs::read_json_file(path, "graphon file"), panels);
    }
    gs::GramMode mode() const { return {gram, aspect}; }
};

void add_graphon_options(CLI::App* cmd, GraphonArgs& g, bool with_gram) {
    cmd->add_option("--graphon", g.path, "Graphon JSON file")->required();
    cmd->add_option("--panels", g.panels, "Refinement panels for analytic kernels")->capture_default_str();
    if (with_gram) {
        cmd->add_flag("--gram", g.gram, "Interpret the graphon as a bipartite Gram kernel");
        cmd->add_option("--aspect", g.aspect, "Gram aspect ratio y = m/n")->capture_default_str();
    }
}

// "--config file.json" supplies defaults for any flag not given explicitly:
// keys are long option names, booleans toggle flags.
std::vector<std::string> expand_config(std::vector<std::string> args) {
    if (args.size() > 1 && args[1] == "experiment") return args;
    auto it = std::find(args.begin(), args.end(), "--config");
    if (it == args.end()) return args;
    if (it + 1 == args.end()) throw gs::ConfigError("--config needs a file argument");
    const std::string path = *(it + 1);
    args.erase(it, it + 2);
    const json cfg = gs::read_json_file(path, "flag config");
    if (!cfg.is_object()) throw gs::ConfigError("flag config '" + path + "' must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        std::string flag = "--" + key;
        std::replace(flag.begin(), flag.end(), '_', '-');
        const bool given = std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
        if (given) continue;
        if (value.is_boolean()) {
            if (value.get<bool>()) args.push_back(flag);
        } else if (value.is_string()) {
            args.push_back(flag);
            args.push_back(value.get<std::string>());
        } else {
            args.push_back(flag);
            args.push_back(value.dump());
        }
    }
    return args;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            seeds.push_back(std::stoull(item));
        } catch (const std::exception&) {
            throw gs::ConfigError("malformed seed '" + item + "'");
        }
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Limiting spectral distributions of Wigner-type random matrices from graphons", gs::kToolName};
    app.set_version_flag("--version", std::string(gs::kToolVersion));
    app.require_subcommand(1);

    // trees
    std::size_t tree_k = 3;
    std::string tree_format = "dyck";
    auto* trees = app.add_subcommand("trees", "List rooted planar trees with k edges, one per line");
    trees->add_option("-k,--k,--edges", tree_k, "Number of edges")->required();
    trees->add_option("--format", tree_format, "dyck (U/D words), parent (parent arrays) or csv")
        ->check(CLI::IsMember({"dyck", "parent", "csv"}))
        ->capture_default_str();
    std::size_t tree_cap = gs::kDefaultTreeCap;
    trees->add_option("--cap", tree_cap, "Enumeration cap")->capture_default_str();
    std::string trees_out;
    trees->add_option("--out", trees_out, "Output file (default stdout)");

    // cutnorm
    GraphonArgs cut_g;
    auto* cutnorm = app.add_subcommand("cutnorm", "Cut norm of a step graphon (JSON)");
    add_graphon_options(cutnorm, cut_g, false);
    bool cut_exact = false;
    bool cut_heuristic = false;
    std::string cut_against;
    std::size_t cut_restarts = 64;
    cutnorm->add_flag("--exact", cut_exact, "Force exact enumeration");
    cutnorm->add_flag("--heuristic", cut_heuristic, "Force alternating maximization (lower bound)");
    cutnorm->add_option("--against", cut_against, "Second graphon: report the cut-distance upper bound");
    cutnorm->add_option("--restarts", cut_restarts, "Heuristic restarts")->capture_default_str();

    // moments
    GraphonArgs mom_g;
    int mom_order = 6;
    std::string mom_out;
    auto* moments = app.add_subcommand("moments", "Limiting moments from tree densities (CSV)");
    add_graphon_options(moments, mom_g, true);
    moments->add_option("--max-order", mom_order, "Largest moment order")->required();
    moments->add_option("--out", mom_out, "Output file (default stdout)");

    // qve
    GraphonArgs qve_g;
    double z_re = 0.0;
    double z_im = 1.0;
    gs::QveOptions qve_opt;
    auto* qve = app.add_subcommand("qve", "Solve the QVE at one spectral parameter (JSON)");
    add_graphon_options(qve, qve_g, true);
    qve->add_option("--z-re", z_re, "Re z")->required();
    qve->add_option("--z-im", z_im, "Im z (> 0)")->required();
    qve->add_option("--tol", qve_opt.tol, "Residual tolerance")->capture_default_str();
    qve->add_option("--max-iter", qve_opt.max_iter, "Iteration cap")->capture_default_str();

    // density
    GraphonArgs den_g;
    double emin = -3.0;
    double emax = 3.0;
    std::size_t points = 601;
    double eta = 0.01;
    std::string den_out;
    auto* density = app.add_subcommand("density", "Inverted QVE density on a grid (CSV)");
    add_graphon_options(density, den_g, true);
    density->add_option("--emin", emin, "Grid start")->required();
    density->add_option("--emax", emax, "Grid end")->required();
    density->add_option("--points", points, "Grid points")->capture_default_str();
    density->add_option("--eta", eta, "Imaginary part of z")->capture_default_str();
    density->add_option("--out", den_out, "Output file (default stdout)");

    // sample
    std::string spec_path;
    std::string sample_out;
    std::optional<std::uint64_t> sample_seed;
    std::optional<std::size_t> sample_n;
    auto* samplec = app.add_subcommand("sample", "Sample an ensemble into a GSPC binary file");
    samplec->add_option("--spec", spec_path, "Ensemble spec JSON")->required();
    samplec->add_option("--out", sample_out, "Output .bin file")->required();
    samplec->add_option("--seed", sample_seed, "Override the seed in the ensemble file");
    samplec->add_option("--n", sample_n, "Override the size n in the ensemble file");

    // esd
    std::string esd_in;
    std::string esd_out;
    auto* esd = app.add_subcommand("esd", "Eigenvalues of a sampled matrix (CSV)");
    esd->add_option("--in", esd_in, "GSPC sample file")->required();
    esd->add_option("--out", esd_out, "Output CSV (default stdout)");

    // compare
    GraphonArgs cmp_g;
    std::string cmp_in;
    gs::CompareOptions cmp_opt;
    std::optional<double> cmp_ks_tol;
    std::optional<double> cmp_moment_tol;
    auto* compare = app.add_subcommand("compare", "Compare a sample's spectrum with the graphon prediction (JSON)");
    add_graphon_options(compare, cmp_g, true);
    compare->add_option("--in", cmp_in, "GSPC sample file")->required();
    compare->add_option("--max-order", cmp_opt.max_order, "Largest moment order")->capture_default_str();
    compare->add_option("--eta", cmp_opt.eta, "Inversion smoothing")->capture_default_str();
    compare->add_option("--bins", cmp_opt.bins, "Histogram bins")->capture_default_str();
    compare->add_option("--ks-tol", cmp_ks_tol, "Fail (exit 2) if the KS distance exceeds this");
    compare->add_option("--moment-tol", cmp_moment_tol, "Fail (exit 2) if a relative moment delta exceeds this");

    // experiment
    auto* experiment = app.add_subcommand("experiment", "Builtin and file-based experiments");
    experiment->require_subcommand(1);
    auto* exp_list = experiment->add_subcommand("list", "List builtin experiments");
    std::string exp_name;
    std::string exp_config;
    std::string exp_out;
    std::string exp_seeds;
    std::optional<std::size_t> exp_n;
    auto* exp_run = experiment->add_subcommand("run", "Run a builtin or configured experiment (JSON report)");
    exp_run->add_option("name", exp_name, "Builtin experiment name");
    exp_run->add_option("--config", exp_config, "Experiment config JSON");
    exp_run->add_option("--out", exp_out, "Report path (default: config output or stdout)");
    exp_run->add_option("--seeds", exp_seeds, "Comma-separated replicate seeds");
    exp_run->add_option("--n", exp_n, "Override the ensemble size n");

    try {
        std::vector<std::string> args(argv, argv + argc);
        args = expand_config(std::move(args));
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(std::move(rev));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitPass : kExitConfig;
    } catch (const gs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        if (*trees) {
            Output out(trees_out);
            if (tree_k > tree_cap) {
                throw gs::SizeError("k = " + std::to_string(tree_k) + " exceeds the tree cap of " +
                                    std::to_string(tree_cap));
            }
            if (tree_format == "csv") out.stream() << "index,dyck,parents\n";
            std::size_t index = 0;
            gs::for_each_tree(tree_k, [&](const gs::RootedPlanarTree& t) {
                if (tree_format == "dyck") {
                    out.stream() << gs::tree_to_dyck(t).str() << '\n';
                } else if (tree_format == "parent") {
                    out.stream() << t.str() << '\n';
                } else {
                    out.stream() << index++ << ',' << gs::tree_to_dyck(t).str() << ',' << t.str() << '\n';
                }
            });
            return kExitPass;
        }
        if (*cutnorm) {
            if (cut_exact && cut_heuristic) throw gs::ConfigError("--exact and --heuristic are exclusive");
            const gs::StepGraphon w =
                gs::graphon_from_json(gs::read_json_file(cut_g.path, "graphon file")).refine(cut_g.panels);
            json j;
            if (!cut_against.empty()) {
                const gs::StepGraphon w2 = gs::load_graphon(cut_against).refine(cut_g.panels);
                const auto r = gs::cut_distance_upper(w, w2);
                j = {{"cut_distance_upper", r.value},
                     {"exhaustive_permutations", r.exhaustive_permutations},
                     {"exact_cut_norms", r.exact_cut_norms},
                     {"permutation", r.permutation}};
            } else {
                gs::CutNormOptions opt;
                opt.mode = cut_exact ? gs::CutNormMode::Exact
                                     : (cut_heuristic ? gs::CutNormMode::Heuristic : gs::CutNormMode::Auto);
                opt.restarts = cut_restarts;
                const auto r = gs::cut_norm(w, opt);
                j = {{"cut_norm", r.value}, {"exact", r.exact}, {"lower_bound", !r.exact}, {"blocks", w.blocks()}};
            }
            std::cout << j.dump(2) << '\n';
            return kExitPass;
        }
        if (*moments) {
            const gs::StepGraphon w = mom_g.load();
            Output out(mom_out);
            const gs::MomentTable t = mom_g.gram ? gs::gram_moments(mom_order, w, mom_g.aspect)
                                                 : gs::wigner_moments(mom_order, w);
            gs::write_moments_csv(out.stream(), t);
            return kExitPass;
        }
        if (*qve) {
            const gs::StepGraphon w = qve_g.load();
            const gs::cplx z(z_re, z_im);
            json j;
            if (qve_g.gram) {
                const auto sol = gs::solve_gram_qve(w, qve_g.aspect, z, qve_opt);
                j = {{"s_re", sol.s.real()}, {"s_im", sol.s.imag()}, {"residual", sol.residual},
                     {"iterations", sol.iterations}, {"gram", true}, {"aspect", sol.aspect}};
            } else {
                const auto sol = gs::solve_qve(w, z, qve_opt);
                j = {{"s_re", sol.s.real()}, {"s_im", sol.s.imag()}, {"residual", sol.residual},
                     {"iterations", sol.iterations}, {"gram", false}};
            }
            j["z_re"] = z_re;
            j["z_im"] = z_im;
            std::cout << j.dump(2) << '\n';
            return kExitPass;
        }
        if (*density) {
            const gs::StepGraphon w = den_g.load();
            const gs::DensityCurve c = gs::density_curve(w, emin, emax, points, eta, den_g.mode());
            Output out(den_out);
            gs::write_density_csv(out.stream(), c);
            for (const auto& p : c.points) {
                if (!p.converged) {
                    std::cerr << "error: QVE did not converge at E = " << p.energy << " (residual " << p.residual
                              << ")\n";
                    return kExitNonConvergence;
                }
            }
            return kExitPass;
        }
        if (*samplec) {
            gs::EnsembleSpec spec = gs::spec_from_json(gs::read_json_file(spec_path, "ensemble spec"));
            if (sample_seed) spec.seed = *sample_seed;
            if (sample_n) spec.n = *sample_n;
            const gs::EnsembleSample s = gs::sample(spec, gs::SampleOptions{false});
            gs::write_sample(sample_out, s);
            json j = {{"out", sample_out},
                      {"kind", gs::to_string(spec.kind)},
                      {"dimension", s.matrix.rows()},
                      {"normalization", s.normalization.formula},
                      {"divisor", s.normalization.divisor},
                      {"seed", spec.seed},
                      {"in_scope", s.in_scope}};
            if (!s.in_scope) j["scope_note"] = s.scope_note;
            std::cout << j.dump(2) << '\n';
            return kExitPass;
        }
        if (*esd) {
            const gs::SampleFile f = gs::read_sample(esd_in);
            const gs::Spectrum sp = gs::eigenvalues_symmetric(f.matrix);
            Output out(esd_out);
            gs::write_eigenvalues_csv(out.stream(), sp);
            return kExitPass;
        }
        if (*compare) {
            const gs::StepGraphon w = cmp_g.load();
            const gs::SampleFile f = gs::read_sample(cmp_in);
            Eigen::MatrixXd target = f.matrix;
            if (cmp_g.gram) {
                if (f.m == 0) throw gs::ConfigError("--gram needs a Gram sample (m > 0)");
                // H/sqrt(n+m) holds X/sqrt(n+m) in its top-right block
                const auto m = static_cast<Eigen::Index>(f.m);
                const auto n = static_cast<Eigen::Index>(f.n);
                const Eigen::MatrixXd x = f.matrix.topRightCorner(m, n);
                target = (static_cast<double>(f.n + f.m) / static_cast<double>(f.n)) * (x * x.transpose());
                if (cmp_g.aspect == 1.0) cmp_g.aspect = static_cast<double>(f.m) / static_cast<double>(f.n);
            }
            cmp_opt.gram = cmp_g.mode();
            const gs::PredictionSummary pred = gs::summarize_prediction(w, cmp_opt);
            if (!pred.qve_converged) throw gs::NonConvergenceError("QVE did not converge on the density grid", 0, 0);
            const gs::Spectrum sp = gs::eigenvalues_symmetric(target);
            const gs::CompareResult r = gs::compare_spectrum(sp, pred, cmp_opt);
            json j = gs::to_json(r);
            j["predicted_moments"] = gs::moments_json(pred.moments.entries);
            j["moment_source"] = gs::to_string(pred.moments.source);
            j["dimension"] = sp.size();
            bool pass = true;
            if (cmp_ks_tol && r.ks > *cmp_ks_tol) pass = false;
            if (cmp_moment_tol) {
                for (const auto& [k, v] : r.rel_delta) {
                    if (k >= 1 && v > *cmp_moment_tol) pass = false;
                }
            }
            j["pass"] = pass;
            std::cout << j.dump(2) << '\n';
            return pass ? kExitPass : kExitTolerance;
        }
        if (*exp_list) {
            for (const auto& c : gs::builtin_experiments()) std::cout << c.name << '\t' << c.description << '\n';
            return kExitPass;
        }
        if (*exp_run) {
            if (exp_name.empty() == exp_config.empty()) {
                throw gs::ConfigError("experiment run needs exactly one of a builtin name or --config");
            }
            gs::ExperimentConfig cfg = exp_config.empty() ? gs::builtin_experiment(exp_name)
                                                          : gs::load_experiment(exp_config);
            if (!exp_seeds.empty()) cfg.seeds = parse_seed_list(exp_seeds);
            if (exp_n) cfg.ensemble.n = *exp_n;
            if (!exp_out.empty()) cfg.report_path = exp_out;
            const json report = gs::run_experiment(cfg);
            Output out(cfg.report_path);
            out.stream() << report.dump(2) << '\n';
            return report["pass"].get<bool>() ? kExitPass : kExitTolerance;
        }
    } catch (const gs::NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNonConvergence;
    } catch (const gs::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitPass;
}
