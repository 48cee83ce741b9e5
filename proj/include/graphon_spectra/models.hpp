#pragma once

// Samplers for the random matrix ensembles: Wigner-type matrices with a
// variance profile, generalized Wigner matrices, sparse W-random graphs, random
// block matrices, stochastic block models, inhomogeneous random graphs, and
// Gram matrices (through their symmetrization). Every entry is a pure function
// of (seed, i, j), so samples do not depend on traversal order or threading.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "homdensity.hpp"
#include "parallel.hpp"
#include "qve.hpp"
#include "rng.hpp"

namespace graphon_spectra {

// ---------------------------------------------------------------------------
// Entry distributions (mean 0, variance 1)

enum class EntryDist { Gaussian, Rademacher, UniformPm };

inline std::string to_string(EntryDist d) {
    switch (d) {
        case EntryDist::Gaussian: return "gaussian";
        case EntryDist::Rademacher: return "rademacher";
        case EntryDist::UniformPm: return "uniform-pm";
    }
    return "unknown";
}

inline EntryDist parse_entry_dist(std::string_view name) {
    if (name == "gaussian") return EntryDist::Gaussian;
    if (name == "rademacher") return EntryDist::Rademacher;
    if (name == "uniform-pm") return EntryDist::UniformPm;
    throw ValidationError("invalid distribution name '" + std::string(name) +
                          "' (expected gaussian, rademacher or uniform-pm)");
}

/// Almost-sure bound on |xi|; infinite for the Gaussian.
inline double entry_bound(EntryDist d) {
    switch (d) {
        case EntryDist::Gaussian: return std::numeric_limits<double>::infinity();
        case EntryDist::Rademacher: return 1.0;
        case EntryDist::UniformPm: return std::sqrt(3.0);
    }
    return std::numeric_limits<double>::infinity();
}

inline double draw_entry(const CounterRng& rng, EntryDist d, std::uint64_t i, std::uint64_t j, std::uint32_t stream) {
    switch (d) {
        case EntryDist::Gaussian: return rng.normal(i, j, stream);
        case EntryDist::Rademacher: return (rng.bits(i, j, stream)[0] & 1u) != 0 ? 1.0 : -1.0;
        case EntryDist::UniformPm: return (2.0 * rng.uniform(i, j, stream) - 1.0) * std::sqrt(3.0);
    }
    return 0.0;
}

/// The truncation sum (1/n^2) sum_ij E[x_ij^2 1(|x_ij| >= eta sqrt n)] for
/// x_ij = sqrt(s_ij) xi_ij with a bounded xi; zero once the bound is below eta sqrt n.
inline double lindeberg_truncation_sum(EntryDist d, double sup_variance, std::size_t n, double eta) {
    const double bound = entry_bound(d) * std::sqrt(sup_variance);
    if (!std::isfinite(bound)) throw DomainError("Lindeberg sum is only computed for bounded distributions");
    return bound < eta * std::sqrt(static_cast<double>(n)) ? 0.0 : sup_variance;
}

namespace stream {
inline constexpr std::uint32_t kEntry = 0;
inline constexpr std::uint32_t kLatent = 1;
inline constexpr std::uint32_t kEdge = 2;
inline constexpr std::uint32_t kAugmented = 3;
}  // namespace stream

// ---------------------------------------------------------------------------
// Specification and sample records

enum class EnsembleKind { WignerType, GeneralizedWigner, WRandomGraph, BlockMatrix, Sbm, InhomogeneousGraph, Gram };

inline std::string to_string(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::WignerType: return "wigner-type";
        case EnsembleKind::GeneralizedWigner: return "generalized-wigner";
        case EnsembleKind::WRandomGraph: return "w-random-graph";
        case EnsembleKind::BlockMatrix: return "block-matrix";
        case EnsembleKind::Sbm: return "sbm";
        case EnsembleKind::InhomogeneousGraph: return "inhomogeneous-graph";
        case EnsembleKind::Gram: return "gram";
    }
    return "unknown";
}

inline EnsembleKind parse_ensemble_kind(std::string_view name) {
    for (auto k : {EnsembleKind::WignerType, EnsembleKind::GeneralizedWigner, EnsembleKind::WRandomGraph,
                   EnsembleKind::BlockMatrix, EnsembleKind::Sbm, EnsembleKind::InhomogeneousGraph,
                   EnsembleKind::Gram}) {
        if (to_string(k) == name) return k;
    }
    throw ValidationError("unknown ensemble kind '" + std::string(name) + "'");
}

/// m x n Gram variance profile: block measures on each side and an m-side by
/// n-side weight matrix.
struct GramProfile {
    Eigen::VectorXd left;
    Eigen::VectorXd right;
    Eigen::MatrixXd weights;

    static GramProfile constant(double c) {
        return {Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, c)};
    }
};

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::WignerType;
    std::size_t n = 0;
    std::size_t m = 0;                        // gram: number of rows of X
    std::optional<StepGraphon> profile;       // wigner-type, generalized-wigner, gram (bipartite form)
    std::optional<AnalyticGraphon> graphon;   // w-random-graph
    std::optional<GramProfile> gram_profile;  // gram
    std::vector<std::size_t> sizes;           // block-matrix, sbm, inhomogeneous-graph
    Eigen::MatrixXd block_weights;            // variances (block-matrix) or probabilities (graphs)
    EntryDist dist = EntryDist::Gaussian;
    double sparsity = 1.0;                    // rho for w-random-graph
    std::uint64_t seed = 0;
};

struct Normalization {
    std::string formula;
    double divisor = 1.0;
};

struct NamedMatrix {
    std::string name;
    Normalization normalization;
    Eigen::MatrixXd matrix;
};

struct SampleOptions {
    bool variants = true;  // also build the auxiliary matrices (raw, centered, ...)
};

struct EnsembleSample {
    EnsembleSpec spec;
    Eigen::MatrixXd matrix;  // the normalized matrix the limit theorems speak about
    Normalization normalization;
    std::vector<NamedMatrix> variants;
    std::vector<double> latent;  // w-random-graph coordinates x_i
    bool in_scope = true;
    std::string scope_note;
    std::map<std::string, double> diagnostics;

    const NamedMatrix& variant(std::string_view name) const {
        for (const auto& v : variants) {
            if (v.name == name) return v;
        }
        throw ValidationError("sample has no variant '" + std::string(name) + "'");
    }
    bool has_variant(std::string_view name) const {
        return std::any_of(variants.begin(), variants.end(), [&](const NamedMatrix& v) { return v.name == name; });
    }
};

namespace detail {

inline std::vector<std::size_t> block_labels(const std::vector<std::size_t>& sizes) {
    std::vector<std::size_t> label;
    for (std::size_t b = 0; b < sizes.size(); ++b) label.insert(label.end(), sizes[b], b);
    return label;
}

// Block of each index i when the n indices sit at the midpoints (i + 1/2)/n.
inline std::vector<std::size_t> midpoint_labels(const StepGraphon& w, std::size_t n) {
    std::vector<std::size_t> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = w.block_of((static_cast<double>(i) + 0.5) / static_cast<double>(n));
    return label;
}

// Symmetric matrix with entry (i, j), i <= j, given by f(i, j); rows filled in parallel.
template <class F>
Eigen::MatrixXd symmetric_fill(std::size_t n, F&& f) {
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(nn, nn);
    parallel_for(n, [&](std::size_t j) {
        for (std::size_t i = 0; i <= j; ++i) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f(i, j);
        }
    });
    for (Eigen::Index j = 0; j < nn; ++j) {
        for (Eigen::Index i = j + 1; i < nn; ++i) a(i, j) = a(j, i);
    }
    return a;
}

inline void check_sizes(const std::vector<std::size_t>& sizes, const Eigen::MatrixXd& w, std::size_t n,
                        const char* what) {
    if (sizes.empty()) throw ValidationError(std::string(what) + " needs at least one block");
    if (static_cast<Eigen::Index>(sizes.size()) != w.rows() || w.rows() != w.cols()) {
        throw ValidationError(std::string(what) + ": weight matrix must be d x d for d block sizes");
    }
    std::size_t total = 0;
    for (std::size_t s : sizes) {
        if (s == 0) throw ValidationError(std::string(what) + ": block sizes must be >= 1");
        total += s;
    }
    if (n != 0 && total != n) {
        throw SizeError(std::string(what) + ": block sizes sum to " + std::to_string(total) + ", expected n = " +
                        std::to_string(n));
    }
    if ((w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw ValidationError(std::string(what) + ": weight matrix must be symmetric");
    }
}

inline void check_probabilities(const Eigen::MatrixXd& p) {
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            if (!(p(i, j) >= 0.0 && p(i, j) <= 1.0)) {
                throw ValidationError("edge probability out of range [0,1] at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
        }
    }
}

inline Eigen::VectorXd fractions_of(const std::vector<std::size_t>& sizes) {
    Eigen::VectorXd f(static_cast<Eigen::Index>(sizes.size()));
    double total = 0.0;
    for (std::size_t s : sizes) total += static_cast<double>(s);
    for (std::size_t b = 0; b < sizes.size(); ++b) f[static_cast<Eigen::Index>(b)] = static_cast<double>(sizes[b]) / total;
    return f;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wigner-type and block matrices

namespace detail {

inline EnsembleSample wigner_from_labels(EnsembleSpec spec, const std::vector<std::size_t>& label,
                                         const Eigen::MatrixXd& variances) {
    const std::size_t n = label.size();
    const CounterRng rng(spec.seed);
    const double scale = std::sqrt(static_cast<double>(n));
    EnsembleSample out;
    out.matrix = symmetric_fill(n, [&](std::size_t i, std::size_t j) {
        const double v = variances(static_cast<Eigen::Index>(label[i]), static_cast<Eigen::Index>(label[j]));
        if (v == 0.0) return 0.0;
        return std::sqrt(v) * draw_entry(rng, spec.dist, i, j, stream::kEntry) / scale;
    });
    out.normalization = {"A/sqrt(n)", scale};
    out.spec = std::move(spec);
    return out;
}

}  // namespace detail

/// Wigner-type matrix with variance profile S evaluated at the index midpoints,
/// normalized as A/sqrt(n). The diagonal carries its profile variance.
inline EnsembleSample sample_wigner_type(const StepGraphon& s, std::size_t n, EntryDist dist, std::uint64_t seed) {
    if (n == 0) throw ValidationError("matrix dimension must be >= 1");
    if (s.sign() == KernelSign::Signed && s.weights().minCoeff() < 0.0) {
        throw ValidationError("variance profile entries must be non-negative");
    }
    EnsembleSpec spec;
    spec.kind = EnsembleKind::WignerType;
    spec.n = n;
    spec.profile = s;
    spec.dist = dist;
    spec.seed = seed;
    return detail::wigner_from_labels(std::move(spec), detail::midpoint_labels(s, n), s.weights());
}

/// Explicit n x n variance profile.
inline EnsembleSample sample_wigner_type(const Eigen::MatrixXd& profile, EntryDist dist, std::uint64_t seed) {
    return sample_wigner_type(from_variance_profile(profile), static_cast<std::size_t>(profile.rows()), dist, seed);
}

/// As sample_wigner_type, after checking that the profile rows average to one.
inline EnsembleSample sample_generalized_wigner(const StepGraphon& s, std::size_t n, EntryDist dist,
                                                std::uint64_t seed) {
    const Eigen::VectorXd deg = degree_function(s);
    const double dev = (deg.array() - 1.0).abs().maxCoeff();
    if (dev > 0.01) {
        throw ValidationError("generalized Wigner profile is not stochastic: max |degree - 1| = " +
                              std::to_string(dev) + " > 0.01");
    }
    EnsembleSample out = sample_wigner_type(s, n, dist, seed);
    out.spec.kind = EnsembleKind::GeneralizedWigner;
    out.diagnostics["degree_deviation"] = dev;
    return out;
}

/// Random block matrix: entries in block (k, l) have variance S_kl; A/sqrt(n).
inline EnsembleSample sample_block_matrix(const std::vector<std::size_t>& sizes, const Eigen::MatrixXd& s,
                                          EntryDist dist, std::uint64_t seed, std::size_t n = 0) {
    detail::check_sizes(sizes, s, n, "block matrix");
    if (s.minCoeff() < 0.0) throw ValidationError("block variances must be non-negative");
    EnsembleSpec spec;
    spec.kind = EnsembleKind::BlockMatrix;
    spec.sizes = sizes;
    spec.block_weights = s;
    spec.dist = dist;
    spec.seed = seed;
    const auto label = detail::block_labels(sizes);
    spec.n = label.size();
    return detail::wigner_from_labels(std::move(spec), label, s);
}

// ---------------------------------------------------------------------------
// Random graphs

/// Sparse W-random graph: latent x_i uniform, edges with probability rho W(x_i, x_j),
/// zero diagonal. Primary matrix A/sqrt(n rho); variants "adjacency" (raw) and
/// "centered" = (A - E[A | x])/sqrt(n rho).
inline EnsembleSample sample_w_random_graph(const AnalyticGraphon& w, std::size_t n, double rho, std::uint64_t seed,
                                            const SampleOptions& opt = {}) {
    if (n == 0) throw ValidationError("graph size must be >= 1");
    if (!(rho >= 0.0) || rho * w.sup() > 1.0) {
        throw ValidationError("sparsity out of range: need 0 <= rho * sup W <= 1 (rho = " + std::to_string(rho) +
                              ", sup W = " + std::to_string(w.sup()) + ")");
    }
    const CounterRng rng(seed);
    EnsembleSample out;
    out.spec.kind = EnsembleKind::WRandomGraph;
    out.spec.n = n;
    out.spec.graphon = w;
    out.spec.sparsity = rho;
    out.spec.seed = seed;
    out.latent.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.latent[i] = rng.uniform(i, 0, stream::kLatent);

    const Eigen::MatrixXd adj = detail::symmetric_fill(n, [&](std::size_t i, std::size_t j) {
        if (i == j) return 0.0;
        const double p = rho * w(out.latent[i], out.latent[j]);
        return rng.uniform(i, j, stream::kEdge) < p ? 1.0 : 0.0;
    });
    const double nrho = static_cast<double>(n) * rho;
    const double divisor = rho > 0.0 ? std::sqrt(nrho) : 1.0;
    out.matrix = adj / divisor;
    out.normalization = {rho > 0.0 ? "A/sqrt(n rho)" : "A (rho = 0)", divisor};
    if (opt.variants) {
        Eigen::MatrixXd centered = adj;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                if (i != j) {
                    centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -=
                        rho * w(out.latent[i], out.latent[j]);
                }
            }
        }
        out.variants.push_back({"adjacency", {"A", 1.0}, adj});
        out.variants.push_back({"centered", {"(A - E[A|x])/sqrt(n rho)", divisor}, centered / divisor});
    }
    if (nrho < 10.0) {
        out.in_scope = false;
        out.scope_note = "outside theorem scope: n rho = " + std::to_string(nrho) + " < 10";
    }
    return out;
}

namespace detail {

inline Eigen::MatrixXd block_expectation(const std::vector<std::size_t>& label, const Eigen::MatrixXd& p,
                                         bool zero_diagonal) {
    const auto n = static_cast<Eigen::Index>(label.size());
    Eigen::MatrixXd e(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = 0; i < n; ++i) {
            e(i, j) = p(static_cast<Eigen::Index>(label[static_cast<std::size_t>(i)]),
                        static_cast<Eigen::Index>(label[static_cast<std::size_t>(j)]));
        }
        if (zero_diagonal) e(j, j) = 0.0;
    }
    return e;
}

inline Eigen::MatrixXd block_adjacency(const std::vector<std::size_t>& label, const Eigen::MatrixXd& p,
                                       const CounterRng& rng) {
    return symmetric_fill(label.size(), [&](std::size_t i, std::size_t j) {
        if (i == j) return 0.0;
        const double q = p(static_cast<Eigen::Index>(label[i]), static_cast<Eigen::Index>(label[j]));
        return rng.uniform(i, j, stream::kEdge) < q ? 1.0 : 0.0;
    });
}

}  // namespace detail

/// Stochastic block model with zero diagonal. With p = max P and sigma^2 = p(1-p)
/// the primary matrix is A/(sigma sqrt n). Variants: "adjacency", "centered"
/// (A - EA)/(sigma sqrt n), "augmented" (A with a Bernoulli(p_kk) diagonal)/(sigma sqrt n)
/// and "augmented-centered" (A~ - EA~)/(sigma sqrt n), where rank EA~ <= d.
inline EnsembleSample sample_sbm(const std::vector<std::size_t>& sizes, const Eigen::MatrixXd& p, std::uint64_t seed,
                                 const SampleOptions& opt = {}, std::size_t n = 0) {
    detail::check_sizes(sizes, p, n, "SBM");
    detail::check_probabilities(p);
    const auto label = detail::block_labels(sizes);
    const std::size_t nn = label.size();
    const CounterRng rng(seed);
    EnsembleSample out;
    out.spec.kind = EnsembleKind::Sbm;
    out.spec.n = nn;
    out.spec.sizes = sizes;
    out.spec.block_weights = p;
    out.spec.seed = seed;

    const Eigen::MatrixXd adj = detail::block_adjacency(label, p, rng);
    const double pmax = p.maxCoeff();
    const double sigma = std::sqrt(pmax * (1.0 - pmax));
    const double divisor = sigma > 0.0 ? sigma * std::sqrt(static_cast<double>(nn)) : 1.0;
    out.matrix = adj / divisor;
    out.normalization = {sigma > 0.0 ? "A/(sigma sqrt n)" : "A (sigma = 0)", divisor};
    out.diagnostics["p"] = pmax;
    out.diagnostics["sigma"] = sigma;
    if (opt.variants) {
        const Eigen::MatrixXd ea = detail::block_expectation(label, p, true);
        Eigen::MatrixXd aug = adj;
        for (std::size_t i = 0; i < nn; ++i) {
            const double q = p(static_cast<Eigen::Index>(label[i]), static_cast<Eigen::Index>(label[i]));
            aug(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
                rng.uniform(i, i, stream::kAugmented) < q ? 1.0 : 0.0;
        }
        const Eigen::MatrixXd eaug = detail::block_expectation(label, p, false);
        out.variants.push_back({"adjacency", {"A", 1.0}, adj});
        out.variants.push_back({"centered", {"(A - EA)/(sigma sqrt n)", divisor}, (adj - ea) / divisor});
        out.variants.push_back({"mean", {"EA/(sigma sqrt n)", divisor}, ea / divisor});
        out.variants.push_back({"augmented", {"A~/(sigma sqrt n)", divisor}, aug / divisor});
        out.variants.push_back(
            {"augmented-centered", {"(A~ - EA~)/(sigma sqrt n)", divisor}, (aug - eaug) / divisor});
    }
    const double np = static_cast<double>(nn) * pmax;
    if (np < 10.0) {
        out.in_scope = false;
        out.scope_note = "outside theorem scope: n p = " + std::to_string(np) + " < 10";
    }
    return out;
}

/// Inhomogeneous Erdos-Renyi graph with block-constant p_ij and roughly equal
/// expected degrees n alpha. Primary A/sqrt(n alpha), where alpha is the mean
/// expected degree over n; rows outside the relative `band` are rejected.
inline EnsembleSample sample_inhomogeneous_graph(const std::vector<std::size_t>& sizes, const Eigen::MatrixXd& p,
                                                 std::uint64_t seed, const SampleOptions& opt = {},
                                                 double band = 0.05, std::size_t n = 0) {
    detail::check_sizes(sizes, p, n, "inhomogeneous graph");
    detail::check_probabilities(p);
    const auto label = detail::block_labels(sizes);
    const std::size_t nn = label.size();
    // expected degree of a vertex in block k (zero diagonal)
    Eigen::VectorXd degree = Eigen::VectorXd::Zero(p.rows());
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
        for (Eigen::Index l = 0; l < p.cols(); ++l) degree[k] += p(k, l) * static_cast<double>(sizes[static_cast<std::size_t>(l)]);
        degree[k] -= p(k, k);
    }
    double mean_degree = 0.0;
    for (std::size_t i = 0; i < nn; ++i) mean_degree += degree[static_cast<Eigen::Index>(label[i])];
    mean_degree /= static_cast<double>(nn);
    if (!(mean_degree > 0.0)) throw ValidationError("inhomogeneous graph has no expected edges");
    const double alpha = mean_degree / static_cast<double>(nn);
    const double dev = (degree.array() / mean_degree - 1.0).abs().maxCoeff();
    if (dev > band) {
        throw ValidationError("expected degrees are not roughly equal: max relative deviation " + std::to_string(dev) +
                              " exceeds the band " + std::to_string(band));
    }
    const CounterRng rng(seed);
    EnsembleSample out;
    out.spec.kind = EnsembleKind::InhomogeneousGraph;
    out.spec.n = nn;
    out.spec.sizes = sizes;
    out.spec.block_weights = p;
    out.spec.seed = seed;
    const Eigen::MatrixXd adj = detail::block_adjacency(label, p, rng);
    const double divisor = std::sqrt(static_cast<double>(nn) * alpha);
    out.matrix = adj / divisor;
    out.normalization = {"A/sqrt(n alpha)", divisor};
    out.diagnostics["alpha"] = alpha;
    out.diagnostics["degree_deviation"] = dev;
    if (opt.variants) {
        out.variants.push_back({"adjacency", {"A", 1.0}, adj});
        out.variants.push_back({"centered",
                                {"(A - EA)/sqrt(n alpha)", divisor},
                                (adj - detail::block_expectation(label, p, true)) / divisor});
    }
    if (mean_degree < 10.0) {
        out.in_scope = false;
        out.scope_note = "outside theorem scope: n alpha = " + std::to_string(mean_degree) + " < 10";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Gram matrices

/// Symmetrized step graphon of a Gram profile at aspect y = m/n.
inline StepGraphon gram_graphon(const GramProfile& g, double y) {
    return symmetrized_graphon(g.left, g.right, g.weights, y);
}

/// X is m x n with Var(x_ij) read from the bipartite graphon at the midpoints of
/// the (m + n)-point grid (rows first). Primary matrix H/sqrt(n + m) with
/// H = [0 X; X^T 0]; variant "gram" = X X^T / n.
inline EnsembleSample sample_gram(std::size_t m, std::size_t n, const StepGraphon& bipartite, EntryDist dist,
                                  std::uint64_t seed, const SampleOptions& opt = {}) {
    if (m == 0 || n == 0) throw ValidationError("Gram sizes m and n must be >= 1");
    const double y = static_cast<double>(m) / static_cast<double>(n);
    bipartite_left_blocks(bipartite, y);
    const std::size_t total = m + n;
    const auto label = detail::midpoint_labels(bipartite, total);
    const CounterRng rng(seed);
    const auto mm = static_cast<Eigen::Index>(m);
    const auto nn = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd x(mm, nn);
    parallel_for(n, [&](std::size_t j) {
        for (std::size_t i = 0; i < m; ++i) {
            const double v = bipartite.weights()(static_cast<Eigen::Index>(label[i]),
                                                 static_cast<Eigen::Index>(label[m + j]));
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                v == 0.0 ? 0.0 : std::sqrt(v) * draw_entry(rng, dist, i, j, stream::kEntry);
        }
    });
    EnsembleSample out;
    out.spec.kind = EnsembleKind::Gram;
    out.spec.n = n;
    out.spec.m = m;
    out.spec.profile = bipartite;
    out.spec.dist = dist;
    out.spec.seed = seed;
    const double divisor = std::sqrt(static_cast<double>(total));
    out.matrix = Eigen::MatrixXd::Zero(mm + nn, mm + nn);
    out.matrix.topRightCorner(mm, nn) = x / divisor;
    out.matrix.bottomLeftCorner(nn, mm) = x.transpose() / divisor;
    out.normalization = {"H/sqrt(n + m)", divisor};
    if (opt.variants) {
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(mm, mm);
        gram.selfadjointView<Eigen::Lower>().rankUpdate(x, 1.0 / static_cast<double>(n));
        gram = gram.selfadjointView<Eigen::Lower>();
        out.variants.push_back({"gram", {"X X^T / n", static_cast<double>(n)}, std::move(gram)});
        out.variants.push_back({"x", {"X", 1.0}, std::move(x)});
    }
    out.diagnostics["aspect"] = y;
    return out;
}

inline EnsembleSample sample_gram(std::size_t m, std::size_t n, const GramProfile& g, EntryDist dist,
                                  std::uint64_t seed, const SampleOptions& opt = {}) {
    if (m == 0 || n == 0) throw ValidationError("Gram sizes m and n must be >= 1");
    EnsembleSample out =
        sample_gram(m, n, gram_graphon(g, static_cast<double>(m) / static_cast<double>(n)), dist, seed, opt);
    out.spec.gram_profile = g;
    return out;
}

// ---------------------------------------------------------------------------
// Dispatch and predictions

inline EnsembleSample sample(const EnsembleSpec& spec, const SampleOptions& opt = {}) {
    EnsembleSample out;
    switch (spec.kind) {
        case EnsembleKind::WignerType:
        case EnsembleKind::GeneralizedWigner:
            if (!spec.profile) throw ValidationError(to_string(spec.kind) + " spec needs a profile graphon");
            out = spec.kind == EnsembleKind::WignerType ? sample_wigner_type(*spec.profile, spec.n, spec.dist, spec.seed)
                                                        : sample_generalized_wigner(*spec.profile, spec.n, spec.dist,
                                                                                    spec.seed);
            break;
        case EnsembleKind::WRandomGraph:
            if (!spec.graphon) throw ValidationError("w-random-graph spec needs a graphon");
            out = sample_w_random_graph(*spec.graphon, spec.n, spec.sparsity, spec.seed, opt);
            break;
        case EnsembleKind::BlockMatrix:
            out = sample_block_matrix(spec.sizes, spec.block_weights, spec.dist, spec.seed, spec.n);
            break;
        case EnsembleKind::Sbm: out = sample_sbm(spec.sizes, spec.block_weights, spec.seed, opt, spec.n); break;
        case EnsembleKind::InhomogeneousGraph:
            out = sample_inhomogeneous_graph(spec.sizes, spec.block_weights, spec.seed, opt, 0.05, spec.n);
            break;
        case EnsembleKind::Gram:
            if (spec.gram_profile) {
                out = sample_gram(spec.m, spec.n, *spec.gram_profile, spec.dist, spec.seed, opt);
            } else if (spec.profile) {
                out = sample_gram(spec.m, spec.n, *spec.profile, spec.dist, spec.seed, opt);
            } else {
                throw ValidationError("gram spec needs a gram_profile or a bipartite profile graphon");
            }
            break;
    }
    out.spec = spec;
    return out;
}

/// The step graphon whose limit law the primary matrix of `spec` is compared
/// against, together with the Gram flag for the QVE.
struct Prediction {
    StepGraphon graphon = StepGraphon::constant(1.0);
    GramMode gram;
    std::size_t refinement = 0;  // panels used for non-step kernels, 0 if exact
};

inline Prediction prediction_for(const EnsembleSpec& spec, std::size_t panels = 256) {
    Prediction pr;
    switch (spec.kind) {
        case EnsembleKind::WignerType:
        case EnsembleKind::GeneralizedWigner:
            if (!spec.profile) throw ValidationError("spec needs a profile graphon");
            pr.graphon = *spec.profile;
            break;
        case EnsembleKind::WRandomGraph:
            if (!spec.graphon) throw ValidationError("spec needs a graphon");
            pr.graphon = spec.graphon->refine(panels);
            if (spec.graphon->kind() != AnalyticGraphon::Kind::Step &&
                spec.graphon->kind() != AnalyticGraphon::Kind::Constant) {
                pr.refinement = panels;
            }
            break;
        case EnsembleKind::BlockMatrix:
            pr.graphon = StepGraphon(detail::fractions_of(spec.sizes), spec.block_weights);
            break;
        case EnsembleKind::Sbm: {
            const double pmax = spec.block_weights.maxCoeff();
            const double s2 = pmax * (1.0 - pmax);
            if (!(s2 > 0.0)) throw DomainError("SBM with sigma = 0 has no variance profile");
            const Eigen::MatrixXd v = spec.block_weights.array() * (1.0 - spec.block_weights.array()) / s2;
            pr.graphon = StepGraphon(detail::fractions_of(spec.sizes), v);
            break;
        }
        case EnsembleKind::InhomogeneousGraph: {
            const auto f = detail::fractions_of(spec.sizes);
            const double alpha = f.dot(spec.block_weights * f);
            // finite-n variance p(1-p); tends to P / alpha as p -> 0
            const Eigen::MatrixXd v = spec.block_weights.array() * (1.0 - spec.block_weights.array()) / alpha;
            pr.graphon = StepGraphon(f, v);
            break;
        }
        case EnsembleKind::Gram: {
            const double y = static_cast<double>(spec.m) / static_cast<double>(spec.n);
            pr.graphon = spec.gram_profile ? gram_graphon(*spec.gram_profile, y) : *spec.profile;
            pr.gram = {true, y};
            break;
        }
    }
    return pr;
}

// ---------------------------------------------------------------------------
// Growing numbers of blocks

/// alpha_i = C / gamma^i, i = 1..count, with C chosen so the infinite series sums
/// to `total` (C = total (gamma - 1)). Requires gamma > 1.
inline std::vector<double> geometric_fractions(double gamma, std::size_t count, double total = 1.0) {
    if (!(gamma > 1.0)) throw DomainError("geometric block fractions need gamma > 1");
    if (!(total > 0.0 && total <= 1.0)) throw DomainError("total block mass must be in (0, 1]");
    std::vector<double> a(count);
    const double c = total * (gamma - 1.0);
    double g = 1.0;
    for (std::size_t i = 0; i < count; ++i) {
        g *= gamma;
        a[i] = c / g;
    }
    return a;
}

struct BlockDesign {
    std::vector<std::size_t> sizes;
    Eigen::MatrixXd weights;   // d x d per-class variances (or probabilities)
    std::size_t big_classes = 0;
    StepGraphon limit = StepGraphon::constant(1.0);  // limiting step graphon
};

/// Class sizes n_i = floor(n alpha_i), alpha_i = C / gamma^i, generated until
/// n_i = 0. With total = 1 the last class takes the remainder (case 1); with
/// total < 1 the remainder is split into `small_classes` near-equal small classes
/// (case 2). Variances: big(k, l) between big classes, big_small(k) between big
/// class k and any small class, s0 between two small classes (the diagonal
/// small blocks use s0 too).
inline BlockDesign growing_block_design(std::size_t n, double gamma, double total, std::size_t small_classes,
                                        const std::function<double(std::size_t, std::size_t)>& big,
                                        const std::function<double(std::size_t)>& big_small, double s0) {
    if (n == 0) throw ValidationError("design needs n >= 1");
    BlockDesign d;
    std::size_t used = 0;
    for (std::size_t i = 1;; ++i) {
        const double a = total * (gamma - 1.0) / std::pow(gamma, static_cast<double>(i));
        const auto ni = static_cast<std::size_t>(std::floor(static_cast<double>(n) * a));
        if (ni == 0 || used + ni > n) break;
        d.sizes.push_back(ni);
        used += ni;
    }
    d.big_classes = d.sizes.size();
    const std::size_t rest = n - used;
    if (total >= 1.0) {
        if (rest > 0) d.sizes.push_back(rest);
    } else {
        if (small_classes == 0) throw ValidationError("case (2) design needs at least one small class");
        const std::size_t k = std::min(small_classes, rest);
        for (std::size_t c = 0; c < k; ++c) d.sizes.push_back(rest / k + (c < rest % k ? 1 : 0));
    }
    const std::size_t nd = d.sizes.size();
    const auto dd = static_cast<Eigen::Index>(nd);
    d.weights.resize(dd, dd);
    const bool case1 = total >= 1.0;
    for (std::size_t k = 0; k < nd; ++k) {
        for (std::size_t l = 0; l < nd; ++l) {
            const bool kb = k < d.big_classes || case1;
            const bool lb = l < d.big_classes || case1;
            double v = s0;
            if (kb && lb) v = big(k, l);
            else if (kb) v = big_small(k);
            else if (lb) v = big_small(l);
            d.weights(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
        }
    }

    // limit: the geometric classes up to a 1e-12 tail (absorbed by the last one)
    // and, in case 2, one block of mass 1 - total carrying s0 / big_small
    std::vector<double> frac;
    double acc = 0.0;
    for (std::size_t i = 1; total - acc > 1e-12 * total && i < 2000; ++i) {
        const double a = total * (gamma - 1.0) / std::pow(gamma, static_cast<double>(i));
        frac.push_back(a);
        acc += a;
    }
    frac.back() += total - acc;
    const std::size_t kb = frac.size();
    const std::size_t kl = case1 ? kb : kb + 1;
    Eigen::VectorXd f(static_cast<Eigen::Index>(kl));
    for (std::size_t i = 0; i < kb; ++i) f[static_cast<Eigen::Index>(i)] = frac[i];
    if (!case1) f[static_cast<Eigen::Index>(kb)] = 1.0 - total;
    Eigen::MatrixXd w(static_cast<Eigen::Index>(kl), static_cast<Eigen::Index>(kl));
    for (std::size_t k = 0; k < kl; ++k) {
        for (std::size_t l = 0; l < kl; ++l) {
            double v = s0;
            if (k < kb && l < kb) v = big(k, l);
            else if (k < kb) v = big_small(k);
            else if (l < kb) v = big_small(l);
            w(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) = v;
        }
    }
    f /= f.sum();
    d.limit = StepGraphon(std::move(f), std::move(w));
    return d;
}

}  // namespace graphon_spectra
