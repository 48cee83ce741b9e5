#pragma once

// Tree homomorphism densities into step graphons and the moment formulas
// assembled from them: Wigner-type moments sum t(T, W) over all rooted planar
// trees with k edges; Gram moments rescale the same sum on the symmetrized kernel.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "rng.hpp"
#include "trees.hpp"

namespace graphon_spectra {

enum class MomentSource { TreeDensity, GramTreeDensity, Empirical, QveSeries };

inline std::string to_string(MomentSource s) {
    switch (s) {
        case MomentSource::TreeDensity: return "tree-density";
        case MomentSource::GramTreeDensity: return "gram-tree-density";
        case MomentSource::Empirical: return "empirical";
        case MomentSource::QveSeries: return "qve-series";
    }
    return "unknown";
}

/// Moments beta_k keyed by the moment order k.
struct MomentTable {
    std::map<int, double> entries;
    MomentSource source = MomentSource::TreeDensity;
    int max_order = 0;

    double at(int k) const { return entries.at(k); }
};

/// beta_{2k}(x) per block: entry i is the rooted moment for x in block i.
struct RootedMomentVector {
    std::size_t order = 0;  // half-index k
    Eigen::VectorXd values;
};

/// Bottom-up message passing over a tree in DFS order. Because parent[v] < v,
/// sweeping v = k..1 visits every child before its parent. The message of v in
/// block i is the product over children c of sum_j w_ij alpha_j message(c, j).
class TreeDensityEvaluator {
public:
    explicit TreeDensityEvaluator(const StepGraphon& w)
        : fractions_(w.fractions()), kernel_(w.weights() * w.fractions().asDiagonal()) {}

    const Eigen::MatrixXd& kernel() const noexcept { return kernel_; }
    const Eigen::VectorXd& fractions() const noexcept { return fractions_; }

    /// t_x(T, W) per block of x (root pinned).
    const Eigen::VectorXd& rooted(const RootedPlanarTree& t) {
        const std::size_t n = t.vertex_count();
        if (messages_.size() < n) messages_.resize(n);
        for (std::size_t v = 0; v < n; ++v) messages_[v].setOnes(fractions_.size());
        for (std::size_t v = n - 1; v >= 1; --v) {
            scratch_.noalias() = kernel_ * messages_[v];
            messages_[static_cast<std::size_t>(t.parent(v))].array() *= scratch_.array();
        }
        return messages_[0];
    }

    double density(const RootedPlanarTree& t) { return fractions_.dot(rooted(t)); }

    Eigen::VectorXd starred(const StarredTree& s) { return kernel_ * rooted(s.base); }

private:
    Eigen::VectorXd fractions_;
    Eigen::MatrixXd kernel_;  // W diag(alpha)
    std::vector<Eigen::VectorXd> messages_;
    Eigen::VectorXd scratch_;
};

inline double tree_density(const RootedPlanarTree& t, const StepGraphon& w) {
    TreeDensityEvaluator ev(w);
    return ev.density(t);
}

inline Eigen::VectorXd rooted_tree_density(const RootedPlanarTree& t, const StepGraphon& w) {
    TreeDensityEvaluator ev(w);
    return ev.rooted(t);
}

/// t_x(T*, W) with x the coordinate of the extra (labeled) vertex.
inline Eigen::VectorXd starred_density(const StarredTree& s, const StepGraphon& w) {
    TreeDensityEvaluator ev(w);
    return ev.starred(s);
}

namespace detail {

inline void check_cap(std::size_t k, std::size_t cap) {
    if (k > cap) {
        throw SizeError("moment half-order " + std::to_string(k) + " exceeds the tree cap of " + std::to_string(cap));
    }
}

}  // namespace detail

/// sum_j t_x(T_j^{k+1}, W) per block, over all C_k rooted planar trees (streamed).
inline RootedMomentVector rooted_moment_vector(std::size_t k, const StepGraphon& w,
                                               std::size_t cap = kDefaultTreeCap) {
    detail::check_cap(k, cap);
    TreeDensityEvaluator ev(w);
    RootedMomentVector out{k, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(w.blocks()))};
    for_each_tree(k, [&](const RootedPlanarTree& t) { out.values += ev.rooted(t); });
    return out;
}

/// The 2k-th moment: sum over the C_k rooted planar trees with k edges of t(T, W).
inline double wigner_moment(std::size_t k, const StepGraphon& w, std::size_t cap = kDefaultTreeCap) {
    detail::check_cap(k, cap);
    TreeDensityEvaluator ev(w);
    double sum = 0.0;
    for_each_tree(k, [&](const RootedPlanarTree& t) { sum += ev.density(t); });
    return sum;
}

/// Moments of orders 0..max_order; odd orders are exactly zero.
inline MomentTable wigner_moments(int max_order, const StepGraphon& w, std::size_t cap = kDefaultTreeCap) {
    MomentTable table{{}, MomentSource::TreeDensity, max_order};
    for (int k = 0; k <= max_order; ++k) {
        table.entries[k] = k % 2 == 1 ? 0.0 : wigner_moment(static_cast<std::size_t>(k / 2), w, cap);
    }
    return table;
}

// ---------------------------------------------------------------------------
// Bipartite (Gram) kernels

/// Number of blocks lying in [0, y/(1+y)]. Throws StructureError unless a block
/// boundary sits at y/(1+y) and W vanishes on both diagonal super-blocks.
inline std::size_t bipartite_left_blocks(const StepGraphon& w, double y) {
    if (!(y > 0.0) || !std::isfinite(y)) throw DomainError("aspect ratio y must be positive");
    const double split = y / (1.0 + y);
    const auto& b = w.boundaries();
    std::size_t left = 0;
    while (left < b.size() && b[left] < split - 1e-9) ++left;
    if (left >= b.size() - 1 || std::abs(b[left] - split) > 1e-9) {
        throw StructureError("no block boundary at y/(1+y) = " + std::to_string(split) +
                             "; the kernel is not bipartite at this aspect ratio");
    }
    const std::size_t nl = left + 1;
    const auto d = static_cast<Eigen::Index>(w.blocks());
    const auto L = static_cast<Eigen::Index>(nl);
    if (w.weights().topLeftCorner(L, L).cwiseAbs().maxCoeff() > 0.0 ||
        w.weights().bottomRightCorner(d - L, d - L).cwiseAbs().maxCoeff() > 0.0) {
        throw StructureError("kernel is not zero on the diagonal super-blocks [0,c]^2 and [c,1]^2");
    }
    return nl;
}

/// Step graphon of the symmetrized profile [[0, S], [S^T, 0]] for an m x n
/// Gram profile with aspect y = m/n. `left` and `right` are block measures
/// within each side (each summing to 1); S is left.size() x right.size().
inline StepGraphon symmetrized_graphon(const Eigen::VectorXd& left, const Eigen::VectorXd& right,
                                       const Eigen::MatrixXd& s, double y) {
    if (s.rows() != left.size() || s.cols() != right.size()) {
        throw ValidationError("Gram profile shape does not match its block measures");
    }
    const double c = y / (1.0 + y);
    const Eigen::Index dl = left.size();
    const Eigen::Index dr = right.size();
    Eigen::VectorXd f(dl + dr);
    f.head(dl) = c * left / left.sum();
    f.tail(dr) = (1.0 - c) * right / right.sum();
    f /= f.sum();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dl + dr, dl + dr);
    w.topRightCorner(dl, dr) = s;
    w.bottomLeftCorner(dr, dl) = s.transpose();
    return StepGraphon(std::move(f), std::move(w));
}

/// k-th moment of the Gram limit: (1+y)^{k+1}/(2y) * sum_j t(T_j^{k+1}, W).
inline double gram_moment(std::size_t k, const StepGraphon& w, double y, std::size_t cap = kDefaultTreeCap) {
    bipartite_left_blocks(w, y);
    if (k == 0) return 1.0;
    return std::pow(1.0 + y, static_cast<double>(k + 1)) / (2.0 * y) * wigner_moment(k, w, cap);
}

inline MomentTable gram_moments(int max_order, const StepGraphon& w, double y, std::size_t cap = kDefaultTreeCap) {
    MomentTable table{{}, MomentSource::GramTreeDensity, max_order};
    for (int k = 0; k <= max_order; ++k) table.entries[k] = gram_moment(static_cast<std::size_t>(k), w, y, cap);
    return table;
}

// ---------------------------------------------------------------------------
// Monte Carlo densities for non-step kernels

struct McEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

/// Sample mean of prod_{uv in E} W(x_u, x_v) over i.i.d. uniform coordinates.
/// Coordinates come from the counter RNG keyed by (seed, sample, vertex).
inline McEstimate mc_tree_density(const RootedPlanarTree& t, const AnalyticGraphon& w, std::size_t samples,
                                  std::uint64_t seed) {
    if (samples == 0) throw ValidationError("Monte Carlo needs at least one sample");
    const CounterRng rng(seed);
    std::vector<double> x(t.vertex_count());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < samples; ++s) {
        for (std::size_t v = 0; v < x.size(); ++v) x[v] = rng.uniform(s, v, 0);
        double prod = 1.0;
        for (std::size_t v = 1; v < x.size(); ++v) prod *= w(x[static_cast<std::size_t>(t.parent(v))], x[v]);
        // Welford update
        const double delta = prod - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (prod - mean);
    }
    const double var = samples > 1 ? m2 / static_cast<double>(samples - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(samples))};
}

}  // namespace graphon_spectra
