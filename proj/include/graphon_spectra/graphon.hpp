#pragma once

// Step graphons (piecewise-constant symmetric kernels), a closed catalog of
// analytic kernels, and cut-norm / cut-distance computations.

#include <Eigen/Dense>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "rng.hpp"

namespace graphon_spectra {

enum class KernelSign { NonNegative, Signed };

/// W(x, y) = weights(k, l) on I_k x I_l, where the I_k are consecutive
/// right-open intervals of lengths fractions(k) (the last one closed at 1).
class StepGraphon {
public:
    StepGraphon(Eigen::VectorXd fractions, Eigen::MatrixXd weights, KernelSign sign = KernelSign::NonNegative)
        : fractions_(std::move(fractions)), weights_(std::move(weights)), sign_(sign) {
        validate();
        boundaries_.resize(static_cast<std::size_t>(fractions_.size()));
        double acc = 0.0;
        for (Eigen::Index k = 0; k < fractions_.size(); ++k) {
            acc += fractions_(k);
            boundaries_[static_cast<std::size_t>(k)] = acc;
        }
    }

    StepGraphon(const std::vector<double>& fractions, Eigen::MatrixXd weights,
                KernelSign sign = KernelSign::NonNegative)
        : StepGraphon(Eigen::Map<const Eigen::VectorXd>(fractions.data(), static_cast<Eigen::Index>(fractions.size())),
                      std::move(weights), sign) {}

    static StepGraphon constant(double c) {
        return StepGraphon(Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Constant(1, 1, c),
                           c < 0 ? KernelSign::Signed : KernelSign::NonNegative);
    }

    /// d equal blocks of measure 1/d.
    static StepGraphon equal_blocks(Eigen::MatrixXd weights, KernelSign sign = KernelSign::NonNegative) {
        const Eigen::Index d = weights.rows();
        return StepGraphon(Eigen::VectorXd::Constant(d, 1.0 / static_cast<double>(d)), std::move(weights), sign);
    }

    std::size_t blocks() const noexcept { return static_cast<std::size_t>(fractions_.size()); }
    const Eigen::VectorXd& fractions() const noexcept { return fractions_; }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    KernelSign sign() const noexcept { return sign_; }

    /// ||W||_inf, the largest |entry|.
    double sup_norm() const { return weights_.cwiseAbs().maxCoeff(); }

    /// Right endpoints of the block intervals (the last is 1 up to rounding).
    const std::vector<double>& boundaries() const noexcept { return boundaries_; }

    std::size_t block_of(double x) const {
        if (!(x >= 0.0 && x <= 1.0)) {
            throw DomainError("graphon coordinate " + std::to_string(x) + " outside [0,1]");
        }
        auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), x);
        const auto k = static_cast<std::size_t>(it - boundaries_.begin());
        return std::min(k, blocks() - 1);
    }

    double operator()(double x, double y) const {
        return weights_(static_cast<Eigen::Index>(block_of(x)), static_cast<Eigen::Index>(block_of(y)));
    }

    /// Reorders the block intervals: block i of the result is block perm[i] of *this.
    StepGraphon permuted(const std::vector<std::size_t>& perm) const {
        const auto d = static_cast<Eigen::Index>(blocks());
        Eigen::VectorXd f(d);
        Eigen::MatrixXd w(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            f(i) = fractions_(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]));
            for (Eigen::Index j = 0; j < d; ++j) {
                w(i, j) = weights_(static_cast<Eigen::Index>(perm[static_cast<std::size_t>(i)]),
                                   static_cast<Eigen::Index>(perm[static_cast<std::size_t>(j)]));
            }
        }
        return StepGraphon(std::move(f), std::move(w), sign_);
    }

    StepGraphon scaled(double c) const {
        return StepGraphon(fractions_, weights_ * c, c < 0 ? KernelSign::Signed : sign_);
    }

private:
    void validate() const {
        const Eigen::Index d = fractions_.size();
        if (d == 0) throw ValidationError("step graphon needs at least one block");
        if (weights_.rows() != d || weights_.cols() != d) {
            throw ValidationError("weight matrix is " + std::to_string(weights_.rows()) + "x" +
                                  std::to_string(weights_.cols()) + " but there are " + std::to_string(d) +
                                  " block fractions");
        }
        for (Eigen::Index k = 0; k < d; ++k) {
            if (!(fractions_(k) > 0.0) || !std::isfinite(fractions_(k))) {
                throw ValidationError("block fraction " + std::to_string(k) + " must be positive");
            }
        }
        if (std::abs(fractions_.sum() - 1.0) > 1e-12) {
            throw ValidationError("block fractions sum to " + std::to_string(fractions_.sum()) + ", not 1");
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) {
                const double w = weights_(i, j);
                if (!std::isfinite(w)) throw ValidationError("weight matrix has a non-finite entry");
                if (sign_ == KernelSign::NonNegative && w < 0.0) {
                    throw ValidationError("graphon weights must be non-negative");
                }
                if (std::abs(w - weights_(j, i)) > 1e-12) {
                    throw ValidationError("weight matrix is not symmetric at (" + std::to_string(i) + "," +
                                          std::to_string(j) + ")");
                }
            }
        }
    }

    Eigen::VectorXd fractions_;
    Eigen::MatrixXd weights_;
    KernelSign sign_;
    std::vector<double> boundaries_;
};

/// Closed catalog of kernels on [0,1]^2 that are not step functions.
class AnalyticGraphon {
public:
    enum class Kind { Constant, Product, Min, Max, Step };

    static AnalyticGraphon constant(double c) { return AnalyticGraphon(Kind::Constant, c); }
    static AnalyticGraphon product(double scale = 1.0) { return AnalyticGraphon(Kind::Product, scale); }
    static AnalyticGraphon min(double scale = 1.0) { return AnalyticGraphon(Kind::Min, scale); }
    static AnalyticGraphon max(double scale = 1.0) { return AnalyticGraphon(Kind::Max, scale); }
    static AnalyticGraphon step(StepGraphon w) {
        AnalyticGraphon g(Kind::Step, 1.0);
        g.step_ = std::move(w);
        return g;
    }

    Kind kind() const noexcept { return kind_; }
    double scale() const noexcept { return scale_; }
    const std::optional<StepGraphon>& step_graphon() const noexcept { return step_; }

    std::string name() const {
        switch (kind_) {
            case Kind::Constant: return "constant";
            case Kind::Product: return "product";
            case Kind::Min: return "min";
            case Kind::Max: return "max";
            case Kind::Step: return "step";
        }
        return "unknown";
    }

    double operator()(double x, double y) const {
        if (!(x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0)) {
            throw DomainError("graphon coordinate outside [0,1]");
        }
        switch (kind_) {
            case Kind::Constant: return scale_;
            case Kind::Product: return scale_ * x * y;
            case Kind::Min: return scale_ * std::min(x, y);
            case Kind::Max: return scale_ * std::max(x, y);
            case Kind::Step: return (*step_)(x, y);
        }
        return 0.0;
    }

    double sup() const {
        if (kind_ == Kind::Step) return step_->sup_norm();
        return std::abs(scale_);
    }

    /// Midpoint-rule step approximation on `panels` equal blocks. Step kernels
    /// and constants are returned exactly.
    StepGraphon refine(std::size_t panels = 256) const {
        if (kind_ == Kind::Step) return *step_;
        if (kind_ == Kind::Constant) return StepGraphon::constant(scale_);
        if (panels == 0) throw ValidationError("refinement needs at least one panel");
        const auto d = static_cast<Eigen::Index>(panels);
        Eigen::MatrixXd w(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            const double x = (static_cast<double>(i) + 0.5) / static_cast<double>(d);
            for (Eigen::Index j = 0; j < d; ++j) {
                const double y = (static_cast<double>(j) + 0.5) / static_cast<double>(d);
                w(i, j) = (*this)(x, y);
            }
        }
        return StepGraphon::equal_blocks(std::move(w), scale_ < 0 ? KernelSign::Signed : KernelSign::NonNegative);
    }

private:
    AnalyticGraphon(Kind kind, double scale) : kind_(kind), scale_(scale) {
        if (!std::isfinite(scale)) throw ValidationError("graphon scale must be finite");
    }

    Kind kind_;
    double scale_;
    std::optional<StepGraphon> step_;
};

/// Graphon representation of a finite variance profile: n blocks of measure 1/n.
inline StepGraphon from_variance_profile(const Eigen::MatrixXd& s) {
    if (s.rows() != s.cols() || s.rows() == 0) throw ValidationError("variance profile must be square and non-empty");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
        for (Eigen::Index j = 0; j < s.cols(); ++j) {
            if (!std::isfinite(s(i, j)) || s(i, j) < 0.0) {
                throw ValidationError("variance profile entries must be finite and non-negative");
            }
            if (std::abs(s(i, j) - s(j, i)) > 1e-9 * scale) {
                throw ValidationError("variance profile is not symmetric at (" + std::to_string(i) + "," +
                                      std::to_string(j) + ")");
            }
        }
    }
    Eigen::MatrixXd sym = 0.5 * (s + s.transpose());
    return StepGraphon::equal_blocks(std::move(sym));
}

/// Entry i = integral of W(x, y) dy for x in block i.
inline Eigen::VectorXd degree_function(const StepGraphon& w) { return w.weights() * w.fractions(); }

// ---------------------------------------------------------------------------
// Cut norm

enum class CutNormMode { Auto, Exact, Heuristic };

struct CutNormOptions {
    CutNormMode mode = CutNormMode::Auto;
    std::size_t exact_cap = 16;
    std::size_t restarts = 64;
    std::uint64_t seed = 0x5eed;
};

struct CutNormResult {
    double value = 0.0;
    bool exact = true;  // false: certified lower bound from alternating maximization
    std::vector<bool> rows;  // maximizing S as a block indicator
    std::vector<bool> cols;  // maximizing T
};

namespace detail {

// value of max_t |s^T M t| over t in {0,1}^d given r = s^T M
inline double best_column_response(const Eigen::VectorXd& r, std::vector<bool>* t) {
    double pos = 0.0;
    double neg = 0.0;
    for (Eigen::Index j = 0; j < r.size(); ++j) {
        if (r(j) > 0) pos += r(j);
        else neg -= r(j);
    }
    if (t) {
        t->assign(static_cast<std::size_t>(r.size()), false);
        for (Eigen::Index j = 0; j < r.size(); ++j) {
            (*t)[static_cast<std::size_t>(j)] = pos >= neg ? r(j) > 0 : r(j) < 0;
        }
    }
    return std::max(pos, neg);
}

inline CutNormResult cut_norm_exact(const Eigen::MatrixXd& m) {
    const auto d = static_cast<std::size_t>(m.rows());
    CutNormResult best;
    best.rows.assign(d, false);
    best.cols.assign(d, false);
    Eigen::VectorXd r = Eigen::VectorXd::Zero(m.rows());
    std::vector<bool> s(d, false);
    std::uint64_t best_mask = 0;
    std::uint64_t mask = 0;
    const std::uint64_t total = std::uint64_t{1} << d;
    // Gray-code walk over all row subsets; r = s^T M is updated one row at a time.
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto b = static_cast<std::size_t>(std::countr_zero(g));
        mask ^= std::uint64_t{1} << b;
        if (mask & (std::uint64_t{1} << b)) r += m.row(static_cast<Eigen::Index>(b)).transpose();
        else r -= m.row(static_cast<Eigen::Index>(b)).transpose();
        const double v = best_column_response(r, nullptr);
        if (v > best.value) {
            best.value = v;
            best_mask = mask;
        }
    }
    Eigen::VectorXd rb = Eigen::VectorXd::Zero(m.rows());
    for (std::size_t i = 0; i < d; ++i) {
        if (best_mask & (std::uint64_t{1} << i)) {
            best.rows[i] = true;
            rb += m.row(static_cast<Eigen::Index>(i)).transpose();
        }
    }
    best_column_response(rb, &best.cols);
    best.exact = true;
    return best;
}

inline CutNormResult cut_norm_alternating(const Eigen::MatrixXd& m, std::size_t restarts, std::uint64_t seed) {
    const Eigen::Index d = m.rows();
    CutNormResult best;
    best.exact = false;
    best.rows.assign(static_cast<std::size_t>(d), false);
    best.cols.assign(static_cast<std::size_t>(d), false);
    const CounterRng rng(seed);
    for (std::size_t rep = 0; rep < std::max<std::size_t>(restarts, 1); ++rep) {
        for (double sgn : {1.0, -1.0}) {
            Eigen::VectorXd s(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                s(i) = rng.uniform(rep, static_cast<std::uint64_t>(i), sgn > 0 ? 0 : 1) < 0.5 ? 1.0 : 0.0;
            }
            Eigen::VectorXd t(d);
            double value = -1.0;
            for (int iter = 0; iter < 1000; ++iter) {
                const Eigen::VectorXd r = sgn * (m.transpose() * s);
                for (Eigen::Index j = 0; j < d; ++j) t(j) = r(j) > 0 ? 1.0 : 0.0;
                const Eigen::VectorXd q = sgn * (m * t);
                for (Eigen::Index i = 0; i < d; ++i) s(i) = q(i) > 0 ? 1.0 : 0.0;
                const double nv = sgn * s.dot(m * t);
                if (nv <= value + 1e-15) break;
                value = nv;
            }
            value = std::abs(s.dot(m * t));
            if (value > best.value) {
                best.value = value;
                for (Eigen::Index i = 0; i < d; ++i) {
                    best.rows[static_cast<std::size_t>(i)] = s(i) > 0;
                    best.cols[static_cast<std::size_t>(i)] = t(i) > 0;
                }
            }
        }
    }
    return best;
}

}  // namespace detail

/// sup over measurable S, T of |integral over S x T of W|. Accepts signed kernels.
/// The bilinear form over [0,1]^d x [0,1]^d attains its maximum at vertices, so
/// the exact mode enumerates row subsets and answers columns greedily by sign.
inline CutNormResult cut_norm(const StepGraphon& w, const CutNormOptions& opt = {}) {
    const auto& a = w.fractions();
    const Eigen::MatrixXd m = a.asDiagonal() * w.weights() * a.asDiagonal();
    bool exact = opt.mode == CutNormMode::Exact || (opt.mode == CutNormMode::Auto && w.blocks() <= opt.exact_cap);
    if (exact && w.blocks() > opt.exact_cap) {
        throw SizeError("exact cut norm requested for " + std::to_string(w.blocks()) +
                        " blocks; the exact-mode cap is " + std::to_string(opt.exact_cap));
    }
    if (exact && w.blocks() > 62) throw SizeError("exact cut norm limited to 62 blocks");
    return exact ? detail::cut_norm_exact(m) : detail::cut_norm_alternating(m, opt.restarts, opt.seed);
}

/// Both kernels restated on the common refinement of their block partitions.
struct CommonRefinement {
    Eigen::VectorXd fractions;
    Eigen::MatrixXd first;
    Eigen::MatrixXd second;
};

inline CommonRefinement common_refinement(const StepGraphon& a, const StepGraphon& b) {
    std::vector<double> cuts;
    for (double x : a.boundaries()) cuts.push_back(x);
    for (double x : b.boundaries()) cuts.push_back(x);
    std::sort(cuts.begin(), cuts.end());
    // boundaries closer than 1e-13 are the same cut (rounding in cumulative sums)
    std::vector<double> merged;
    for (double c : cuts) {
        if (merged.empty() || c - merged.back() > 1e-13) merged.push_back(c);
    }
    merged.back() = 1.0;
    const auto r = static_cast<Eigen::Index>(merged.size());
    CommonRefinement out{Eigen::VectorXd(r), Eigen::MatrixXd(r, r), Eigen::MatrixXd(r, r)};
    std::vector<std::size_t> ia(merged.size());
    std::vector<std::size_t> ib(merged.size());
    double prev = 0.0;
    for (std::size_t k = 0; k < merged.size(); ++k) {
        out.fractions(static_cast<Eigen::Index>(k)) = merged[k] - prev;
        const double mid = 0.5 * (prev + merged[k]);
        ia[k] = a.block_of(mid);
        ib[k] = b.block_of(mid);
        prev = merged[k];
    }
    out.fractions /= out.fractions.sum();
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < r; ++j) {
            out.first(i, j) = a.weights()(static_cast<Eigen::Index>(ia[static_cast<std::size_t>(i)]),
                                          static_cast<Eigen::Index>(ia[static_cast<std::size_t>(j)]));
            out.second(i, j) = b.weights()(static_cast<Eigen::Index>(ib[static_cast<std::size_t>(i)]),
                                           static_cast<Eigen::Index>(ib[static_cast<std::size_t>(j)]));
        }
    }
    return out;
}

/// ||W1 - W2||_cut evaluated on the common refinement. When the refinement is
/// too fine for exact enumeration, the L1 norm is returned instead (flagged),
/// which still bounds the cut norm from above.
struct CutDistanceResult {
    double value = 0.0;
    bool exhaustive_permutations = true;
    bool exact_cut_norms = true;
    std::vector<std::size_t> permutation;  // block order of W1 achieving value
};

namespace detail {

inline std::pair<double, bool> cut_norm_upper(const StepGraphon& a, const StepGraphon& b, std::size_t exact_cap) {
    const CommonRefinement cr = common_refinement(a, b);
    const Eigen::MatrixXd diff = cr.first - cr.second;
    if (static_cast<std::size_t>(cr.fractions.size()) <= exact_cap) {
        const Eigen::MatrixXd m = cr.fractions.asDiagonal() * diff * cr.fractions.asDiagonal();
        return {cut_norm_exact(m).value, true};
    }
    const double l1 = (cr.fractions.asDiagonal() * diff.cwiseAbs() * cr.fractions.asDiagonal()).sum();
    return {l1, false};
}

}  // namespace detail

/// Upper bound on the cut distance: minimum over block permutations of W1
/// (exhaustive for at most `exact_perm_cap` blocks, otherwise a degree-sorted
/// greedy alignment) of the cut norm of W1^sigma - W2.
inline CutDistanceResult cut_distance_upper(const StepGraphon& w1, const StepGraphon& w2,
                                            std::size_t exact_perm_cap = 8, std::size_t exact_cut_cap = 16) {
    CutDistanceResult best;
    best.value = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> perm(w1.blocks());
    std::iota(perm.begin(), perm.end(), 0);

    auto consider = [&](const std::vector<std::size_t>& p) {
        const auto [v, exact] = detail::cut_norm_upper(w1.permuted(p), w2, exact_cut_cap);
        if (v < best.value) {
            best.value = v;
            best.permutation = p;
            best.exact_cut_norms = exact;
        }
    };

    if (w1.blocks() <= exact_perm_cap) {
        do {
            consider(perm);
        } while (std::next_permutation(perm.begin(), perm.end()));
        best.exhaustive_permutations = true;
    } else {
        consider(perm);
        // greedy alignment: W1's k-th lowest-degree block goes where W2 has its
        // k-th lowest-degree block (positional when the block counts differ)
        auto rank = [](const Eigen::VectorXd& deg) {
            std::vector<std::size_t> idx(static_cast<std::size_t>(deg.size()));
            std::iota(idx.begin(), idx.end(), 0);
            std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
                return deg(static_cast<Eigen::Index>(i)) < deg(static_cast<Eigen::Index>(j));
            });
            return idx;
        };
        const std::vector<std::size_t> r1 = rank(degree_function(w1));
        consider(r1);
        if (w1.blocks() == w2.blocks()) {
            const std::vector<std::size_t> r2 = rank(degree_function(w2));
            std::vector<std::size_t> aligned(w1.blocks());
            for (std::size_t k = 0; k < r1.size(); ++k) aligned[r2[k]] = r1[k];
            consider(aligned);
        }
        best.exhaustive_permutations = false;
    }
    return best;
}

}  // namespace graphon_spectra
