#pragma once

// Quadratic vector equations for the limiting Stieltjes transform.
//
// Sign convention: s(z) = integral of 1/(z - x) dmu(x), so s maps the upper
// half plane into the lower one and Im a_i(z) < 0 for Im z > 0. (The QVE
// literature often uses the opposite sign.)
//
// For a step kernel the solution a(z, .) is constant on each block, so the
// block system below is exact:
//     1 / a_i = z - sum_j w_ij alpha_j a_j,      s = sum_i alpha_i a_i.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"
#include "graphon.hpp"
#include "homdensity.hpp"

namespace graphon_spectra {

using cplx = std::complex<double>;

struct QveOptions {
    double tol = 1e-12;
    std::size_t max_iter = 100000;
    double damping = 0.5;
};

struct QveSolution {
    cplx z;
    Eigen::VectorXcd a;  // per block
    cplx s;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
};

struct GramQveSolution {
    cplx z;
    Eigen::VectorXcd b;  // per left block
    cplx s;
    double residual = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double aspect = 1.0;
};

namespace detail {

inline void check_upper_half_plane(cplx z) {
    if (!(z.imag() > 0.0)) {
        throw DomainError("QVE requires Im z > 0 (got z = " + std::to_string(z.real()) + " + " +
                          std::to_string(z.imag()) + "i)");
    }
}

inline void check_options(const QveOptions& opt) {
    if (!(opt.tol > 0.0)) throw ValidationError("QVE tolerance must be positive");
    if (!(opt.damping > 0.0 && opt.damping <= 1.0)) throw ValidationError("QVE damping must lie in (0, 1]");
}

// Damped fixed point a <- (1 - theta) a + theta / (z - K a) without throwing.
inline QveSolution iterate_qve(const StepGraphon& w, cplx z, const QveOptions& opt,
                               const std::optional<Eigen::VectorXcd>& init) {
    check_upper_half_plane(z);
    check_options(opt);
    const auto d = static_cast<Eigen::Index>(w.blocks());
    const Eigen::MatrixXcd kernel = (w.weights() * w.fractions().asDiagonal()).cast<cplx>();
    QveSolution sol;
    sol.z = z;
    sol.a = init && init->size() == d ? *init : Eigen::VectorXcd::Constant(d, 1.0 / z);
    Eigen::VectorXcd ka(d);
    for (std::size_t it = 0;; ++it) {
        ka.noalias() = kernel * sol.a;
        const Eigen::VectorXcd denom = (-ka).array() + z;
        sol.residual = (sol.a.array() * denom.array() - 1.0).abs().maxCoeff();
        sol.iterations = it;
        if (sol.residual <= opt.tol) {
            sol.converged = true;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(sol.residual)) break;
        sol.a = (1.0 - opt.damping) * sol.a + opt.damping * denom.cwiseInverse();
    }
    sol.s = w.fractions().cast<cplx>().dot(sol.a);  // dot conjugates its first argument; fractions are real
    return sol;
}

inline GramQveSolution iterate_gram_qve(const StepGraphon& w, double y, cplx z, const QveOptions& opt,
                                        const std::optional<Eigen::VectorXcd>& init) {
    check_upper_half_plane(z);
    check_options(opt);
    const auto nl = static_cast<Eigen::Index>(bipartite_left_blocks(w, y));
    const auto d = static_cast<Eigen::Index>(w.blocks());
    const Eigen::Index nr = d - nl;
    const Eigen::VectorXd& f = w.fractions();
    // K_lr(u, v) = w_uv alpha_v,  K_rl(v, t) = w_vt alpha_t
    const Eigen::MatrixXcd k_lr = (w.weights().topRightCorner(nl, nr) * f.tail(nr).asDiagonal()).cast<cplx>();
    const Eigen::MatrixXcd k_rl = (w.weights().bottomLeftCorner(nr, nl) * f.head(nl).asDiagonal()).cast<cplx>();
    const double inv = 1.0 / (1.0 + y);

    GramQveSolution sol;
    sol.z = z;
    sol.aspect = y;
    sol.b = init && init->size() == nl ? *init : Eigen::VectorXcd::Constant(nl, 1.0 / z);
    for (std::size_t it = 0;; ++it) {
        // inner denominator per right block, then the outer integral per left block
        const Eigen::VectorXcd g = (-(k_rl * sol.b)).array() + inv;
        const Eigen::VectorXcd h = k_lr * g.cwiseInverse();
        const Eigen::VectorXcd denom = (-h).array() + z;
        sol.residual = (sol.b.array() * denom.array() - 1.0).abs().maxCoeff();
        sol.iterations = it;
        if (sol.residual <= opt.tol) {
            sol.converged = true;
            break;
        }
        if (it >= opt.max_iter || !std::isfinite(sol.residual)) break;
        sol.b = (1.0 - opt.damping) * sol.b + opt.damping * denom.cwiseInverse();
    }
    sol.s = (1.0 + y) / y * f.head(nl).cast<cplx>().dot(sol.b);
    return sol;
}

}  // namespace detail

/// Solves the block QVE at z by damped fixed-point iteration started from 1/z
/// (or from `init`, e.g. a neighbouring grid point). Throws NonConvergenceError
/// carrying the last residual when max_iter is exhausted.
inline QveSolution solve_qve(const StepGraphon& w, cplx z, const QveOptions& opt = {},
                             const std::optional<Eigen::VectorXcd>& init = std::nullopt) {
    QveSolution sol = detail::iterate_qve(w, z, opt, init);
    if (!sol.converged) {
        throw NonConvergenceError("QVE did not converge at z = " + std::to_string(z.real()) + " + " +
                                      std::to_string(z.imag()) + "i (residual " + std::to_string(sol.residual) + ")",
                                  sol.residual, sol.iterations);
    }
    return sol;
}

/// Gram-matrix QVE on the left blocks of a bipartite kernel split at y/(1+y):
///   s = (1+y)/y * sum_{u in L} alpha_u b_u,
///   1/b_u = z - sum_{v in R} w_uv alpha_v / ((1+y)^{-1} - sum_{t in L} w_vt alpha_t b_t).
inline GramQveSolution solve_gram_qve(const StepGraphon& w, double y, cplx z, const QveOptions& opt = {},
                                      const std::optional<Eigen::VectorXcd>& init = std::nullopt) {
    GramQveSolution sol = detail::iterate_gram_qve(w, y, z, opt, init);
    if (!sol.converged) {
        throw NonConvergenceError("Gram QVE did not converge at z = " + std::to_string(z.real()) + " + " +
                                      std::to_string(z.imag()) + "i (residual " + std::to_string(sol.residual) + ")",
                                  sol.residual, sol.iterations);
    }
    return sol;
}

/// Gram transform assembled from the Wigner-type QVE of the symmetrized kernel:
///   s(z) = (1/(2y)) sqrt((1+y)/z) m(sqrt(z/(1+y))) + (y-1)/(2yz),
/// with m the transform of H/sqrt(n+m) and the principal square root.
inline cplx gram_transform_from_symmetrization(const StepGraphon& w, double y, cplx z, const QveOptions& opt = {}) {
    bipartite_left_blocks(w, y);
    const cplx root = std::sqrt(z / (1.0 + y));
    const cplx m = solve_qve(w, root, opt).s;
    return m / (2.0 * y * root) + (y - 1.0) / (2.0 * y * z);
}

// ---------------------------------------------------------------------------
// Stieltjes inversion

struct DensityPoint {
    double energy = 0.0;
    double rho = 0.0;
    bool converged = true;
    double residual = 0.0;
    std::size_t iterations = 0;
};

struct DensityCurve {
    std::vector<DensityPoint> points;
    double eta = 0.0;

    bool all_converged() const {
        for (const auto& p : points) {
            if (!p.converged) return false;
        }
        return true;
    }

    /// Trapezoid integral of rho over the grid.
    double integral() const {
        double acc = 0.0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            acc += 0.5 * (points[i].rho + points[i - 1].rho) * (points[i].energy - points[i - 1].energy);
        }
        return acc;
    }
};

struct GramMode {
    bool enabled = false;
    double aspect = 1.0;
};

/// rho(E) = -Im s(E + i eta) / pi on a uniform grid. Each point is warm-started
/// from its left neighbour, so one sweep is inherently sequential. Points that
/// fail to converge are kept and annotated rather than aborting the sweep.
inline DensityCurve density_curve(const StepGraphon& w, double e_min, double e_max, std::size_t points, double eta,
                                  GramMode gram = {}, const QveOptions& opt = {}) {
    if (!(eta > 0.0)) throw DomainError("density smoothing eta must be positive");
    if (points < 2) throw ValidationError("density grid needs at least two points");
    if (!(e_max > e_min)) throw ValidationError("density grid needs e_max > e_min");
    DensityCurve curve;
    curve.eta = eta;
    curve.points.reserve(points);
    std::optional<Eigen::VectorXcd> warm;
    for (std::size_t k = 0; k < points; ++k) {
        const double e = e_min + (e_max - e_min) * static_cast<double>(k) / static_cast<double>(points - 1);
        const cplx z(e, eta);
        DensityPoint p;
        p.energy = e;
        cplx s;
        if (gram.enabled) {
            GramQveSolution sol = detail::iterate_gram_qve(w, gram.aspect, z, opt, warm);
            s = sol.s;
            p.converged = sol.converged;
            p.residual = sol.residual;
            p.iterations = sol.iterations;
            warm = sol.converged ? std::optional<Eigen::VectorXcd>(std::move(sol.b)) : std::nullopt;
        } else {
            QveSolution sol = detail::iterate_qve(w, z, opt, warm);
            s = sol.s;
            p.converged = sol.converged;
            p.residual = sol.residual;
            p.iterations = sol.iterations;
            warm = sol.converged ? std::optional<Eigen::VectorXcd>(std::move(sol.a)) : std::nullopt;
        }
        p.rho = std::max(0.0, -s.imag() / std::numbers::pi);
        curve.points.push_back(p);
    }
    return curve;
}

/// CDF of the eta-smoothed limiting measure, integrated from the inverted
/// density by the trapezoid rule. Mass left of the grid is taken from the
/// Cauchy tail eta / (pi (mean - E_left)).
class PredictedCdf {
public:
    PredictedCdf(const DensityCurve& curve, double mean) {
        if (curve.points.size() < 2) throw ValidationError("CDF needs at least two grid points");
        const double tail = curve.eta / (std::numbers::pi * std::max(mean - curve.points.front().energy, curve.eta));
        energy_.push_back(curve.points.front().energy);
        cdf_.push_back(tail);
        for (std::size_t i = 1; i < curve.points.size(); ++i) {
            const auto& a = curve.points[i - 1];
            const auto& b = curve.points[i];
            energy_.push_back(b.energy);
            cdf_.push_back(cdf_.back() + 0.5 * (a.rho + b.rho) * (b.energy - a.energy));
        }
    }

    double operator()(double x) const {
        if (x <= energy_.front()) return cdf_.front();
        if (x >= energy_.back()) return std::min(1.0, cdf_.back());
        const auto it = std::upper_bound(energy_.begin(), energy_.end(), x);
        const auto i = static_cast<std::size_t>(it - energy_.begin());
        const double t = (x - energy_[i - 1]) / (energy_[i] - energy_[i - 1]);
        return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
    }

    const std::vector<double>& energies() const noexcept { return energy_; }
    const std::vector<double>& values() const noexcept { return cdf_; }

private:
    std::vector<double> energy_;
    std::vector<double> cdf_;
};

/// Smoothed CDF over a grid wide enough for the support radius 2 sqrt(||W||_inf)
/// (Wigner) or (1+y)^2/y ||W||_inf (Gram).
inline PredictedCdf predicted_cdf(const StepGraphon& w, double eta, GramMode gram = {}, double step = 0.005,
                                  const QveOptions& opt = {}) {
    double lo = 0.0;
    double hi = 0.0;
    double mean = 0.0;
    if (gram.enabled) {
        const double y = gram.aspect;
        hi = (1.0 + y) * (1.0 + y) / y * w.sup_norm() + 1.0;
        lo = -1.0;
        mean = gram_moment(1, w, y);
    } else {
        hi = 2.0 * std::sqrt(w.sup_norm()) + 1.0;
        lo = -hi;
    }
    const auto points = static_cast<std::size_t>(std::ceil((hi - lo) / step)) + 1;
    return PredictedCdf(density_curve(w, lo, hi, points, eta, gram, opt), mean);
}

// ---------------------------------------------------------------------------
// Large-|z| series

/// beta_{2k} = sum_i alpha_i beta_{2k}(x in block i), orders 0..max_order.
inline MomentTable series_moments(const StepGraphon& w, int max_order, std::size_t cap = kDefaultTreeCap) {
    MomentTable table{{}, MomentSource::QveSeries, max_order};
    for (int k = 0; k <= max_order; ++k) {
        if (k % 2 == 1) {
            table.entries[k] = 0.0;
            continue;
        }
        table.entries[k] = w.fractions().dot(rooted_moment_vector(static_cast<std::size_t>(k / 2), w, cap).values);
    }
    return table;
}

struct SeriesTransform {
    Eigen::VectorXcd a;
    cplx s;
};

/// Partial sums a(z, x) = sum_{k <= max_half} beta_{2k}(x) / z^{2k+1}.
inline SeriesTransform series_transform(const StepGraphon& w, cplx z, std::size_t max_half,
                                        std::size_t cap = kDefaultTreeCap) {
    SeriesTransform out{Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(w.blocks())), 0.0};
    cplx zpow = 1.0 / z;
    const cplx z2 = 1.0 / (z * z);
    for (std::size_t k = 0; k <= max_half; ++k) {
        out.a += rooted_moment_vector(k, w, cap).values.cast<cplx>() * zpow;
        zpow *= z2;
    }
    out.s = w.fractions().cast<cplx>().dot(out.a);
    return out;
}

}  // namespace graphon_spectra
