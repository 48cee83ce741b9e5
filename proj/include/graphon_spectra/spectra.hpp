#pragma once

// Empirical spectra: a dense symmetric eigensolver (Householder
// tridiagonalization + implicit-shift QL), ESD moments, empirical Stieltjes
// transforms, histograms, and Kolmogorov / Levy distances between ESDs.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "error.hpp"
#include "homdensity.hpp"
#include "qve.hpp"
#include "rng.hpp"

namespace graphon_spectra {

inline constexpr std::size_t kDefaultDenseCap = 8192;

struct Spectrum {
    std::vector<double> eigenvalues;  // ascending
    std::string source;
    double certificate_residual = 0.0;  // max ||A v - lambda v|| over spot-checked pairs

    std::size_t size() const noexcept { return eigenvalues.size(); }

    static Spectrum from_values(std::vector<double> values, std::string source = {}) {
        std::sort(values.begin(), values.end());
        return Spectrum{std::move(values), std::move(source), 0.0};
    }
};

/// Induced infinity norm (max absolute row sum).
inline double inf_norm(const Eigen::MatrixXd& a) {
    return a.rows() == 0 ? 0.0 : a.cwiseAbs().rowwise().sum().maxCoeff();
}

namespace detail {

struct Tridiagonal {
    std::vector<double> diag;
    std::vector<double> off;  // off[i] couples i and i+1
};

// Householder reduction of the lower triangle of `a` (modified in place). On
// return the reflector of step k is stored below the subdiagonal of column k
// with an implicit unit leading entry, and tau[k] holds its scale. The rank-2
// update of step k is fused with the symmetric product B v of step k+1, so the
// trailing block is streamed once per step.
inline Tridiagonal householder_tridiagonalize(Eigen::MatrixXd& a, std::vector<double>& tau) {
    const Eigen::Index n = a.rows();
    Tridiagonal t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.off.resize(n > 0 ? static_cast<std::size_t>(n - 1) : 0);
    tau.assign(t.off.size(), 0.0);
    const auto un = static_cast<std::size_t>(n);
    std::vector<double> v(un), p(un), vn(un), pn(un);

    // Builds the reflector annihilating column k below the subdiagonal.
    auto reflect = [&](Eigen::Index k, std::vector<double>& vk) {
        const Eigen::Index m = n - k - 1;
        double* x = &a(k + 1, k);
        double xnorm2 = 0.0;
        for (Eigen::Index i = 1; i < m; ++i) xnorm2 += x[i] * x[i];
        const auto uk = static_cast<std::size_t>(k);
        t.diag[uk] = a(k, k);
        if (xnorm2 == 0.0) {
            t.off[uk] = x[0];
            tau[uk] = 0.0;
            return 0.0;
        }
        const double alpha = x[0];
        const double beta = -std::copysign(std::sqrt(alpha * alpha + xnorm2), alpha);
        const double scale = 1.0 / (alpha - beta);
        vk[0] = 1.0;
        for (Eigen::Index i = 1; i < m; ++i) {
            x[i] *= scale;
            vk[static_cast<std::size_t>(i)] = x[i];
        }
        x[0] = beta;
        t.off[uk] = beta;
        tau[uk] = (beta - alpha) / beta;
        return tau[uk];
    };

    // p = B v over the lower triangle of the trailing block starting at k+1.
    auto symv = [&](Eigen::Index k, const std::vector<double>& vk, std::vector<double>& pk) {
        const Eigen::Index m = n - k - 1;
        std::fill(pk.begin(), pk.begin() + m, 0.0);
        for (Eigen::Index j = 0; j < m; ++j) {
            const double* col = &a(k + 1 + j, k + 1 + j);
            const double vj = vk[static_cast<std::size_t>(j)];
            double* pj = pk.data() + j;
            const double* vv = vk.data() + j;
            const Eigen::Index len = m - j;
            const Eigen::Map<const Eigen::VectorXd> c(col + 1, len - 1);
            const double dot = c.dot(Eigen::Map<const Eigen::VectorXd>(vv + 1, len - 1));
            Eigen::Map<Eigen::VectorXd>(pj + 1, len - 1) += c * vj;
            pj[0] += col[0] * vj + dot;
        }
    };

    double tk = n > 2 ? reflect(0, v) : 0.0;
    bool p_ready = false;
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        const Eigen::Index m = n - k - 1;
        const bool has_next = k + 3 < n;
        if (tk == 0.0) {
            if (has_next) tk = reflect(k + 1, v);
            p_ready = false;
            continue;
        }
        if (!p_ready) symv(k, v, p);

        // w = tau p - (tau^2/2)(p.v) v, stored in p
        double pv = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            p[static_cast<std::size_t>(i)] *= tk;
            pv += p[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
        }
        const double half = 0.5 * tk * pv;
        for (Eigen::Index i = 0; i < m; ++i) p[static_cast<std::size_t>(i)] -= half * v[static_cast<std::size_t>(i)];

        // B -= v w^T + w v^T: first column, then the next reflector, then the
        // remaining columns together with the next product
        {
            double* col = &a(k + 1, k + 1);
            const double v0 = v[0];
            const double w0 = p[0];
            for (Eigen::Index r = 0; r < m; ++r) {
                col[r] -= v[static_cast<std::size_t>(r)] * w0 + p[static_cast<std::size_t>(r)] * v0;
            }
        }
        const double tnext = has_next ? reflect(k + 1, vn) : 0.0;
        const bool fuse = tnext != 0.0;
        if (fuse) std::fill(pn.begin(), pn.begin() + (m - 1), 0.0);
        for (Eigen::Index j = 1; j < m; ++j) {
            double* col = &a(k + 1 + j, k + 1 + j);
            const double vj = v[static_cast<std::size_t>(j)];
            const double wj = p[static_cast<std::size_t>(j)];
            const double* vv = v.data() + j;
            const double* ww = p.data() + j;
            const Eigen::Index len = m - j;
            if (!fuse) {
                Eigen::Map<Eigen::VectorXd>(col, len) -=
                    Eigen::Map<const Eigen::VectorXd>(vv, len) * wj + Eigen::Map<const Eigen::VectorXd>(ww, len) * vj;
                continue;
            }
            const Eigen::Index jj = j - 1;
            const double vnj = vn[static_cast<std::size_t>(jj)];
            double* pj = pn.data() + jj;
            const double* vnn = vn.data() + jj;
            Eigen::Map<Eigen::VectorXd> c(col, len);
            c -= Eigen::Map<const Eigen::VectorXd>(vv, len) * wj + Eigen::Map<const Eigen::VectorXd>(ww, len) * vj;
            const double dot = c.tail(len - 1).dot(Eigen::Map<const Eigen::VectorXd>(vnn + 1, len - 1));
            Eigen::Map<Eigen::VectorXd>(pj + 1, len - 1) += c.tail(len - 1) * vnj;
            pj[0] += c[0] * vnj + dot;
        }
        std::swap(v, vn);
        std::swap(p, pn);
        tk = tnext;
        p_ready = fuse;
    }
    if (n >= 2) {
        t.diag[static_cast<std::size_t>(n - 2)] = a(n - 2, n - 2);
        t.off[static_cast<std::size_t>(n - 2)] = a(n - 1, n - 2);
    }
    if (n >= 1) t.diag[static_cast<std::size_t>(n - 1)] = a(n - 1, n - 1);
    return t;
}

// Eigenvalues of a symmetric tridiagonal matrix by QL with implicit Wilkinson shifts.
inline std::vector<double> tridiagonal_eigenvalues(Tridiagonal t) {
    const std::size_t n = t.diag.size();
    std::vector<double>& d = t.diag;
    std::vector<double> e(n, 0.0);
    std::copy(t.off.begin(), t.off.end(), e.begin());
    constexpr double eps = std::numeric_limits<double>::epsilon();
    // absolute floor for the split test; zero diagonal pairs (isolated graph
    // vertices) would otherwise never deflate
    double tnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]));
    const double floor = eps * tnorm;

    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m = l;
        do {
            // look for a negligible off-diagonal element to split the matrix
            for (m = l; m + 1 < n; ++m) {
                const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= floor) break;
            }
            if (m == l) break;
            if (++iter > 60) {
                throw NonConvergenceError("tridiagonal QL iteration did not converge", std::abs(e[l]),
                                          static_cast<std::size_t>(iter));
            }
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::hypot(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            double p = 0.0;
            bool underflow = false;
            for (std::size_t i = m; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::hypot(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Eigenvector of the tridiagonal matrix for eigenvalue lambda by inverse
// iteration with a partially pivoted LU of (T - lambda I).
inline std::vector<double> tridiagonal_eigenvector(const Tridiagonal& t, double lambda, std::uint64_t seed) {
    const std::size_t n = t.diag.size();
    std::vector<double> x(n);
    if (n == 1) return {1.0};
    double tnorm = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = std::abs(t.diag[i]);
        if (i > 0) row += std::abs(t.off[i - 1]);
        if (i + 1 < n) row += std::abs(t.off[i]);
        tnorm = std::max(tnorm, row);
    }
    const double tiny = std::max(tnorm, 1.0) * std::numeric_limits<double>::epsilon();
    // LU of (T - lambda I) with row interchanges: U has up to two superdiagonals
    std::vector<double> u0(n), u1(n, 0.0), u2(n, 0.0), lmul(n, 0.0);
    std::vector<bool> swapped(n, false);
    std::vector<double> diag(n), sub(n - 1), sup(n - 1);
    for (std::size_t i = 0; i < n; ++i) diag[i] = t.diag[i] - lambda;
    for (std::size_t i = 0; i + 1 < n; ++i) sub[i] = sup[i] = t.off[i];
    // working rows: current row i has entries (a_i at i, b_i at i+1, c_i at i+2)
    double a = diag[0];
    double b = sup[0];
    double c = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double below_a = sub[i];
        const double below_b = diag[i + 1];
        const double below_c = i + 2 < n ? sup[i + 1] : 0.0;
        if (std::abs(a) >= std::abs(below_a)) {
            const double piv = a == 0.0 ? tiny : a;
            const double l = below_a / piv;
            u0[i] = piv;
            u1[i] = b;
            u2[i] = c;
            lmul[i] = l;
            a = below_b - l * b;
            b = below_c - l * c;
            c = 0.0;
        } else {
            const double l = a / below_a;
            u0[i] = below_a;
            u1[i] = below_b;
            u2[i] = below_c;
            lmul[i] = l;
            swapped[i] = true;
            const double na = b - l * below_b;
            const double nb = c - l * below_c;
            a = na;
            b = nb;
            c = 0.0;
        }
    }
    u0[n - 1] = a == 0.0 ? tiny : a;
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(u0[i]) < tiny) u0[i] = std::copysign(tiny, u0[i] == 0.0 ? 1.0 : u0[i]);
    }

    const CounterRng rng(seed);
    for (std::size_t i = 0; i < n; ++i) x[i] = rng.uniform(i, 0, 7) - 0.5;
    for (int sweep = 0; sweep < 3; ++sweep) {
        // forward: apply L^{-1} with the recorded interchanges
        for (std::size_t i = 0; i + 1 < n; ++i) {
            if (swapped[i]) std::swap(x[i], x[i + 1]);
            x[i + 1] -= lmul[i] * x[i];
        }
        // back substitution with U
        for (std::size_t i = n; i-- > 0;) {
            double acc = x[i];
            if (i + 1 < n) acc -= u1[i] * x[i + 1];
            if (i + 2 < n) acc -= u2[i] * x[i + 2];
            x[i] = acc / u0[i];
        }
        double norm = 0.0;
        for (double xi : x) norm += xi * xi;
        norm = std::sqrt(norm);
        for (double& xi : x) xi /= norm;
    }
    return x;
}

}  // namespace detail

struct EigenOptions {
    std::size_t dimension_cap = kDefaultDenseCap;
    std::size_t spot_checks = 10;
    std::uint64_t seed = 0xe16e;
};

/// All eigenvalues of a dense real symmetric matrix, ascending. The result is
/// certified by residuals ||A v - lambda v|| <= 1e-8 n ||A||_inf for a handful
/// of eigenpairs (vectors by inverse iteration, back-transformed).
inline Spectrum eigenvalues_symmetric(const Eigen::MatrixXd& a, const EigenOptions& opt = {}) {
    if (a.rows() != a.cols()) throw ValidationError("eigenvalues_symmetric needs a square matrix");
    const auto n = static_cast<std::size_t>(a.rows());
    if (n > opt.dimension_cap) {
        throw SizeError("matrix dimension " + std::to_string(n) + " exceeds the dense cap of " +
                        std::to_string(opt.dimension_cap));
    }
    Spectrum sp;
    if (n == 0) return sp;
    const double norm = inf_norm(a);
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
            if (std::abs(a(i, j) - a(j, i)) > 1e-9 * norm) {
                throw ValidationError("matrix is not symmetric at (" + std::to_string(i) + "," + std::to_string(j) +
                                      ")");
            }
        }
    }
    Eigen::MatrixXd work = a;
    std::vector<double> tau;
    const detail::Tridiagonal tri = detail::householder_tridiagonalize(work, tau);
    sp.eigenvalues = detail::tridiagonal_eigenvalues(tri);

    // spot-check certificate
    const CounterRng rng(opt.seed);
    const std::size_t checks = std::min(opt.spot_checks, n);
    double worst = 0.0;
    for (std::size_t c = 0; c < checks; ++c) {
        const auto idx = static_cast<std::size_t>(rng.uniform(c, n, 3) * static_cast<double>(n)) % n;
        const double lambda = sp.eigenvalues[idx];
        std::vector<double> x = detail::tridiagonal_eigenvector(tri, lambda, opt.seed + c);
        Eigen::VectorXd v = Eigen::Map<Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n));
        // v <- H_0 H_1 ... H_{n-3} v
        for (std::size_t k = tau.size(); k-- > 0;) {
            if (tau[k] == 0.0 || k + 2 > n) continue;
            const auto kk = static_cast<Eigen::Index>(k);
            const Eigen::Index m = static_cast<Eigen::Index>(n) - kk - 1;
            double dot = v(kk + 1);
            for (Eigen::Index i = 1; i < m; ++i) dot += work(kk + 1 + i, kk) * v(kk + 1 + i);
            dot *= tau[k];
            v(kk + 1) -= dot;
            for (Eigen::Index i = 1; i < m; ++i) v(kk + 1 + i) -= dot * work(kk + 1 + i, kk);
        }
        const double res = (a * v - lambda * v).norm() / v.norm();
        worst = std::max(worst, res);
    }
    sp.certificate_residual = worst;
    if (worst > 1e-8 * static_cast<double>(n) * std::max(norm, std::numeric_limits<double>::min())) {
        throw NonConvergenceError("eigenvalue certificate failed (residual " + std::to_string(worst) + ")", worst,
                                  checks);
    }
    return sp;
}

// ---------------------------------------------------------------------------
// ESD statistics

/// Entry k = (1/n) sum_i lambda_i^k for k = 0..max_order.
inline MomentTable esd_moments(const Spectrum& sp, int max_order) {
    MomentTable t{{}, MomentSource::Empirical, max_order};
    const double n = static_cast<double>(sp.size());
    std::vector<double> pw(sp.size(), 1.0);
    for (int k = 0; k <= max_order; ++k) {
        double acc = 0.0;
        for (double p : pw) acc += p;
        t.entries[k] = sp.size() == 0 ? (k == 0 ? 1.0 : 0.0) : acc / n;
        for (std::size_t i = 0; i < pw.size(); ++i) pw[i] *= sp.eigenvalues[i];
    }
    return t;
}

inline std::complex<double> empirical_stieltjes(const Spectrum& sp, std::complex<double> z) {
    if (z.imag() == 0.0) throw DomainError("empirical Stieltjes transform needs Im z != 0");
    std::complex<double> acc = 0.0;
    for (double l : sp.eigenvalues) acc += 1.0 / (z - l);
    return acc / static_cast<double>(sp.size());
}

/// sup_x |F1(x) - F2(x)| for the two empirical step CDFs, exact.
inline double kolmogorov_distance(const Spectrum& s1, const Spectrum& s2) {
    const auto& a = s1.eigenvalues;
    const auto& b = s2.eigenvalues;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double best = 0.0;
    while (i < a.size() || j < b.size()) {
        const double x = j >= b.size() || (i < a.size() && a[i] <= b[j]) ? a[i] : b[j];
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return best;
}

/// sup_x |F_emp(x) - F(x)| against a continuous CDF, checking both one-sided
/// limits of the empirical step function at every eigenvalue.
template <class Cdf>
double kolmogorov_distance_to(const Spectrum& sp, const Cdf& cdf) {
    const double n = static_cast<double>(sp.size());
    double best = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const double f = cdf(sp.eigenvalues[i]);
        best = std::max({best, std::abs(static_cast<double>(i) / n - f), std::abs(static_cast<double>(i + 1) / n - f)});
    }
    return best;
}

namespace detail {

// counts of values <= x (right-continuous CDF numerators)
inline double step_cdf(const std::vector<double>& sorted, double x) {
    return static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), x) - sorted.begin()) /
           static_cast<double>(sorted.size());
}

// sup_x G(x) - F(x + eps) over the merged breakpoints, evaluated exactly.
inline double levy_excess(const std::vector<double>& g, const std::vector<double>& f, double eps) {
    double best = 0.0;
    // on [p, next) both step functions are constant; test each breakpoint of G
    // and each shifted breakpoint of F
    for (double x : g) best = std::max(best, step_cdf(g, x) - step_cdf(f, x + eps));
    for (double fx : f) {
        const double x = fx - eps;
        best = std::max(best, step_cdf(g, x) - step_cdf(f, x + eps));
    }
    return best;
}

inline bool levy_feasible(const std::vector<double>& a, const std::vector<double>& b, double eps) {
    return levy_excess(a, b, eps) <= eps && levy_excess(b, a, eps) <= eps;
}

}  // namespace detail

/// Levy distance inf{eps : F(x - eps) - eps <= G(x) <= F(x + eps) + eps for all x}.
/// Feasibility of a given eps is checked exactly on the merged breakpoints;
/// the infimum is located by bisection to adjacent doubles.
inline double levy_distance(const Spectrum& s1, const Spectrum& s2) {
    const auto& a = s1.eigenvalues;
    const auto& b = s2.eigenvalues;
    if (a.empty() || b.empty()) throw ValidationError("Levy distance needs non-empty spectra");
    if (detail::levy_feasible(a, b, 0.0)) return 0.0;
    double lo = 0.0;
    double hi = 1.0;  // always feasible: CDFs take values in [0, 1]
    for (int it = 0; it < 200 && std::nextafter(lo, hi) < hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::levy_feasible(a, b, mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

/// (1/n) tr((A - B)^2), which bounds the cube of the Levy distance between the ESDs.
inline double levy_cube_bound(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols()) {
        throw ValidationError("levy_cube_bound needs square matrices of equal size");
    }
    return (a - b).squaredNorm() / static_cast<double>(a.rows());
}

/// Histogram normalized to integrate to one over the in-range eigenvalues. Bins
/// are right-closed, (lo + (k-1)h, lo + kh], with the first bin also closed on the left.
inline DensityCurve histogram_density(const Spectrum& sp, std::size_t bins, double lo, double hi) {
    if (bins == 0) throw ValidationError("histogram needs at least one bin");
    if (!(hi > lo)) throw ValidationError("histogram range is empty");
    const double h = (hi - lo) / static_cast<double>(bins);
    std::vector<double> counts(bins, 0.0);
    double inside = 0.0;
    for (double x : sp.eigenvalues) {
        if (x < lo || x > hi) continue;
        auto k = static_cast<std::ptrdiff_t>(std::ceil((x - lo) / h)) - 1;
        k = std::clamp<std::ptrdiff_t>(k, 0, static_cast<std::ptrdiff_t>(bins) - 1);
        counts[static_cast<std::size_t>(k)] += 1.0;
        inside += 1.0;
    }
    DensityCurve curve;
    curve.eta = h;
    curve.points.reserve(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        DensityPoint p;
        p.energy = lo + (static_cast<double>(k) + 0.5) * h;
        p.rho = inside > 0 ? counts[k] / (inside * h) : 0.0;
        curve.points.push_back(p);
    }
    return curve;
}

/// L1 distance between a histogram and a predicted density sampled at the bin
/// midpoints (the prediction is linearly interpolated on its grid).
inline double l1_density_distance(const DensityCurve& histogram, const DensityCurve& predicted) {
    if (histogram.points.empty()) return 0.0;
    const double h = histogram.points.size() > 1
                         ? histogram.points[1].energy - histogram.points[0].energy
                         : histogram.eta;
    auto interp = [&](double e) {
        const auto& pts = predicted.points;
        if (pts.empty() || e <= pts.front().energy) return pts.empty() ? 0.0 : pts.front().rho;
        if (e >= pts.back().energy) return pts.back().rho;
        std::size_t i = 1;
        // grids are uniform: jump close and correct
        const double step = pts[1].energy - pts[0].energy;
        i = std::clamp<std::size_t>(static_cast<std::size_t>((e - pts.front().energy) / step), 0, pts.size() - 2) + 1;
        while (i + 1 < pts.size() && pts[i].energy < e) ++i;
        while (i > 1 && pts[i - 1].energy > e) --i;
        const double t = (e - pts[i - 1].energy) / (pts[i].energy - pts[i - 1].energy);
        return pts[i - 1].rho + t * (pts[i].rho - pts[i - 1].rho);
    };
    double acc = 0.0;
    for (const auto& p : histogram.points) acc += std::abs(p.rho - interp(p.energy)) * h;
    return acc;
}

}  // namespace graphon_spectra
