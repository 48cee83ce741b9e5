#include <catch_amalgamated.hpp>

#include <graphon_spectra/qve.hpp>
#include <graphon_spectra/rng.hpp>

#include <cmath>
#include <numbers>

namespace gs = graphon_spectra;
using gs::cplx;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// s(z) = (z - sqrt(z^2 - 4)) / 2 on the branch decaying at infinity
cplx semicircle(cplx z) { return 0.5 * (z - std::sqrt(z - 2.0) * std::sqrt(z + 2.0)); }

// Marchenko-Pastur transform of XX^T/n, aspect y = m/n, normalized over m.
cplx marchenko_pastur(cplx z, double y) {
    const double lo = (1.0 - std::sqrt(y)) * (1.0 - std::sqrt(y));
    const double hi = (1.0 + std::sqrt(y)) * (1.0 + std::sqrt(y));
    return (z + y - 1.0 - std::sqrt(z - lo) * std::sqrt(z - hi)) / (2.0 * y * z);
}

gs::StepGraphon random_graphon(std::size_t d, std::uint64_t seed) {
    const gs::CounterRng rng(seed);
    Eigen::VectorXd f(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) f(static_cast<Eigen::Index>(i)) = 0.2 + rng.uniform(i, 0, 7);
    f /= f.sum();
    Eigen::MatrixXd w(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double v = 2.0 * rng.uniform(i, j, 8);
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return gs::StepGraphon(f, w);
}

double dist(cplx a, cplx b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("solve_qve: constant-1 examples") {
    const auto w = gs::StepGraphon::constant(1.0);
    const auto out = gs::solve_qve(w, cplx(3.0, 1e-9));
    CHECK_THAT(out.s.real(), WithinAbs((3.0 - std::sqrt(5.0)) / 2.0, 1e-8));
    CHECK(out.converged);
    CHECK(out.residual <= 1e-12);
    CHECK(dist(gs::solve_qve(w, cplx(0.0, 2.0)).s, semicircle(cplx(0.0, 2.0))) < 1e-10);
    CHECK_THAT(gs::solve_qve(w, cplx(0.0, 2.0)).s.imag(), WithinAbs(1.0 - std::sqrt(2.0), 1e-10));
}

TEST_CASE("solve_qve matches the semicircle oracle on a grid") {
    const auto w = gs::StepGraphon::constant(1.0);
    for (int i = 0; i < 10; ++i) {
        for (int j = 0; j < 10; ++j) {
            const cplx z(-3.0 + 6.0 * i / 9.0, 0.01 * std::pow(100.0, j / 9.0));
            CHECK(dist(gs::solve_qve(w, z).s, semicircle(z)) < 1e-10);
        }
    }
}

TEST_CASE("solve_qve scaling symmetry for constant c") {
    for (double c : {0.25, 2.0, 3.5}) {
        const auto w = gs::StepGraphon::constant(c);
        for (const cplx z : {cplx(0.3, 0.2), cplx(-1.5, 0.05), cplx(4.0, 1.0)}) {
            const cplx expected = semicircle(z / std::sqrt(c)) / std::sqrt(c);
            CHECK(dist(gs::solve_qve(w, z).s, expected) < 1e-10);
        }
    }
}

TEST_CASE("QVE solution invariants") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto w = random_graphon(2 + seed % 4, 900 + seed);
        const Eigen::MatrixXcd k = (w.weights() * w.fractions().asDiagonal()).cast<cplx>();
        for (const cplx z : {cplx(0.4, 0.05), cplx(-2.0, 0.3), cplx(1.0, 2.0)}) {
            const auto sol = gs::solve_qve(w, z);
            // residual contract recomputed independently
            const Eigen::VectorXcd r = sol.a.cwiseProduct(z * Eigen::VectorXcd::Ones(sol.a.size()) - k * sol.a) -
                                       Eigen::VectorXcd::Ones(sol.a.size());
            CHECK(r.cwiseAbs().maxCoeff() <= 1e-11);
            CHECK(sol.residual <= 1e-12);
            CHECK((sol.a.imag().array() < 0.0).all());
            CHECK(sol.s.imag() < 0.0);
            CHECK(dist(sol.s, w.fractions().cast<cplx>().dot(sol.a)) <= 1e-12);
            // z-symmetry a(-conj z) = -conj a(z)
            const auto mirror = gs::solve_qve(w, -std::conj(z));
            CHECK((mirror.a + sol.a.conjugate()).cwiseAbs().maxCoeff() < 1e-10);
        }
        const cplx big(600.0, 800.0);
        CHECK(std::abs(gs::solve_qve(w, big).s - 1.0 / big) <= 2.0 * w.sup_norm() / std::pow(std::abs(big), 3));
    }
}

TEST_CASE("random initializations converge to the same solution") {
    const auto w = random_graphon(4, 3);
    const cplx z(0.7, 0.1);
    const auto ref = gs::solve_qve(w, z);
    const gs::CounterRng rng(5);
    for (int t = 0; t < 5; ++t) {
        Eigen::VectorXcd init(4);
        for (int i = 0; i < 4; ++i) init(i) = cplx(rng.uniform(t, i, 0) - 0.5, -rng.uniform(t, i, 1));
        CHECK(dist(gs::solve_qve(w, z, {}, init).s, ref.s) < 1e-11);
    }
}

TEST_CASE("solve_qve errors") {
    const auto w = gs::StepGraphon::constant(1.0);
    CHECK_THROWS_AS(gs::solve_qve(w, cplx(1.0, 0.0)), gs::DomainError);
    CHECK_THROWS_AS(gs::solve_qve(w, cplx(1.0, -0.5)), gs::DomainError);
    gs::QveOptions opt;
    opt.max_iter = 3;
    try {
        gs::solve_qve(w, cplx(0.1, 0.01), opt);
        FAIL("expected non-convergence");
    } catch (const gs::NonConvergenceError& e) {
        CHECK(e.last_residual() > opt.tol);
        CHECK(e.iterations() == 3);
    }
    opt = {};
    opt.tol = 0.0;
    CHECK_THROWS_AS(gs::solve_qve(w, cplx(0.1, 1.0), opt), gs::ValidationError);
}

TEST_CASE("solve_gram_qve matches Marchenko-Pastur oracles") {
    for (const double y : {1.0, 0.5, 2.0}) {
        const auto w = gs::symmetrized_graphon(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), y);
        if (y == 1.0) CHECK_THAT(gs::solve_gram_qve(w, y, cplx(5.0, 1e-9)).s.real(), WithinAbs((1.0 - std::sqrt(0.2)) / 2.0, 1e-8));
        for (const cplx z : {cplx(5.0, 1e-3), cplx(1.0, 0.05), cplx(0.2, 0.5), cplx(-1.0, 0.1), cplx(3.0, 2.0)}) {
            const auto sol = gs::solve_gram_qve(w, y, z);
            CHECK(dist(sol.s, marchenko_pastur(z, y)) < 1e-10);
            CHECK(sol.s.imag() < 0.0);
        }
    }
}

TEST_CASE("Gram QVE agrees with the change of variables from the symmetrization") {
    Eigen::MatrixXd s(2, 3);
    s << 1.0, 2.0, 0.5, 0.5, 1.5, 1.0;
    for (const double y : {0.6, 1.0, 1.7}) {
        const auto w = gs::symmetrized_graphon(Eigen::Vector2d(0.3, 0.7), Eigen::Vector3d(0.2, 0.5, 0.3), s, y);
        for (const cplx z : {cplx(0.5, 0.1), cplx(2.0, 0.05), cplx(6.0, 1.0), cplx(-0.5, 0.3)}) {
            CHECK(dist(gs::solve_gram_qve(w, y, z).s, gs::gram_transform_from_symmetrization(w, y, z)) < 1e-8);
        }
    }
    CHECK_THROWS_AS(gs::solve_gram_qve(gs::StepGraphon::constant(1.0), 1.0, cplx(0.0, 1.0)), gs::StructureError);
}

TEST_CASE("Gram series moments match gram_moment") {
    const auto w = gs::symmetrized_graphon(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), 1.0);
    // s(z) = sum_k m_k / z^{k+1}: extract m_k by a contour integral on |z| = R
    const double radius = 20.0;
    const int nodes = 256;
    for (int k = 0; k <= 4; ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < nodes; ++j) {
            const double th = 2.0 * std::numbers::pi * (j + 0.5) / nodes;
            cplx z = radius * std::polar(1.0, th);
            cplx sz;
            if (z.imag() > 0) {
                sz = gs::solve_gram_qve(w, 1.0, z).s;
            } else {
                sz = std::conj(gs::solve_gram_qve(w, 1.0, std::conj(z)).s);
            }
            acc += sz * std::pow(z, k + 1);
        }
        const double mk = (acc / static_cast<double>(nodes)).real();
        CHECK_THAT(mk, WithinAbs(gs::gram_moment(static_cast<std::size_t>(k), w, 1.0), 1e-6));
    }
}

TEST_CASE("density_curve examples") {
    const auto w = gs::StepGraphon::constant(1.0);
    const auto c = gs::density_curve(w, -3.0, 3.0, 601, 0.01);
    CHECK(c.all_converged());
    const auto& mid = c.points[300];
    CHECK(mid.energy == 0.0);
    CHECK_THAT(mid.rho, WithinRel(1.0 / std::numbers::pi, 0.02));
    CHECK(c.points[50].rho < 0.02);   // E = -2.5
    CHECK(c.points[550].rho < 0.02);  // E = 2.5
    CHECK(c.integral() >= 1.0 - 5.0 * 0.01);
    CHECK(c.integral() <= 1.0);

    const auto two = gs::density_curve(random_graphon(3, 12), -4.0, 4.0, 161, 0.02);
    for (std::size_t i = 0; i < two.points.size(); ++i) {
        CHECK_THAT(two.points[i].rho, WithinAbs(two.points[two.points.size() - 1 - i].rho, 1e-9));
    }
    CHECK_THROWS_AS(gs::density_curve(w, -1.0, 1.0, 10, 0.0), gs::DomainError);
    CHECK_THROWS_AS(gs::density_curve(w, -1.0, 1.0, 1, 0.1), gs::ValidationError);
}

TEST_CASE("warm-started sweeps converge at eta >= 0.01 for sup W <= 4") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto w = random_graphon(2 + seed, 1200 + seed).scaled(2.0);
        REQUIRE(w.sup_norm() <= 4.0);
        const double edge = 2.0 * std::sqrt(w.sup_norm()) + 0.5;
        CHECK(gs::density_curve(w, -edge, edge, 201, 0.01).all_converged());
    }
}

TEST_CASE("predicted CDF is monotone and reaches one") {
    const auto cdf = gs::predicted_cdf(gs::StepGraphon::constant(1.0), 0.01);
    const auto& v = cdf.values();
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] >= v[i - 1]);
    CHECK_THAT(cdf(0.0), WithinAbs(0.5, 1e-3));
    CHECK(cdf(10.0) > 0.99);
    CHECK(cdf(-10.0) < 0.01);
}

TEST_CASE("series moments and the large-|z| series") {
    const auto one = gs::series_moments(gs::StepGraphon::constant(1.0), 10);
    CHECK(one.source == gs::MomentSource::QveSeries);
    for (unsigned k = 0; k <= 5; ++k) CHECK(one.at(static_cast<int>(2 * k)) == static_cast<double>(gs::catalan(k)));
    const auto c = gs::series_moments(gs::StepGraphon::constant(0.5), 8);
    for (unsigned k = 0; k <= 4; ++k) {
        CHECK_THAT(c.at(static_cast<int>(2 * k)), WithinRel(static_cast<double>(gs::catalan(k)) * std::pow(0.5, k), 1e-14));
    }
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 2.0, 2.0, 3.0;
    const auto w = gs::StepGraphon::equal_blocks(s);
    for (const cplx z : {cplx(10.0, 0.0001), cplx(0.0, 10.0), cplx(6.0, 8.0)}) {
        CHECK(dist(gs::series_transform(w, z, 12).s, gs::solve_qve(w, z).s) < 1e-6);
    }
}
