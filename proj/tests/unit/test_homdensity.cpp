#include <catch_amalgamated.hpp>

#include <graphon_spectra/homdensity.hpp>
#include <graphon_spectra/rng.hpp>

#include <cmath>
#include <functional>

namespace gs = graphon_spectra;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

gs::StepGraphon random_graphon(std::size_t d, std::uint64_t seed) {
    const gs::CounterRng rng(seed);
    Eigen::VectorXd f(static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) f(static_cast<Eigen::Index>(i)) = 0.2 + rng.uniform(i, 0, 5);
    f /= f.sum();
    Eigen::MatrixXd w(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i; j < d; ++j) {
            const double v = 2.0 * rng.uniform(i, j, 6);
            w(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            w(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return gs::StepGraphon(f, w);
}

// Oracle: sum over every assignment of blocks to vertices.
double brute_density(const gs::RootedPlanarTree& t, const gs::StepGraphon& w, int root_block = -1) {
    const std::size_t n = t.vertex_count();
    const std::size_t d = w.blocks();
    std::vector<std::size_t> b(n, 0);
    double total = 0.0;
    std::function<void(std::size_t)> rec = [&](std::size_t v) {
        if (v == n) {
            double p = 1.0;
            for (std::size_t u = 0; u < n; ++u) {
                if (root_block >= 0 && u == 0) continue;
                p *= w.fractions()(static_cast<Eigen::Index>(b[u]));
            }
            for (std::size_t u = 1; u < n; ++u) {
                p *= w.weights()(static_cast<Eigen::Index>(b[u]), static_cast<Eigen::Index>(b[static_cast<std::size_t>(t.parent(u))]));
            }
            total += p;
            return;
        }
        if (v == 0 && root_block >= 0) {
            b[0] = static_cast<std::size_t>(root_block);
            rec(1);
            return;
        }
        for (std::size_t k = 0; k < d; ++k) {
            b[v] = k;
            rec(v + 1);
        }
    };
    rec(0);
    return total;
}

}  // namespace

TEST_CASE("tree_density examples") {
    for (const auto& t : gs::enumerate_trees(4)) {
        CHECK(gs::tree_density(t, gs::StepGraphon::constant(1.0)) == 1.0);
        CHECK_THAT(gs::tree_density(t, gs::StepGraphon::constant(0.7)), WithinRel(std::pow(0.7, 4), 1e-14));
    }
    Eigen::MatrixXd bip(2, 2);
    bip << 0, 1, 1, 0;
    const auto w = gs::StepGraphon::equal_blocks(bip);
    CHECK_THAT(gs::tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0, 1}), w), WithinAbs(0.25, 1e-15));
}

TEST_CASE("tree_density and rooted densities agree with brute force") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto w = random_graphon(2 + seed % 3, seed);
        for (std::size_t k = 0; k <= 4; ++k) {
            for (const auto& t : gs::enumerate_trees(k)) {
                CHECK_THAT(gs::tree_density(t, w), WithinRel(brute_density(t, w), 1e-12));
                const Eigen::VectorXd r = gs::rooted_tree_density(t, w);
                for (std::size_t i = 0; i < w.blocks(); ++i) {
                    CHECK_THAT(r(static_cast<Eigen::Index>(i)), WithinRel(brute_density(t, w, static_cast<int>(i)), 1e-12));
                }
            }
        }
    }
}

TEST_CASE("rooted_tree_density examples") {
    const auto w = random_graphon(3, 11);
    CHECK(gs::rooted_tree_density(gs::RootedPlanarTree(), w) == Eigen::VectorXd::Ones(3));
    const Eigen::VectorXd e = gs::rooted_tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0}), gs::StepGraphon::constant(0.3));
    CHECK_THAT(e(0), WithinAbs(0.3, 1e-15));
    Eigen::MatrixXd bip(2, 2);
    bip << 0, 1, 1, 0;
    const Eigen::VectorXd b = gs::rooted_tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0}), gs::StepGraphon::equal_blocks(bip));
    CHECK(b(0) == 0.5);
    CHECK(b(1) == 0.5);
}

TEST_CASE("starred_density examples and the combination identity") {
    const auto c = gs::StepGraphon::constant(0.6);
    CHECK_THAT(gs::starred_density(gs::attach_root_edge(gs::RootedPlanarTree()), c)(0), WithinAbs(0.6, 1e-15));

    const auto w = random_graphon(2, 21);
    const Eigen::VectorXd star = gs::starred_density(gs::attach_root_edge(gs::RootedPlanarTree()), w);
    const Eigen::VectorXd edge = gs::rooted_tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0}), w);
    CHECK(star.isApprox(edge, 1e-15));

    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const auto g = random_graphon(2, 300 + seed);
        for (std::size_t k = 0; k <= 4; ++k) {
            for (std::size_t l = 0; k + l + 1 <= 5; ++l) {
                for (const auto& ti : gs::enumerate_trees(k)) {
                    for (const auto& tj : gs::enumerate_trees(l)) {
                        const auto sj = gs::attach_root_edge(tj);
                        const Eigen::VectorXd lhs = gs::rooted_tree_density(ti, g).cwiseProduct(gs::starred_density(sj, g));
                        const Eigen::VectorXd rhs = gs::rooted_tree_density(gs::combine(ti, sj), g);
                        CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-12 * rhs.cwiseAbs().maxCoeff());
                    }
                }
            }
        }
    }
}

TEST_CASE("wigner_moment examples") {
    CHECK(gs::wigner_moment(2, gs::StepGraphon::constant(1.0)) == 2.0);
    CHECK(gs::wigner_moment(4, gs::StepGraphon::constant(1.0)) == 14.0);
    Eigen::MatrixXd bip(2, 2);
    bip << 0, 1, 1, 0;
    CHECK_THAT(gs::wigner_moment(1, gs::StepGraphon::equal_blocks(bip)), WithinAbs(0.5, 1e-15));
    CHECK_THROWS_AS(gs::wigner_moment(13, gs::StepGraphon::constant(1.0)), gs::SizeError);

    const auto table = gs::wigner_moments(7, gs::StepGraphon::constant(2.0));
    CHECK(table.source == gs::MomentSource::TreeDensity);
    CHECK(table.at(0) == 1.0);
    CHECK(table.at(1) == 0.0);
    CHECK(table.at(3) == 0.0);
    CHECK(table.at(6) == 5.0 * 8.0);
}

TEST_CASE("moment invariants: permutation, Catalan bound, rooted average") {
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        const auto w = random_graphon(4, 40 + seed);
        for (std::size_t k = 0; k <= 5; ++k) {
            const double m = gs::wigner_moment(k, w);
            CHECK(gs::wigner_moment(k, w.permuted({3, 1, 0, 2})) == Catch::Approx(m).epsilon(1e-13));
            CHECK(m <= static_cast<double>(gs::catalan(static_cast<unsigned>(k))) * std::pow(w.sup_norm(), k) * (1 + 1e-12));
            const auto r = gs::rooted_moment_vector(k, w);
            CHECK(r.order == k);
            CHECK((r.values.array() >= 0.0).all());
            CHECK_THAT(w.fractions().dot(r.values), WithinRel(m, 1e-10));
        }
    }
    const auto c = gs::rooted_moment_vector(5, gs::StepGraphon::constant(1.0));
    CHECK(c.values(0) == 42.0);
    CHECK(gs::rooted_moment_vector(0, random_graphon(3, 1)).values == Eigen::VectorXd::Ones(3));
}

TEST_CASE("leaf peeling: degree one graphons give unit tree densities") {
    Eigen::MatrixXd s(2, 2);
    s << 1.5, 0.5, 0.5, 1.5;
    const auto w = gs::StepGraphon::equal_blocks(s);
    for (std::size_t k = 0; k <= 6; ++k) {
        for (const auto& t : gs::enumerate_trees(k)) CHECK_THAT(gs::tree_density(t, w), WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("Catalan recursion on rooted moment vectors") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto w = random_graphon(3, 500 + seed);
        const Eigen::MatrixXd kernel = w.weights() * w.fractions().asDiagonal();
        for (std::size_t s = 1; s <= 6; ++s) {
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(3);
            for (std::size_t k = 0; k < s; ++k) {
                rhs += gs::rooted_moment_vector(k, w).values.cwiseProduct(kernel * gs::rooted_moment_vector(s - 1 - k, w).values);
            }
            CHECK((gs::rooted_moment_vector(s, w).values - rhs).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("gram_moment examples") {
    const auto mp = gs::symmetrized_graphon(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), 1.0);
    CHECK_THAT(gs::gram_moment(2, mp, 1.0), WithinRel(2.0, 1e-14));
    CHECK_THAT(gs::gram_moment(3, mp, 1.0), WithinRel(5.0, 1e-14));
    for (unsigned k = 1; k <= 6; ++k) {
        CHECK_THAT(gs::gram_moment(k, mp, 1.0), WithinRel(static_cast<double>(gs::catalan(k)), 1e-13));
    }
    const double y = 0.6;
    Eigen::MatrixXd s(2, 2);
    s << 1.0, 2.0, 0.5, 1.5;
    const auto g = gs::symmetrized_graphon(Eigen::Vector2d(0.5, 0.5), Eigen::Vector2d(0.5, 0.5), s, y);
    const double edge = gs::tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0}), g);
    CHECK_THAT(gs::gram_moment(1, g, y), WithinRel((1 + y) * (1 + y) / (2 * y) * edge, 1e-14));
    CHECK(gs::gram_moments(4, g, y).source == gs::MomentSource::GramTreeDensity);

    CHECK_THROWS_AS(gs::gram_moment(2, gs::StepGraphon::constant(1.0), 1.0), gs::StructureError);
    CHECK_THROWS_AS(gs::gram_moment(2, mp, 0.5), gs::StructureError);
}

TEST_CASE("Marchenko-Pastur moments for general y") {
    // oracle: Narayana polynomial sum_{r} N(k, r) y^{r-1} for XX^T/n with aspect y = m/n,
    // normalized over the m-dimensional side
    const double y = 0.5;
    const auto g = gs::symmetrized_graphon(Eigen::VectorXd::Ones(1), Eigen::VectorXd::Ones(1), Eigen::MatrixXd::Ones(1, 1), y);
    auto binom = [](int n, int r) {
        double b = 1;
        for (int i = 1; i <= r; ++i) b = b * (n - r + i) / i;
        return b;
    };
    for (int k = 1; k <= 6; ++k) {
        double oracle = 0.0;
        for (int r = 1; r <= k; ++r) oracle += binom(k, r) * binom(k, r - 1) / k * std::pow(y, r - 1);
        CHECK_THAT(gs::gram_moment(static_cast<std::size_t>(k), g, y), WithinRel(oracle, 1e-12));
    }
}

TEST_CASE("mc_tree_density") {
    const gs::RootedPlanarTree edge(std::vector<int>{-1, 0});
    const auto c = gs::mc_tree_density(gs::RootedPlanarTree(std::vector<int>{-1, 0, 0}), gs::AnalyticGraphon::constant(0.5), 100, 1);
    CHECK_THAT(c.estimate, WithinAbs(0.25, 1e-15));
    CHECK(c.standard_error == 0.0);

    const auto p = gs::mc_tree_density(edge, gs::AnalyticGraphon::product(), 200000, 9);
    CHECK(std::abs(p.estimate - 0.25) <= 3.0 * p.standard_error);
    CHECK(p.standard_error > 0.0);

    Eigen::MatrixXd s(2, 2);
    s << 0.3, 1.2, 1.2, 0.8;
    const auto step = gs::StepGraphon(std::vector<double>{0.4, 0.6}, s);
    const gs::RootedPlanarTree path(std::vector<int>{-1, 0, 1, 1});
    const auto m = gs::mc_tree_density(path, gs::AnalyticGraphon::step(step), 200000, 4);
    CHECK(std::abs(m.estimate - gs::tree_density(path, step)) <= 3.0 * m.standard_error);

    const auto again = gs::mc_tree_density(path, gs::AnalyticGraphon::step(step), 1000, 4);
    CHECK(again.estimate == gs::mc_tree_density(path, gs::AnalyticGraphon::step(step), 1000, 4).estimate);
    CHECK_THROWS_AS(gs::mc_tree_density(edge, gs::AnalyticGraphon::product(), 0, 1), gs::ValidationError);
}
