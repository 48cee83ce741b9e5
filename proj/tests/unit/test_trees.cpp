#include <catch_amalgamated.hpp>

#include <graphon_spectra/trees.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

namespace gs = graphon_spectra;

namespace {

// All valid Dyck words of semilength k by brute force over 2^(2k) strings,
// sorted with Up < Down.
std::vector<std::string> brute_force_dyck(std::size_t k) {
    std::vector<std::string> out;
    const std::size_t len = 2 * k;
    for (std::size_t mask = 0; mask < (std::size_t{1} << len); ++mask) {
        std::string w;
        int height = 0;
        bool ok = true;
        for (std::size_t i = 0; i < len; ++i) {
            const bool up = ((mask >> (len - 1 - i)) & 1u) == 0;  // bit 0 = Up so mask order is Up-first
            w.push_back(up ? 'U' : 'D');
            height += up ? 1 : -1;
            if (height < 0) {
                ok = false;
                break;
            }
        }
        if (ok && height == 0) out.push_back(w);
    }
    return out;
}

std::uint64_t binomial(unsigned n, unsigned r) {
    std::uint64_t b = 1;
    for (unsigned i = 1; i <= r; ++i) b = b * (n - r + i) / i;
    return b;
}

}  // namespace

TEST_CASE("catalan numbers match binom(2k,k)/(k+1)") {
    for (unsigned k = 0; k <= 20; ++k) CHECK(gs::catalan(k) == binomial(2 * k, k) / (k + 1));
    CHECK(gs::catalan(12) == 208012u);
}

TEST_CASE("enumerate_trees: counts and spec examples") {
    CHECK(gs::enumerate_trees(0).size() == 1);
    CHECK(gs::enumerate_trees(0)[0].vertex_count() == 1);
    CHECK(gs::enumerate_trees(3).size() == 5);
    for (std::size_t k = 0; k <= 9; ++k) CHECK(gs::enumerate_trees(k).size() == gs::catalan(static_cast<unsigned>(k)));
}

TEST_CASE("enumerate_trees(8) equals brute-force Dyck enumeration in order") {
    const auto trees = gs::enumerate_trees(8);
    const auto words = brute_force_dyck(8);
    REQUIRE(words.size() == 1430);
    REQUIRE(trees.size() == words.size());
    std::set<std::vector<int>> distinct;
    for (std::size_t i = 0; i < trees.size(); ++i) {
        CHECK(gs::tree_to_dyck(trees[i]).str() == words[i]);
        distinct.insert(trees[i].parents());
    }
    CHECK(distinct.size() == 1430);
}

TEST_CASE("enumerate_trees rejects k above the cap") {
    CHECK_THROWS_AS(gs::enumerate_trees(13), gs::SizeError);
    CHECK_THROWS_AS(gs::enumerate_trees(4, 3), gs::SizeError);
    CHECK_NOTHROW(gs::enumerate_trees(4, 4));
}

TEST_CASE("trees are in DFS order with contiguous subtrees") {
    for (const auto& t : gs::enumerate_trees(6)) {
        for (std::size_t v = 1; v < t.vertex_count(); ++v) CHECK(t.parent(v) < static_cast<int>(v));
        for (std::size_t v = 0; v < t.vertex_count(); ++v) {
            const std::size_t end = v + t.subtree_size(v);
            for (std::size_t u = v + 1; u < end; ++u) {
                int a = t.parent(u);
                while (a > static_cast<int>(v)) a = t.parent(static_cast<std::size_t>(a));
                CHECK(a == static_cast<int>(v));
            }
        }
    }
}

TEST_CASE("dyck_to_tree examples") {
    CHECK(gs::dyck_to_tree(gs::DyckWord::parse("")).vertex_count() == 1);
    CHECK(gs::dyck_to_tree(gs::DyckWord::parse("UUDD")).parents() == std::vector<int>{-1, 0, 1});
    CHECK(gs::dyck_to_tree(gs::DyckWord::parse("UDUD")).parents() == std::vector<int>{-1, 0, 0});
    CHECK(gs::tree_to_dyck(gs::dyck_to_tree(gs::DyckWord::parse("UDUD"))).str() == "UDUD");
}

TEST_CASE("malformed Dyck words are rejected") {
    CHECK_THROWS_AS(gs::DyckWord::parse("DU"), gs::MalformedWordError);
    CHECK_THROWS_AS(gs::DyckWord::parse("UDD"), gs::MalformedWordError);
    CHECK_THROWS_AS(gs::DyckWord::parse("UUD"), gs::MalformedWordError);
    CHECK_THROWS_AS(gs::DyckWord::parse("UXD"), gs::MalformedWordError);
}

TEST_CASE("invalid parent arrays are rejected") {
    CHECK_THROWS_AS(gs::RootedPlanarTree(std::vector<int>{-1, 1}), gs::ValidationError);
    CHECK_THROWS_AS(gs::RootedPlanarTree(std::vector<int>{0}), gs::ValidationError);
    // vertex 3 hangs off 1 after the subtree of 1 was closed by 2: not DFS order
    CHECK_THROWS_AS(gs::RootedPlanarTree(std::vector<int>{-1, 0, 0, 1}), gs::ValidationError);
}

TEST_CASE("tree_to_dyck examples and exhaustive round trip") {
    CHECK(gs::tree_to_dyck(gs::RootedPlanarTree()).str().empty());
    CHECK(gs::tree_to_dyck(gs::RootedPlanarTree(std::vector<int>{-1, 0, 1})).str() == "UUDD");
    std::size_t count = 0;
    for (const auto& t : gs::enumerate_trees(6)) {
        CHECK(gs::dyck_to_tree(gs::tree_to_dyck(t)).parents() == t.parents());
        ++count;
    }
    CHECK(count == 132);
    for (const auto& w : brute_force_dyck(5)) CHECK(gs::tree_to_dyck(gs::dyck_to_tree(gs::DyckWord::parse(w))).str() == w);
}

TEST_CASE("attach_root_edge") {
    const auto single = gs::attach_root_edge(gs::RootedPlanarTree());
    CHECK(single.edge_count() == 1);
    CHECK(single.labeled_vertex() == 1);
    CHECK(single.edges() == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});

    const auto path = gs::attach_root_edge(gs::RootedPlanarTree(std::vector<int>{-1, 0, 1}));
    CHECK(path.vertex_count() == 4);
    CHECK(path.edge_count() == 3);
    for (const auto& t : gs::enumerate_trees(4)) CHECK(gs::attach_root_edge(t).edge_count() == t.edge_count() + 1);
}

TEST_CASE("combine examples") {
    const gs::RootedPlanarTree single;
    const gs::RootedPlanarTree edge(std::vector<int>{-1, 0});
    CHECK(gs::combine(single, gs::attach_root_edge(single)).parents() == std::vector<int>{-1, 0});
    // the labeled vertex is identified with the root of the first tree, so the
    // base of the starred tree hangs off that root
    CHECK(gs::combine(edge, gs::attach_root_edge(single)).parents() == std::vector<int>{-1, 0, 0});
    CHECK(gs::combine(single, gs::attach_root_edge(edge)).parents() == std::vector<int>{-1, 0, 1});
}

TEST_CASE("combine image is exactly enumerate_trees(s) for s <= 7") {
    for (std::size_t s = 1; s <= 7; ++s) {
        std::multiset<std::vector<int>> image;
        for (std::size_t k = 0; k + 1 <= s; ++k) {
            const std::size_t l = s - 1 - k;
            for (const auto& ti : gs::enumerate_trees(k)) {
                for (const auto& tj : gs::enumerate_trees(l)) image.insert(gs::combine(ti, gs::attach_root_edge(tj)).parents());
            }
        }
        std::multiset<std::vector<int>> expected;
        for (const auto& t : gs::enumerate_trees(s)) expected.insert(t.parents());
        CHECK(image == expected);
        CHECK(std::set<std::vector<int>>(image.begin(), image.end()).size() == image.size());
    }
}
