#pragma once

// Rooted planar (ordered) trees, Dyck words and the two tree surgeries used by
// the moment recursion: attaching a pinned edge at the root, and grafting such
// a starred tree onto another tree's root.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "error.hpp"

namespace graphon_spectra {

inline constexpr std::size_t kDefaultTreeCap = 12;

/// Catalan number C_k = binom(2k, k) / (k + 1); exact for k <= 35.
constexpr std::uint64_t catalan(unsigned k) {
    std::uint64_t c = 1;
    for (unsigned i = 0; i < k; ++i) {
        // C_{i+1} = C_i * 2(2i+1) / (i+2), exact in integers
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    return c;
}

enum class Step : char { Up = 'U', Down = 'D' };

class DyckWord {
public:
    DyckWord() = default;

    explicit DyckWord(std::vector<Step> steps) : steps_(std::move(steps)) { validate(); }

    /// Parses a string over {'U','D'}.
    static DyckWord parse(std::string_view text) {
        std::vector<Step> steps;
        steps.reserve(text.size());
        for (char c : text) {
            if (c == 'U' || c == 'u') {
                steps.push_back(Step::Up);
            } else if (c == 'D' || c == 'd') {
                steps.push_back(Step::Down);
            } else {
                throw MalformedWordError(std::string("Dyck word contains invalid character '") + c + "'");
            }
        }
        return DyckWord(std::move(steps));
    }

    const std::vector<Step>& steps() const noexcept { return steps_; }
    std::size_t size() const noexcept { return steps_.size(); }
    std::size_t semilength() const noexcept { return steps_.size() / 2; }

    std::string str() const {
        std::string s;
        s.reserve(steps_.size());
        for (Step st : steps_) s.push_back(static_cast<char>(st));
        return s;
    }

    friend bool operator==(const DyckWord&, const DyckWord&) = default;
    friend auto operator<=>(const DyckWord& a, const DyckWord& b) { return a.str() <=> b.str(); }

private:
    void validate() const {
        std::ptrdiff_t height = 0;
        for (std::size_t i = 0; i < steps_.size(); ++i) {
            height += steps_[i] == Step::Up ? 1 : -1;
            if (height < 0) {
                throw MalformedWordError("Dyck word prefix of length " + std::to_string(i + 1) +
                                         " has more downs than ups");
            }
        }
        if (height != 0) {
            throw MalformedWordError("Dyck word is unbalanced (final height " + std::to_string(height) + ")");
        }
    }

    std::vector<Step> steps_;
};

/// Ordered rooted tree stored as a parent array in depth-first (preorder) numbering.
/// Vertex 0 is the root and parent(0) == -1; children of a vertex are ordered by index.
class RootedPlanarTree {
public:
    /// The single-vertex tree.
    RootedPlanarTree() : parent_{-1} {}

    explicit RootedPlanarTree(std::vector<int> parent) : parent_(std::move(parent)) { validate(); }

    std::size_t vertex_count() const noexcept { return parent_.size(); }
    std::size_t edge_count() const noexcept { return parent_.size() - 1; }
    int parent(std::size_t v) const { return parent_.at(v); }
    const std::vector<int>& parents() const noexcept { return parent_; }

    std::size_t degree(std::size_t v) const {
        std::size_t d = v == 0 ? 0 : 1;
        for (std::size_t u = v + 1; u < parent_.size(); ++u) {
            if (parent_[u] == static_cast<int>(v)) ++d;
        }
        return d;
    }

    /// Size of the subtree rooted at v; in DFS order it occupies [v, v + size).
    std::size_t subtree_size(std::size_t v) const {
        std::size_t end = v + 1;
        while (end < parent_.size() && parent_[end] >= static_cast<int>(v)) ++end;
        return end - v;
    }

    /// "- 0 1 ..." : the root is printed as '-'.
    std::string str() const {
        std::string s = "-";
        for (std::size_t v = 1; v < parent_.size(); ++v) s += " " + std::to_string(parent_[v]);
        return s;
    }

    friend bool operator==(const RootedPlanarTree&, const RootedPlanarTree&) = default;
    friend auto operator<=>(const RootedPlanarTree&, const RootedPlanarTree&) = default;

private:
    void validate() const {
        if (parent_.empty() || parent_[0] != -1) {
            throw ValidationError("tree parent array must start with -1 for the root");
        }
        // parent[v] must lie on the root-to-(v-1) path for preorder numbering.
        std::vector<int> path{0};
        for (std::size_t v = 1; v < parent_.size(); ++v) {
            const int p = parent_[v];
            if (p < 0 || p >= static_cast<int>(v)) {
                throw ValidationError("parent[" + std::to_string(v) + "] = " + std::to_string(p) +
                                      " violates parent[v] < v");
            }
            while (!path.empty() && path.back() != p) path.pop_back();
            if (path.empty()) {
                throw ValidationError("parent array is not in depth-first order at vertex " + std::to_string(v));
            }
            path.push_back(static_cast<int>(v));
        }
    }

    std::vector<int> parent_;
};

/// A tree plus one extra vertex (index base.vertex_count()) joined to the root.
/// The extra vertex is the labeled endpoint whose coordinate stays pinned.
struct StarredTree {
    RootedPlanarTree base;

    std::size_t vertex_count() const noexcept { return base.vertex_count() + 1; }
    std::size_t edge_count() const noexcept { return base.edge_count() + 1; }
    std::size_t labeled_vertex() const noexcept { return base.vertex_count(); }

    /// Edge list (u, v) with u < v except for the extra edge (root, labeled).
    std::vector<std::pair<std::size_t, std::size_t>> edges() const {
        std::vector<std::pair<std::size_t, std::size_t>> e;
        e.reserve(edge_count());
        for (std::size_t v = 1; v < base.vertex_count(); ++v) {
            e.emplace_back(static_cast<std::size_t>(base.parent(v)), v);
        }
        e.emplace_back(0, labeled_vertex());
        return e;
    }

    friend bool operator==(const StarredTree&, const StarredTree&) = default;
};

inline RootedPlanarTree dyck_to_tree(const DyckWord& w) {
    std::vector<int> parent{-1};
    parent.reserve(w.semilength() + 1);
    std::vector<int> path{0};
    for (Step s : w.steps()) {
        if (s == Step::Up) {
            parent.push_back(path.back());
            path.push_back(static_cast<int>(parent.size() - 1));
        } else {
            path.pop_back();
        }
    }
    return RootedPlanarTree(std::move(parent));
}

inline DyckWord tree_to_dyck(const RootedPlanarTree& t) {
    std::vector<Step> steps;
    steps.reserve(2 * t.edge_count());
    std::vector<int> path{0};
    for (std::size_t v = 1; v < t.vertex_count(); ++v) {
        while (path.back() != t.parent(v)) {
            path.pop_back();
            steps.push_back(Step::Down);
        }
        steps.push_back(Step::Up);
        path.push_back(static_cast<int>(v));
    }
    while (path.size() > 1) {
        path.pop_back();
        steps.push_back(Step::Down);
    }
    return DyckWord(std::move(steps));
}

/// Calls `visit` on every rooted planar tree with k edges, in lexicographic
/// order of Dyck words (Up < Down). Nothing is materialized beyond one tree.
inline void for_each_tree(std::size_t k, const std::function<void(const RootedPlanarTree&)>& visit) {
    std::vector<int> parent{-1};
    parent.reserve(k + 1);
    std::vector<int> path{0};
    path.reserve(k + 1);

    // ups/downs used so far; recursion depth is 2k.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t ups, std::size_t downs) {
        if (ups == k && downs == k) {
            visit(RootedPlanarTree(parent));
            return;
        }
        if (ups < k) {
            parent.push_back(path.back());
            path.push_back(static_cast<int>(parent.size() - 1));
            rec(ups + 1, downs);
            path.pop_back();
            parent.pop_back();
        }
        if (downs < ups) {
            const int top = path.back();
            path.pop_back();
            rec(ups, downs + 1);
            path.push_back(top);
        }
    };
    rec(0, 0);
}

inline std::vector<RootedPlanarTree> enumerate_trees(std::size_t k, std::size_t cap = kDefaultTreeCap) {
    if (k > cap) {
        throw SizeError("tree enumeration for k = " + std::to_string(k) + " exceeds the cap of " +
                        std::to_string(cap) + " edges");
    }
    std::vector<RootedPlanarTree> out;
    out.reserve(static_cast<std::size_t>(catalan(static_cast<unsigned>(k))));
    for_each_tree(k, [&](const RootedPlanarTree& t) { out.push_back(t); });
    return out;
}

inline StarredTree attach_root_edge(const RootedPlanarTree& t) { return StarredTree{t}; }

/// Identifies the labeled vertex of `s` with the root of `t`. Vertices of t keep
/// indices 0..k; the base of s follows as the root's last child subtree.
inline RootedPlanarTree combine(const RootedPlanarTree& t, const StarredTree& s) {
    const int offset = static_cast<int>(t.vertex_count());
    std::vector<int> parent = t.parents();
    parent.reserve(t.vertex_count() + s.base.vertex_count());
    parent.push_back(0);
    for (std::size_t u = 1; u < s.base.vertex_count(); ++u) {
        parent.push_back(offset + s.base.parent(u));
    }
    return RootedPlanarTree(std::move(parent));
}

}  // namespace graphon_spectra
