#include "doctest.h"
#include "cadmin/gallery.hpp"
#include "support.hpp"

using namespace cadmin;
using namespace cadmin::testing;

namespace {

// Nested model of a labelled tree, independent of CellIndex bookkeeping.
struct Node {
    bool bit = false;
    std::vector<Node> kids;  // empty for leaves; odd size otherwise
    friend bool operator==(const Node&, const Node&) = default;
};

// Small label alphabet so that equal neighbours are common.
Node random_node(std::mt19937_64& g, int depth) {
    Node n;
    if (depth == 0) {
        n.bit = uniform(g, 0, 2) == 0;
        return n;
    }
    std::size_t u = static_cast<std::size_t>(uniform(g, 0, 2));
    Node shared = random_node(g, depth - 1);
    for (std::size_t i = 0; i < 2 * u + 1; ++i)
        n.kids.push_back(uniform(g, 0, 1) ? shared : random_node(g, depth - 1));
    return n;
}

void flatten(const Node& n, const CellIndex& I, int depth, std::map<CellIndex, std::size_t>& counts,
             LeafLabeling& labels) {
    if (static_cast<int>(I.level()) == depth) {
        labels[I] = n.bit;
        return;
    }
    counts[I] = (n.kids.size() - 1) / 2;
    for (std::size_t i = 0; i < n.kids.size(); ++i)
        flatten(n.kids[i], I.child(static_cast<int>(i) + 1), depth, counts, labels);
}

CadTree to_tree(const Node& root, int depth) {
    std::map<CellIndex, std::size_t> counts;
    LeafLabeling labels;
    flatten(root, CellIndex(), depth, counts, labels);
    return CadTree(depth, counts, labels);
}

const Node& at(const Node& root, const CellIndex& I) {
    const Node* n = &root;
    for (int letter : I.letters())
        n = &n->kids.at(static_cast<std::size_t>(letter - 1));
    return *n;
}

Node& at(Node& root, const CellIndex& I) {
    Node* n = &root;
    for (int letter : I.letters())
        n = &n->kids.at(static_cast<std::size_t>(letter - 1));
    return *n;
}

std::size_t leaf_total(const Node& n) {
    if (n.kids.empty())
        return 1;
    std::size_t total = 0;
    for (const auto& k : n.kids)
        total += leaf_total(k);
    return total;
}

// Pivots whose siblings on both sides are identical subtrees.
void oracle_rules(const Node& n, const CellIndex& I, std::vector<CellIndex>& out) {
    for (std::size_t i = 1; i + 1 < n.kids.size(); i += 2)
        if (n.kids[i - 1] == n.kids[i] && n.kids[i] == n.kids[i + 1])
            out.push_back(I.child(static_cast<int>(i) + 1));
    for (std::size_t i = 0; i < n.kids.size(); ++i)
        oracle_rules(n.kids[i], I.child(static_cast<int>(i) + 1), out);
}

}  // namespace

TEST_CASE("disk trees") {
    GalleryEntry c = gallery_entry("disk-C");
    GalleryEntry cp = gallery_entry("disk-Cp");
    CadTree t = build_tree(cp.cad, cp.labels);
    auto rules = applicable_rules(t);
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].pivot == CellIndex{4});
    CadTree reduced = apply_tree_reduction(t, rules[0]);
    CadTree expected = build_tree(c.cad, c.labels);
    CHECK(reduced.counts() == expected.counts());
    CHECK(reduced.labels() == expected.labels());
    CHECK(applicable_rules(expected).empty());
    CHECK(t.leaves().size() == 23);
}

TEST_CASE("trousers trees") {
    GalleryEntry c = gallery_entry("trousers-C");
    auto rules = applicable_rules(build_tree(c.cad, c.labels));
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].pivot == CellIndex{1, 2});
    GalleryEntry cp = gallery_entry("trousers-Cp");
    rules = applicable_rules(build_tree(cp.cad, cp.labels));
    REQUIRE(rules.size() == 1);
    CHECK(rules[0].pivot == CellIndex{3, 2});
}

TEST_CASE("relabelling under a merge") {
    CellIndex A{2, 4};
    CHECK(psi(A, CellIndex{2, 3, 1}) == CellIndex{2, 3, 1});
    CHECK(psi(A, CellIndex{2, 4, 1}) == CellIndex{2, 3, 1});
    CHECK(psi(A, CellIndex{2, 5, 2}) == CellIndex{2, 3, 2});
    CHECK(psi(A, CellIndex{2, 7}) == CellIndex{2, 5});
    CHECK(psi(A, CellIndex{2, 1}) == CellIndex{2, 1});
    CHECK(psi(A, CellIndex{3, 5}) == CellIndex{3, 5});
    CHECK(psi(A, CellIndex{2}) == CellIndex{2});
    CHECK_THROWS_AS(psi(CellIndex{2, 3}, CellIndex{2, 3}), PivotNotEven);
    CHECK(prefix(CellIndex{1, 2, 3}, 2) == CellIndex{1, 2});
}

TEST_CASE("errors") {
    CHECK_THROWS(CadTree(1, {{CellIndex(), 1}}, {{CellIndex{1}, true}, {CellIndex{2}, true}}));
    CHECK_THROWS(CadTree(1, {{CellIndex(), 0}}, {{CellIndex{1}, true}, {CellIndex{2}, true}}));
    GalleryEntry c = gallery_entry("disk-C");
    LeafLabeling partial = c.labels;
    partial.erase(partial.begin());
    CHECK_THROWS_AS(build_tree(c.cad, partial), LabelMissing);
    CadTree t = build_tree(c.cad, c.labels);
    CHECK_THROWS_AS(apply_tree_reduction(t, RuleId{CellIndex{3}}), PivotNotEven);
    CHECK_THROWS_AS(apply_tree_reduction(t, RuleId{CellIndex{2}}), RuleNotApplicable);
}

TEST_CASE("random trees: rules and merges agree with the nested model") {
    auto g = rng(51);
    int checked = 0;
    for (int i = 0; i < 300; ++i) {
        int depth = static_cast<int>(uniform(g, 1, 3));
        Node root = random_node(g, depth);
        CadTree t = to_tree(root, depth);

        std::vector<CellIndex> expected;
        oracle_rules(root, CellIndex(), expected);
        std::sort(expected.begin(), expected.end());
        std::vector<CellIndex> got;
        for (const auto& r : applicable_rules(t))
            got.push_back(r.pivot);
        REQUIRE(got == expected);

        for (const auto& A : expected) {
            Node merged = root;
            Node& parent = at(merged, A.parent());
            auto pos = static_cast<std::ptrdiff_t>(A.last() - 1);
            std::size_t removed = t.leaves().size();
            parent.kids.erase(parent.kids.begin() + pos, parent.kids.begin() + pos + 2);
            CadTree want = to_tree(merged, depth);
            CadTree have = apply_tree_reduction(t, RuleId{A});
            CHECK(have.counts() == want.counts());
            CHECK(have.labels() == want.labels());
            // Two copies of the flanking subtree disappear.
            std::size_t sub = leaf_total(at(root, A));
            CHECK(have.leaves().size() == removed - 2 * sub);
            ++checked;
        }
    }
    CHECK(checked > 50);
}

TEST_CASE("dot output") {
    GalleryEntry c = gallery_entry("chain");
    std::string dot = tree_to_dot(build_tree(c.cad, c.labels));
    CHECK(dot.find("digraph") == 0);
    CHECK(dot.find("fillcolor=green") != std::string::npos);
}
