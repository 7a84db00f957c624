#include "doctest.h"
#include "cadmin/gallery.hpp"
#include "support.hpp"

using namespace cadmin;
using namespace cadmin::testing;

namespace {

// A graph with dummy node payloads for testing the order-theoretic helpers.
PosetGraph abstract_graph(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    GalleryEntry chain = gallery_entry("chain");
    PosetGraph g{chain.cad, {}, {}};
    for (std::size_t i = 0; i < n; ++i)
        g.nodes.push_back({chain.cad, chain.labels, {{CellIndex{static_cast<int>(i) + 1}}}, {}});
    for (auto [a, b] : edges)
        g.edges.push_back({a, b, RuleId{CellIndex{2}}});
    return g;
}

// Transitive closure by repeated squaring of the adjacency relation.
std::vector<std::vector<bool>> closure(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::vector<bool>> r(n, std::vector<bool>(n, false));
    for (std::size_t i = 0; i < n; ++i)
        r[i][i] = true;
    for (auto [a, b] : edges)
        r[a][b] = true;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (r[i][k] && r[k][j])
                    r[i][j] = true;
    return r;
}

}  // namespace

TEST_CASE("Bell numbers") {
    CHECK(count_ssp(1) == 0);
    CHECK(count_ssp(3) == 4);
    CHECK(count_ssp(9) == 21146);
    CHECK(count_ssp(15) == Integer("1382958544"));
    for (unsigned k = 1; k <= 30; ++k)
        CHECK(count_ssp(k) == bell(k) - 1);
    CHECK_THROWS_AS(count_ssp(0), std::invalid_argument);
}

TEST_CASE("disk poset") {
    GalleryEntry e = gallery_entry("disk-Cpp");
    PosetGraph g = explore(e.cad, e.labels, LiftConfig{});
    CHECK(g.nodes.size() == 10);
    CHECK(g.edges.size() == 15);
    auto least = minimum(g);
    REQUIRE(least);
    CHECK(g.nodes[*least].blocks.size() == 13);
    CHECK(is_locally_confluent(g));
    CHECK(is_globally_confluent(g));
    bool has_46 = false;
    for (const auto& edge : g.edges) {
        has_46 |= edge.rule.pivot == CellIndex{4, 6};
        CHECK(g.nodes[edge.to].blocks.size() < g.nodes[edge.from].blocks.size());
        CHECK(partition_refines(g.nodes[edge.from].blocks, g.nodes[edge.to].blocks));
    }
    CHECK(has_46);
    // Every node is adapted with its transported labels.
    for (const auto& node : g.nodes)
        CHECK(check_adapted(node.cad, e.set) == node.labels);
    CHECK(poset_to_dot(g).find("peripheries=2") != std::string::npos);
}

TEST_CASE("trousers poset") {
    GalleryEntry e = gallery_entry("trousers-Cbar");
    PosetGraph g = explore(e.cad, e.labels, LiftConfig{});
    CHECK(g.nodes.size() == 5);
    CHECK(g.edges.size() == 5);
    auto sinks = minimal_elements(g);
    REQUIRE(sinks.size() == 2);
    CHECK_FALSE(minimum(g));
    CHECK_FALSE(is_locally_confluent(g));
    CHECK_FALSE(is_globally_confluent(g));
    // The sinks are the two trousers decompositions.
    CommonRefinement r = common_refinement(gallery_entry("trousers-C").cad, gallery_entry("trousers-C").labels,
                                           gallery_entry("trousers-Cp").cad, gallery_entry("trousers-Cp").labels,
                                           LiftConfig{});
    Cad root = g.root;
    std::set<Partition> expected{leaf_partition(r.first, root), leaf_partition(r.second, root)};
    std::set<Partition> got{g.nodes[sinks[0]].blocks, g.nodes[sinks[1]].blocks};
    CHECK(got == expected);
}

TEST_CASE("common refinement") {
    GalleryEntry a = gallery_entry("disk-C"), b = gallery_entry("disk-Cp");
    CommonRefinement r = common_refinement(a.cad, a.labels, b.cad, b.labels, LiftConfig{});
    CHECK(leaf_count(r.cad) == 23);
    Cad root = r.cad.with_provenance(identity_provenance(r.cad));
    CHECK(refines(root, r.first, root));
    CHECK(refines(r.second, r.first, root));
    CHECK(check_adapted(r.cad, a.set) == r.labels);

    // Sets that disagree on a shared cell.
    LeafLabeling flipped = b.labels;
    for (auto& [leaf, bit] : flipped)
        bit = !bit;
    CHECK_THROWS_AS(common_refinement(a.cad, a.labels, b.cad, flipped, LiftConfig{}), std::invalid_argument);

    // Sections x2 = x1 and x2 = -x1 cross at the origin.
    auto line = [](const char* f) {
        SectionStack s;
        s.functions.push_back(parse_expr(f));
        return Cad(2, {{CellIndex(), SectionStack{}}, {CellIndex{1}, s}});
    };
    LeafLabeling l{{CellIndex{1, 1}, false}, {CellIndex{1, 2}, false}, {CellIndex{1, 3}, false}};
    CHECK_THROWS_AS(common_refinement(line("x1"), l, line("(neg x1)"), l, LiftConfig{}), SectionsCross);
}

TEST_CASE("cylinder extension") {
    GalleryEntry e = gallery_entry("trousers-C");
    Extension x = extend_cylinder(e.cad, e.labels, 5);
    CHECK(x.cad.dim() == 5);
    CHECK(leaf_count(x.cad) == 9);
    CHECK(validate_cad(x.cad).ok());
    CHECK(check_adapted(x.cad, e.set) == x.labels);
    CHECK_THROWS_AS(extend_cylinder(e.cad, e.labels, 2), std::invalid_argument);
}

TEST_CASE("random graphs: helper consistency") {
    auto g = rng(71);
    for (int i = 0; i < 300; ++i) {
        std::size_t n = static_cast<std::size_t>(uniform(g, 1, 9));
        std::vector<std::pair<std::size_t, std::size_t>> edges;
        // Edges only go forward, so the graph is acyclic like every poset.
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                if (uniform(g, 0, 3) == 0)
                    edges.emplace_back(a, b);
        PosetGraph pg = abstract_graph(n, edges);
        auto reach = closure(n, edges);
        CHECK(pg.reachability() == reach);

        std::vector<std::size_t> sinks;
        for (std::size_t a = 0; a < n; ++a) {
            bool out = false;
            for (auto [x, y] : edges)
                out |= x == a;
            if (!out)
                sinks.push_back(a);
        }
        CHECK(minimal_elements(pg) == sinks);
        // On acyclic graphs local and global confluence agree.
        CHECK(is_locally_confluent(pg) == is_globally_confluent(pg));
        // With all nodes reachable from node 0, one sink is a minimum.
        bool rooted = true;
        for (std::size_t a = 0; a < n; ++a)
            rooted &= reach[0][a];
        if (rooted) {
            CHECK(minimum(pg).has_value() == (sinks.size() == 1));
            CHECK(is_globally_confluent(pg) == (sinks.size() == 1));
        }
    }
}
