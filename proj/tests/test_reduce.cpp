#include "doctest.h"
#include "cadmin/gallery.hpp"
#include "support.hpp"

using namespace cadmin;
using namespace cadmin::testing;

namespace {

SectionStack stack_of(std::initializer_list<const char*> fs) {
    SectionStack s;
    for (const char* f : fs)
        s.functions.push_back(parse_expr(f));
    return s;
}

// One section over each of the three cells around x1 = 0; `right` is the
// function over x1 > 0.
std::pair<Cad, LeafLabeling> three_pieces(const char* right) {
    Cad c(2, {{CellIndex(), stack_of({"0"})},
              {CellIndex{1}, stack_of({"(sqrt (add (pow x1 2) 1))"})},
              {CellIndex{2}, stack_of({"1"})},
              {CellIndex{3}, stack_of({right})}});
    LeafLabeling l;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            l[CellIndex{a, b}] = b == 2;
    return {c, l};
}

LiftConfig sampled() {
    LiftConfig cfg;
    cfg.mode = LiftMode::Sampled;
    return cfg;
}

}  // namespace

TEST_CASE("merging the disk cylinders") {
    GalleryEntry cp = gallery_entry("disk-Cp");
    GalleryEntry c = gallery_entry("disk-C");
    MergedCells m = merge_cells(cp.cad, RuleId{CellIndex{4}});
    CHECK(leaf_count(m.cad) == 13);
    CHECK(validate_cad(m.cad).ok());
    CHECK(transport_labels(cp.labels, RuleId{CellIndex{4}}) == c.labels);
    // The glued functions take the values of the disk's own sections.
    auto g = rng(61);
    for (const auto& leaf : c.cad.leaves()) {
        if (!leaf.is_section())
            continue;
        for (int t = 0; t < 5; ++t) {
            auto p = random_point_in(c.cad, leaf, g);
            if (p)
                CHECK(compare(m.cad.section_function(leaf), c.cad.section_function(leaf), *p) == 0);
        }
    }
    for (const auto& s : m.glued)
        CHECK(s.trivially_continuous);
}

TEST_CASE("lifts on the disk") {
    GalleryEntry cp = gallery_entry("disk-Cp");
    for (LiftConfig cfg : {LiftConfig{}, sampled()}) {
        auto lifted = try_lift(cp.cad, cp.labels, RuleId{CellIndex{4}}, cfg);
        REQUIRE(lifted);
        CHECK(leaf_count(*lifted) == 13);
    }
    GalleryEntry cpp = gallery_entry("disk-Cpp");
    MinimalResult r = minimal(cpp.cad, cpp.labels, LiftConfig{});
    CHECK(leaf_count(r.cad) == 13);
    CHECK(r.labels == gallery_entry("disk-C").labels);
    CHECK(r.log.size() == 4);
    CHECK(check_adapted(r.cad, cpp.set) == r.labels);
}

TEST_CASE("trousers fixed points") {
    for (const char* name : {"trousers-C", "trousers-Cp", "U-C", "U-Cp"}) {
        GalleryEntry e = gallery_entry(name);
        auto rules = applicable_rules(build_tree(e.cad, e.labels));
        REQUIRE(rules.size() == 1);
        for (LiftConfig cfg : {LiftConfig{}, sampled()}) {
            LiftResult r = try_lift_explained(e.cad, e.labels, rules[0], cfg);
            CHECK_FALSE(r.cad);
            CHECK_FALSE(r.reason.empty());
            MinimalResult m = minimal(e.cad, e.labels, cfg);
            CHECK(m.log.empty());
            CHECK(same_geometry(m.cad, e.cad));
        }
    }
}

TEST_CASE("sampled evidence detects jumps") {
    auto [smooth, l1] = three_pieces("(add 1 (pow x1 2))");
    CHECK(try_lift(smooth, l1, RuleId{CellIndex{2}}, sampled()));
    // Without a certificate the glue is not accepted.
    CHECK_FALSE(try_lift(smooth, l1, RuleId{CellIndex{2}}, LiftConfig{}));
    CHECK(try_lift(smooth.with_certificates({CellIndex{2}}), l1, RuleId{CellIndex{2}}, LiftConfig{}));

    auto [jump, l2] = three_pieces("(add 2 (pow x1 2))");
    LiftResult r = try_lift_explained(jump, l2, RuleId{CellIndex{2}}, sampled());
    CHECK_FALSE(r.cad);
    CHECK(r.reason.find("jumps") != std::string::npos);

    // A tolerance below the evaluation precision cannot settle continuity
    // of the irrational piece.
    LiftConfig coarse = sampled();
    coarse.tolerance = pow2_neg(70);
    coarse.strict = true;
    CHECK_THROWS_AS(try_lift(smooth, l1, RuleId{CellIndex{2}}, coarse), UnknownEvidence);
    coarse.strict = false;
    CHECK_FALSE(try_lift(smooth, l1, RuleId{CellIndex{2}}, coarse));
}

TEST_CASE("rules that do not hold are refused") {
    GalleryEntry c = gallery_entry("disk-C");
    CHECK_THROWS_AS(try_lift(c.cad, c.labels, RuleId{CellIndex{2}}, LiftConfig{}), RuleNotApplicable);
}

TEST_CASE("sampled mode agrees with certificates on the gallery") {
    for (const auto& name : gallery_names()) {
        GalleryEntry e = gallery_entry(name);
        for (const auto& rule : applicable_rules(build_tree(e.cad, e.labels))) {
            bool cert = try_lift(e.cad, e.labels, rule, LiftConfig{}).has_value();
            bool samp = try_lift(e.cad, e.labels, rule, sampled()).has_value();
            CHECK_MESSAGE(cert == samp, name << " rule " << rule.to_string());
        }
    }
}

TEST_CASE("rule orders") {
    GalleryEntry e = gallery_entry("disk-Cpp");
    CadTree t = build_tree(e.cad, e.labels);
    auto lex = ordered_rules(t, RuleOrder::Lex);
    auto deep = ordered_rules(t, RuleOrder::DeepFirst);
    CHECK(lex.size() == 4);
    CHECK(lex.front().pivot == CellIndex{3, 6});
    CHECK(deep.back().pivot == CellIndex{4});
    LiftConfig cfg;
    cfg.order = RuleOrder::Lex;
    CHECK(leaf_count(minimal(e.cad, e.labels, cfg).cad) == 13);
}

TEST_CASE("random section insertions reduce back") {
    GalleryEntry base = gallery_entry("disk-C");
    auto g = rng(62);
    for (int i = 0; i < 25; ++i) {
        // A constant section strictly inside one of the three base sectors.
        int sector = 2 * static_cast<int>(uniform(g, 0, 2)) + 1;
        Rational lo = sector == 1 ? Rational(-9) : (sector == 3 ? Rational(-1) : Rational(1));
        Rational hi = sector == 1 ? Rational(-1) : (sector == 3 ? Rational(1) : Rational(9));
        Rational t = ratio(uniform(g, 1, 99), 100);
        Rational at = lo + (hi - lo) * t;
        Cad refined = refine_by_section(base.cad, CellIndex(), sector, Expr::constant(at));
        LeafLabeling labels = split_labels(base.labels, CellIndex(), sector);
        CHECK(validate_cad(refined).ok());
        std::size_t above = count_leaves(base.cad.stacks(), CellIndex{sector}, 2);
        CHECK(leaf_count(refined) == leaf_count(base.cad) + 2 * above);
        CHECK(check_adapted(refined, base.set) == labels);

        MinimalResult m = minimal(refined, labels, LiftConfig{});
        CHECK(leaf_count(m.cad) == 13);
        CHECK(m.labels == base.labels);
        CHECK(reduction_reachable(m.cad, refined.with_provenance(identity_provenance(refined)), labels,
                                  refined.with_provenance(identity_provenance(refined)), LiftConfig{}));
    }
}

TEST_CASE("section insertion errors") {
    GalleryEntry base = gallery_entry("disk-C");
    CHECK_THROWS_AS(refine_by_section(base.cad, CellIndex(), 3, Expr::constant(2)), SectionOutOfRange);
    CHECK_THROWS_AS(refine_by_section(base.cad, CellIndex(), 2, Expr::constant(0)), std::invalid_argument);
    CHECK_THROWS_AS(refine_by_section(base.cad, CellIndex(), 3, parse_expr("x1")), std::invalid_argument);
    CHECK_THROWS_AS(refine_by_section(base.cad, CellIndex{1, 1}, 1, Expr::constant(0)), std::invalid_argument);
}
