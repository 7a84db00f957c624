#include "doctest.h"
#include "cadmin/cad1d.hpp"
#include "cadmin/tree.hpp"
#include "support.hpp"

using namespace cadmin;
using namespace cadmin::testing;

TEST_CASE("known univariate sets") {
    auto r = minimum_cad_1d(parse_formula("(and (ge (mul x1 x1) 1) (lt x1 3))"));
    REQUIRE(r.sections.size() == 3);
    CHECK(r.sections[0].compare(-1) == 0);
    CHECK(r.sections[1].compare(1) == 0);
    CHECK(r.sections[2].compare(3) == 0);
    CHECK(leaf_count(r.cad) == 7);

    // An isolated point of the complement is a boundary point.
    auto hole = minimum_cad_1d(parse_formula("(not (eq x1 2))"));
    CHECK(hole.sections.size() == 1);
    // x^2 >= 0 everywhere: no boundary even though x = 0 is a root.
    CHECK(minimum_cad_1d(parse_formula("(ge (pow x1 2) 0)")).sections.empty());
    CHECK(minimum_cad_1d(parse_formula("true")).sections.empty());
    CHECK_THROWS_AS(minimum_cad_1d(parse_formula("(lt x2 0)")), std::invalid_argument);

    auto irr = minimum_cad_1d(parse_formula("(lt (pow x1 2) 2)"));
    REQUIRE(irr.sections.size() == 2);
    CHECK(irr.sections[1].compare(ratio(1414, 1000)) > 0);
    CHECK(irr.sections[1].compare(ratio(1415, 1000)) < 0);
}

TEST_CASE("isolated set points and repeated roots") {
    auto r = minimum_cad_1d(parse_formula("(le (pow (sub x1 1) 2) 0)"));
    REQUIRE(r.sections.size() == 1);
    CHECK(r.sections[0].compare(1) == 0);
    CHECK(r.labels.at(CellIndex{2}) == true);
    CHECK(r.labels.at(CellIndex{1}) == false);
}

TEST_CASE("result is adapted and irreducible") {
    auto g = rng(41);
    for (int i = 0; i < 40; ++i) {
        Formula f = Formula::atom(static_cast<Rel>(uniform(g, 0, 4)), poly_expr(random_coeffs(g, 3)),
                                  Expr::constant(0));
        auto r = minimum_cad_1d(f);
        CHECK(check_adapted(r.cad, f) == r.labels);
        CHECK(applicable_rules(build_tree(r.cad, r.labels)).empty());
    }
}

TEST_CASE("sections equal the boundary from an independent sign chart") {
    auto g = rng(42);
    for (int i = 0; i < 60; ++i) {
        UniFormula u = random_uni_formula(g);
        auto r = minimum_cad_1d(u.formula());
        auto expected = sign_chart_boundary(u);
        REQUIRE(r.sections.size() == expected.size());
        for (std::size_t j = 0; j < expected.size(); ++j)
            CHECK(std::fabs(approx(r.sections[j]) - expected[j]) < 1e-6L);
    }
}
