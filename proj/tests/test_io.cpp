#include "doctest.h"
#include "cadmin/gallery.hpp"
#include "cadmin/io.hpp"
#include "support.hpp"

using namespace cadmin;
using namespace cadmin::testing;

TEST_CASE("gallery entries round-trip through JSON") {
    for (const auto& name : gallery_names()) {
        GalleryEntry e = gallery_entry(name);
        std::string text = serialize_cad(e.cad, &e.labels, &e.set);
        CadDocument d = parse_cad(text);
        CHECK_MESSAGE(same_geometry(d.cad, e.cad), name);
        CHECK(d.cad.certificates() == e.cad.certificates());
        REQUIRE(d.labels);
        CHECK(*d.labels == e.labels);
        REQUIRE(d.set);
        CHECK(canonicalize(*d.set) == canonicalize(e.set));
        CHECK(serialize_cad(d.cad, &*d.labels, &*d.set) == text);
    }
}

TEST_CASE("hand-written disk document") {
    const char* doc = R"json({
      "n": 2,
      "stacks": {
        "": {"u": 2, "xi": ["-1", "1"]},
        "1": {"u": 0, "xi": []},
        "2": {"u": 1, "xi": ["0"]},
        "3": {"u": 2, "xi": ["(neg (sqrt (sub 1 (pow x1 2))))", "(sqrt (sub 1 (pow x1 2)))"]},
        "4": {"u": 1, "xi": ["0"]},
        "5": {"u": 0, "xi": []}
      },
      "set": "(le (add (pow x1 2) (pow x2 2)) 1)"
    })json";
    CadDocument d = parse_cad(doc);
    CHECK(leaf_count(d.cad) == 13);
    CHECK_FALSE(d.labels);
    CHECK(check_adapted(d.cad, *d.set) == gallery_entry("disk-C").labels);
}

TEST_CASE("malformed documents") {
    CHECK_THROWS_AS(parse_cad(R"({"n": 1, "stacks": {"": {"u": 1, "xi": ["0", "1"]}}})"), ValidationFailed);
    CHECK_THROWS_AS(parse_cad(R"({"n": 1, "stacks": {"": {"u": 2, "xi": ["1", "0"]}}})"), ValidationFailed);
    CHECK_THROWS_AS(parse_cad(R"json({"n": 1, "stacks": {"": {"u": 1, "xi": ["(add x1"]}}})json"), ParseError);
    CHECK_THROWS_AS(parse_cad(R"({"n": 1, "stacks": )"), ParseError);
    CHECK_THROWS_AS(parse_cad(R"({"stacks": {}})"), ParseError);
    try {
        parse_cad("{\"n\": 1,\n  oops}");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.offset() > 0);
    }
}

TEST_CASE("reports are deterministic") {
    GalleryEntry e = gallery_entry("trousers-Cbar");
    std::string a = poset_report(explore(e.cad, e.labels, LiftConfig{}));
    std::string b = poset_report(explore(e.cad, e.labels, LiftConfig{}));
    CHECK(a == b);
    CHECK(a.find("\"confluent\": false") != std::string::npos);
    CHECK(a.find("\"minimum\": null") != std::string::npos);
}
