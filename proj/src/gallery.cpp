#include "cadmin/gallery.hpp"

#include <functional>

namespace cadmin {

namespace {

Expr E(const char* s) { return parse_expr(s); }

SectionStack S(std::initializer_list<const char*> fs) {
    SectionStack s;
    for (const char* f : fs)
        s.functions.push_back(E(f));
    return s;
}

CellIndex I(const char* s) { return CellIndex::parse(s); }

const char* const disk_set = "(le (add (pow x1 2) (pow x2 2)) 1)";
const char* const upper = "(sqrt (sub 1 (pow x1 2)))";
const char* const lower = "(neg (sqrt (sub 1 (pow x1 2))))";

Cad disk_c() {
    return Cad(2, {{I(""), S({"-1", "1"})},
                   {I("1"), S({})},
                   {I("2"), S({"0"})},
                   {I("3"), S({lower, upper})},
                   {I("4"), S({"0"})},
                   {I("5"), S({})}});
}

Cad disk_cp() {
    Cad c = refine_by_section(disk_c(), I(""), 3, E("0"));
    // Rational points on the circle keep the samples exact.
    return Cad(2, c.stacks(), {{I("3"), E("-3/5")}, {I("5"), E("3/5")}}, nullptr, {I("4")});
}

Cad disk_cpp() {
    Cad c = disk_cp();
    Expr f = E("(sub 1 (div 1 (mul 2 (sub (pow x1 2) 1))))");
    for (const char* base : {"3", "4", "5"})
        c = refine_by_section(c, I(base), 5, f);
    return c.with_certificates({I("4")});
}

const char* const trousers_set =
    "(or (and (or (le x1 0) (le x2 0)) (eq x3 0))"
    " (and (gt x1 0) (gt x2 0) (eq x3 (div (neg x1) 2))))";
const char* const trousers_chi = "(piecewise ((and (gt x1 0) (gt x2 0)) (div (neg x1) 2)) (else 0))";

Cad trousers_c() {
    return Cad(3, {{I(""), S({})},
                   {I("1"), S({"0"})},
                   {I("1.1"), S({trousers_chi})},
                   {I("1.2"), S({trousers_chi})},
                   {I("1.3"), S({trousers_chi})}});
}

Cad trousers_cp() {
    return Cad(3, {{I(""), S({"0"})},
                   {I("1"), S({})},
                   {I("2"), S({})},
                   {I("3"), S({"0"})},
                   {I("1.1"), S({"0"})},
                   {I("2.1"), S({"0"})},
                   {I("3.1"), S({"0"})},
                   {I("3.2"), S({"0"})},
                   {I("3.3"), S({"(div (neg x1) 2)"})}});
}

const char* const u_set =
    "(or (and (or (le x1 0) (le x2 0)) (le x3 0))"
    " (and (ge x1 0) (ge x2 0) (le (add x1 (mul x2 x3)) 0) (le x3 0)))";

// Replaces every occurrence of -x1/2 by -x1/x2.
Cad with_u_sections(const Cad& c) {
    const Expr from = E("(div (neg x1) 2)");
    const Expr to = E("(div (neg x1) x2)");
    std::function<Expr(const Expr&)> swap;
    std::function<Formula(const Formula&)> swapf = [&](const Formula& f) -> Formula {
        switch (f.kind()) {
        case FormulaKind::Atom: return Formula::atom(f.rel(), swap(f.lhs()), swap(f.rhs()));
        case FormulaKind::Not: return Formula::negation(swapf(f.parts()[0]));
        case FormulaKind::And:
        case FormulaKind::Or: {
            std::vector<Formula> parts;
            for (const auto& p : f.parts())
                parts.push_back(swapf(p));
            return f.kind() == FormulaKind::And ? Formula::conj(parts) : Formula::disj(parts);
        }
        default: return f;
        }
    };
    swap = [&](const Expr& e) -> Expr {
        if (e == from)
            return to;
        if (e.kind() == ExprKind::Piecewise) {
            std::vector<std::pair<Formula, Expr>> pieces;
            for (std::size_t i = 0; i < e.guards().size(); ++i)
                pieces.emplace_back(swapf(e.guards()[i]), swap(e.args()[i]));
            std::optional<Expr> other;
            if (e.has_otherwise())
                other = swap(e.args().back());
            return Expr::piecewise(pieces, other);
        }
        return e;
    };
    StackMap stacks;
    for (const auto& [idx, s] : c.stacks()) {
        SectionStack t;
        for (const auto& f : s.functions)
            t.functions.push_back(swap(f));
        stacks.emplace(idx, t);
    }
    return Cad(c.dim(), stacks, c.sample_overrides(), nullptr, c.certificates());
}

std::vector<std::string> strings(std::initializer_list<const char*> xs) { return {xs.begin(), xs.end()}; }

GalleryEntry make(std::string name, std::string description, const Cad& cad, const char* set,
                  ExpectedFacts expected) {
    Formula f = parse_formula(set);
    LeafLabeling labels = check_adapted(cad, f);
    return {std::move(name), std::move(description), cad, f, labels, std::move(expected)};
}

GalleryEntry refinement_entry(std::string name, std::string description, const GalleryEntry& a,
                              const GalleryEntry& b, ExpectedFacts expected) {
    LiftConfig cfg;
    CommonRefinement r = common_refinement(a.cad, a.labels, b.cad, b.labels, cfg);
    // The glue across the base section x1 = 0 is continuous.
    Cad cad = r.cad.with_certificates({I("2")});
    return {std::move(name), std::move(description), cad, a.set, r.labels, std::move(expected)};
}

ExpectedFacts facts(std::size_t leaves, std::vector<std::string> rules, std::vector<std::string> lifted) {
    ExpectedFacts f;
    f.leaves = leaves;
    f.rules = std::move(rules);
    f.lifted = std::move(lifted);
    return f;
}

ExpectedFacts with_poset(ExpectedFacts f, std::size_t nodes, std::size_t edges, std::size_t minimal, bool has_min,
                         bool confluent) {
    f.poset_nodes = nodes;
    f.poset_edges = edges;
    f.minimal_count = minimal;
    f.has_minimum = has_min;
    f.confluent = confluent;
    return f;
}

GalleryEntry build(const std::string& name) {
    if (name == "chain")
        return make("chain", "plane without sections, whole space as the set",
                    Cad(2, {{I(""), S({})}, {I("1"), S({})}}), "(lt 0 1)",
                    with_poset(facts(1, {}, {}), 1, 0, 1, true, true));
    if (name == "disk-C")
        return make("disk-C", "closed unit disk, cylindrical decomposition with 13 cells", disk_c(), disk_set,
                    with_poset(facts(13, {}, {}), 1, 0, 1, true, true));
    if (name == "disk-Cp")
        return make("disk-Cp", "closed unit disk, base sector split at x1 = 0 (23 cells)", disk_cp(), disk_set,
                    with_poset(facts(23, strings({"4"}), strings({"4"})), 2, 1, 1, true, true));
    if (name == "disk-Cpp")
        return make("disk-Cpp", "disk-Cp with an extra section above the disk over the middle cells (29 cells)",
                    disk_cpp(), disk_set,
                    with_poset(facts(29, strings({"4", "3.6", "4.6", "5.6"}), strings({"4", "3.6", "4.6", "5.6"})),
                               10, 15, 1, true, true));
    if (name == "trousers-C")
        return make("trousers-C", "trousers, 9 cells, no base sections", trousers_c(), trousers_set,
                    with_poset(facts(9, strings({"1.2"}), {}), 1, 0, 1, true, true));
    if (name == "trousers-Cp")
        return make("trousers-Cp", "trousers, 15 cells, base split at x1 = 0", trousers_cp(), trousers_set,
                    with_poset(facts(15, strings({"3.2"}), {}), 1, 0, 1, true, true));
    if (name == "trousers-Cbar")
        return refinement_entry("trousers-Cbar", "common refinement of trousers-C and trousers-Cp (27 cells)",
                                build("trousers-C"), build("trousers-Cp"),
                                with_poset(facts(27, strings({"2", "1.2", "2.2", "3.2"}), strings({"2", "1.2", "2.2"})),
                                           5, 5, 2, false, false));
    if (name == "trousers4-C" || name == "trousers4-Cp") {
        GalleryEntry base = build(name == "trousers4-C" ? "trousers-C" : "trousers-Cp");
        Extension x = extend_cylinder(base.cad, base.labels, 4);
        return {name, base.description + ", extended by one free coordinate", x.cad, base.set, x.labels,
                base.expected};
    }
    if (name == "trousers4-Cbar")
        return refinement_entry("trousers4-Cbar", "common refinement of trousers4-C and trousers4-Cp",
                                build("trousers4-C"), build("trousers4-Cp"),
                                with_poset(facts(27, strings({"2", "1.2", "2.2", "3.2"}), strings({"2", "1.2", "2.2"})),
                                           5, 5, 2, false, false));
    if (name == "U-C")
        return make("U-C", "closed set U, trousers-C with -x1/x2 in place of -x1/2", with_u_sections(trousers_c()),
                    u_set, with_poset(facts(9, strings({"1.2"}), {}), 1, 0, 1, true, true));
    if (name == "U-Cp")
        return make("U-Cp", "closed set U, trousers-Cp with -x1/x2 in place of -x1/2",
                    with_u_sections(trousers_cp()), u_set,
                    with_poset(facts(15, strings({"3.2"}), {}), 1, 0, 1, true, true));
    if (name == "U-Cbar")
        return refinement_entry("U-Cbar", "common refinement of U-C and U-Cp", build("U-C"), build("U-Cp"),
                                with_poset(facts(27, strings({"2", "1.2", "2.2", "3.2"}), strings({"2", "1.2", "2.2"})),
                                           5, 5, 2, false, false));
    throw std::out_of_range("unknown gallery entry '" + name + "'");
}

}  // namespace

std::vector<std::string> gallery_names() {
    return {"chain",        "disk-C",      "disk-Cp",     "disk-Cpp",       "trousers-C", "trousers-Cp",
            "trousers-Cbar", "trousers4-C", "trousers4-Cp", "trousers4-Cbar", "U-C",        "U-Cp",
            "U-Cbar"};
}

GalleryEntry gallery_entry(const std::string& name) { return build(name); }

std::vector<std::string> check_expected(const GalleryEntry& e, const LiftConfig& cfg) {
    std::vector<std::string> bad;
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok)
            bad.push_back(e.name + ": " + what);
    };
    ValidationReport report = validate_cad(e.cad, cfg.precision);
    expect(report.ok(), "validation failed: " + report.to_string());
    expect(check_adapted(e.cad, e.set, cfg.precision) == e.labels, "labels are not reproduced");
    expect(leaf_count(e.cad) == e.expected.leaves,
           "expected " + std::to_string(e.expected.leaves) + " leaves, got " + std::to_string(leaf_count(e.cad)));

    std::vector<std::string> rules, lifted;
    for (const auto& r : applicable_rules(build_tree(e.cad, e.labels))) {
        rules.push_back(r.to_string());
        if (try_lift(e.cad, e.labels, r, cfg))
            lifted.push_back(r.to_string());
    }
    auto sorted = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    auto joined = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v)
            s += (s.empty() ? "" : ",") + x;
        return "{" + s + "}";
    };
    expect(sorted(rules) == sorted(e.expected.rules),
           "applicable rules " + joined(rules) + ", expected " + joined(e.expected.rules));
    expect(sorted(lifted) == sorted(e.expected.lifted),
           "lifted rules " + joined(lifted) + ", expected " + joined(e.expected.lifted));

    if (e.expected.poset_nodes) {
        PosetGraph g = explore(e.cad, e.labels, cfg);
        expect(g.nodes.size() == *e.expected.poset_nodes, "poset has " + std::to_string(g.nodes.size()) + " nodes");
        expect(g.edges.size() == *e.expected.poset_edges, "poset has " + std::to_string(g.edges.size()) + " edges");
        expect(minimal_elements(g).size() == *e.expected.minimal_count,
               "poset has " + std::to_string(minimal_elements(g).size()) + " minimal elements");
        expect(minimum(g).has_value() == *e.expected.has_minimum, "minimum existence differs");
        expect(is_locally_confluent(g) == *e.expected.confluent, "confluence differs");
    }
    return bad;
}

}  // namespace cadmin
