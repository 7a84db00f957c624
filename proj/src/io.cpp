#include "cadmin/io.hpp"

#include "json.hpp"

namespace cadmin {

using nlohmann::json;

namespace {

CellIndex index_at(const std::string& key) {
    try {
        return CellIndex::parse(key);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what(), 0);
    }
}

const json& member(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw ParseError(std::string("missing field '") + key + "'", 0);
    return obj.at(key);
}

std::string as_string(const json& v, const std::string& what) {
    if (!v.is_string())
        throw ParseError(what + " must be a string", 0);
    return v.get<std::string>();
}

}  // namespace

CadDocument parse_cad(std::string_view text, const Rational& precision) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), e.byte);
    }
    if (!doc.is_object())
        throw ParseError("document must be a JSON object", 0);
    const json& jn = member(doc, "n");
    if (!jn.is_number_integer() || jn.get<long>() < 1 || jn.get<long>() > 64)
        throw ParseError("'n' must be a positive integer", 0);
    int n = jn.get<int>();

    ValidationReport counts;
    StackMap stacks;
    const json& js = member(doc, "stacks");
    if (!js.is_object())
        throw ParseError("'stacks' must be an object", 0);
    for (const auto& [key, entry] : js.items()) {
        CellIndex I = index_at(key);
        const json& u = member(entry, "u");
        const json& xi = member(entry, "xi");
        if (!u.is_number_integer() || u.get<long>() < 0 || !xi.is_array())
            throw ParseError("stack '" + key + "' needs integer 'u' and array 'xi'", 0);
        SectionStack s;
        for (const auto& f : xi)
            s.functions.push_back(parse_expr(as_string(f, "section function")));
        if (static_cast<long>(s.size()) != u.get<long>())
            counts.violations.push_back({ViolationKind::ChildCount, I,
                                         "u = " + std::to_string(u.get<long>()) + " but " +
                                             std::to_string(s.size()) + " functions given"});
        stacks.emplace(I, std::move(s));
    }
    if (!counts.violations.empty())
        throw ValidationFailed(counts);
    if (!stacks.count(CellIndex())) {
        counts.violations.push_back({ViolationKind::ChildCount, CellIndex(), "no stack over the base cell"});
        throw ValidationFailed(counts);
    }

    std::map<CellIndex, Expr> samples;
    if (doc.contains("samples")) {
        if (!doc["samples"].is_object())
            throw ParseError("'samples' must be an object", 0);
        for (const auto& [key, v] : doc["samples"].items())
            samples.emplace(index_at(key), parse_expr(as_string(v, "sample")));
    }
    std::set<CellIndex> certificates;
    if (doc.contains("certificates")) {
        if (!doc["certificates"].is_array())
            throw ParseError("'certificates' must be an array", 0);
        for (const auto& v : doc["certificates"])
            certificates.insert(index_at(as_string(v, "certificate")));
    }

    Cad cad(n, std::move(stacks), std::move(samples), nullptr, std::move(certificates));
    ValidationReport report = validate_cad(cad, precision);
    if (!report.ok())
        throw ValidationFailed(report);

    CadDocument out{cad, std::nullopt, std::nullopt};
    if (doc.contains("labels")) {
        if (!doc["labels"].is_object())
            throw ParseError("'labels' must be an object", 0);
        LeafLabeling labels;
        for (const auto& [key, v] : doc["labels"].items()) {
            CellIndex I = index_at(key);
            bool bit;
            if (v.is_boolean())
                bit = v.get<bool>();
            else if (v.is_number_integer() && (v.get<long>() == 0 || v.get<long>() == 1))
                bit = v.get<long>() == 1;
            else
                throw ParseError("label of '" + key + "' must be 0 or 1", 0);
            labels.emplace(I, bit);
        }
        out.labels = std::move(labels);
    }
    if (doc.contains("set"))
        out.set = parse_formula(as_string(doc["set"], "set"));
    return out;
}

std::string serialize_cad(const Cad& c, const LeafLabeling* labels, const Formula* set) {
    json doc;
    doc["n"] = c.dim();
    json stacks = json::object();
    for (const auto& [I, s] : c.stacks()) {
        json xi = json::array();
        for (const auto& f : s.functions)
            xi.push_back(f.to_sexpr());
        stacks[I.to_string()] = {{"u", s.size()}, {"xi", xi}};
    }
    doc["stacks"] = stacks;
    if (!c.sample_overrides().empty()) {
        json samples = json::object();
        for (const auto& [I, e] : c.sample_overrides())
            samples[I.to_string()] = e.to_sexpr();
        doc["samples"] = samples;
    }
    if (!c.certificates().empty()) {
        json certs = json::array();
        for (const auto& I : c.certificates())
            certs.push_back(I.to_string());
        doc["certificates"] = certs;
    }
    if (labels) {
        json jl = json::object();
        for (const auto& [I, bit] : *labels)
            jl[I.to_string()] = bit ? 1 : 0;
        doc["labels"] = jl;
    }
    if (set)
        doc["set"] = set->to_sexpr();
    return doc.dump(2) + "\n";
}

std::string poset_report(const PosetGraph& g) {
    auto history = [](const PosetNode& node) {
        json h = json::array();
        for (const auto& r : node.history)
            h.push_back(r.to_string());
        return h;
    };
    json nodes = json::array();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        nodes.push_back({{"id", i}, {"cells", g.nodes[i].blocks.size()}, {"history", history(g.nodes[i])}});
    json edges = json::array();
    for (const auto& e : g.edges)
        edges.push_back({{"from", e.from}, {"to", e.to}, {"pivot", e.rule.to_string()}});
    json minimal = json::array();
    for (std::size_t i : minimal_elements(g))
        minimal.push_back({{"id", i}, {"cells", g.nodes[i].blocks.size()}, {"history", history(g.nodes[i])}});
    json report;
    report["minimal"] = minimal;
    auto m = minimum(g);
    report["minimum"] = m ? json(*m) : json(nullptr);
    report["confluent"] = is_locally_confluent(g);
    report["node_count"] = g.nodes.size();
    report["edge_count"] = g.edges.size();
    report["nodes"] = nodes;
    report["edges"] = edges;
    return report.dump(2) + "\n";
}

}  // namespace cadmin
