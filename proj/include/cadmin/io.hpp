#pragma once

// JSON documents for decompositions and exploration reports.
//
// A decomposition document looks like
//   {"n": 2,
//    "stacks": {"": {"u": 2, "xi": ["-1", "1"]}, "1": {"u": 0, "xi": []}, ...},
//    "samples": {"3": "-3/5"},
//    "labels": {"1.1": 0, ...},
//    "set": "(le (add (pow x1 2) (pow x2 2)) 1)",
//    "certificates": ["4"]}
// Cell indices are dot-separated letters, the base cell is "". Samples give
// the last coordinate of a sector's witness point as an expression in the
// preceding coordinates. Labels, set, samples and certificates are optional.

#include "cadmin/poset.hpp"

namespace cadmin {

struct CadDocument {
    Cad cad;
    std::optional<LeafLabeling> labels;
    std::optional<Formula> set;
};

/// Throws ParseError (malformed JSON, indices or expressions) and
/// ValidationFailed (inconsistent counts, failed validate_cad).
CadDocument parse_cad(std::string_view text, const Rational& precision = pow2_neg(40));

/// Deterministic pretty-printed document (keys sorted).
std::string serialize_cad(const Cad& c, const LeafLabeling* labels = nullptr, const Formula* set = nullptr);

/// {"minimal": [...], "minimum": index|null, "confluent": bool,
///  "node_count": int, "edge_count": int, "nodes": [...], "edges": [...]}
std::string poset_report(const PosetGraph& g);

}  // namespace cadmin
