#pragma once

// Labelled cell trees and the tree-level merge rules.

#include "cadmin/cadmodel.hpp"

namespace cadmin {

class LabelMissing : public std::runtime_error {
public:
    explicit LabelMissing(const CellIndex& leaf)
        : std::runtime_error("no label for leaf '" + leaf.to_string() + "'"), leaf_(leaf) {}
    const CellIndex& leaf() const { return leaf_; }

private:
    CellIndex leaf_;
};

class PivotNotEven : public std::invalid_argument {
public:
    explicit PivotNotEven(const CellIndex& a)
        : std::invalid_argument("pivot '" + a.to_string() + "' does not end in an even letter") {}
};

class RuleNotApplicable : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Merge rule at an even node: the node and its two neighbours collapse.
struct RuleId {
    CellIndex pivot;
    std::string to_string() const { return pivot.to_string(); }
    auto operator<=>(const RuleId&) const = default;
};

class CadTree {
public:
    /// counts: every internal node to its number of sections; labels: every
    /// leaf (depth n). Throws std::invalid_argument on inconsistent shape.
    CadTree(int depth, std::map<CellIndex, std::size_t> counts, LeafLabeling labels);

    int depth() const { return depth_; }
    const std::map<CellIndex, std::size_t>& counts() const { return counts_; }
    const LeafLabeling& labels() const { return labels_; }
    std::size_t count(const CellIndex& I) const;
    bool has_node(const CellIndex& I) const;

    /// All nodes, lexicographic order.
    std::vector<CellIndex> nodes() const;
    std::vector<CellIndex> leaves() const;

    /// Recursive label of a node: the leaf bit, or the sequence of the
    /// children's labels, encoded so that equal strings mean equal labels.
    std::string label(const CellIndex& I) const;

private:
    int depth_;
    std::map<CellIndex, std::size_t> counts_;
    LeafLabeling labels_;
};

CadTree build_tree(const Cad& c, const LeafLabeling& labels);

/// First k letters of I (all of I when shorter).
CellIndex prefix(const CellIndex& I, std::size_t k);

/// Relabelling induced by merging at pivot A.
CellIndex psi(const CellIndex& A, const CellIndex& I);

/// Even nodes whose two neighbours carry the same recursive label as the
/// node itself, in lexicographic order.
std::vector<RuleId> applicable_rules(const CadTree& t);
bool is_applicable(const CadTree& t, const RuleId& r);

CadTree apply_tree_reduction(const CadTree& t, const RuleId& r);

/// Graphviz rendering; leaves in the set are green, others red.
std::string tree_to_dot(const CadTree& t);

}  // namespace cadmin
