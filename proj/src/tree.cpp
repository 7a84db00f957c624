#include "cadmin/tree.hpp"

#include <functional>

namespace cadmin {

CadTree::CadTree(int depth, std::map<CellIndex, std::size_t> counts, LeafLabeling labels)
    : depth_(depth), counts_(std::move(counts)), labels_(std::move(labels)) {
    if (depth < 1)
        throw std::invalid_argument("tree depth must be at least 1");
    std::size_t internal = 0, leaves = 0;
    std::function<void(const CellIndex&)> walk = [&](const CellIndex& I) {
        if (I.level() == static_cast<std::size_t>(depth_)) {
            if (!labels_.count(I))
                throw LabelMissing(I);
            ++leaves;
            return;
        }
        auto it = counts_.find(I);
        if (it == counts_.end())
            throw std::invalid_argument("internal node '" + I.to_string() + "' has no count");
        ++internal;
        for (int l = 1; l <= static_cast<int>(2 * it->second + 1); ++l)
            walk(I.child(l));
    };
    walk(CellIndex());
    if (internal != counts_.size())
        throw std::invalid_argument("counts given for nodes outside the tree");
    if (leaves != labels_.size())
        throw std::invalid_argument("labels given for nodes outside the tree");
}

std::size_t CadTree::count(const CellIndex& I) const {
    auto it = counts_.find(I);
    if (it == counts_.end())
        throw std::out_of_range("no internal node '" + I.to_string() + "'");
    return it->second;
}

bool CadTree::has_node(const CellIndex& I) const {
    if (I.level() > static_cast<std::size_t>(depth_))
        return false;
    for (std::size_t k = 0; k < I.level(); ++k) {
        auto it = counts_.find(I.prefix(k));
        if (it == counts_.end() || I[k] > static_cast<int>(2 * it->second + 1))
            return false;
    }
    return true;
}

std::vector<CellIndex> CadTree::nodes() const {
    std::vector<CellIndex> out;
    std::function<void(const CellIndex&)> walk = [&](const CellIndex& I) {
        out.push_back(I);
        if (I.level() == static_cast<std::size_t>(depth_))
            return;
        for (int l = 1; l <= static_cast<int>(2 * count(I) + 1); ++l)
            walk(I.child(l));
    };
    walk(CellIndex());
    return out;
}

std::vector<CellIndex> CadTree::leaves() const {
    std::vector<CellIndex> out;
    for (const auto& [leaf, label] : labels_)
        out.push_back(leaf);
    return out;
}

std::string CadTree::label(const CellIndex& I) const {
    if (I.level() == static_cast<std::size_t>(depth_))
        return labels_.at(I) ? "1" : "0";
    std::string s = "(";
    for (int l = 1; l <= static_cast<int>(2 * count(I) + 1); ++l)
        s += label(I.child(l));
    return s + ")";
}

CadTree build_tree(const Cad& c, const LeafLabeling& labels) {
    std::map<CellIndex, std::size_t> counts;
    for (std::size_t k = 0; k < static_cast<std::size_t>(c.dim()); ++k)
        for (const auto& I : c.cells(k))
            counts.emplace(I, c.count(I));
    LeafLabeling leaf_labels;
    for (const auto& leaf : c.leaves()) {
        auto it = labels.find(leaf);
        if (it == labels.end())
            throw LabelMissing(leaf);
        leaf_labels.emplace(leaf, it->second);
    }
    return CadTree(c.dim(), std::move(counts), std::move(leaf_labels));
}

CellIndex prefix(const CellIndex& I, std::size_t k) { return I.prefix(k); }

CellIndex psi(const CellIndex& A, const CellIndex& I) {
    if (!A.is_section())
        throw PivotNotEven(A);
    std::size_t k = A.level();
    if (I.level() < k)
        return I;
    CellIndex p = I.prefix(k);
    if (p == A)
        return I.with_letter(k - 1, I[k - 1] - 1);
    if (p.prefix(k - 1) == A.parent() && p[k - 1] > A[k - 1])
        return I.with_letter(k - 1, I[k - 1] - 2);
    return I;
}

bool is_applicable(const CadTree& t, const RuleId& r) {
    const CellIndex& A = r.pivot;
    if (!A.is_section() || !t.has_node(A))
        return false;
    std::size_t k = A.level();
    CellIndex before = A.with_letter(k - 1, A.last() - 1);
    CellIndex after = A.with_letter(k - 1, A.last() + 1);
    std::string mid = t.label(A);
    return t.label(before) == mid && t.label(after) == mid;
}

std::vector<RuleId> applicable_rules(const CadTree& t) {
    std::vector<RuleId> out;
    for (const auto& I : t.nodes())
        if (I.is_section() && is_applicable(t, RuleId{I}))
            out.push_back(RuleId{I});
    return out;
}

CadTree apply_tree_reduction(const CadTree& t, const RuleId& r) {
    if (!r.pivot.is_section())
        throw PivotNotEven(r.pivot);
    if (!is_applicable(t, r))
        throw RuleNotApplicable("rule at '" + r.pivot.to_string() + "' is not applicable");
    const CellIndex& A = r.pivot;
    CellIndex parent = A.parent();
    std::map<CellIndex, std::size_t> counts;
    for (const auto& [I, u] : t.counts()) {
        std::size_t v = I == parent ? u - 1 : u;
        counts[psi(A, I)] = v;
    }
    LeafLabeling labels;
    for (const auto& [leaf, bit] : t.labels())
        labels[psi(A, leaf)] = bit;
    return CadTree(t.depth(), std::move(counts), std::move(labels));
}

std::string tree_to_dot(const CadTree& t) {
    auto id = [](const CellIndex& I) { return "\"n" + I.to_string() + "\""; };
    std::string s = "digraph tree {\n  node [shape=circle, style=filled, fillcolor=white];\n";
    for (const auto& I : t.nodes()) {
        std::string name = I.empty() ? "ε" : I.to_string();
        s += "  " + id(I) + " [label=\"" + name + "\"";
        if (I.level() == static_cast<std::size_t>(t.depth()))
            s += t.labels().at(I) ? ", fillcolor=green" : ", fillcolor=red";
        s += "];\n";
        if (!I.empty())
            s += "  " + id(I.parent()) + " -> " + id(I) + ";\n";
    }
    return s + "}\n";
}

}  // namespace cadmin
