#pragma once

// The coarsenings reachable from a root decomposition, their order, and
// related constructions.

#include "cadmin/reduce.hpp"

namespace cadmin {

struct PosetNode {
    Cad cad;
    LeafLabeling labels;
    /// Leaves as blocks of root leaves; identifies the node.
    Partition blocks;
    /// One chain of rules leading from the root to this node.
    std::vector<RuleId> history;
};

struct PosetEdge {
    std::size_t from, to;
    RuleId rule;
};

struct PosetGraph {
    /// The root with provenance pointing at itself.
    Cad root;
    /// nodes[0] is the root; nodes appear in breadth-first order.
    std::vector<PosetNode> nodes;
    std::vector<PosetEdge> edges;

    std::vector<std::vector<std::size_t>> successors() const;
    /// reach[i][j]: j is reachable from i in zero or more steps.
    std::vector<std::vector<bool>> reachability() const;
    std::optional<std::size_t> find(const Partition& blocks) const;
};

/// Closure of lifted reductions from the root, deduplicated by partition.
PosetGraph explore(const Cad& root, const LeafLabeling& labels, const LiftConfig& cfg);

/// Nodes without outgoing edges.
std::vector<std::size_t> minimal_elements(const PosetGraph& g);
/// The unique sink when it is reachable from every node.
std::optional<std::size_t> minimum(const PosetGraph& g);
/// Every pair of one-step reducts of a node has a common descendant.
bool is_locally_confluent(const PosetGraph& g);
/// Every pair of descendants of a node has a common descendant.
bool is_globally_confluent(const PosetGraph& g);

class SectionsCross : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownOrder : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct CommonRefinement {
    Cad cad;
    LeafLabeling labels;
    /// The inputs re-expressed as coarsenings of cad.
    Cad first, second;
};

/// Merges the section stacks of two decompositions level by level. Sections
/// are ordered by comparing them at the sample and cfg.boundary_samples
/// random points of each merged cell; sections that agree at all of them
/// are identified. Throws SectionsCross, UnknownOrder, or
/// std::invalid_argument when the labels disagree on a common cell.
CommonRefinement common_refinement(const Cad& c1, const LeafLabeling& labels1, const Cad& c2,
                                   const LeafLabeling& labels2, const LiftConfig& cfg);

/// Bell number B(k) minus one.
Integer count_ssp(unsigned k);

struct Extension {
    Cad cad;
    LeafLabeling labels;
};

/// Adds levels without sections up to dimension n (each cell D becomes
/// D x R); labels follow the cell below.
Extension extend_cylinder(const Cad& c, const LeafLabeling& labels, int n);

/// Graphviz rendering with leaf counts on nodes and pivots on edges.
std::string poset_to_dot(const PosetGraph& g);

}  // namespace cadmin
