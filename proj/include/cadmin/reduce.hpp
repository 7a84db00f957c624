#pragma once

// Turning tree merges into merges of actual cells, the minimization loop and
// section insertion.

#include "cadmin/tree.hpp"

namespace cadmin {

enum class LiftMode { Certificate, Sampled };
enum class RuleOrder { DeepFirst, Lex };

const char* lift_mode_name(LiftMode m);
const char* rule_order_name(RuleOrder o);

struct LiftConfig {
    LiftMode mode = LiftMode::Certificate;
    /// Points of the pivot cylinder used as continuity probes (sampled mode).
    int boundary_samples = 8;
    Rational precision = pow2_neg(40);
    /// Largest jump accepted as continuous (sampled mode).
    Rational tolerance = pow2_neg(20);
    RuleOrder order = RuleOrder::DeepFirst;
    std::uint64_t seed = 1;
    /// Inconclusive evidence throws UnknownEvidence instead of rejecting.
    bool strict = false;
};

class UnknownEvidence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SectionOutOfRange : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A function of the merged decomposition assembled from three pieces.
struct GlueSite {
    CellIndex base;     // stack owner in the merged decomposition
    std::size_t index;  // 0-based position in the stack
    /// The three pieces coincide and contain no case distinction.
    bool trivially_continuous;
};

struct MergedCells {
    Cad cad;
    std::vector<GlueSite> glued;
};

/// The partition obtained by merging the cylinders at A - e, A, A + e,
/// without any check. Provenance is kept relative to the root of c (c itself
/// when c has none).
MergedCells merge_cells(const Cad& c, const RuleId& rule);

LeafLabeling transport_labels(const LeafLabeling& labels, const RuleId& rule);

struct LiftResult {
    std::optional<Cad> cad;
    std::string reason;  // why the lift was rejected, or "lifted"
};

/// Throws RuleNotApplicable when the rule does not hold on the tree.
LiftResult try_lift_explained(const Cad& c, const LeafLabeling& labels, const RuleId& rule,
                              const LiftConfig& cfg);
std::optional<Cad> try_lift(const Cad& c, const LeafLabeling& labels, const RuleId& rule,
                            const LiftConfig& cfg);

/// Applicable tree rules in the attempt order of the configuration.
std::vector<RuleId> ordered_rules(const CadTree& t, RuleOrder order);

struct MinimalResult {
    Cad cad;
    LeafLabeling labels;
    std::vector<RuleId> log;
};

/// Applies the first liftable rule until none is left.
MinimalResult minimal(const Cad& c, const LeafLabeling& labels, const LiftConfig& cfg);

/// Splits sector `sector` above `base` by the graph of xi and duplicates the
/// stacks above it. xi must lie strictly inside the sector at the base
/// sample and at every extra point given.
Cad refine_by_section(const Cad& c, const CellIndex& base, int sector, const Expr& xi,
                      std::span<const Point> extra_samples = {},
                      const Rational& precision = pow2_neg(40));

/// Labels of the decomposition produced by refine_by_section.
LeafLabeling split_labels(const LeafLabeling& labels, const CellIndex& base, int sector);

/// Whether a chain of lifted reductions leads from `from` to `target`; both
/// must be coarsenings of root.
bool reduction_reachable(const Cad& target, const Cad& from, const LeafLabeling& from_labels,
                         const Cad& root, const LiftConfig& cfg);

}  // namespace cadmin
