#pragma once

// Cylindrical decompositions: cell indices, section stacks, sample points,
// validation, adaptedness and the refinement order.

#include "cadmin/expr.hpp"

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

namespace cadmin {

/// Word of positive letters naming a cell; the empty word is the level-0
/// base cell. A last letter that is even names a section, odd a sector.
class CellIndex {
public:
    CellIndex() = default;
    explicit CellIndex(std::vector<int> letters);
    CellIndex(std::initializer_list<int> letters) : CellIndex(std::vector<int>(letters)) {}

    /// "" or dot-separated letters such as "1.2".
    static CellIndex parse(std::string_view text);

    std::size_t level() const { return letters_.size(); }
    bool empty() const { return letters_.empty(); }
    int operator[](std::size_t i) const { return letters_[i]; }
    int last() const { return letters_.back(); }
    bool is_section() const { return !empty() && last() % 2 == 0; }
    const std::vector<int>& letters() const { return letters_; }

    CellIndex parent() const;
    CellIndex child(int letter) const;
    /// First k letters, or the whole word when it is shorter.
    CellIndex prefix(std::size_t k) const;
    /// Copy with letter at 0-based position pos replaced.
    CellIndex with_letter(std::size_t pos, int letter) const;
    bool has_prefix(const CellIndex& p) const;

    std::string to_string() const;

    auto operator<=>(const CellIndex&) const = default;

private:
    std::vector<int> letters_;
};

struct SectionStack {
    std::vector<Expr> functions;
    std::size_t size() const { return functions.size(); }
    friend bool operator==(const SectionStack&, const SectionStack&) = default;
};

using StackMap = std::map<CellIndex, SectionStack>;
using LeafLabeling = std::map<CellIndex, bool>;

/// Records which cells of a root decomposition make up each cell of a
/// coarsening of it.
struct Provenance {
    std::string root_fingerprint;
    /// Every cell of the coarsening (all levels) to the root cells of the
    /// same level it contains, sorted.
    std::map<CellIndex, std::vector<CellIndex>> constituents;
};

class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class Cad {
public:
    /// Stacks must exist for every non-leaf cell (see validate_cad for the
    /// full structural check). Sample overrides give the last coordinate of
    /// a sector sample as a function of the parent sample.
    Cad(int n, StackMap stacks, std::map<CellIndex, Expr> sample_overrides = {},
        std::shared_ptr<const Provenance> provenance = nullptr,
        std::set<CellIndex> certificates = {});

    int dim() const { return n_; }
    const StackMap& stacks() const { return stacks_; }
    const SectionStack& stack(const CellIndex& base) const;
    /// Number of sections above a non-leaf cell.
    std::size_t count(const CellIndex& base) const { return stack(base).size(); }
    bool has_cell(const CellIndex& I) const;

    /// All cells of level k in lexicographic order.
    std::vector<CellIndex> cells(std::size_t level) const;
    std::vector<CellIndex> leaves() const { return cells(static_cast<std::size_t>(n_)); }

    /// The function whose graph is the section I.
    const Expr& section_function(const CellIndex& I) const;
    /// Bounding functions of a sector I; nullopt for -inf / +inf.
    std::optional<Expr> lower_bound(const CellIndex& I) const;
    std::optional<Expr> upper_bound(const CellIndex& I) const;

    /// Witness point of the cell. Throws EvalError when it cannot be formed.
    Point sample(const CellIndex& I) const;
    const std::map<CellIndex, Expr>& sample_overrides() const { return overrides_; }

    const std::shared_ptr<const Provenance>& provenance() const { return provenance_; }
    /// Section cells of the provenance root asserted to glue continuously
    /// with their flanking functions.
    const std::set<CellIndex>& certificates() const { return certificates_; }

    Cad with_provenance(std::shared_ptr<const Provenance> p) const;
    Cad with_certificates(std::set<CellIndex> certs) const;

    /// Hash of the geometry (stacks and sample overrides).
    std::string fingerprint() const;

    /// Same geometry (structural equality of stacks and overrides).
    friend bool same_geometry(const Cad& a, const Cad& b);

private:
    struct SampleCache;

    int n_;
    StackMap stacks_;
    std::map<CellIndex, Expr> overrides_;
    std::shared_ptr<const Provenance> provenance_;
    std::set<CellIndex> certificates_;
    std::shared_ptr<SampleCache> cache_;
};

std::size_t leaf_count(const Cad& c);

// ---------------------------------------------------------------------------
// Validation

enum class ViolationKind { Structure, ChildCount, Ordering, SampleOutside, Evaluation };
const char* violation_name(ViolationKind k);

struct Violation {
    ViolationKind kind;
    CellIndex cell;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    /// Checks that could not be decided at the requested precision.
    std::vector<Violation> undecidable;
    bool ok() const { return violations.empty() && undecidable.empty(); }
    std::string to_string() const;
};

ValidationReport validate_cad(const Cad& c, const Rational& precision = pow2_neg(40));

class ValidationFailed : public std::runtime_error {
public:
    explicit ValidationFailed(ValidationReport r)
        : std::runtime_error("invalid decomposition:\n" + r.to_string()), report_(std::move(r)) {}
    const ValidationReport& report() const { return report_; }

private:
    ValidationReport report_;
};

// ---------------------------------------------------------------------------
// Sampling and adaptedness

/// A random point of the cell, or nullopt when the bounds could not be
/// separated at the random base point.
std::optional<Point> random_point_in(const Cad& c, const CellIndex& I, std::mt19937_64& rng,
                                     const EvalContext& ctx = {});

class NotAdapted : public std::runtime_error {
public:
    NotAdapted(CellIndex leaf, std::string first, std::string second)
        : std::runtime_error("leaf " + (leaf.empty() ? std::string("ε") : leaf.to_string()) +
                             " has points in and out of the set: " + first + " vs " + second),
          leaf_(std::move(leaf)) {}
    const CellIndex& leaf() const { return leaf_; }

private:
    CellIndex leaf_;
};

/// Labels each leaf by the set membership of its sample and checks `probes`
/// random points per leaf against it.
LeafLabeling check_adapted(const Cad& c, const Formula& set, const Rational& precision = pow2_neg(40),
                           int probes = 3, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Refinement order

class NotComparableRepresentation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sorted blocks of root leaves.
using Partition = std::vector<std::vector<CellIndex>>;

/// Leaves of c as blocks of root leaves.
Partition leaf_partition(const Cad& c, const Cad& root);

/// Every block of `coarse` is a union of blocks of `fine`.
bool refines(const Cad& fine, const Cad& coarse, const Cad& root);
bool partition_refines(const Partition& fine, const Partition& coarse);

/// Provenance making c its own root.
std::shared_ptr<const Provenance> identity_provenance(const Cad& c);

}  // namespace cadmin
