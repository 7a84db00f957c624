#include "cadmin/cadmodel.hpp"

#include <algorithm>
#include <cstdio>
#include <mutex>
#include <sstream>

namespace cadmin {

// ---------------------------------------------------------------------------
// CellIndex

CellIndex::CellIndex(std::vector<int> letters) : letters_(std::move(letters)) {
    for (int l : letters_)
        if (l < 1)
            throw std::invalid_argument("cell index letters must be positive");
}

CellIndex CellIndex::parse(std::string_view text) {
    std::vector<int> letters;
    if (text.empty())
        return CellIndex();
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t dot = text.find('.', start);
        if (dot == std::string_view::npos)
            dot = text.size();
        std::string_view part = text.substr(start, dot - start);
        if (part.empty() || part.size() > 9)
            throw std::invalid_argument("bad cell index '" + std::string(text) + "'");
        int v = 0;
        for (char ch : part) {
            if (ch < '0' || ch > '9')
                throw std::invalid_argument("bad cell index '" + std::string(text) + "'");
            v = v * 10 + (ch - '0');
        }
        letters.push_back(v);
        start = dot + 1;
    }
    return CellIndex(std::move(letters));
}

CellIndex CellIndex::parent() const {
    if (empty())
        throw std::logic_error("the base cell has no parent");
    return prefix(level() - 1);
}

CellIndex CellIndex::child(int letter) const {
    std::vector<int> l = letters_;
    l.push_back(letter);
    return CellIndex(std::move(l));
}

CellIndex CellIndex::prefix(std::size_t k) const {
    if (k >= level())
        return *this;
    return CellIndex(std::vector<int>(letters_.begin(), letters_.begin() + static_cast<long>(k)));
}

CellIndex CellIndex::with_letter(std::size_t pos, int letter) const {
    std::vector<int> l = letters_;
    l.at(pos) = letter;
    return CellIndex(std::move(l));
}

bool CellIndex::has_prefix(const CellIndex& p) const {
    return p.level() <= level() && std::equal(p.letters_.begin(), p.letters_.end(), letters_.begin());
}

std::string CellIndex::to_string() const {
    std::string s;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (i)
            s += '.';
        s += std::to_string(letters_[i]);
    }
    return s;
}

// ---------------------------------------------------------------------------
// Cad

struct Cad::SampleCache {
    std::mutex mutex;
    std::map<CellIndex, Point> points;
    std::string fingerprint;
};

Cad::Cad(int n, StackMap stacks, std::map<CellIndex, Expr> sample_overrides,
         std::shared_ptr<const Provenance> provenance, std::set<CellIndex> certificates)
    : n_(n), stacks_(std::move(stacks)), overrides_(std::move(sample_overrides)),
      provenance_(std::move(provenance)), certificates_(std::move(certificates)),
      cache_(std::make_shared<SampleCache>()) {
    if (n < 1)
        throw StructureError("dimension must be at least 1");
    if (!stacks_.count(CellIndex()))
        throw StructureError("missing stack over the base cell");
}

const SectionStack& Cad::stack(const CellIndex& base) const {
    auto it = stacks_.find(base);
    if (it == stacks_.end())
        throw std::out_of_range("no stack over cell '" + base.to_string() + "'");
    return it->second;
}

bool Cad::has_cell(const CellIndex& I) const {
    if (I.level() > static_cast<std::size_t>(n_))
        return false;
    for (std::size_t k = 0; k < I.level(); ++k) {
        auto it = stacks_.find(I.prefix(k));
        if (it == stacks_.end())
            return false;
        if (I[k] > static_cast<int>(2 * it->second.size() + 1))
            return false;
    }
    return true;
}

std::vector<CellIndex> Cad::cells(std::size_t level) const {
    std::vector<CellIndex> frontier{CellIndex()};
    for (std::size_t k = 0; k < level; ++k) {
        std::vector<CellIndex> next;
        for (const auto& I : frontier) {
            auto u = static_cast<int>(count(I));
            for (int l = 1; l <= 2 * u + 1; ++l)
                next.push_back(I.child(l));
        }
        frontier = std::move(next);
    }
    return frontier;
}

const Expr& Cad::section_function(const CellIndex& I) const {
    if (!I.is_section())
        throw std::invalid_argument("cell '" + I.to_string() + "' is not a section");
    const auto& s = stack(I.parent());
    auto j = static_cast<std::size_t>(I.last() / 2);
    if (j > s.size())
        throw std::out_of_range("no section '" + I.to_string() + "'");
    return s.functions[j - 1];
}

std::optional<Expr> Cad::lower_bound(const CellIndex& I) const {
    if (I.empty() || I.is_section())
        throw std::invalid_argument("cell '" + I.to_string() + "' is not a sector");
    auto j = static_cast<std::size_t>((I.last() - 1) / 2);
    if (j == 0)
        return std::nullopt;
    return stack(I.parent()).functions.at(j - 1);
}

std::optional<Expr> Cad::upper_bound(const CellIndex& I) const {
    if (I.empty() || I.is_section())
        throw std::invalid_argument("cell '" + I.to_string() + "' is not a sector");
    auto j = static_cast<std::size_t>((I.last() - 1) / 2);
    const auto& s = stack(I.parent());
    if (j >= s.size())
        return std::nullopt;
    return s.functions[j];
}

namespace {

// Rational strictly between the bounds evaluated at p.
Rational sector_value(const Point& p, const std::optional<Expr>& lo, const std::optional<Expr>& hi,
                      const EvalContext& ctx) {
    if (!lo && !hi)
        return Rational(0);
    if (!hi) {
        NumValue v = eval(*lo, p, ctx);
        return v.is_exact() ? Rational(v.lo + 1) : Rational(floor(v.hi) + 1);
    }
    if (!lo) {
        NumValue v = eval(*hi, p, ctx);
        return v.is_exact() ? Rational(v.lo - 1) : Rational(ceil(v.lo) - 1);
    }
    EvalContext c = ctx;
    for (int round = 0; round < 5; ++round) {
        NumValue a = eval(*lo, p, c);
        NumValue b = eval(*hi, p, c);
        if (a.hi < b.lo) {
            if (a.is_exact() && b.is_exact())
                return (a.lo + b.lo) / 2;
            return simplest_between(a.hi, b.lo);
        }
        if (a.lo >= b.hi && (a.is_exact() || a.lo > b.hi))
            throw EvalError("sections out of order at " + p.to_string());
        c.precision *= pow2_neg(64);
    }
    throw GuardUndecidable("cannot separate sections at " + p.to_string());
}

}  // namespace

Point Cad::sample(const CellIndex& I) const {
    if (I.empty())
        return Point();
    {
        std::lock_guard lock(cache_->mutex);
        auto it = cache_->points.find(I);
        if (it != cache_->points.end())
            return it->second;
    }
    if (!has_cell(I))
        throw std::out_of_range("no cell '" + I.to_string() + "'");
    Point p = sample(I.parent());
    if (I.is_section()) {
        p.push_back(Coordinate::generated(section_function(I)));
    } else if (auto it = overrides_.find(I); it != overrides_.end()) {
        p.push_back(Coordinate::generated(it->second));
    } else {
        p.push_back(Coordinate::exact(sector_value(p, lower_bound(I), upper_bound(I), {})));
    }
    std::lock_guard lock(cache_->mutex);
    cache_->points.emplace(I, p);
    return p;
}

Cad Cad::with_provenance(std::shared_ptr<const Provenance> p) const {
    Cad c = *this;
    c.provenance_ = std::move(p);
    return c;
}

Cad Cad::with_certificates(std::set<CellIndex> certs) const {
    Cad c = *this;
    c.certificates_ = std::move(certs);
    return c;
}

std::string Cad::fingerprint() const {
    {
        std::lock_guard lock(cache_->mutex);
        if (!cache_->fingerprint.empty())
            return cache_->fingerprint;
    }
    std::ostringstream os;
    os << n_ << ';';
    for (const auto& [I, s] : stacks_) {
        os << I.to_string() << ':';
        for (const auto& f : s.functions)
            os << f.to_sexpr() << ',';
        os << ';';
    }
    os << '|';
    for (const auto& [I, e] : overrides_)
        os << I.to_string() << ':' << e.to_sexpr() << ';';
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : os.str()) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    std::lock_guard lock(cache_->mutex);
    cache_->fingerprint = buf;
    return buf;
}

bool same_geometry(const Cad& a, const Cad& b) {
    return a.n_ == b.n_ && a.stacks_ == b.stacks_ && a.overrides_ == b.overrides_;
}

std::size_t leaf_count(const Cad& c) { return c.leaves().size(); }

// ---------------------------------------------------------------------------
// Validation

const char* violation_name(ViolationKind k) {
    switch (k) {
    case ViolationKind::Structure: return "structure";
    case ViolationKind::ChildCount: return "child-count";
    case ViolationKind::Ordering: return "ordering";
    case ViolationKind::SampleOutside: return "sample-outside";
    case ViolationKind::Evaluation: return "evaluation";
    }
    return "?";
}

std::string ValidationReport::to_string() const {
    std::string s;
    auto line = [&](const Violation& v, const char* prefix) {
        s += prefix;
        s += violation_name(v.kind);
        s += " at '" + v.cell.to_string() + "': " + v.detail + "\n";
    };
    for (const auto& v : violations)
        line(v, "");
    for (const auto& v : undecidable)
        line(v, "undecidable ");
    return s;
}

ValidationReport validate_cad(const Cad& c, const Rational& precision) {
    ValidationReport report;
    EvalContext ctx;
    ctx.precision = precision;
    auto n = static_cast<std::size_t>(c.dim());

    auto add = [&](ViolationKind k, const CellIndex& I, std::string detail) {
        report.violations.push_back({k, I, std::move(detail)});
    };

    for (const auto& [I, s] : c.stacks()) {
        if (I.level() >= n || !c.has_cell(I)) {
            add(ViolationKind::Structure, I, "stack over a cell that is not a non-leaf cell");
            continue;
        }
        for (const auto& f : s.functions)
            if (f.max_var() > static_cast<int>(I.level()))
                add(ViolationKind::Structure, I, "function " + f.to_sexpr() + " uses later variables");
    }
    std::vector<CellIndex> frontier{CellIndex()};
    std::vector<CellIndex> all_cells{CellIndex()};
    for (std::size_t k = 0; k < n; ++k) {
        std::vector<CellIndex> next;
        for (const auto& I : frontier) {
            auto it = c.stacks().find(I);
            if (it == c.stacks().end()) {
                add(ViolationKind::ChildCount, I, "non-leaf cell has no section stack");
                continue;
            }
            for (int l = 1; l <= static_cast<int>(2 * it->second.size() + 1); ++l)
                next.push_back(I.child(l));
        }
        frontier = std::move(next);
        all_cells.insert(all_cells.end(), frontier.begin(), frontier.end());
    }
    for (const auto& [I, e] : c.sample_overrides()) {
        if (I.empty() || I.is_section() || !c.has_cell(I))
            add(ViolationKind::Structure, I, "sample override on a cell that is not a sector");
        else if (e.max_var() >= static_cast<int>(I.level()))
            add(ViolationKind::Structure, I, "sample override uses its own or later variables");
    }
    if (!report.violations.empty())
        return report;

    auto guarded = [&](const CellIndex& I, auto&& check) {
        try {
            check();
        } catch (const GuardUndecidable& e) {
            report.undecidable.push_back({ViolationKind::Evaluation, I, e.what()});
        } catch (const EvalError& e) {
            add(ViolationKind::Evaluation, I, e.what());
        }
    };

    for (const auto& I : all_cells)
        guarded(I, [&] { c.sample(I); });

    for (const auto& [J, s] : c.stacks()) {
        if (s.size() == 0)
            continue;
        guarded(J, [&] {
            Point p = c.sample(J);
            for (std::size_t j = 0; j < s.size(); ++j) {
                guarded(J, [&] { eval(s.functions[j], p, ctx); });
                if (j + 1 < s.size()) {
                    guarded(J, [&] {
                        if (compare(s.functions[j], s.functions[j + 1], p, ctx) >= 0)
                            add(ViolationKind::Ordering, J,
                                "section " + std::to_string(2 * j + 2) + " is not below section " +
                                    std::to_string(2 * j + 4) + " at " + p.to_string());
                    });
                }
            }
        });
    }

    for (const auto& [I, e] : c.sample_overrides()) {
        guarded(I, [&] {
            Point p = c.sample(I);
            std::size_t k = I.level() - 1;
            auto lo = c.lower_bound(I);
            auto hi = c.upper_bound(I);
            if ((lo && compare_coordinate(p, k, *lo, ctx) <= 0) ||
                (hi && compare_coordinate(p, k, *hi, ctx) >= 0))
                add(ViolationKind::SampleOutside, I, "sample " + p.to_string() + " is not inside the sector");
        });
    }
    return report;
}

// ---------------------------------------------------------------------------
// Sampling and adaptedness

std::optional<Point> random_point_in(const Cad& c, const CellIndex& I, std::mt19937_64& rng,
                                     const EvalContext& ctx) {
    std::uniform_int_distribution<int> tick(1, 1023);
    Point p;
    try {
        for (std::size_t k = 0; k < I.level(); ++k) {
            CellIndex cell = I.prefix(k + 1);
            if (cell.is_section()) {
                p.push_back(Coordinate::generated(c.section_function(cell)));
                continue;
            }
            Rational t(tick(rng), 1024);
            auto lo = c.lower_bound(cell);
            auto hi = c.upper_bound(cell);
            Rational v;
            if (!lo && !hi) {
                v = -4 + 8 * t;
            } else if (!hi) {
                v = eval(*lo, p, ctx).hi + 4 * t;
            } else if (!lo) {
                v = eval(*hi, p, ctx).lo - 4 * t;
            } else {
                NumValue a = eval(*lo, p, ctx);
                NumValue b = eval(*hi, p, ctx);
                if (!(a.hi < b.lo))
                    return std::nullopt;
                v = a.hi + (b.lo - a.hi) * t;
            }
            v.canonicalize();
            p.push_back(Coordinate::exact(v));
        }
    } catch (const EvalError&) {
        return std::nullopt;
    }
    return p;
}

LeafLabeling check_adapted(const Cad& c, const Formula& set, const Rational& precision, int probes,
                           std::uint64_t seed) {
    if (set.max_var() > c.dim())
        throw std::invalid_argument("set formula uses more variables than the decomposition");
    EvalContext ctx;
    ctx.precision = precision;
    std::mt19937_64 rng(seed);
    LeafLabeling labels;
    for (const auto& leaf : c.leaves()) {
        Point p = c.sample(leaf);
        bool label = decide(set, p, ctx);
        for (int i = 0; i < probes; ++i) {
            auto q = random_point_in(c, leaf, rng, ctx);
            if (!q)
                continue;
            try {
                if (decide(set, *q, ctx) != label)
                    throw NotAdapted(leaf, p.to_string(), q->to_string());
            } catch (const GuardUndecidable&) {
            }
        }
        labels.emplace(leaf, label);
    }
    return labels;
}

// ---------------------------------------------------------------------------
// Refinement order

std::shared_ptr<const Provenance> identity_provenance(const Cad& c) {
    auto p = std::make_shared<Provenance>();
    p->root_fingerprint = c.fingerprint();
    for (std::size_t k = 0; k <= static_cast<std::size_t>(c.dim()); ++k)
        for (const auto& I : c.cells(k))
            p->constituents.emplace(I, std::vector<CellIndex>{I});
    return p;
}

Partition leaf_partition(const Cad& c, const Cad& root) {
    std::string rf = root.fingerprint();
    Partition blocks;
    if (c.provenance() && c.provenance()->root_fingerprint == rf) {
        for (const auto& leaf : c.leaves()) {
            auto it = c.provenance()->constituents.find(leaf);
            if (it == c.provenance()->constituents.end())
                throw NotComparableRepresentation("provenance misses leaf '" + leaf.to_string() + "'");
            auto block = it->second;
            std::sort(block.begin(), block.end());
            blocks.push_back(std::move(block));
        }
    } else if (c.fingerprint() == rf) {
        for (const auto& leaf : c.leaves())
            blocks.push_back({leaf});
    } else {
        throw NotComparableRepresentation("decomposition is not a coarsening of the given root");
    }
    std::sort(blocks.begin(), blocks.end());
    return blocks;
}

bool partition_refines(const Partition& fine, const Partition& coarse) {
    std::map<CellIndex, std::size_t> owner;
    for (std::size_t b = 0; b < coarse.size(); ++b)
        for (const auto& leaf : coarse[b])
            owner.emplace(leaf, b);
    std::size_t covered = 0;
    for (const auto& block : fine) {
        std::optional<std::size_t> id;
        for (const auto& leaf : block) {
            auto it = owner.find(leaf);
            if (it == owner.end())
                return false;
            if (id && *id != it->second)
                return false;
            id = it->second;
            ++covered;
        }
    }
    return covered == owner.size();
}

bool refines(const Cad& fine, const Cad& coarse, const Cad& root) {
    return partition_refines(leaf_partition(fine, root), leaf_partition(coarse, root));
}

}  // namespace cadmin
