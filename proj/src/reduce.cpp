#include "cadmin/reduce.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace cadmin {

const char* lift_mode_name(LiftMode m) { return m == LiftMode::Certificate ? "certificate" : "sampled"; }

const char* rule_order_name(RuleOrder o) { return o == RuleOrder::DeepFirst ? "deep-first" : "lex"; }

namespace {

enum class Region { Outside, Lower, Pivot, Upper, Later };

struct PivotFrame {
    CellIndex pivot, parent, lower, upper;
    std::size_t level;

    explicit PivotFrame(const CellIndex& a) : pivot(a), level(a.level()) {
        if (!a.is_section())
            throw PivotNotEven(a);
        parent = a.parent();
        lower = a.with_letter(level - 1, a.last() - 1);
        upper = a.with_letter(level - 1, a.last() + 1);
    }

    Region region(const CellIndex& I) const {
        if (I.level() < level)
            return Region::Outside;
        CellIndex p = I.prefix(level);
        if (p == lower)
            return Region::Lower;
        if (p == pivot)
            return Region::Pivot;
        if (p == upper)
            return Region::Upper;
        if (p.parent() == parent && p.last() > upper.last())
            return Region::Later;
        return Region::Outside;
    }

    CellIndex moved(const CellIndex& I, int letter) const { return I.with_letter(level - 1, letter); }
};

bool same_function(const Expr& a, const Expr& b) { return a == b || canonicalize(a) == canonicalize(b); }

}  // namespace

MergedCells merge_cells(const Cad& c, const RuleId& rule) {
    PivotFrame f(rule.pivot);
    if (!c.has_cell(f.pivot))
        throw RuleNotApplicable("no cell '" + f.pivot.to_string() + "'");
    const Expr xi = c.section_function(f.pivot);
    const Expr xk = Expr::var(static_cast<int>(f.level));
    const int a = f.pivot.last();

    StackMap stacks;
    std::vector<GlueSite> glued;
    for (const auto& [I, s] : c.stacks()) {
        switch (f.region(I)) {
        case Region::Outside:
            if (I == f.parent) {
                SectionStack t = s;
                t.functions.erase(t.functions.begin() + (a / 2 - 1));
                stacks.emplace(I, std::move(t));
            } else {
                stacks.emplace(I, s);
            }
            break;
        case Region::Later: stacks.emplace(psi(f.pivot, I), s); break;
        case Region::Pivot:
        case Region::Upper: break;
        case Region::Lower: {
            const auto& mid = c.stack(f.moved(I, a));
            const auto& high = c.stack(f.moved(I, a + 1));
            if (mid.size() != s.size() || high.size() != s.size())
                throw RuleNotApplicable("cylinders around '" + f.pivot.to_string() + "' differ in shape");
            SectionStack t;
            for (std::size_t w = 0; w < s.size(); ++w) {
                const Expr& lo = s.functions[w];
                const Expr& md = mid.functions[w];
                const Expr& hi = high.functions[w];
                if (same_function(lo, md) && same_function(md, hi)) {
                    t.functions.push_back(lo);
                    glued.push_back({I, w, !lo.has_piecewise()});
                } else {
                    t.functions.push_back(Expr::piecewise({{Formula::atom(Rel::Lt, xk, xi), lo},
                                                           {Formula::atom(Rel::Eq, xk, xi), md},
                                                           {Formula::atom(Rel::Gt, xk, xi), hi}}));
                    glued.push_back({I, w, false});
                }
            }
            stacks.emplace(I, std::move(t));
            break;
        }
        }
    }

    std::map<CellIndex, Expr> overrides;
    for (const auto& [I, e] : c.sample_overrides()) {
        switch (f.region(I)) {
        case Region::Outside:
        case Region::Lower: overrides.emplace(I, e); break;
        case Region::Later: overrides.emplace(psi(f.pivot, I), e); break;
        default: break;
        }
    }
    // Keep the witness of the surviving cell where it was, so samples of the
    // cells above it do not move.
    if (!overrides.count(f.lower)) {
        Point p = c.sample(f.lower);
        overrides.emplace(f.lower, Expr::constant(p[f.level - 1].exact_value()));
    }

    auto prov = c.provenance() ? c.provenance() : identity_provenance(c);
    auto merged = std::make_shared<Provenance>();
    merged->root_fingerprint = prov->root_fingerprint;
    for (const auto& [I, roots] : prov->constituents) {
        auto& dst = merged->constituents[psi(f.pivot, I)];
        dst.insert(dst.end(), roots.begin(), roots.end());
    }
    for (auto& [I, roots] : merged->constituents) {
        std::sort(roots.begin(), roots.end());
        roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    }

    return {Cad(c.dim(), std::move(stacks), std::move(overrides), std::move(merged), c.certificates()),
            std::move(glued)};
}

LeafLabeling transport_labels(const LeafLabeling& labels, const RuleId& rule) {
    LeafLabeling out;
    for (const auto& [leaf, bit] : labels)
        out[psi(rule.pivot, leaf)] = bit;
    return out;
}

namespace {

bool certified(const Cad& c, const PivotFrame& f) {
    auto prov = c.provenance() ? c.provenance() : identity_provenance(c);
    const auto& cons = prov->constituents;
    auto find = [&](const CellIndex& I) -> const std::vector<CellIndex>& {
        static const std::vector<CellIndex> none;
        auto it = cons.find(I);
        return it == cons.end() ? none : it->second;
    };
    const auto& mid = find(f.pivot);
    const auto& lo = find(f.lower);
    const auto& hi = find(f.upper);
    if (mid.empty())
        return false;
    std::size_t k = f.level - 1;
    for (const auto& X : mid) {
        if (!c.certificates().count(X))
            return false;
        if (!std::binary_search(lo.begin(), lo.end(), X.with_letter(k, X[k] - 1)) ||
            !std::binary_search(hi.begin(), hi.end(), X.with_letter(k, X[k] + 1)))
            return false;
    }
    return true;
}

enum class Evidence { Continuous, Jump, Unknown };

// A point next to q on one side of the pivot section: coordinate k moves
// off the section by delta, sections above are recomputed in the merged
// decomposition and sector coordinates are kept.
std::optional<Point> displaced(const Cad& merged, const CellIndex& cell, const PivotFrame& f, const Expr& xi,
                               const Point& q, const Rational& delta, const EvalContext& ctx) {
    Point p = q.prefix(f.level - 1);
    p.push_back(Coordinate::generated(Expr::add(xi, Expr::constant(delta))));
    for (std::size_t l = f.level - 1; l < cell.level(); ++l) {
        CellIndex sub = cell.prefix(l + 1);
        if (l >= f.level) {
            if (sub.is_section())
                p.push_back(Coordinate::generated(merged.section_function(sub)));
            else
                p.push_back(q[l]);
        }
        if (sub.is_section())
            continue;
        auto lo = merged.lower_bound(sub);
        auto hi = merged.upper_bound(sub);
        if ((lo && compare_coordinate(p, l, *lo, ctx) <= 0) || (hi && compare_coordinate(p, l, *hi, ctx) >= 0))
            return std::nullopt;
    }
    return p;
}

Evidence probe_continuity(const Cad& c, const Cad& merged, const PivotFrame& f, const GlueSite& site,
                          const LiftConfig& cfg, std::mt19937_64& rng) {
    EvalContext ctx;
    ctx.precision = cfg.precision;
    const Expr xi = c.section_function(f.pivot);
    const Expr& g = merged.stack(site.base).functions[site.index];
    CellIndex mid_cell = f.moved(site.base, f.pivot.last());

    std::vector<Point> probes{c.sample(mid_cell)};
    for (int i = 1; i < cfg.boundary_samples; ++i)
        if (auto p = random_point_in(c, mid_cell, rng, ctx))
            probes.push_back(*p);

    bool unknown = false;
    for (const auto& q : probes) {
        try {
            NumValue v0 = eval(g, q, ctx);
            for (int side : {-1, 1}) {
                std::optional<Evidence> verdict;
                for (unsigned i = 1; i <= 6; ++i) {
                    Rational delta = side * pow2_neg(6 * i);
                    auto p = displaced(merged, site.base, f, xi, q, delta, ctx);
                    if (!p) {
                        verdict = Evidence::Unknown;
                        break;
                    }
                    NumValue v = eval(g, *p, ctx);
                    Rational far = std::max<Rational>(abs(v.hi - v0.lo), abs(v0.hi - v.lo));
                    Rational near = std::max<Rational>({Rational(0), v.lo - v0.hi, v0.lo - v.hi});
                    if (near > cfg.tolerance)
                        verdict = Evidence::Jump;
                    else if (far <= cfg.tolerance)
                        verdict = Evidence::Continuous;
                    else
                        verdict = Evidence::Unknown;
                }
                if (verdict == Evidence::Jump)
                    return Evidence::Jump;
                if (verdict == Evidence::Unknown)
                    unknown = true;
            }
        } catch (const EvalError&) {
            unknown = true;
        }
    }
    return unknown ? Evidence::Unknown : Evidence::Continuous;
}

}  // namespace

LiftResult try_lift_explained(const Cad& c, const LeafLabeling& labels, const RuleId& rule,
                              const LiftConfig& cfg) {
    if (!is_applicable(build_tree(c, labels), rule))
        throw RuleNotApplicable("rule at '" + rule.pivot.to_string() + "' is not applicable");
    PivotFrame f(rule.pivot);
    MergedCells m = merge_cells(c, rule);
    std::string name = "rule " + rule.to_string();

    auto inconclusive = [&](const std::string& why) -> LiftResult {
        if (cfg.strict)
            throw UnknownEvidence(name + ": " + why);
        return {std::nullopt, "inconclusive: " + why};
    };

    ValidationReport report = validate_cad(m.cad, cfg.precision);
    if (!report.violations.empty())
        return {std::nullopt, "merged cells do not form a decomposition: " + report.violations.front().detail};
    if (!report.undecidable.empty())
        return inconclusive(report.undecidable.front().detail);

    std::vector<GlueSite> open;
    for (const auto& s : m.glued)
        if (!s.trivially_continuous)
            open.push_back(s);
    if (open.empty())
        return {m.cad, "lifted"};

    if (cfg.mode == LiftMode::Certificate) {
        if (certified(c, f))
            return {m.cad, "lifted"};
        return {std::nullopt, "no continuity certificate for the glued sections"};
    }

    std::mt19937_64 rng(cfg.seed);
    bool unknown = false;
    for (const auto& s : open) {
        Evidence e = probe_continuity(c, m.cad, f, s, cfg, rng);
        if (e == Evidence::Jump)
            return {std::nullopt, "glued section " + std::to_string(2 * s.index + 2) + " over '" +
                                      s.base.to_string() + "' jumps across the merged boundary"};
        if (e == Evidence::Unknown)
            unknown = true;
    }
    if (unknown)
        return inconclusive("continuity probes did not settle");
    return {m.cad, "lifted"};
}

std::optional<Cad> try_lift(const Cad& c, const LeafLabeling& labels, const RuleId& rule, const LiftConfig& cfg) {
    return try_lift_explained(c, labels, rule, cfg).cad;
}

std::vector<RuleId> ordered_rules(const CadTree& t, RuleOrder order) {
    std::vector<RuleId> rules = applicable_rules(t);
    if (order == RuleOrder::DeepFirst)
        std::stable_sort(rules.begin(), rules.end(),
                         [](const RuleId& a, const RuleId& b) { return a.pivot.level() > b.pivot.level(); });
    return rules;
}

MinimalResult minimal(const Cad& c, const LeafLabeling& labels, const LiftConfig& cfg) {
    MinimalResult r{c, labels, {}};
    for (;;) {
        bool progressed = false;
        for (const auto& rule : ordered_rules(build_tree(r.cad, r.labels), cfg.order)) {
            if (auto next = try_lift(r.cad, r.labels, rule, cfg)) {
                r.cad = *next;
                r.labels = transport_labels(r.labels, rule);
                r.log.push_back(rule);
                progressed = true;
                break;
            }
        }
        if (!progressed)
            return r;
    }
}

Cad refine_by_section(const Cad& c, const CellIndex& base, int sector, const Expr& xi,
                      std::span<const Point> extra_samples, const Rational& precision) {
    if (base.level() >= static_cast<std::size_t>(c.dim()) || !c.has_cell(base))
        throw std::invalid_argument("no non-leaf cell '" + base.to_string() + "'");
    auto u = static_cast<int>(c.count(base));
    if (sector < 1 || sector % 2 == 0 || sector > 2 * u + 1)
        throw std::invalid_argument("letter " + std::to_string(sector) + " is not a sector above '" +
                                    base.to_string() + "'");
    if (xi.max_var() > static_cast<int>(base.level()))
        throw std::invalid_argument("section function uses later variables");
    CellIndex cell = base.child(sector);
    EvalContext ctx;
    ctx.precision = precision;
    std::vector<Point> points{c.sample(base)};
    points.insert(points.end(), extra_samples.begin(), extra_samples.end());
    auto lo = c.lower_bound(cell);
    auto hi = c.upper_bound(cell);
    for (const auto& p : points) {
        if ((lo && compare(xi, *lo, p, ctx) <= 0) || (hi && compare(xi, *hi, p, ctx) >= 0))
            throw SectionOutOfRange("new section is not strictly inside sector '" + cell.to_string() + "' at " +
                                    p.to_string());
    }

    std::size_t pos = base.level();
    StackMap stacks;
    for (const auto& [I, s] : c.stacks()) {
        if (I == base) {
            SectionStack t = s;
            t.functions.insert(t.functions.begin() + (sector - 1) / 2, xi);
            stacks.emplace(I, std::move(t));
        } else if (I.level() > pos && I.prefix(pos) == base) {
            int letter = I[pos];
            if (letter < sector) {
                stacks.emplace(I, s);
            } else if (letter == sector) {
                for (int d = 0; d < 3; ++d)
                    stacks.emplace(I.with_letter(pos, sector + d), s);
            } else {
                stacks.emplace(I.with_letter(pos, letter + 2), s);
            }
        } else {
            stacks.emplace(I, s);
        }
    }
    std::map<CellIndex, Expr> overrides;
    for (const auto& [I, e] : c.sample_overrides()) {
        if (I.level() > pos && I.prefix(pos) == base) {
            if (I[pos] < sector)
                overrides.emplace(I, e);
            else if (I[pos] > sector)
                overrides.emplace(I.with_letter(pos, I[pos] + 2), e);
        } else {
            overrides.emplace(I, e);
        }
    }
    return Cad(c.dim(), std::move(stacks), std::move(overrides));
}

LeafLabeling split_labels(const LeafLabeling& labels, const CellIndex& base, int sector) {
    std::size_t pos = base.level();
    LeafLabeling out;
    for (const auto& [leaf, bit] : labels) {
        if (leaf.level() > pos && leaf.prefix(pos) == base) {
            int letter = leaf[pos];
            if (letter < sector) {
                out[leaf] = bit;
            } else if (letter == sector) {
                for (int d = 0; d < 3; ++d)
                    out[leaf.with_letter(pos, sector + d)] = bit;
            } else {
                out[leaf.with_letter(pos, letter + 2)] = bit;
            }
        } else {
            out[leaf] = bit;
        }
    }
    return out;
}

bool reduction_reachable(const Cad& target, const Cad& from, const LeafLabeling& from_labels, const Cad& root,
                         const LiftConfig& cfg) {
    Partition goal = leaf_partition(target, root);
    Partition start = leaf_partition(from, root);
    if (start == goal)
        return true;
    if (!partition_refines(start, goal))
        return false;
    std::set<Partition> seen{start};
    std::deque<std::pair<Cad, LeafLabeling>> queue{{from, from_labels}};
    while (!queue.empty()) {
        auto [c, labels] = queue.front();
        queue.pop_front();
        for (const auto& rule : applicable_rules(build_tree(c, labels))) {
            auto next = try_lift(c, labels, rule, cfg);
            if (!next)
                continue;
            Partition p = leaf_partition(*next, root);
            if (p == goal)
                return true;
            if (!partition_refines(p, goal) || !seen.insert(p).second)
                continue;
            queue.emplace_back(*next, transport_labels(labels, rule));
        }
    }
    return false;
}

}  // namespace cadmin
