#include "cadmin/poset.hpp"

#include <algorithm>
#include <deque>
#include <functional>

namespace cadmin {

std::vector<std::vector<std::size_t>> PosetGraph::successors() const {
    std::vector<std::vector<std::size_t>> out(nodes.size());
    for (const auto& e : edges)
        if (std::find(out[e.from].begin(), out[e.from].end(), e.to) == out[e.from].end())
            out[e.from].push_back(e.to);
    return out;
}

std::vector<std::vector<bool>> PosetGraph::reachability() const {
    auto succ = successors();
    std::size_t n = nodes.size();
    std::vector<std::vector<bool>> reach(n, std::vector<bool>(n, false));
    std::vector<bool> done(n, false);
    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        if (done[v])
            return;
        done[v] = true;
        reach[v][v] = true;
        for (std::size_t w : succ[v]) {
            visit(w);
            for (std::size_t x = 0; x < n; ++x)
                if (reach[w][x])
                    reach[v][x] = true;
        }
    };
    for (std::size_t v = 0; v < n; ++v)
        visit(v);
    return reach;
}

std::optional<std::size_t> PosetGraph::find(const Partition& blocks) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].blocks == blocks)
            return i;
    return std::nullopt;
}

PosetGraph explore(const Cad& root, const LeafLabeling& labels, const LiftConfig& cfg) {
    Cad base = root.with_provenance(identity_provenance(root));
    PosetGraph g{base, {}, {}};
    std::map<Partition, std::size_t> index;
    Partition start = leaf_partition(base, base);
    g.nodes.push_back({base, labels, start, {}});
    index.emplace(start, 0);
    for (std::size_t cur = 0; cur < g.nodes.size(); ++cur) {
        // Copy: the vector may reallocate while successors are appended.
        PosetNode node = g.nodes[cur];
        for (const auto& rule : applicable_rules(build_tree(node.cad, node.labels))) {
            auto next = try_lift(node.cad, node.labels, rule, cfg);
            if (!next)
                continue;
            Partition p = leaf_partition(*next, base);
            auto [it, inserted] = index.emplace(p, g.nodes.size());
            if (inserted) {
                auto history = node.history;
                history.push_back(rule);
                g.nodes.push_back({*next, transport_labels(node.labels, rule), p, std::move(history)});
            }
            g.edges.push_back({cur, it->second, rule});
        }
    }
    return g;
}

std::vector<std::size_t> minimal_elements(const PosetGraph& g) {
    auto succ = g.successors();
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (succ[i].empty())
            out.push_back(i);
    return out;
}

std::optional<std::size_t> minimum(const PosetGraph& g) {
    auto sinks = minimal_elements(g);
    if (sinks.size() != 1)
        return std::nullopt;
    auto reach = g.reachability();
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
        if (!reach[i][sinks[0]])
            return std::nullopt;
    return sinks[0];
}

namespace {

bool joinable(const std::vector<std::vector<bool>>& reach, std::size_t a, std::size_t b) {
    for (std::size_t d = 0; d < reach.size(); ++d)
        if (reach[a][d] && reach[b][d])
            return true;
    return false;
}

}  // namespace

bool is_locally_confluent(const PosetGraph& g) {
    auto succ = g.successors();
    auto reach = g.reachability();
    for (const auto& out : succ)
        for (std::size_t i = 0; i < out.size(); ++i)
            for (std::size_t j = i + 1; j < out.size(); ++j)
                if (!joinable(reach, out[i], out[j]))
                    return false;
    return true;
}

bool is_globally_confluent(const PosetGraph& g) {
    auto reach = g.reachability();
    std::size_t n = g.nodes.size();
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t a = 0; a < n; ++a) {
            if (!reach[x][a])
                continue;
            for (std::size_t b = a + 1; b < n; ++b)
                if (reach[x][b] && !joinable(reach, a, b))
                    return false;
        }
    return true;
}

// ---------------------------------------------------------------------------
// Common refinement

namespace {

struct Origin {
    CellIndex first, second;
};

struct MergedSection {
    std::optional<std::size_t> first, second;
    Expr function;
};

int consistent_sign(const Expr& a, const Expr& b, const std::vector<Point>& points, const EvalContext& ctx,
                    const CellIndex& cell) {
    if (a == b || canonicalize(a) == canonicalize(b))
        return 0;
    std::optional<int> sign;
    for (const auto& p : points) {
        int s;
        try {
            s = compare(a, b, p, ctx);
        } catch (const GuardUndecidable& e) {
            throw UnknownOrder("cannot order sections over '" + cell.to_string() + "': " + e.what());
        }
        if (sign && *sign != s)
            throw SectionsCross("sections " + a.to_sexpr() + " and " + b.to_sexpr() + " cross over '" +
                                cell.to_string() + "'");
        sign = s;
    }
    return *sign;
}

}  // namespace

CommonRefinement common_refinement(const Cad& c1, const LeafLabeling& labels1, const Cad& c2,
                                   const LeafLabeling& labels2, const LiftConfig& cfg) {
    if (c1.dim() != c2.dim())
        throw std::invalid_argument("decompositions of different dimensions");
    int n = c1.dim();
    EvalContext ctx;
    ctx.precision = cfg.precision;
    std::mt19937_64 rng(cfg.seed);

    StackMap stacks;
    std::map<CellIndex, Origin> origin{{CellIndex(), {CellIndex(), CellIndex()}}};
    std::vector<CellIndex> level{CellIndex()};
    for (int k = 0; k < n; ++k) {
        std::vector<CellIndex> next;
        for (const auto& R : level) {
            std::vector<Point> points{Point()};
            if (!R.empty()) {
                Cad partial(n, stacks);
                points = {partial.sample(R)};
                for (int i = 0; i < cfg.boundary_samples; ++i)
                    if (auto p = random_point_in(partial, R, rng, ctx))
                        points.push_back(*p);
            }
            const Origin o = origin.at(R);
            const auto& f1 = c1.stack(o.first).functions;
            const auto& f2 = c2.stack(o.second).functions;
            std::vector<MergedSection> merged;
            std::size_t i = 0, j = 0;
            while (i < f1.size() || j < f2.size()) {
                if (j == f2.size()) {
                    merged.push_back({i, std::nullopt, f1[i]});
                    ++i;
                } else if (i == f1.size()) {
                    merged.push_back({std::nullopt, j, f2[j]});
                    ++j;
                } else {
                    int s = consistent_sign(f1[i], f2[j], points, ctx, R);
                    if (s < 0) {
                        merged.push_back({i, std::nullopt, f1[i]});
                        ++i;
                    } else if (s > 0) {
                        merged.push_back({std::nullopt, j, f2[j]});
                        ++j;
                    } else {
                        bool prefer_second = f1[i].has_piecewise() && !f2[j].has_piecewise();
                        merged.push_back({i, j, prefer_second ? f2[j] : f1[i]});
                        ++i;
                        ++j;
                    }
                }
            }
            for (std::size_t t = 0; t + 1 < merged.size(); ++t)
                if (consistent_sign(merged[t].function, merged[t + 1].function, points, ctx, R) >= 0)
                    throw SectionsCross("merged sections over '" + R.to_string() + "' are not ordered");

            SectionStack stack;
            std::size_t passed1 = 0, passed2 = 0;
            auto sector_origin = [&] {
                return Origin{o.first.child(static_cast<int>(2 * passed1 + 1)),
                              o.second.child(static_cast<int>(2 * passed2 + 1))};
            };
            origin.emplace(R.child(1), sector_origin());
            next.push_back(R.child(1));
            for (std::size_t t = 0; t < merged.size(); ++t) {
                const auto& m = merged[t];
                stack.functions.push_back(m.function);
                Origin so = sector_origin();
                if (m.first)
                    so.first = o.first.child(static_cast<int>(2 * *m.first + 2)), ++passed1;
                if (m.second)
                    so.second = o.second.child(static_cast<int>(2 * *m.second + 2)), ++passed2;
                auto letter = static_cast<int>(2 * t + 2);
                origin.emplace(R.child(letter), so);
                origin.emplace(R.child(letter + 1), sector_origin());
                next.push_back(R.child(letter));
                next.push_back(R.child(letter + 1));
            }
            stacks.emplace(R, std::move(stack));
        }
        level = std::move(next);
    }

    Cad result(n, std::move(stacks));
    ValidationReport report = validate_cad(result, cfg.precision);
    if (!report.ok())
        throw SectionsCross("merged stacks do not form a decomposition:\n" + report.to_string());

    LeafLabeling labels;
    for (const auto& leaf : result.leaves()) {
        const Origin& o = origin.at(leaf);
        bool a = labels1.at(o.first), b = labels2.at(o.second);
        if (a != b)
            throw std::invalid_argument("labels disagree on cell '" + leaf.to_string() + "'");
        labels.emplace(leaf, a);
    }

    auto p1 = std::make_shared<Provenance>();
    auto p2 = std::make_shared<Provenance>();
    p1->root_fingerprint = p2->root_fingerprint = result.fingerprint();
    for (const auto& [R, o] : origin) {
        p1->constituents[o.first].push_back(R);
        p2->constituents[o.second].push_back(R);
    }
    return {result, labels, c1.with_provenance(p1), c2.with_provenance(p2)};
}

Integer count_ssp(unsigned k) {
    if (k == 0)
        throw std::invalid_argument("count_ssp needs at least one cell");
    std::vector<Integer> row{Integer(1)};
    for (unsigned i = 1; i < k; ++i) {
        std::vector<Integer> next{row.back()};
        for (const auto& v : row)
            next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.back() - 1;
}

Extension extend_cylinder(const Cad& c, const LeafLabeling& labels, int n) {
    if (n < c.dim())
        throw std::invalid_argument("target dimension below the decomposition's");
    StackMap stacks = c.stacks();
    std::vector<CellIndex> level = c.leaves();
    LeafLabeling out = labels;
    for (int k = c.dim(); k < n; ++k) {
        LeafLabeling lifted;
        for (auto& I : level) {
            stacks.emplace(I, SectionStack{});
            lifted.emplace(I.child(1), out.at(I));
            I = I.child(1);
        }
        out = std::move(lifted);
    }
    return {Cad(n, std::move(stacks), c.sample_overrides(), nullptr, c.certificates()), std::move(out)};
}

std::string poset_to_dot(const PosetGraph& g) {
    auto sinks = minimal_elements(g);
    std::string s = "digraph poset {\n  rankdir=TB;\n  node [shape=box];\n";
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        s += "  n" + std::to_string(i) + " [label=\"#" + std::to_string(i) + "\\n" +
             std::to_string(g.nodes[i].blocks.size()) + " cells\"";
        if (i == 0)
            s += ", style=bold";
        if (std::find(sinks.begin(), sinks.end(), i) != sinks.end())
            s += ", peripheries=2";
        s += "];\n";
    }
    for (const auto& e : g.edges)
        s += "  n" + std::to_string(e.from) + " -> n" + std::to_string(e.to) + " [label=\"" + e.rule.to_string() +
             "\"];\n";
    return s + "}\n";
}

}  // namespace cadmin
