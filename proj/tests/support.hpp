#pragma once

// Generators and independent oracles shared by the tests.

#include <cmath>
#include <functional>
#include <random>

#include "cadmin/poset.hpp"

namespace cadmin::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline long uniform(std::mt19937_64& g, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(g);
}

/// a/b in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational ratio(const Integer& a, const Integer& b) {
    Rational q(a, b);
    q.canonicalize();
    return q;
}

inline Rational random_rational(std::mt19937_64& g, long range = 10, long max_den = 8) {
    return ratio(uniform(g, -range * max_den, range * max_den), uniform(g, 1, max_den));
}

/// Integer coefficients, lowest degree first, leading coefficient nonzero.
inline std::vector<long> random_coeffs(std::mt19937_64& g, int degree, long range = 10) {
    std::vector<long> c;
    for (int i = 0; i <= degree; ++i)
        c.push_back(uniform(g, -range, range));
    while (c.back() == 0)
        c.back() = uniform(g, -range, range);
    return c;
}

/// Horner form in x1 built from explicit operations.
inline Expr poly_expr(const std::vector<long>& c) {
    Expr e = Expr::constant(c.back());
    for (std::size_t i = c.size() - 1; i-- > 0;)
        e = e * Expr::var(1) + Expr::constant(c[i]);
    return e;
}

inline long double horner(const std::vector<long>& c, long double x) {
    long double v = 0;
    for (std::size_t i = c.size(); i-- > 0;)
        v = v * x + static_cast<long double>(c[i]);
    return v;
}

inline std::vector<long> derivative(const std::vector<long>& c) {
    std::vector<long> d;
    for (std::size_t i = 1; i < c.size(); ++i)
        d.push_back(static_cast<long>(i) * c[i]);
    return d;
}

/// Real roots of an integer polynomial in floating point: the roots of the
/// derivative split the line into monotone pieces, each searched by
/// bisection; a critical point where the polynomial vanishes is a multiple
/// root.
inline std::vector<long double> float_roots(const std::vector<long>& c) {
    if (c.size() <= 1)
        return {};
    long double bound = 1;
    for (std::size_t i = 0; i + 1 < c.size(); ++i)
        bound = std::max(bound, 1 + std::fabs(static_cast<long double>(c[i]) / c.back()));
    std::vector<long double> cuts{-bound};
    std::vector<long double> out;
    for (long double r : float_roots(derivative(c))) {
        long double scale = 1;
        for (long v : c)
            scale = std::max(scale, std::fabs(static_cast<long double>(v)));
        if (std::fabs(horner(c, r)) < 1e-12L * scale * std::pow(1 + std::fabs(r), c.size()))
            out.push_back(r);
        cuts.push_back(r);
    }
    cuts.push_back(bound);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        long double a = cuts[i], b = cuts[i + 1];
        long double fa = horner(c, a), fb = horner(c, b);
        if (fa == 0 || fb == 0 || (fa < 0) == (fb < 0))
            continue;
        for (int it = 0; it < 200; ++it) {
            long double m = (a + b) / 2;
            long double fm = horner(c, m);
            if ((fm < 0) == (fa < 0))
                a = m, fa = fm;
            else
                b = m;
        }
        out.push_back((a + b) / 2);
    }
    std::sort(out.begin(), out.end());
    std::vector<long double> dedup;
    for (long double r : out)
        if (dedup.empty() || r - dedup.back() > 1e-9L)
            dedup.push_back(r);
    return dedup;
}

/// Exact rational evaluation of the polynomial fragment of the language.
inline Rational exact_value(const Expr& e, const std::vector<Rational>& x) {
    auto a = e.args();
    switch (e.kind()) {
    case ExprKind::Const: return e.value();
    case ExprKind::Var: return x.at(static_cast<std::size_t>(e.var_index() - 1));
    case ExprKind::Neg: return -exact_value(a[0], x);
    case ExprKind::Add: return exact_value(a[0], x) + exact_value(a[1], x);
    case ExprKind::Sub: return exact_value(a[0], x) - exact_value(a[1], x);
    case ExprKind::Mul: return exact_value(a[0], x) * exact_value(a[1], x);
    case ExprKind::Div: return exact_value(a[0], x) / exact_value(a[1], x);
    case ExprKind::Pow: {
        Rational r = 1, b = exact_value(a[0], x);
        for (unsigned i = 0; i < e.exponent(); ++i)
            r *= b;
        return r;
    }
    default: throw std::invalid_argument("not a rational expression");
    }
}

/// Random polynomial expression in x1..xn with small constants.
inline Expr random_poly_expr(std::mt19937_64& g, int n, int depth) {
    if (depth == 0 || uniform(g, 0, 3) == 0) {
        if (uniform(g, 0, 1) == 0)
            return Expr::var(static_cast<int>(uniform(g, 1, n)));
        return Expr::constant(ratio(uniform(g, -5, 5), uniform(g, 1, 3)));
    }
    switch (uniform(g, 0, 4)) {
    case 0: return -random_poly_expr(g, n, depth - 1);
    case 1: return random_poly_expr(g, n, depth - 1) + random_poly_expr(g, n, depth - 1);
    case 2: return random_poly_expr(g, n, depth - 1) - random_poly_expr(g, n, depth - 1);
    case 3: return random_poly_expr(g, n, depth - 1) * random_poly_expr(g, n, depth - 1);
    default: return Expr::pow(random_poly_expr(g, n, depth - 1), static_cast<unsigned>(uniform(g, 0, 3)));
    }
}

/// Bell numbers from Stirling numbers of the second kind.
inline Integer bell(unsigned k) {
    std::vector<std::vector<Integer>> s(k + 1, std::vector<Integer>(k + 1, 0));
    s[0][0] = 1;
    for (unsigned i = 1; i <= k; ++i)
        for (unsigned j = 1; j <= i; ++j)
            s[i][j] = j * s[i - 1][j] + s[i - 1][j - 1];
    Integer b = 0;
    for (unsigned j = 0; j <= k; ++j)
        b += s[k][j];
    return b;
}

/// Leaves below a cell when every stack is given.
inline std::size_t count_leaves(const StackMap& stacks, const CellIndex& I, int n) {
    if (static_cast<int>(I.level()) == n)
        return 1;
    std::size_t total = 0;
    std::size_t u = stacks.at(I).size();
    for (int k = 1; k <= static_cast<int>(2 * u + 1); ++k)
        total += count_leaves(stacks, I.child(k), n);
    return total;
}

/// A random univariate formula kept alongside a floating-point model of it.
struct UniFormula {
    enum class Op { Atom, And, Or, Not } op = Op::Atom;
    Rel rel = Rel::Lt;
    std::vector<long> coeffs;
    std::vector<UniFormula> parts;

    Formula formula() const {
        switch (op) {
        case Op::Atom: return Formula::atom(rel, poly_expr(coeffs), Expr::constant(0));
        case Op::Not: return Formula::negation(parts[0].formula());
        default: {
            std::vector<Formula> fs;
            for (const auto& p : parts)
                fs.push_back(p.formula());
            return op == Op::And ? Formula::conj(fs) : Formula::disj(fs);
        }
        }
    }

    void atoms(std::vector<const UniFormula*>& out) const {
        if (op == Op::Atom)
            out.push_back(this);
        for (const auto& p : parts)
            p.atoms(out);
    }

    /// sign(atom) supplied by the caller.
    bool holds(const std::function<int(const UniFormula&)>& sign) const {
        switch (op) {
        case Op::Atom: return rel_holds(rel, sign(*this));
        case Op::Not: return !parts[0].holds(sign);
        case Op::And:
            for (const auto& p : parts)
                if (!p.holds(sign))
                    return false;
            return true;
        case Op::Or:
            for (const auto& p : parts)
                if (p.holds(sign))
                    return true;
            return false;
        }
        return false;
    }
};

inline UniFormula random_uni_formula(std::mt19937_64& g, int depth = 2) {
    UniFormula f;
    if (depth == 0 || uniform(g, 0, 2) == 0) {
        f.rel = static_cast<Rel>(uniform(g, 0, 4));
        f.coeffs = random_coeffs(g, static_cast<int>(uniform(g, 1, 4)));
        return f;
    }
    long k = uniform(g, 0, 4);
    if (k == 0) {
        f.op = UniFormula::Op::Not;
        f.parts.push_back(random_uni_formula(g, depth - 1));
    } else {
        f.op = k <= 2 ? UniFormula::Op::And : UniFormula::Op::Or;
        f.parts.push_back(random_uni_formula(g, depth - 1));
        f.parts.push_back(random_uni_formula(g, depth - 1));
    }
    return f;
}

/// Boundary points of the set, computed from a floating-point sign chart:
/// the roots of all atoms cut the line, and a root is a boundary point when
/// the set's membership there differs from an adjacent interval.
inline std::vector<long double> sign_chart_boundary(const UniFormula& f) {
    std::vector<const UniFormula*> atoms;
    f.atoms(atoms);
    std::vector<std::vector<long double>> atom_roots;
    std::vector<long double> cuts;
    for (const auto* a : atoms) {
        atom_roots.push_back(float_roots(a->coeffs));
        cuts.insert(cuts.end(), atom_roots.back().begin(), atom_roots.back().end());
    }
    std::sort(cuts.begin(), cuts.end());
    std::vector<long double> points;
    for (long double r : cuts)
        if (points.empty() || r - points.back() > 1e-9L)
            points.push_back(r);

    auto member_at = [&](long double x, bool at_cut) {
        return f.holds([&](const UniFormula& a) {
            std::size_t i = 0;
            while (atoms[i] != &a)
                ++i;
            if (at_cut)
                for (long double r : atom_roots[i])
                    if (std::fabs(r - x) <= 1e-9L)
                        return 0;
            long double v = horner(a.coeffs, x);
            return v > 0 ? 1 : (v < 0 ? -1 : 0);
        });
    };
    std::vector<bool> sector;
    if (points.empty())
        return {};
    sector.push_back(member_at(points.front() - 1, false));
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        sector.push_back(member_at((points[i] + points[i + 1]) / 2, false));
    sector.push_back(member_at(points.back() + 1, false));
    std::vector<long double> boundary;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool at = member_at(points[i], true);
        if (at != sector[i] || at != sector[i + 1])
            boundary.push_back(points[i]);
    }
    return boundary;
}

inline long double approx(const AlgebraicNumber& a) {
    AlgebraicNumber t = a.refined(pow2_neg(60));
    return static_cast<long double>(t.lo().get_d());
}

}  // namespace cadmin::testing
