// Rational-function normal form.
//
// Rational subtrees are expanded into numerator / denominator polynomials
// over "atoms": the variables plus every subterm that is not a rational
// function of its inputs (sqrt, piecewise, algebraic constants, division by a
// non-polynomial). Atoms are canonicalized recursively and compared by their
// printed form. Numerator and denominator are never reduced against each
// other.

#include "cadmin/expr.hpp"

#include <algorithm>

namespace cadmin {

namespace {

struct Atom {
    int var = 0;  // > 0 for x_var, 0 for an opaque subterm
    std::string key;
    Expr expr;

    friend bool operator<(const Atom& a, const Atom& b) {
        if ((a.var == 0) != (b.var == 0))
            return a.var != 0;
        if (a.var != b.var)
            return a.var < b.var;
        return a.key < b.key;
    }
    friend bool operator==(const Atom& a, const Atom& b) { return a.var == b.var && a.key == b.key; }
};

using Mono = std::map<Atom, unsigned>;
using Poly = std::map<Mono, Rational>;

struct RatFun {
    Poly num, den;
};

Poly poly_constant(const Rational& c) {
    Poly p;
    if (c != 0)
        p.emplace(Mono{}, c);
    return p;
}

void accumulate(Poly& p, const Mono& m, const Rational& c) {
    auto [it, inserted] = p.emplace(m, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0)
            p.erase(it);
    }
}

Poly operator+(const Poly& a, const Poly& b) {
    Poly r = a;
    for (const auto& [m, c] : b)
        accumulate(r, m, c);
    return r;
}

Poly scaled(const Poly& a, const Rational& s) {
    Poly r;
    if (s == 0)
        return r;
    for (const auto& [m, c] : a)
        r.emplace(m, c * s);
    return r;
}

Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    for (const auto& [ma, ca] : a)
        for (const auto& [mb, cb] : b) {
            Mono m = ma;
            for (const auto& [atom, e] : mb)
                m[atom] += e;
            accumulate(r, m, ca * cb);
        }
    return r;
}

std::optional<Rational> as_constant(const Poly& p) {
    if (p.empty())
        return Rational(0);
    if (p.size() == 1 && p.begin()->first.empty())
        return p.begin()->second;
    return std::nullopt;
}

unsigned total_degree(const Mono& m) {
    unsigned d = 0;
    for (const auto& [a, e] : m)
        d += e;
    return d;
}

// Print order: higher total degree first, then graded-lex on the atoms.
bool print_before(const Mono& a, const Mono& b) {
    unsigned da = total_degree(a), db = total_degree(b);
    if (da != db)
        return da > db;
    auto ia = a.begin(), ib = b.begin();
    for (; ia != a.end() && ib != b.end(); ++ia, ++ib) {
        if (!(ia->first == ib->first))
            return ia->first < ib->first;
        if (ia->second != ib->second)
            return ia->second > ib->second;
    }
    return ia != a.end() && ib == b.end();
}

std::vector<std::pair<Mono, Rational>> ordered_terms(const Poly& p) {
    std::vector<std::pair<Mono, Rational>> terms(p.begin(), p.end());
    std::stable_sort(terms.begin(), terms.end(),
                     [](const auto& x, const auto& y) { return print_before(x.first, y.first); });
    return terms;
}

Expr mono_expr(const Mono& m) {
    std::optional<Expr> out;
    for (const auto& [atom, e] : m) {
        Expr f = e == 1 ? atom.expr : Expr::pow(atom.expr, e);
        out = out ? Expr::mul(*out, f) : f;
    }
    return out ? *out : Expr::constant(1);
}

Expr poly_expr(const Poly& p) {
    auto terms = ordered_terms(p);
    if (terms.empty())
        return Expr::constant(0);
    std::optional<Expr> acc;
    for (const auto& [m, c] : terms) {
        bool negative = c < 0;
        Rational mag = negative && acc ? Rational(-c) : c;
        Expr term;
        if (m.empty())
            term = Expr::constant(mag);
        else if (mag == 1)
            term = mono_expr(m);
        else if (mag == -1)
            term = Expr::neg(mono_expr(m));
        else
            term = Expr::mul(Expr::constant(mag), mono_expr(m));
        if (!acc)
            acc = term;
        else
            acc = negative ? Expr::sub(*acc, term) : Expr::add(*acc, term);
    }
    return *acc;
}

RatFun to_ratfun(const Expr& e);
RatFun add_funs(const RatFun& a, const RatFun& b, bool subtract);

// Rewrites sqrt(c)^(2m+r) as c^m * sqrt(c)^r. Returns nullopt when p has no
// such power.
std::optional<RatFun> reduce_sqrt_powers(const Poly& p) {
    bool any = false;
    for (const auto& [m, c] : p)
        for (const auto& [atom, e] : m)
            if (e >= 2 && atom.var == 0 && atom.expr.kind() == ExprKind::Sqrt)
                any = true;
    if (!any)
        return std::nullopt;
    RatFun sum{Poly{}, poly_constant(1)};
    for (const auto& [m, c] : p) {
        RatFun term{poly_constant(c), poly_constant(1)};
        Mono rest;
        for (const auto& [atom, e] : m) {
            if (e >= 2 && atom.var == 0 && atom.expr.kind() == ExprKind::Sqrt) {
                RatFun radicand = to_ratfun(atom.expr.args()[0]);
                for (unsigned i = 0; i < e / 2; ++i)
                    term = {term.num * radicand.num, term.den * radicand.den};
                if (e % 2)
                    rest.emplace(atom, 1u);
            } else {
                rest.emplace(atom, e);
            }
        }
        Poly restp;
        restp.emplace(rest, Rational(1));
        term.num = term.num * restp;
        sum = add_funs(sum, term, false);
    }
    return sum;
}

RatFun normalized(RatFun r) {
    auto rn = reduce_sqrt_powers(r.num);
    auto rd = reduce_sqrt_powers(r.den);
    if (rn || rd) {
        RatFun n = rn ? *rn : RatFun{r.num, poly_constant(1)};
        RatFun d = rd ? *rd : RatFun{r.den, poly_constant(1)};
        r = {n.num * d.den, n.den * d.num};
        if (r.den.empty())
            r.den = poly_constant(1), r.num = Poly{};
    }
    if (auto c = as_constant(r.den)) {
        r.num = scaled(r.num, 1 / *c);
        r.den = poly_constant(1);
        return r;
    }
    Rational lead = ordered_terms(r.den).front().second;
    if (lead != 1) {
        r.num = scaled(r.num, 1 / lead);
        r.den = scaled(r.den, 1 / lead);
    }
    return r;
}

Expr ratfun_expr(const RatFun& raw) {
    RatFun r = normalized(raw);
    if (as_constant(r.den))
        return poly_expr(r.num);
    return Expr::div(poly_expr(r.num), poly_expr(r.den));
}

RatFun constant_fun(const Rational& c) { return {poly_constant(c), poly_constant(1)}; }

RatFun opaque(const Expr& canonical) {
    Atom a{0, canonical.to_sexpr(), canonical};
    Poly p;
    p.emplace(Mono{{a, 1u}}, Rational(1));
    return {p, poly_constant(1)};
}

RatFun to_ratfun(const Expr& e);

Expr canonical_expr(const Expr& e) { return ratfun_expr(to_ratfun(e)); }

RatFun add_funs(const RatFun& a, const RatFun& b, bool subtract) {
    Poly bn = subtract ? scaled(b.num, -1) : b.num;
    if (a.den == b.den)
        return {a.num + bn, a.den};
    return {a.num * b.den + bn * a.den, a.den * b.den};
}

RatFun to_ratfun(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Const: return constant_fun(e.value());
    case ExprKind::Var: {
        Atom a{e.var_index(), {}, e};
        Poly p;
        p.emplace(Mono{{a, 1u}}, Rational(1));
        return {p, poly_constant(1)};
    }
    case ExprKind::Neg: {
        RatFun a = to_ratfun(e.args()[0]);
        return {scaled(a.num, -1), a.den};
    }
    case ExprKind::Add:
    case ExprKind::Sub:
        return add_funs(to_ratfun(e.args()[0]), to_ratfun(e.args()[1]), e.kind() == ExprKind::Sub);
    case ExprKind::Mul: {
        RatFun a = to_ratfun(e.args()[0]), b = to_ratfun(e.args()[1]);
        return {a.num * b.num, a.den * b.den};
    }
    case ExprKind::Div: {
        RatFun a = to_ratfun(e.args()[0]), b = to_ratfun(e.args()[1]);
        auto bden = as_constant(b.den);
        if (bden && !b.num.empty())
            return {scaled(a.num, *bden), a.den * b.num};
        return opaque(Expr::div(ratfun_expr(a), ratfun_expr(b)));
    }
    case ExprKind::Pow: {
        RatFun base = to_ratfun(e.args()[0]);
        if (e.exponent() == 0) {
            if (as_constant(base.den))
                return constant_fun(1);
            return opaque(Expr::pow(ratfun_expr(base), 0));
        }
        RatFun r = base;
        for (unsigned i = 1; i < e.exponent(); ++i)
            r = {r.num * base.num, r.den * base.den};
        return r;
    }
    case ExprKind::Sqrt: {
        Expr arg = canonical_expr(e.args()[0]);
        if (arg.kind() == ExprKind::Const && arg.value() >= 0) {
            NumValue v = eval(Expr::sqrt(arg), Point{});
            if (v.is_exact())
                return constant_fun(v.lo);
        }
        return opaque(Expr::sqrt(arg));
    }
    case ExprKind::Piecewise: {
        std::vector<std::pair<Formula, Expr>> pieces;
        auto guards = e.guards();
        auto values = e.args();
        for (std::size_t i = 0; i < guards.size(); ++i)
            pieces.emplace_back(canonicalize(guards[i]), canonical_expr(values[i]));
        std::optional<Expr> other;
        if (e.has_otherwise())
            other = canonical_expr(values.back());
        return opaque(Expr::piecewise(std::move(pieces), std::move(other)));
    }
    case ExprKind::Root: return opaque(e);
    }
    return constant_fun(0);
}

}  // namespace

Expr canonicalize(const Expr& e) { return canonical_expr(e); }

Formula canonicalize(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Atom:
        return Formula::atom(f.rel(), canonical_expr(f.lhs()), canonical_expr(f.rhs()));
    case FormulaKind::Not: return Formula::negation(canonicalize(f.parts()[0]));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const auto& p : f.parts())
            parts.push_back(canonicalize(p));
        return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts))
                                            : Formula::disj(std::move(parts));
    }
    }
    return f;
}

std::optional<Polynomial> to_polynomial(const Expr& e) {
    RatFun r = normalized(to_ratfun(e));
    if (!as_constant(r.den))
        return std::nullopt;
    auto width = static_cast<std::size_t>(e.max_var());
    Polynomial out;
    for (const auto& [m, c] : r.num) {
        Monomial exps(width, 0);
        for (const auto& [atom, k] : m) {
            if (atom.var == 0)
                return std::nullopt;
            exps[static_cast<std::size_t>(atom.var - 1)] = k;
        }
        out.emplace(std::move(exps), c);
    }
    return out;
}

std::optional<UniPoly> to_unipoly(const Expr& e, int var) {
    auto p = to_polynomial(e);
    if (!p)
        return std::nullopt;
    std::vector<Rational> coeffs;
    for (const auto& [m, c] : *p) {
        unsigned d = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0)
                continue;
            if (static_cast<int>(i) + 1 != var)
                return std::nullopt;
            d = m[i];
        }
        if (coeffs.size() <= d)
            coeffs.resize(d + 1);
        coeffs[d] += c;
    }
    return UniPoly(std::move(coeffs));
}

}  // namespace cadmin
