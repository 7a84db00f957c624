#include "cadmin/expr.hpp"

#include <algorithm>
#include <sstream>

namespace cadmin {

struct ExprNode {
    ExprKind kind = ExprKind::Const;
    Rational value{0};
    int var = 0;
    unsigned exponent = 0;
    std::vector<Expr> args;
    std::vector<Formula> guards;
    bool otherwise = false;
    std::optional<AlgebraicNumber> algebraic;
    int max_var = 0;
    bool has_piecewise = false;
};

struct FormulaNode {
    FormulaKind kind = FormulaKind::True;
    Rel rel = Rel::Eq;
    Expr lhs, rhs;
    std::vector<Formula> parts;
    int max_var = 0;
};

const char* rel_name(Rel r) {
    switch (r) {
    case Rel::Lt: return "lt";
    case Rel::Le: return "le";
    case Rel::Eq: return "eq";
    case Rel::Ge: return "ge";
    case Rel::Gt: return "gt";
    }
    return "?";
}

bool rel_holds(Rel r, int s) {
    switch (r) {
    case Rel::Lt: return s < 0;
    case Rel::Le: return s <= 0;
    case Rel::Eq: return s == 0;
    case Rel::Ge: return s >= 0;
    case Rel::Gt: return s > 0;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Expr construction

namespace {

std::shared_ptr<const ExprNode> zero_node() {
    static const auto node = [] {
        auto n = std::make_shared<ExprNode>();
        n->kind = ExprKind::Const;
        return n;
    }();
    return node;
}

std::shared_ptr<ExprNode> compound(ExprKind kind, std::vector<Expr> args) {
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    for (const auto& a : args) {
        n->max_var = std::max(n->max_var, a.max_var());
        n->has_piecewise = n->has_piecewise || a.has_piecewise();
    }
    n->args = std::move(args);
    return n;
}

}  // namespace

Expr::Expr() : node_(zero_node()) {}

Expr Expr::constant(const Rational& c) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Const;
    n->value = c;
    n->value.canonicalize();
    return Expr(std::move(n));
}

Expr Expr::var(int k) {
    if (k < 1)
        throw std::invalid_argument("variable index must be >= 1");
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Var;
    n->var = k;
    n->max_var = k;
    return Expr(std::move(n));
}

Expr Expr::neg(Expr a) { return Expr(compound(ExprKind::Neg, {std::move(a)})); }
Expr Expr::add(Expr a, Expr b) { return Expr(compound(ExprKind::Add, {std::move(a), std::move(b)})); }
Expr Expr::sub(Expr a, Expr b) { return Expr(compound(ExprKind::Sub, {std::move(a), std::move(b)})); }
Expr Expr::mul(Expr a, Expr b) { return Expr(compound(ExprKind::Mul, {std::move(a), std::move(b)})); }
Expr Expr::div(Expr a, Expr b) { return Expr(compound(ExprKind::Div, {std::move(a), std::move(b)})); }

Expr Expr::pow(Expr a, unsigned exponent) {
    auto n = compound(ExprKind::Pow, {std::move(a)});
    n->exponent = exponent;
    return Expr(std::move(n));
}

Expr Expr::sqrt(Expr a) { return Expr(compound(ExprKind::Sqrt, {std::move(a)})); }

Expr Expr::piecewise(std::vector<std::pair<Formula, Expr>> pieces, std::optional<Expr> otherwise) {
    if (pieces.empty() && !otherwise)
        throw std::invalid_argument("piecewise expression without pieces");
    std::vector<Expr> values;
    std::vector<Formula> guards;
    for (auto& [g, v] : pieces) {
        guards.push_back(std::move(g));
        values.push_back(std::move(v));
    }
    bool has_else = otherwise.has_value();
    if (otherwise)
        values.push_back(std::move(*otherwise));
    auto n = compound(ExprKind::Piecewise, std::move(values));
    for (const auto& g : guards)
        n->max_var = std::max(n->max_var, g.max_var());
    n->guards = std::move(guards);
    n->otherwise = has_else;
    n->has_piecewise = true;
    return Expr(std::move(n));
}

Expr Expr::root(AlgebraicNumber a) {
    if (a.is_rational())
        return constant(a.lo());
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Root;
    n->algebraic = std::move(a);
    return Expr(std::move(n));
}

ExprKind Expr::kind() const { return node_->kind; }
const Rational& Expr::value() const { return node_->value; }
int Expr::var_index() const { return node_->var; }
unsigned Expr::exponent() const { return node_->exponent; }
const AlgebraicNumber& Expr::algebraic() const { return *node_->algebraic; }
std::span<const Expr> Expr::args() const { return node_->args; }
std::span<const Formula> Expr::guards() const { return node_->guards; }
bool Expr::has_otherwise() const { return node_->otherwise; }
int Expr::max_var() const { return node_->max_var; }
bool Expr::has_piecewise() const { return node_->has_piecewise; }
bool Expr::is_constant_zero() const { return kind() == ExprKind::Const && value() == 0; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_)
        return true;
    const ExprNode& x = *a.node_;
    const ExprNode& y = *b.node_;
    if (x.kind != y.kind || x.args.size() != y.args.size() || x.guards.size() != y.guards.size())
        return false;
    switch (x.kind) {
    case ExprKind::Const: return x.value == y.value;
    case ExprKind::Var: return x.var == y.var;
    case ExprKind::Pow:
        if (x.exponent != y.exponent)
            return false;
        break;
    case ExprKind::Root:
        return x.algebraic->defining() == y.algebraic->defining() &&
               x.algebraic->lo() == y.algebraic->lo() && x.algebraic->hi() == y.algebraic->hi();
    case ExprKind::Piecewise:
        if (x.otherwise != y.otherwise)
            return false;
        for (std::size_t i = 0; i < x.guards.size(); ++i)
            if (!(x.guards[i] == y.guards[i]))
                return false;
        break;
    default: break;
    }
    for (std::size_t i = 0; i < x.args.size(); ++i)
        if (!(x.args[i] == y.args[i]))
            return false;
    return true;
}

namespace {

const char* kind_name(ExprKind k) {
    switch (k) {
    case ExprKind::Neg: return "neg";
    case ExprKind::Add: return "add";
    case ExprKind::Sub: return "sub";
    case ExprKind::Mul: return "mul";
    case ExprKind::Div: return "div";
    case ExprKind::Pow: return "pow";
    case ExprKind::Sqrt: return "sqrt";
    case ExprKind::Piecewise: return "piecewise";
    case ExprKind::Root: return "root";
    default: return "?";
    }
}

void write(std::ostream& os, const Expr& e);
void write(std::ostream& os, const Formula& f);

void write(std::ostream& os, const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Const: os << e.value().get_str(); return;
    case ExprKind::Var: os << 'x' << e.var_index(); return;
    case ExprKind::Pow:
        os << "(pow ";
        write(os, e.args()[0]);
        os << ' ' << e.exponent() << ')';
        return;
    case ExprKind::Root: {
        const auto& a = e.algebraic();
        os << "(root (poly";
        for (const auto& c : a.defining().coeffs())
            os << ' ' << c.get_str();
        os << ") " << a.lo().get_str() << ' ' << a.hi().get_str() << ')';
        return;
    }
    case ExprKind::Piecewise: {
        os << "(piecewise";
        auto guards = e.guards();
        auto values = e.args();
        for (std::size_t i = 0; i < guards.size(); ++i) {
            os << " (";
            write(os, guards[i]);
            os << ' ';
            write(os, values[i]);
            os << ')';
        }
        if (e.has_otherwise()) {
            os << " (else ";
            write(os, values.back());
            os << ')';
        }
        os << ')';
        return;
    }
    default:
        os << '(' << kind_name(e.kind());
        for (const auto& a : e.args()) {
            os << ' ';
            write(os, a);
        }
        os << ')';
    }
}

void write(std::ostream& os, const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: os << "true"; return;
    case FormulaKind::False: os << "false"; return;
    case FormulaKind::Atom:
        os << '(' << rel_name(f.rel()) << ' ';
        write(os, f.lhs());
        os << ' ';
        write(os, f.rhs());
        os << ')';
        return;
    case FormulaKind::Not:
        os << "(not ";
        write(os, f.parts()[0]);
        os << ')';
        return;
    case FormulaKind::And:
    case FormulaKind::Or:
        os << (f.kind() == FormulaKind::And ? "(and" : "(or");
        for (const auto& p : f.parts()) {
            os << ' ';
            write(os, p);
        }
        os << ')';
        return;
    }
}

}  // namespace

std::string Expr::to_sexpr() const {
    std::ostringstream os;
    write(os, *this);
    return os.str();
}

// ---------------------------------------------------------------------------
// Formula construction

namespace {

std::shared_ptr<const FormulaNode> constant_formula(bool value) {
    static const auto t = [] {
        auto n = std::make_shared<FormulaNode>();
        n->kind = FormulaKind::True;
        return n;
    }();
    static const auto f = [] {
        auto n = std::make_shared<FormulaNode>();
        n->kind = FormulaKind::False;
        return n;
    }();
    return value ? t : f;
}

}  // namespace

Formula::Formula() : node_(constant_formula(true)) {}

Formula Formula::truth(bool value) { return Formula(constant_formula(value)); }

Formula Formula::atom(Rel rel, Expr lhs, Expr rhs) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = FormulaKind::Atom;
    n->rel = rel;
    n->max_var = std::max(lhs.max_var(), rhs.max_var());
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return Formula(std::move(n));
}

namespace {

std::shared_ptr<FormulaNode> junction(FormulaKind kind, std::vector<Formula> parts) {
    auto n = std::make_shared<FormulaNode>();
    n->kind = kind;
    for (const auto& p : parts)
        n->max_var = std::max(n->max_var, p.max_var());
    n->parts = std::move(parts);
    return n;
}

}  // namespace

Formula Formula::conj(std::vector<Formula> parts) {
    if (parts.empty())
        return truth(true);
    return Formula(junction(FormulaKind::And, std::move(parts)));
}

Formula Formula::disj(std::vector<Formula> parts) {
    if (parts.empty())
        return truth(false);
    return Formula(junction(FormulaKind::Or, std::move(parts)));
}

Formula Formula::negation(Formula f) { return Formula(junction(FormulaKind::Not, {std::move(f)})); }

FormulaKind Formula::kind() const { return node_->kind; }
Rel Formula::rel() const { return node_->rel; }
const Expr& Formula::lhs() const { return node_->lhs; }
const Expr& Formula::rhs() const { return node_->rhs; }
std::span<const Formula> Formula::parts() const { return node_->parts; }
int Formula::max_var() const { return node_->max_var; }

bool Formula::is_polynomial() const {
    bool ok = true;
    for_each_atom([&](const Formula& a) {
        if (!to_polynomial(Expr::sub(a.lhs(), a.rhs())))
            ok = false;
    });
    return ok;
}

bool Formula::evaluate(const std::function<int(const Formula&)>& sign_of_atom) const {
    switch (kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Atom: return rel_holds(rel(), sign_of_atom(*this));
    case FormulaKind::Not: return !parts()[0].evaluate(sign_of_atom);
    case FormulaKind::And:
        for (const auto& p : parts())
            if (!p.evaluate(sign_of_atom))
                return false;
        return true;
    case FormulaKind::Or:
        for (const auto& p : parts())
            if (p.evaluate(sign_of_atom))
                return true;
        return false;
    }
    return false;
}

void Formula::for_each_atom(const std::function<void(const Formula&)>& fn) const {
    if (kind() == FormulaKind::Atom) {
        fn(*this);
        return;
    }
    for (const auto& p : parts())
        p.for_each_atom(fn);
}

bool operator==(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_)
        return true;
    if (a.kind() != b.kind())
        return false;
    if (a.kind() == FormulaKind::Atom)
        return a.rel() == b.rel() && a.lhs() == b.lhs() && a.rhs() == b.rhs();
    auto pa = a.parts(), pb = b.parts();
    if (pa.size() != pb.size())
        return false;
    for (std::size_t i = 0; i < pa.size(); ++i)
        if (!(pa[i] == pb[i]))
            return false;
    return true;
}

std::string Formula::to_sexpr() const {
    std::ostringstream os;
    write(os, *this);
    return os.str();
}

// ---------------------------------------------------------------------------
// Points

std::string to_string(const NumValue& v) {
    if (v.is_exact())
        return v.lo.get_str();
    return "[" + v.lo.get_str() + ", " + v.hi.get_str() + "]";
}

Coordinate Coordinate::exact(const Rational& v) {
    Coordinate c;
    c.exact_ = v;
    c.exact_->canonicalize();
    return c;
}

Coordinate Coordinate::generated(Expr generator) {
    Coordinate c;
    if (generator.kind() == ExprKind::Const)
        c.exact_ = generator.value();
    else
        c.generator_ = std::move(generator);
    return c;
}

Point::Point(std::vector<Rational> coords) {
    for (auto& q : coords)
        coords_.push_back(Coordinate::exact(q));
}

namespace {

struct Enclosure {
    Rational lo, hi;
    bool exact() const { return lo == hi; }
};

using MaybeEnclosure = std::optional<Enclosure>;

Rational pow_rational(const Rational& q, unsigned n) {
    Rational r(1);
    for (unsigned i = 0; i < n; ++i)
        r *= q;
    return r;
}

Rational sqrt_down(const Rational& q, unsigned bits) {
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
    Integer t = floor(q * scale * scale), r;
    mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
    Rational out(r, scale);
    out.canonicalize();
    return out;
}

Rational sqrt_up(const Rational& q, unsigned bits) {
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
    Integer t = ceil(q * scale * scale), r;
    mpz_sqrt(r.get_mpz_t(), t.get_mpz_t());
    if (r * r < t)
        r += 1;
    Rational out(r, scale);
    out.canonicalize();
    return out;
}

std::optional<Rational> exact_sqrt(const Rational& q) {
    if (q < 0)
        return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num_mpz_t()) || !mpz_perfect_square_p(q.get_den_mpz_t()))
        return std::nullopt;
    Integer n, d;
    mpz_sqrt(n.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(d.get_mpz_t(), q.get_den_mpz_t());
    Rational r(n, d);
    r.canonicalize();
    return r;
}

// Evaluates at one working precision. An empty result means the precision
// was too coarse to resolve a sign (guards, divisors, sqrt arguments).
class Evaluator {
public:
    Evaluator(const Point& point, unsigned bits) : point_(point), bits_(bits), cache_(point.size()) {}

    MaybeEnclosure eval(const Expr& e);
    std::optional<bool> decide(const Formula& f);
    std::optional<int> sign_diff(const Expr& a, const Expr& b);
    MaybeEnclosure coordinate(std::size_t k);

private:
    Enclosure round(Enclosure x) const {
        if (!x.exact()) {
            x.lo = round_down(x.lo, bits_);
            x.hi = round_up(x.hi, bits_);
        }
        return x;
    }
    bool coordinate_matches(const Expr& var, const Expr& e) const;
    Expr inline_generated(const Expr& e) const;
    std::optional<int> algebraic_sign(const Expr& d) const;

    const Point& point_;
    unsigned bits_;
    std::vector<std::optional<MaybeEnclosure>> cache_;
};

MaybeEnclosure Evaluator::coordinate(std::size_t k) {
    if (k >= point_.size())
        throw EvalError("point has no coordinate x" + std::to_string(k + 1));
    if (cache_[k])
        return *cache_[k];
    const Coordinate& c = point_[k];
    MaybeEnclosure out;
    if (c.is_exact()) {
        out = Enclosure{c.exact_value(), c.exact_value()};
    } else {
        Point prefix = point_.prefix(k);
        Evaluator sub(prefix, bits_);
        out = sub.eval(*c.generator());
    }
    cache_[k] = out;
    return out;
}

MaybeEnclosure Evaluator::eval(const Expr& e) {
    switch (e.kind()) {
    case ExprKind::Const: return Enclosure{e.value(), e.value()};
    case ExprKind::Var: return coordinate(static_cast<std::size_t>(e.var_index() - 1));
    case ExprKind::Neg: {
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        return Enclosure{-a->hi, -a->lo};
    }
    case ExprKind::Add:
    case ExprKind::Sub: {
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        auto b = eval(e.args()[1]);
        if (!b)
            return b;
        if (e.kind() == ExprKind::Add)
            return round({a->lo + b->lo, a->hi + b->hi});
        return round({a->lo - b->hi, a->hi - b->lo});
    }
    case ExprKind::Mul: {
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        auto b = eval(e.args()[1]);
        if (!b)
            return b;
        if (a->exact() && b->exact())
            return Enclosure{a->lo * b->lo, a->lo * b->lo};
        Rational p[4] = {a->lo * b->lo, a->lo * b->hi, a->hi * b->lo, a->hi * b->hi};
        return round({*std::min_element(p, p + 4), *std::max_element(p, p + 4)});
    }
    case ExprKind::Div: {
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        auto b = eval(e.args()[1]);
        if (!b)
            return b;
        if (b->exact()) {
            if (b->lo == 0)
                throw DivisionByZero();
            Rational inv = 1 / b->lo;
            if (a->exact())
                return Enclosure{a->lo * inv, a->lo * inv};
            Rational x = a->lo * inv, y = a->hi * inv;
            return round({std::min(x, y), std::max(x, y)});
        }
        if (b->lo <= 0 && b->hi >= 0)
            return std::nullopt;
        Rational ilo = 1 / b->hi, ihi = 1 / b->lo;
        Rational p[4] = {a->lo * ilo, a->lo * ihi, a->hi * ilo, a->hi * ihi};
        return round({*std::min_element(p, p + 4), *std::max_element(p, p + 4)});
    }
    case ExprKind::Pow: {
        unsigned n = e.exponent();
        if (n == 0)
            return Enclosure{Rational(1), Rational(1)};
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        if (a->exact()) {
            Rational v = pow_rational(a->lo, n);
            return Enclosure{v, v};
        }
        Rational plo = pow_rational(a->lo, n), phi = pow_rational(a->hi, n);
        if (n % 2 == 1 || a->lo >= 0)
            return round({plo, phi});
        if (a->hi <= 0)
            return round({phi, plo});
        return round({Rational(0), std::max(plo, phi)});
    }
    case ExprKind::Sqrt: {
        auto a = eval(e.args()[0]);
        if (!a)
            return a;
        if (a->exact()) {
            if (a->lo < 0)
                throw SqrtOfNegative();
            if (auto r = exact_sqrt(a->lo))
                return Enclosure{*r, *r};
            return round({sqrt_down(a->lo, bits_), sqrt_up(a->lo, bits_)});
        }
        if (a->hi < 0)
            throw SqrtOfNegative();
        if (a->lo < 0)
            return std::nullopt;
        return round({sqrt_down(a->lo, bits_), sqrt_up(a->hi, bits_)});
    }
    case ExprKind::Root: {
        AlgebraicNumber r = e.algebraic().refined(pow2_neg(bits_));
        return Enclosure{r.lo(), r.hi()};
    }
    case ExprKind::Piecewise: {
        auto guards = e.guards();
        auto values = e.args();
        std::optional<std::size_t> chosen;
        for (std::size_t i = 0; i < guards.size(); ++i) {
            auto holds = decide(guards[i]);
            if (!holds)
                return std::nullopt;
            if (*holds) {
                if (chosen)
                    throw EvalError("overlapping piecewise guards in " + e.to_sexpr());
                chosen = i;
            }
        }
        if (!chosen) {
            if (!e.has_otherwise())
                throw EvalError("no piecewise guard holds in " + e.to_sexpr());
            return eval(values.back());
        }
        return eval(values[*chosen]);
    }
    }
    return std::nullopt;
}

bool Evaluator::coordinate_matches(const Expr& var, const Expr& e) const {
    if (var.kind() != ExprKind::Var)
        return false;
    auto k = static_cast<std::size_t>(var.var_index() - 1);
    if (k >= point_.size())
        return false;
    const auto& gen = point_[k].generator();
    return gen && (*gen == e);
}

std::optional<int> Evaluator::sign_diff(const Expr& a, const Expr& b) {
    if (coordinate_matches(a, b) || coordinate_matches(b, a) || a == b)
        return 0;
    auto x = eval(a);
    if (!x)
        return std::nullopt;
    auto y = eval(b);
    if (!y)
        return std::nullopt;
    if (x->exact() && y->exact())
        return sgn(x->lo - y->lo);
    if (x->lo > y->hi)
        return 1;
    if (x->hi < y->lo)
        return -1;
    Expr d = Expr::sub(inline_generated(a), inline_generated(b));
    if (canonicalize(d).is_constant_zero())
        return 0;
    return algebraic_sign(d);
}

// Exact sign of a closed expression that is a polynomial in a single
// algebraic number, or nullopt.
std::optional<int> Evaluator::algebraic_sign(const Expr& d) const {
    std::map<int, Expr> exact;
    for (int k = 1; k <= d.max_var() && k <= static_cast<int>(point_.size()); ++k)
        if (point_[static_cast<std::size_t>(k - 1)].is_exact())
            exact.emplace(k, Expr::constant(point_[static_cast<std::size_t>(k - 1)].exact_value()));
    Expr closed = exact.empty() ? d : substitute(d, exact);
    if (closed.max_var() != 0)
        return std::nullopt;
    std::optional<Expr> root;
    bool ok = true;
    std::function<Expr(const Expr&)> lift = [&](const Expr& e) -> Expr {
        auto args = e.args();
        switch (e.kind()) {
        case ExprKind::Root:
            if (root && !(*root == e))
                ok = false;
            root = e;
            return Expr::var(1);
        case ExprKind::Const: return e;
        case ExprKind::Neg: return Expr::neg(lift(args[0]));
        case ExprKind::Add: return Expr::add(lift(args[0]), lift(args[1]));
        case ExprKind::Sub: return Expr::sub(lift(args[0]), lift(args[1]));
        case ExprKind::Mul: return Expr::mul(lift(args[0]), lift(args[1]));
        case ExprKind::Pow: return Expr::pow(lift(args[0]), e.exponent());
        default: ok = false; return e;
        }
    };
    Expr poly = lift(closed);
    if (!ok || !root)
        return std::nullopt;
    auto u = to_unipoly(poly, 1);
    if (!u)
        return std::nullopt;
    return sign_at(*u, root->algebraic());
}

Expr Evaluator::inline_generated(const Expr& e) const {
    std::map<int, Expr> values;
    for (int k = 1; k <= e.max_var() && k <= static_cast<int>(point_.size()); ++k) {
        const auto& gen = point_[static_cast<std::size_t>(k - 1)].generator();
        if (gen)
            values.emplace(k, Evaluator(point_, bits_).inline_generated(*gen));
    }
    return values.empty() ? e : substitute(e, values);
}

std::optional<bool> Evaluator::decide(const Formula& f) {
    switch (f.kind()) {
    case FormulaKind::True: return true;
    case FormulaKind::False: return false;
    case FormulaKind::Atom: {
        auto s = sign_diff(f.lhs(), f.rhs());
        if (!s)
            return std::nullopt;
        return rel_holds(f.rel(), *s);
    }
    case FormulaKind::Not: {
        auto v = decide(f.parts()[0]);
        if (!v)
            return v;
        return !*v;
    }
    case FormulaKind::And:
    case FormulaKind::Or: {
        bool is_and = f.kind() == FormulaKind::And;
        for (const auto& p : f.parts()) {
            auto v = decide(p);
            if (!v)
                return v;
            if (*v != is_and)
                return *v;
        }
        return is_and;
    }
    }
    return std::nullopt;
}

template <class T, class Fn>
T refine_until(const EvalContext& ctx, Fn&& attempt, const std::string& what) {
    unsigned cap = ctx.max_bits();
    for (unsigned bits = 64;; bits = std::min(cap, bits * 2)) {
        if (auto r = attempt(bits))
            return *r;
        if (bits >= cap)
            break;
    }
    throw GuardUndecidable("undecidable at precision " + ctx.precision.get_str() + ": " + what);
}

}  // namespace

void Point::push_back(Coordinate c) {
    if (!c.is_exact()) {
        if (c.generator()->max_var() > static_cast<int>(coords_.size()))
            throw std::invalid_argument("coordinate generator refers to later coordinates");
        Evaluator ev(*this, 64);
        if (auto v = ev.eval(*c.generator()); v && v->exact())
            c = Coordinate::exact(v->lo);
    }
    coords_.push_back(std::move(c));
}

Point Point::prefix(std::size_t k) const {
    Point p;
    p.coords_.assign(coords_.begin(), coords_.begin() + std::min(k, coords_.size()));
    return p;
}

Point Point::with_coordinate(std::size_t k, Coordinate c) const {
    Point p = prefix(k);
    p.push_back(std::move(c));
    return p;
}

std::string Point::to_string() const {
    std::string s = "(";
    for (std::size_t k = 0; k < coords_.size(); ++k) {
        if (k)
            s += ", ";
        if (coords_[k].is_exact())
            s += coords_[k].exact_value().get_str();
        else
            s += cadmin::to_string(coordinate_value(*this, k));
    }
    return s + ")";
}

unsigned EvalContext::max_bits() const { return std::max(256u, 4 * bits_for(precision) + 128); }

NumValue eval(const Expr& e, const Point& point, const EvalContext& ctx) {
    if (e.max_var() > static_cast<int>(point.size()))
        throw EvalError("point of dimension " + std::to_string(point.size()) +
                        " is too short for " + e.to_sexpr());
    return refine_until<NumValue>(
        ctx,
        [&](unsigned bits) -> std::optional<NumValue> {
            Evaluator ev(point, bits);
            auto r = ev.eval(e);
            if (!r || (!r->exact() && r->hi - r->lo > ctx.precision))
                return std::nullopt;
            return NumValue{r->lo, r->hi};
        },
        e.to_sexpr());
}

NumValue eval(const Expr& e, const Point& point, const Rational& precision) {
    EvalContext ctx;
    ctx.precision = precision;
    return eval(e, point, ctx);
}

NumValue coordinate_value(const Point& point, std::size_t k, const EvalContext& ctx) {
    return eval(Expr::var(static_cast<int>(k) + 1), point, ctx);
}

int compare(const Expr& a, const Expr& b, const Point& point, const EvalContext& ctx) {
    return refine_until<int>(
        ctx, [&](unsigned bits) { return Evaluator(point, bits).sign_diff(a, b); },
        "sign of " + a.to_sexpr() + " - " + b.to_sexpr() + " at " + std::to_string(point.size()) +
            "-point");
}

int compare_coordinate(const Point& point, std::size_t k, const Expr& e, const EvalContext& ctx) {
    return compare(Expr::var(static_cast<int>(k) + 1), e, point, ctx);
}

bool decide(const Formula& f, const Point& point, const EvalContext& ctx) {
    return refine_until<bool>(
        ctx, [&](unsigned bits) { return Evaluator(point, bits).decide(f); }, f.to_sexpr());
}

const char* comparison_name(Comparison c) {
    switch (c) {
    case Comparison::Equal: return "Equal";
    case Comparison::NotEqual: return "NotEqual";
    case Comparison::Unknown: return "Unknown";
    }
    return "?";
}

Comparison expr_compare_on(const Expr& a, const Expr& b, std::span<const Point> samples,
                           const EvalContext& ctx) {
    if (canonicalize(a) == canonicalize(b) || canonicalize(Expr::sub(a, b)).is_constant_zero())
        return Comparison::Equal;
    for (const auto& p : samples) {
        NumValue x = eval(a, p, ctx);
        NumValue y = eval(b, p, ctx);
        if (x.hi < y.lo || y.hi < x.lo)
            return Comparison::NotEqual;
    }
    return Comparison::Unknown;
}

Expr substitute(const Expr& e, const std::map<int, Expr>& values) {
    if (e.max_var() == 0)
        return e;
    switch (e.kind()) {
    case ExprKind::Var: {
        auto it = values.find(e.var_index());
        return it == values.end() ? e : it->second;
    }
    case ExprKind::Neg: return Expr::neg(substitute(e.args()[0], values));
    case ExprKind::Add: return Expr::add(substitute(e.args()[0], values), substitute(e.args()[1], values));
    case ExprKind::Sub: return Expr::sub(substitute(e.args()[0], values), substitute(e.args()[1], values));
    case ExprKind::Mul: return Expr::mul(substitute(e.args()[0], values), substitute(e.args()[1], values));
    case ExprKind::Div: return Expr::div(substitute(e.args()[0], values), substitute(e.args()[1], values));
    case ExprKind::Pow: return Expr::pow(substitute(e.args()[0], values), e.exponent());
    case ExprKind::Sqrt: return Expr::sqrt(substitute(e.args()[0], values));
    case ExprKind::Piecewise: {
        std::vector<std::pair<Formula, Expr>> pieces;
        auto guards = e.guards();
        auto vals = e.args();
        for (std::size_t i = 0; i < guards.size(); ++i)
            pieces.emplace_back(substitute(guards[i], values), substitute(vals[i], values));
        std::optional<Expr> other;
        if (e.has_otherwise())
            other = substitute(vals.back(), values);
        return Expr::piecewise(std::move(pieces), std::move(other));
    }
    default: return e;
    }
}

Formula substitute(const Formula& f, const std::map<int, Expr>& values) {
    switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False: return f;
    case FormulaKind::Atom:
        return Formula::atom(f.rel(), substitute(f.lhs(), values), substitute(f.rhs(), values));
    case FormulaKind::Not: return Formula::negation(substitute(f.parts()[0], values));
    case FormulaKind::And:
    case FormulaKind::Or: {
        std::vector<Formula> parts;
        for (const auto& p : f.parts())
            parts.push_back(substitute(p, values));
        return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts))
                                            : Formula::disj(std::move(parts));
    }
    }
    return f;
}

}  // namespace cadmin
