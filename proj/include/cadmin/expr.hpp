#pragma once

// Exact expressions for section functions and set-defining formulas.
//
// Expressions are immutable trees shared by pointer. Values at points are
// computed exactly when every subterm is rational at the point and as
// rational enclosures otherwise; enclosures are refined by re-evaluating at a
// higher working precision until the requested width is reached.

#include "cadmin/rational.hpp"
#include "cadmin/unipoly.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace cadmin {

class EvalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DivisionByZero : public EvalError {
public:
    DivisionByZero() : EvalError("division by zero") {}
};

class SqrtOfNegative : public EvalError {
public:
    SqrtOfNegative() : EvalError("square root of a negative value") {}
};

/// An interval could not be narrowed enough to decide a sign or a guard.
class GuardUndecidable : public EvalError {
public:
    using EvalError::EvalError;
};

enum class Rel { Lt, Le, Eq, Ge, Gt };

const char* rel_name(Rel r);
bool rel_holds(Rel r, int sign_of_difference);

enum class ExprKind { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt, Piecewise, Root };

class Formula;
struct ExprNode;
struct FormulaNode;

class Expr {
public:
    /// The constant 0.
    Expr();

    static Expr constant(const Rational& c);
    static Expr constant(long c) { return constant(Rational(c)); }
    /// x_k, k >= 1.
    static Expr var(int k);
    static Expr neg(Expr a);
    static Expr add(Expr a, Expr b);
    static Expr sub(Expr a, Expr b);
    static Expr mul(Expr a, Expr b);
    static Expr div(Expr a, Expr b);
    static Expr pow(Expr a, unsigned exponent);
    static Expr sqrt(Expr a);
    /// Guarded pieces; `otherwise` applies when no guard holds.
    static Expr piecewise(std::vector<std::pair<Formula, Expr>> pieces,
                          std::optional<Expr> otherwise = std::nullopt);
    static Expr root(AlgebraicNumber a);

    ExprKind kind() const;
    const Rational& value() const;  // Const
    int var_index() const;          // Var
    unsigned exponent() const;      // Pow
    const AlgebraicNumber& algebraic() const;  // Root
    std::span<const Expr> args() const;
    /// Piecewise guards; args() holds the matching values, plus the
    /// otherwise-value last when has_otherwise().
    std::span<const Formula> guards() const;
    bool has_otherwise() const;

    /// Largest variable index referenced (0 for closed expressions).
    int max_var() const;
    bool has_piecewise() const;
    bool is_constant_zero() const;

    /// Structural identity.
    friend bool operator==(const Expr& a, const Expr& b);
    bool same_node(const Expr& other) const { return node_ == other.node_; }

    std::string to_sexpr() const;

    friend Expr operator+(Expr a, Expr b) { return add(std::move(a), std::move(b)); }
    friend Expr operator-(Expr a, Expr b) { return sub(std::move(a), std::move(b)); }
    friend Expr operator*(Expr a, Expr b) { return mul(std::move(a), std::move(b)); }
    friend Expr operator/(Expr a, Expr b) { return div(std::move(a), std::move(b)); }
    friend Expr operator-(Expr a) { return neg(std::move(a)); }

private:
    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const ExprNode> node_;
};

enum class FormulaKind { True, False, Atom, And, Or, Not };

/// Boolean combination of sign conditions `lhs rel rhs`.
class Formula {
public:
    /// The constant true.
    Formula();

    static Formula truth(bool value);
    static Formula atom(Rel rel, Expr lhs, Expr rhs);
    static Formula conj(std::vector<Formula> parts);
    static Formula disj(std::vector<Formula> parts);
    static Formula negation(Formula f);

    FormulaKind kind() const;
    Rel rel() const;
    const Expr& lhs() const;
    const Expr& rhs() const;
    std::span<const Formula> parts() const;

    int max_var() const;
    /// Every atom compares polynomials with rational coefficients.
    bool is_polynomial() const;

    /// Evaluates with a caller-supplied sign of (lhs - rhs) per atom.
    bool evaluate(const std::function<int(const Formula& atom)>& sign_of_atom) const;
    void for_each_atom(const std::function<void(const Formula& atom)>& fn) const;

    friend bool operator==(const Formula& a, const Formula& b);
    std::string to_sexpr() const;

private:
    explicit Formula(std::shared_ptr<const FormulaNode> n) : node_(std::move(n)) {}
    std::shared_ptr<const FormulaNode> node_;
};

// ---------------------------------------------------------------------------
// Points and values

/// A closed rational enclosure; exact when lo == hi.
struct NumValue {
    Rational lo, hi;

    static NumValue exact(const Rational& v) { return {v, v}; }
    bool is_exact() const { return lo == hi; }
    Rational width() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / 2; }
    bool contains(const Rational& q) const { return lo <= q && q <= hi; }
};

std::string to_string(const NumValue& v);

/// One coordinate of a point: a rational, or the value of `generator` at the
/// preceding coordinates of the same point.
class Coordinate {
public:
    static Coordinate exact(const Rational& v);
    static Coordinate generated(Expr generator);

    bool is_exact() const { return exact_.has_value(); }
    const Rational& exact_value() const { return *exact_; }
    const std::optional<Expr>& generator() const { return generator_; }

private:
    std::optional<Rational> exact_;
    std::optional<Expr> generator_;
};

class Point {
public:
    Point() = default;
    explicit Point(std::vector<Rational> coords);

    std::size_t size() const { return coords_.size(); }
    const Coordinate& operator[](std::size_t i) const { return coords_[i]; }
    /// Generated coordinates whose value is rational are stored exactly.
    void push_back(Coordinate c);
    Point prefix(std::size_t k) const;
    /// Replaces coordinate k (0-based); drops everything after it.
    Point with_coordinate(std::size_t k, Coordinate c) const;
    std::string to_string() const;

private:
    std::vector<Coordinate> coords_;
};

/// Working limits for interval refinement.
struct EvalContext {
    /// Target enclosure width; also the resolution below which a sign that
    /// is still unresolved is reported as undecidable.
    Rational precision = pow2_neg(40);
    unsigned max_bits() const;
};

NumValue eval(const Expr& e, const Point& point, const EvalContext& ctx = {});
NumValue eval(const Expr& e, const Point& point, const Rational& precision);
/// Value of coordinate k (0-based) of the point.
NumValue coordinate_value(const Point& point, std::size_t k, const EvalContext& ctx = {});

/// Sign of a - b at the point; throws GuardUndecidable.
int compare(const Expr& a, const Expr& b, const Point& point, const EvalContext& ctx = {});
/// Sign of (coordinate k) - e at the point.
int compare_coordinate(const Point& point, std::size_t k, const Expr& e,
                       const EvalContext& ctx = {});

bool decide(const Formula& f, const Point& point, const EvalContext& ctx = {});

// ---------------------------------------------------------------------------
// Normal forms

/// Expanded polynomial / rational-function normal form for the rational
/// subtrees. Common factors of numerator and denominator are never cancelled.
Expr canonicalize(const Expr& e);
Formula canonicalize(const Formula& f);

enum class Comparison { Equal, NotEqual, Unknown };
const char* comparison_name(Comparison c);

/// Equal when the normal forms agree, NotEqual when some sample separates
/// the values, Unknown otherwise.
Comparison expr_compare_on(const Expr& a, const Expr& b, std::span<const Point> samples,
                           const EvalContext& ctx = {});

/// Multivariate polynomial in x_1..x_n: exponent vector (index 0 = x_1) to
/// coefficient.
using Monomial = std::vector<unsigned>;
using Polynomial = std::map<Monomial, Rational>;

/// Returns the polynomial when e is a polynomial with rational coefficients.
std::optional<Polynomial> to_polynomial(const Expr& e);
/// Univariate view in x_var; nullopt if other variables occur.
std::optional<UniPoly> to_unipoly(const Expr& e, int var);

/// Replaces variables by expressions.
Expr substitute(const Expr& e, const std::map<int, Expr>& values);
Formula substitute(const Formula& f, const std::map<int, Expr>& values);

// ---------------------------------------------------------------------------
// S-expressions

class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

Expr parse_expr(std::string_view text);
Formula parse_formula(std::string_view text);

}  // namespace cadmin
