#pragma once

#include "cadmin/rational.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cadmin {

class ZeroPolynomial : public std::invalid_argument {
public:
    ZeroPolynomial() : std::invalid_argument("operation undefined on the zero polynomial") {}
};

/// Dense univariate polynomial with rational coefficients, lowest degree first.
/// The zero polynomial has no coefficients.
class UniPoly {
public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> coeffs);

    static UniPoly constant(const Rational& c);
    static UniPoly monomial(const Rational& c, unsigned degree);
    /// x - r
    static UniPoly linear_root(const Rational& r);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Rational>& coeffs() const { return coeffs_; }
    Rational coeff(unsigned i) const;
    const Rational& leading() const;

    Rational operator()(const Rational& x) const;
    int sign_at(const Rational& x) const;

    UniPoly derivative() const;
    UniPoly monic() const;
    UniPoly squarefree_part() const;

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator-(const UniPoly& a);
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b);
    friend UniPoly operator*(const Rational& c, const UniPoly& a);
    friend bool operator==(const UniPoly& a, const UniPoly& b) = default;

    /// Euclidean division; throws ZeroPolynomial when b is zero.
    static std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b);

    /// Human-readable form in the variable `var`, highest degree first.
    std::string to_string(const std::string& var = "x") const;

private:
    void trim();
    std::vector<Rational> coeffs_;
};

/// Monic gcd; gcd(0, 0) = 0.
UniPoly gcd(const UniPoly& a, const UniPoly& b);

/// p, p', then negated remainders until the remainder vanishes.
std::vector<UniPoly> sturm_sequence(const UniPoly& p);

/// Sign variations of the chain at x, zeros dropped.
int sign_variations(const std::vector<UniPoly>& chain, const Rational& x);
/// Sign variations at +infinity (positive = true) or -infinity.
int sign_variations_at_infinity(const std::vector<UniPoly>& chain, bool positive);

/// Number of distinct real roots in (a, b] for a squarefree chain head.
int count_roots(const std::vector<UniPoly>& chain, const Rational& a, const Rational& b);
int count_real_roots(const std::vector<UniPoly>& chain);

/// A real algebraic number: the unique root of a squarefree polynomial in an
/// open interval (lo, hi), or the rational lo when lo == hi.
class AlgebraicNumber {
public:
    /// Validates the isolation with a Sturm count; throws std::invalid_argument.
    AlgebraicNumber(UniPoly defining, Rational lo, Rational hi);
    static AlgebraicNumber rational(const Rational& r);

    const UniPoly& defining() const { return defining_; }
    const Rational& lo() const { return lo_; }
    const Rational& hi() const { return hi_; }
    bool is_rational() const { return lo_ == hi_; }
    Rational width() const { return hi_ - lo_; }

    /// Same root, interval width <= width. Collapses when a bisection point
    /// is the root.
    AlgebraicNumber refined(const Rational& width) const;

    /// Sign of (this - q).
    int compare(const Rational& q) const;

    friend bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b);
    friend bool operator<(const AlgebraicNumber& a, const AlgebraicNumber& b);

private:
    struct Trusted {};
    AlgebraicNumber(UniPoly defining, Rational lo, Rational hi, Trusted)
        : defining_(std::move(defining)), lo_(std::move(lo)), hi_(std::move(hi)) {}
    friend std::vector<AlgebraicNumber> isolate_roots(const UniPoly& p);

    UniPoly defining_;
    Rational lo_, hi_;
};

/// Real roots of p (distinct), sorted, pairwise disjoint isolating intervals.
std::vector<AlgebraicNumber> isolate_roots(const UniPoly& p);

inline AlgebraicNumber refine(const AlgebraicNumber& a, const Rational& width) {
    return a.refined(width);
}

/// Exact sign of q at the algebraic number a.
int sign_at(const UniPoly& q, const AlgebraicNumber& a);

}  // namespace cadmin
