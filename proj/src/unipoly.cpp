#include "cadmin/unipoly.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace cadmin {

UniPoly::UniPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) {
    for (auto& c : coeffs_)
        c.canonicalize();
    trim();
}

UniPoly UniPoly::constant(const Rational& c) { return UniPoly({c}); }

UniPoly UniPoly::monomial(const Rational& c, unsigned degree) {
    std::vector<Rational> v(degree + 1, Rational(0));
    v[degree] = c;
    return UniPoly(std::move(v));
}

UniPoly UniPoly::linear_root(const Rational& r) { return UniPoly({-r, Rational(1)}); }

void UniPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0)
        coeffs_.pop_back();
}

Rational UniPoly::coeff(unsigned i) const {
    return i < coeffs_.size() ? coeffs_[i] : Rational(0);
}

const Rational& UniPoly::leading() const {
    if (is_zero())
        throw ZeroPolynomial();
    return coeffs_.back();
}

Rational UniPoly::operator()(const Rational& x) const {
    Rational acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it)
        acc = acc * x + *it;
    return acc;
}

int UniPoly::sign_at(const Rational& x) const { return sgn((*this)(x)); }

UniPoly UniPoly::derivative() const {
    if (coeffs_.size() <= 1)
        return {};
    std::vector<Rational> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i)
        d[i - 1] = coeffs_[i] * static_cast<long>(i);
    return UniPoly(std::move(d));
}

UniPoly UniPoly::monic() const {
    if (is_zero())
        return {};
    Rational lc = leading();
    std::vector<Rational> v = coeffs_;
    for (auto& c : v)
        c /= lc;
    return UniPoly(std::move(v));
}

UniPoly UniPoly::squarefree_part() const {
    if (is_zero())
        throw ZeroPolynomial();
    if (degree() == 0)
        return constant(Rational(1));
    UniPoly g = gcd(*this, derivative());
    return divmod(*this, g).first.monic();
}

UniPoly operator+(const UniPoly& a, const UniPoly& b) {
    std::vector<Rational> v(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        v[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i)
        v[i] += b.coeffs_[i];
    return UniPoly(std::move(v));
}

UniPoly operator-(const UniPoly& a) {
    std::vector<Rational> v = a.coeffs_;
    for (auto& c : v)
        c = -c;
    return UniPoly(std::move(v));
}

UniPoly operator-(const UniPoly& a, const UniPoly& b) { return a + (-b); }

UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero())
        return {};
    std::vector<Rational> v(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j)
            v[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return UniPoly(std::move(v));
}

UniPoly operator*(const Rational& c, const UniPoly& a) { return UniPoly::constant(c) * a; }

std::pair<UniPoly, UniPoly> UniPoly::divmod(const UniPoly& a, const UniPoly& b) {
    if (b.is_zero())
        throw ZeroPolynomial();
    std::vector<Rational> rem = a.coeffs_;
    if (a.degree() < b.degree())
        return {UniPoly(), a};
    std::vector<Rational> quot(a.coeffs_.size() - b.coeffs_.size() + 1, Rational(0));
    const Rational& lb = b.leading();
    for (int i = a.degree() - b.degree(); i >= 0; --i) {
        Rational f = rem[i + b.degree()] / lb;
        quot[i] = f;
        if (f == 0)
            continue;
        for (int j = 0; j <= b.degree(); ++j)
            rem[i + j] -= f * b.coeffs_[j];
    }
    return {UniPoly(std::move(quot)), UniPoly(std::move(rem))};
}

std::string UniPoly::to_string(const std::string& var) const {
    if (is_zero())
        return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
        const Rational& c = coeffs_[i];
        if (c == 0)
            continue;
        Rational mag = abs(c);
        if (first)
            os << (c < 0 ? "-" : "");
        else
            os << (c < 0 ? " - " : " + ");
        if (mag != 1 || i == 0)
            os << mag.get_str();
        if (i >= 1)
            os << (mag != 1 ? "*" : "") << var;
        if (i >= 2)
            os << "^" << i;
        first = false;
    }
    return os.str();
}

UniPoly gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = UniPoly::divmod(x, y).second;
        x = std::move(y);
        y = std::move(r);
    }
    return x.monic();
}

std::vector<UniPoly> sturm_sequence(const UniPoly& p) {
    if (p.is_zero())
        throw ZeroPolynomial();
    std::vector<UniPoly> chain{p};
    UniPoly d = p.derivative();
    if (d.is_zero())
        return chain;
    chain.push_back(d);
    while (true) {
        UniPoly r = UniPoly::divmod(chain[chain.size() - 2], chain.back()).second;
        if (r.is_zero())
            break;
        chain.push_back(-r);
    }
    return chain;
}

namespace {

int variations(const std::vector<int>& signs) {
    int count = 0, last = 0;
    for (int s : signs) {
        if (s == 0)
            continue;
        if (last != 0 && s != last)
            ++count;
        last = s;
    }
    return count;
}

}  // namespace

int sign_variations(const std::vector<UniPoly>& chain, const Rational& x) {
    std::vector<int> signs;
    signs.reserve(chain.size());
    for (const auto& q : chain)
        signs.push_back(q.sign_at(x));
    return variations(signs);
}

int sign_variations_at_infinity(const std::vector<UniPoly>& chain, bool positive) {
    std::vector<int> signs;
    for (const auto& q : chain) {
        if (q.is_zero()) {
            signs.push_back(0);
            continue;
        }
        int s = sgn(q.leading());
        if (!positive && q.degree() % 2 == 1)
            s = -s;
        signs.push_back(s);
    }
    return variations(signs);
}

int count_roots(const std::vector<UniPoly>& chain, const Rational& a, const Rational& b) {
    if (!(a < b))
        return 0;
    return sign_variations(chain, a) - sign_variations(chain, b);
}

int count_real_roots(const std::vector<UniPoly>& chain) {
    return sign_variations_at_infinity(chain, false) - sign_variations_at_infinity(chain, true);
}

// ---------------------------------------------------------------------------

AlgebraicNumber::AlgebraicNumber(UniPoly defining, Rational lo, Rational hi)
    : defining_(std::move(defining)), lo_(std::move(lo)), hi_(std::move(hi)) {
    if (defining_.is_zero() || defining_.degree() < 1)
        throw std::invalid_argument("algebraic number needs a nonconstant defining polynomial");
    defining_ = defining_.squarefree_part();
    if (lo_ > hi_)
        throw std::invalid_argument("algebraic number interval is reversed");
    if (lo_ == hi_) {
        if (defining_(lo_) != 0)
            throw std::invalid_argument("rational point is not a root of the defining polynomial");
        return;
    }
    if (defining_(hi_) == 0)
        throw std::invalid_argument("isolating interval must be open at a root endpoint");
    auto chain = sturm_sequence(defining_);
    if (count_roots(chain, lo_, hi_) != 1)
        throw std::invalid_argument("interval (" + lo_.get_str() + ", " + hi_.get_str() +
                                    ") does not isolate exactly one root of " +
                                    defining_.to_string());
}

AlgebraicNumber AlgebraicNumber::rational(const Rational& r) {
    return AlgebraicNumber(UniPoly::linear_root(r), r, r, Trusted{});
}

AlgebraicNumber AlgebraicNumber::refined(const Rational& width) const {
    if (is_rational() || hi_ - lo_ <= width)
        return *this;
    auto chain = sturm_sequence(defining_);
    Rational lo = lo_, hi = hi_;
    while (hi - lo > width) {
        Rational mid = (lo + hi) / 2;
        if (defining_(mid) == 0)
            return AlgebraicNumber(defining_, mid, mid, Trusted{});
        if (count_roots(chain, lo, mid) == 1)
            hi = mid;
        else
            lo = mid;
    }
    return AlgebraicNumber(defining_, lo, hi, Trusted{});
}

int AlgebraicNumber::compare(const Rational& q) const {
    if (is_rational())
        return sgn(lo_ - q);
    if (q <= lo_)
        return 1;
    if (q >= hi_)
        return -1;
    if (defining_(q) == 0)
        return 0;
    auto chain = sturm_sequence(defining_);
    return count_roots(chain, lo_, q) == 1 ? -1 : 1;
}

bool operator==(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a.is_rational())
        return b.compare(a.lo_) == 0;
    if (b.is_rational())
        return a.compare(b.lo_) == 0;
    if (a.hi_ <= b.lo_ || b.hi_ <= a.lo_)
        return false;
    UniPoly g = gcd(a.defining_, b.defining_);
    if (g.degree() < 1)
        return false;
    // Both are roots of g iff g has a root in the intersection of the intervals.
    Rational lo = std::max(a.lo_, b.lo_), hi = std::min(a.hi_, b.hi_);
    auto chain = sturm_sequence(g);
    int inside = count_roots(chain, lo, hi) - (g(hi) == 0 ? 1 : 0);
    return inside > 0;
}

bool operator<(const AlgebraicNumber& a, const AlgebraicNumber& b) {
    if (a == b)
        return false;
    AlgebraicNumber x = a, y = b;
    while (true) {
        // a != b, so touching endpoints still separate the two numbers.
        if (x.hi_ <= y.lo_)
            return true;
        if (y.hi_ <= x.lo_)
            return false;
        if (x.is_rational())
            return y.compare(x.lo_) > 0;
        if (y.is_rational())
            return x.compare(y.lo_) < 0;
        x = x.refined(x.width() / 2);
        y = y.refined(y.width() / 2);
    }
}

std::vector<AlgebraicNumber> isolate_roots(const UniPoly& p) {
    if (p.is_zero())
        throw ZeroPolynomial();
    if (p.degree() == 0)
        return {};
    UniPoly q = p.squarefree_part();
    auto chain = sturm_sequence(q);
    // Cauchy bound: every root lies in (-B, B).
    Rational bound(0);
    for (int i = 0; i < q.degree(); ++i)
        bound = std::max(bound, Rational(abs(q.coeff(i) / q.leading())));
    bound += 1;

    std::vector<AlgebraicNumber> roots;
    struct Range { Rational lo, hi; };
    std::vector<Range> work{{-bound, bound}};
    while (!work.empty()) {
        Range r = work.back();
        work.pop_back();
        int n = count_roots(chain, r.lo, r.hi);
        if (n == 0)
            continue;
        if (n == 1) {
            if (q(r.hi) == 0)
                roots.push_back(AlgebraicNumber(q, r.hi, r.hi, AlgebraicNumber::Trusted{}));
            else
                roots.push_back(AlgebraicNumber(q, r.lo, r.hi, AlgebraicNumber::Trusted{}));
            continue;
        }
        Rational mid = (r.lo + r.hi) / 2;
        work.push_back({mid, r.hi});
        work.push_back({r.lo, mid});
    }
    std::sort(roots.begin(), roots.end(),
              [](const AlgebraicNumber& a, const AlgebraicNumber& b) { return a.hi() < b.hi(); });
    return roots;
}

int sign_at(const UniPoly& q, const AlgebraicNumber& a) {
    if (q.is_zero())
        return 0;
    if (a.is_rational())
        return q.sign_at(a.lo());
    UniPoly g = gcd(q, a.defining());
    if (g.degree() >= 1) {
        auto chain = sturm_sequence(g);
        if (count_roots(chain, a.lo(), a.hi()) - (g(a.hi()) == 0 ? 1 : 0) > 0)
            return 0;
    }
    // q has no root at a: shrink until q has no root in the interval.
    auto chain = sturm_sequence(q.squarefree_part());
    AlgebraicNumber x = a;
    while (true) {
        if (x.is_rational())
            return q.sign_at(x.lo());
        if (count_roots(chain, x.lo(), x.hi()) == 0 && q(x.lo()) != 0)
            return q.sign_at(x.hi());
        x = x.refined(x.width() / 2);
    }
}

}  // namespace cadmin
