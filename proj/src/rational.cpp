#include "cadmin/rational.hpp"

#include <stdexcept>

namespace cadmin {

Rational parse_rational(std::string_view text) {
    std::string s(text);
    if (s.empty())
        throw std::invalid_argument("empty rational literal");
    auto slash = s.find('/');
    auto check_digits = [&](const std::string& part, bool allow_sign) {
        std::size_t i = 0;
        if (allow_sign && !part.empty() && (part[0] == '-' || part[0] == '+'))
            i = 1;
        if (i >= part.size())
            throw std::invalid_argument("malformed rational literal '" + s + "'");
        for (; i < part.size(); ++i)
            if (part[i] < '0' || part[i] > '9')
                throw std::invalid_argument("malformed rational literal '" + s + "'");
    };
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    check_digits(num, true);
    check_digits(den, false);
    if (num[0] == '+')
        num.erase(0, 1);
    Integer n(num), d(den);
    if (d == 0)
        throw std::invalid_argument("zero denominator in '" + s + "'");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }
std::string to_string(const Integer& z) { return z.get_str(); }

Integer floor(const Rational& q) {
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Integer ceil(const Rational& q) {
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

Rational pow2_neg(unsigned bits) {
    Integer den;
    mpz_ui_pow_ui(den.get_mpz_t(), 2, bits);
    return Rational(Integer(1), den);
}

unsigned bits_for(const Rational& width) {
    if (width <= 0)
        throw std::invalid_argument("width must be positive");
    unsigned bits = 0;
    while (pow2_neg(bits) > width)
        ++bits;
    return bits;
}

Rational round_down(const Rational& q, unsigned bits) {
    if (q.get_den() == 1)
        return q;
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
    Rational r(floor(q * scale), scale);
    r.canonicalize();
    return r;
}

Rational round_up(const Rational& q, unsigned bits) {
    if (q.get_den() == 1)
        return q;
    Integer scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 2, bits);
    Rational r(ceil(q * scale), scale);
    r.canonicalize();
    return r;
}

Rational simplest_between(const Rational& lo, const Rational& hi) {
    if (!(lo < hi))
        throw std::invalid_argument("simplest_between: empty interval");
    if (hi <= 0)
        return -simplest_between(-hi, -lo);
    if (lo < 0)
        return Rational(0);
    Integer fl = floor(lo);
    Rational next(fl + 1);
    if (next < hi)
        return next;
    // No integer strictly inside: continue on the reciprocal of the fractional part.
    Rational frac_lo = lo - Rational(fl);
    Rational frac_hi = hi - Rational(fl);
    Rational y;
    if (frac_lo == 0) {
        y = Rational(floor(Rational(1) / frac_hi) + 1);
    } else {
        y = simplest_between(Rational(1) / frac_hi, Rational(1) / frac_lo);
    }
    Rational r = Rational(fl) + Rational(1) / y;
    r.canonicalize();
    return r;
}

}  // namespace cadmin
