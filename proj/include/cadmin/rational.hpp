#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cadmin {

using Integer = mpz_class;
using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" into a canonical rational.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

Integer floor(const Rational& q);
Integer ceil(const Rational& q);

/// 2^-bits as a rational.
Rational pow2_neg(unsigned bits);

/// Number of fractional bits needed so that 2^-bits <= width.
unsigned bits_for(const Rational& width);

/// Outward rounding to the dyadic grid of step 2^-bits.
Rational round_down(const Rational& q, unsigned bits);
Rational round_up(const Rational& q, unsigned bits);

/// The rational with the smallest denominator (then numerator) in the open
/// interval (lo, hi). Requires lo < hi.
Rational simplest_between(const Rational& lo, const Rational& hi);

}  // namespace cadmin
