#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace ucake {

using BigInt = boost::multiprecision::mpz_int;
using BigRational = boost::multiprecision::mpq_rational;

// Decimal digit strings only (no sign, no whitespace). Throws ParseError.
BigInt parse_natural(std::string_view text);

// Accepts "p/q" or "p" with an optional leading '-' on p; q must be positive.
BigRational parse_rational(std::string_view text);

std::string to_string(const BigInt& value);

// Always "p/q" in lowest terms, including integers ("1/1", "0/1").
std::string to_string(const BigRational& value);

// Number of significant bits; 0 for 0. Requires value >= 0.
std::size_t bit_length(const BigInt& value);

// Smallest e with 2^e >= value. Requires value >= 1.
std::size_t ceil_log2(const BigInt& value);

BigInt pow2(std::size_t exponent);

BigInt gcd(const BigInt& a, const BigInt& b);

struct ExtendedGcd {
  BigInt g;
  BigInt x;
  BigInt y;
};

// g = gcd(a, b) = a*x + b*y, for a, b >= 0 not both zero.
ExtendedGcd extended_gcd(const BigInt& a, const BigInt& b);

using Factorization = std::vector<std::pair<BigInt, unsigned>>;

// Prime factorization with primes ascending. Requires n >= 1.
Factorization factorize(const BigInt& n);

Factorization merge_factorizations(const Factorization& lhs, const Factorization& rhs);

// All positive divisors in ascending order.
std::vector<BigInt> divisors(const Factorization& factors);
std::vector<BigInt> divisors(const BigInt& n);

}  // namespace ucake
