#include "ucake/number.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include <boost/multiprecision/miller_rabin.hpp>

#include "ucake/error.hpp"

namespace ucake {

namespace {

bool all_digits(std::string_view text) {
  return !text.empty() &&
         std::all_of(text.begin(), text.end(), [](char c) { return c >= '0' && c <= '9'; });
}

constexpr unsigned kTrialLimit = 1000;

std::vector<unsigned> small_primes() {
  std::vector<bool> composite(kTrialLimit + 1, false);
  std::vector<unsigned> primes;
  for (unsigned p = 2; p <= kTrialLimit; ++p) {
    if (composite[p]) continue;
    primes.push_back(p);
    for (unsigned q = p * p; q <= kTrialLimit; q += p) composite[q] = true;
  }
  return primes;
}

BigInt abs_diff(const BigInt& x, const BigInt& y) { return x > y ? BigInt(x - y) : BigInt(y - x); }

// Brent's variant of Pollard rho. Returns a nontrivial factor or n on failure.
BigInt pollard_brent(const BigInt& n, std::uint64_t seed) {
  const BigInt c = BigInt(seed % 1000003 + 1) % n;
  BigInt y = BigInt(seed * 6364136223846793005ULL + 1442695040888963407ULL) % n;
  const auto step = [&](const BigInt& v) { return BigInt((v * v + c) % n); };
  BigInt g = 1, q = 1, x, ys;
  std::uint64_t r = 1;
  constexpr std::uint64_t kBlock = 128;
  while (g == 1) {
    x = y;
    for (std::uint64_t i = 0; i < r; ++i) y = step(y);
    std::uint64_t k = 0;
    while (k < r && g == 1) {
      ys = y;
      for (std::uint64_t i = 0; i < std::min(kBlock, r - k); ++i) {
        y = step(y);
        q = (q * abs_diff(x, y)) % n;
      }
      g = gcd(q, n);
      k += kBlock;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      ys = step(ys);
      g = gcd(abs_diff(x, ys), n);
    } while (g == 1);
  }
  return g;
}

void split_into(const BigInt& n, std::map<BigInt, unsigned>& out) {
  if (n == 1) return;
  if (boost::multiprecision::miller_rabin_test(n, 25)) {
    ++out[n];
    return;
  }
  for (std::uint64_t seed = 1;; ++seed) {
    BigInt d = pollard_brent(n, seed);
    if (d != n && d != 1) {
      split_into(d, out);
      split_into(BigInt(n / d), out);
      return;
    }
  }
}

}  // namespace

namespace {

// Digits only; leading zeros are dropped so the text is never read as octal.
BigInt decimal(std::string_view digits) {
  const auto first = digits.find_first_not_of('0');
  return first == std::string_view::npos ? BigInt(0) : BigInt(std::string(digits.substr(first)));
}

}  // namespace

BigInt parse_natural(std::string_view text) {
  if (!all_digits(text)) throw ParseError("expected a decimal natural number, got '" + std::string(text) + "'");
  return decimal(text);
}

BigRational parse_rational(std::string_view text) {
  bool negative = false;
  std::string_view body = text;
  if (!body.empty() && body.front() == '-') {
    negative = true;
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view("1") : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) throw ParseError("expected a rational 'p/q', got '" + std::string(text) + "'");
  BigInt p = decimal(num);
  BigInt q = decimal(den);
  if (q == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  if (negative) p = -p;
  return BigRational(p, q);
}

std::string to_string(const BigInt& value) { return value.str(); }

std::string to_string(const BigRational& value) {
  return to_string(BigInt(numerator(value))) + "/" + to_string(BigInt(denominator(value)));
}

std::size_t bit_length(const BigInt& value) {
  if (value == 0) return 0;
  return static_cast<std::size_t>(boost::multiprecision::msb(value)) + 1;
}

std::size_t ceil_log2(const BigInt& value) { return bit_length(BigInt(value - 1)); }

BigInt pow2(std::size_t exponent) {
  BigInt one = 1;
  return BigInt(one << exponent);
}

BigInt gcd(const BigInt& a, const BigInt& b) { return boost::multiprecision::gcd(a, b); }

ExtendedGcd extended_gcd(const BigInt& a, const BigInt& b) {
  BigInt old_r = a, r = b;
  BigInt old_s = 1, s = 0;
  BigInt old_t = 0, t = 1;
  while (r != 0) {
    BigInt quotient = old_r / r;
    BigInt tmp = old_r - quotient * r;
    old_r = r;
    r = tmp;
    tmp = old_s - quotient * s;
    old_s = s;
    s = tmp;
    tmp = old_t - quotient * t;
    old_t = t;
    t = tmp;
  }
  return {old_r, old_s, old_t};
}

Factorization factorize(const BigInt& n) {
  if (n < 1) throw std::invalid_argument("factorize requires n >= 1");
  static const std::vector<unsigned> primes = small_primes();
  std::map<BigInt, unsigned> found;
  BigInt rest = n;
  for (unsigned p : primes) {
    if (BigInt(p) * p > rest) break;
    while (rest % p == 0) {
      ++found[BigInt(p)];
      rest /= p;
    }
  }
  if (rest != 1) {
    if (rest < BigInt(kTrialLimit) * kTrialLimit) {
      ++found[rest];
    } else {
      split_into(rest, found);
    }
  }
  return {found.begin(), found.end()};
}

Factorization merge_factorizations(const Factorization& lhs, const Factorization& rhs) {
  std::map<BigInt, unsigned> merged(lhs.begin(), lhs.end());
  for (const auto& [p, e] : rhs) merged[p] += e;
  return {merged.begin(), merged.end()};
}

std::vector<BigInt> divisors(const Factorization& factors) {
  std::vector<BigInt> out{BigInt(1)};
  for (const auto& [p, e] : factors) {
    const std::size_t existing = out.size();
    BigInt power = 1;
    for (unsigned i = 0; i < e; ++i) {
      power *= p;
      for (std::size_t j = 0; j < existing; ++j) out.push_back(out[j] * power);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<BigInt> divisors(const BigInt& n) { return divisors(factorize(n)); }

}  // namespace ucake
