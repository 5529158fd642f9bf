#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>

#include <gmpxx.h>

namespace matdens {

using BigInt = mpz_class;

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator. Thin value wrapper over GMP's mpq_class.
class ExactFraction {
 public:
  ExactFraction() = default;
  ExactFraction(long value) : q_(value) {}  // NOLINT(google-explicit-constructor)
  explicit ExactFraction(const BigInt& value) : q_(value) {}
  ExactFraction(const BigInt& num, const BigInt& den);
  explicit ExactFraction(const mpq_class& q) : q_(q) { q_.canonicalize(); }

  /// Exact binary value of a finite double.
  static ExactFraction from_double(double value);
  /// Parses "p/q" or "p".
  static ExactFraction parse(const std::string& text);

  BigInt numerator() const { return q_.get_num(); }
  BigInt denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  double to_double() const { return q_.get_d(); }
  std::string to_string() const { return q_.get_str(); }
  /// Fixed-point decimal rendering with `digits` fractional digits (rounded toward zero).
  std::string to_decimal(int digits = 10) const;

  bool is_zero() const { return sgn(q_) == 0; }
  int sign() const { return sgn(q_); }
  ExactFraction abs() const { return ExactFraction(mpq_class(::abs(q_))); }

  ExactFraction& operator+=(const ExactFraction& o) { q_ += o.q_; return *this; }
  ExactFraction& operator-=(const ExactFraction& o) { q_ -= o.q_; return *this; }
  ExactFraction& operator*=(const ExactFraction& o) { q_ *= o.q_; return *this; }
  ExactFraction& operator/=(const ExactFraction& o);

  friend ExactFraction operator+(ExactFraction a, const ExactFraction& b) { return a += b; }
  friend ExactFraction operator-(ExactFraction a, const ExactFraction& b) { return a -= b; }
  friend ExactFraction operator*(ExactFraction a, const ExactFraction& b) { return a *= b; }
  friend ExactFraction operator/(ExactFraction a, const ExactFraction& b) { return a /= b; }
  friend ExactFraction operator-(const ExactFraction& a) { return ExactFraction(mpq_class(-a.q_)); }

  friend bool operator==(const ExactFraction& a, const ExactFraction& b) { return cmp(a.q_, b.q_) == 0; }
  friend std::strong_ordering operator<=>(const ExactFraction& a, const ExactFraction& b) {
    const int c = cmp(a.q_, b.q_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

 private:
  mpq_class q_{0};
};

std::ostream& operator<<(std::ostream& os, const ExactFraction& f);

/// Binomial coefficient C(n, k); zero when k > n.
BigInt binomial(std::uint64_t n, std::uint64_t k);

/// C(n, k) as a 64-bit value; throws std::overflow_error when it does not fit.
std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k);

BigInt factorial(std::uint64_t n);
BigInt power(const BigInt& base, std::uint64_t exponent);

}  // namespace matdens
