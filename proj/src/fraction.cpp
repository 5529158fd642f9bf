#include "matdens/fraction.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace matdens {

ExactFraction::ExactFraction(const BigInt& num, const BigInt& den) {
  if (den == 0) throw std::domain_error("ExactFraction: zero denominator");
  q_ = mpq_class(num, den);
  q_.canonicalize();
}

ExactFraction ExactFraction::from_double(double value) {
  if (!std::isfinite(value)) throw std::domain_error("ExactFraction: non-finite double");
  return ExactFraction(mpq_class(value));
}

ExactFraction ExactFraction::parse(const std::string& text) {
  mpq_class q;
  if (q.set_str(text, 10) != 0) throw std::invalid_argument("ExactFraction: cannot parse '" + text + "'");
  if (q.get_den() == 0) throw std::domain_error("ExactFraction: zero denominator");
  q.canonicalize();
  return ExactFraction(q);
}

ExactFraction& ExactFraction::operator/=(const ExactFraction& o) {
  if (o.is_zero()) throw std::domain_error("ExactFraction: division by zero");
  q_ /= o.q_;
  return *this;
}

std::string ExactFraction::to_decimal(int digits) const {
  BigInt scale = power(BigInt(10), static_cast<std::uint64_t>(digits));
  BigInt num = q_.get_num();
  const bool negative = num < 0;
  if (negative) num = -num;
  BigInt scaled = num * scale / q_.get_den();
  BigInt whole = scaled / scale;
  BigInt frac = scaled % scale;
  std::string frac_str = frac.get_str();
  if (static_cast<int>(frac_str.size()) < digits) frac_str.insert(0, digits - frac_str.size(), '0');
  std::string out = (negative ? "-" : "") + whole.get_str();
  if (digits > 0) out += "." + frac_str;
  return out;
}

std::ostream& operator<<(std::ostream& os, const ExactFraction& f) { return os << f.to_string(); }

BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  BigInt b = binomial(n, k);
  if (!b.fits_ulong_p()) throw std::overflow_error("binomial does not fit in 64 bits");
  return b.get_ui();
}

BigInt factorial(std::uint64_t n) {
  BigInt out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

BigInt power(const BigInt& base, std::uint64_t exponent) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

}  // namespace matdens
