#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>

#include <boost/multiprecision/cpp_int.hpp>

namespace stockflow {

struct RatOverflow : std::overflow_error {
  RatOverflow() : std::overflow_error("rational overflow (int64 range exceeded)") {}
};

// Exact rational on checked int64 components. Always canonical: den > 0,
// gcd(|num|, den) == 1. Intermediates run in __int128; narrowing failures throw
// RatOverflow so callers can fall back to the big-integer scalar.
class Rat64 {
 public:
  constexpr Rat64() = default;
  constexpr Rat64(std::int64_t n) : num_(n) {}
  Rat64(std::int64_t n, std::int64_t d) { *this = make(n, d); }
  template <typename F, typename = std::enable_if_t<std::is_floating_point_v<F>>>
  Rat64(F) = delete;  // no silent truncation; use parse() or make()

  static Rat64 make(__int128 n, __int128 d) {
    if (d == 0) throw std::domain_error("rational with zero denominator");
    if (d < 0) { n = -n; d = -d; }
    __int128 g = gcd128(n < 0 ? -n : n, d);
    if (g > 1) { n /= g; d /= g; }
    Rat64 r;
    r.num_ = narrow(n);
    r.den_ = narrow(d);
    return r;
  }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  bool is_zero() const { return num_ == 0; }
  bool is_integer() const { return den_ == 1; }
  int sign() const { return num_ > 0 ? 1 : num_ < 0 ? -1 : 0; }

  friend Rat64 operator+(const Rat64& a, const Rat64& b) {
    return make((__int128)a.num_ * b.den_ + (__int128)b.num_ * a.den_,
                (__int128)a.den_ * b.den_);
  }
  friend Rat64 operator-(const Rat64& a, const Rat64& b) {
    return make((__int128)a.num_ * b.den_ - (__int128)b.num_ * a.den_,
                (__int128)a.den_ * b.den_);
  }
  friend Rat64 operator*(const Rat64& a, const Rat64& b) {
    return make((__int128)a.num_ * b.num_, (__int128)a.den_ * b.den_);
  }
  friend Rat64 operator/(const Rat64& a, const Rat64& b) {
    if (b.num_ == 0) throw std::domain_error("rational division by zero");
    return make((__int128)a.num_ * b.den_, (__int128)a.den_ * b.num_);
  }
  Rat64 operator-() const {
    Rat64 r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
  }
  Rat64& operator+=(const Rat64& b) { return *this = *this + b; }
  Rat64& operator-=(const Rat64& b) { return *this = *this - b; }
  Rat64& operator*=(const Rat64& b) { return *this = *this * b; }
  Rat64& operator/=(const Rat64& b) { return *this = *this / b; }

  friend bool operator==(const Rat64& a, const Rat64& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rat64& a, const Rat64& b) { return !(a == b); }
  friend bool operator<(const Rat64& a, const Rat64& b) {
    return (__int128)a.num_ * b.den_ < (__int128)b.num_ * a.den_;
  }
  friend bool operator>(const Rat64& a, const Rat64& b) { return b < a; }
  friend bool operator<=(const Rat64& a, const Rat64& b) { return !(b < a); }
  friend bool operator>=(const Rat64& a, const Rat64& b) { return !(a < b); }

  std::int64_t floor() const {
    std::int64_t q = num_ / den_;
    if (num_ < 0 && num_ % den_ != 0) --q;
    return q;
  }
  std::int64_t ceil() const {
    std::int64_t q = num_ / den_;
    if (num_ > 0 && num_ % den_ != 0) ++q;
    return q;
  }
  // Nearest integer, ties away from zero resolved upward.
  std::int64_t round_nearest() const {
    Rat64 twice = make((__int128)num_ * 2, den_);
    std::int64_t f = floor();
    Rat64 frac2 = twice - Rat64(2 * f);  // 2 * fractional part in [0, 2)
    return frac2 >= Rat64(1) ? f + 1 : f;
  }

  double to_double() const { return (double)num_ / (double)den_; }

  // "n" for integers, "n/d" otherwise.
  std::string str() const {
    std::string s = std::to_string(num_);
    if (den_ != 1) s += "/" + std::to_string(den_);
    return s;
  }

  // Parses integers, plain decimals and scientific notation exactly.
  static Rat64 parse(const std::string& text);

  // Shortest exact decimal when the denominator is 2^a 5^b, otherwise an
  // 18-significant-digit approximation (the longest that always reparses
  // into 64-bit components).
  std::string decimal_str() const;

 private:
  static std::int64_t narrow(__int128 v) {
    if (v > std::numeric_limits<std::int64_t>::max() ||
        v < std::numeric_limits<std::int64_t>::min())
      throw RatOverflow();
    return (std::int64_t)v;
  }
  static __int128 gcd128(__int128 a, __int128 b) {
    while (b != 0) {
      __int128 t = a % b;
      a = b;
      b = t;
    }
    return a < 0 ? -a : a;
  }

  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

using BigRat = boost::multiprecision::cpp_rational;

inline BigRat to_big(const Rat64& r) {
  return BigRat(r.num(), r.den());
}

// Throws RatOverflow when the value does not fit int64 components.
inline Rat64 from_big(const BigRat& r) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(r), d = denominator(r);
  if (n > std::numeric_limits<std::int64_t>::max() ||
      n < std::numeric_limits<std::int64_t>::min() ||
      d > std::numeric_limits<std::int64_t>::max())
    throw RatOverflow();
  return Rat64::make((std::int64_t)n, (std::int64_t)d);
}

inline double to_double(const BigRat& r) { return r.convert_to<double>(); }

// Decimal rendering for big rationals with the same policy as
// Rat64::decimal_str: exact when the denominator is 2^a 5^b (within reason),
// otherwise truncated to 18 significant digits.
inline std::string big_decimal_str(const BigRat& r) {
  using boost::multiprecision::cpp_int;
  cpp_int n = numerator(r), d = denominator(r);
  bool neg = n < 0;
  if (neg) n = -n;
  if (d == 1) return (neg ? "-" : "") + n.str();
  cpp_int dd = d;
  int twos = 0, fives = 0;
  while (dd % 2 == 0) { dd /= 2; ++twos; }
  while (dd % 5 == 0) { dd /= 5; ++fives; }
  int digits = twos > fives ? twos : fives;
  if (dd == 1 && digits <= 33) {
    cpp_int scaled = n;
    for (int k = 0; k < digits; ++k) scaled *= 10;
    scaled /= d;
    // Same reparse envelope as Rat64::decimal_str.
    if (scaled <= (cpp_int(1) << 100)) {
      std::string s = scaled.str();
      while ((int)s.size() <= digits) s.insert(s.begin(), '0');
      std::string head = s.substr(0, s.size() - (size_t)digits);
      std::string frac = s.substr(s.size() - (size_t)digits);
      while (!frac.empty() && frac.back() == '0') frac.pop_back();
      std::string out = head;
      if (!frac.empty()) out += "." + frac;
      return (neg ? "-" : "") + out;
    }
  }
  cpp_int ip = n / d;
  std::string head = ip.str();
  cpp_int rem = n % d;
  int sig = ip == 0 ? 0 : (int)head.size();
  std::string frac;
  while (sig < 18 && (int)frac.size() < 18 && rem != 0) {
    rem *= 10;
    cpp_int dig = rem / d;
    rem %= d;
    frac += char('0' + dig.convert_to<int>());
    if (sig > 0 || dig != 0) ++sig;
  }
  std::string out = head;
  if (!frac.empty()) out += "." + frac;
  return (neg ? "-" : "") + out;
}

inline Rat64 Rat64::parse(const std::string& text) {
  const char* p = text.c_str();
  const char* end = p + text.size();
  while (p < end && (*p == ' ' || *p == '\t')) ++p;
  bool neg = false;
  if (p < end && (*p == '+' || *p == '-')) neg = (*p++ == '-');
  __int128 mant = 0;
  int frac_digits = 0;
  bool any = false, in_frac = false;
  for (; p < end; ++p) {
    if (*p >= '0' && *p <= '9') {
      mant = mant * 10 + (*p - '0');
      if (mant > (__int128)1 << 100) throw RatOverflow();
      if (in_frac) ++frac_digits;
      any = true;
    } else if (*p == '.' && !in_frac) {
      in_frac = true;
    } else {
      break;
    }
  }
  if (!any) throw std::invalid_argument("not a number: '" + text + "'");
  long exp10 = 0;
  if (p < end && (*p == 'e' || *p == 'E')) {
    ++p;
    bool eneg = false;
    if (p < end && (*p == '+' || *p == '-')) eneg = (*p++ == '-');
    if (p >= end || *p < '0' || *p > '9')
      throw std::invalid_argument("bad exponent in '" + text + "'");
    long e = 0;
    while (p < end && *p >= '0' && *p <= '9') {
      e = e * 10 + (*p - '0');
      if (e > 50) throw RatOverflow();
      ++p;
    }
    exp10 = eneg ? -e : e;
  }
  while (p < end && (*p == ' ' || *p == '\t')) ++p;
  if (p != end) throw std::invalid_argument("trailing characters in '" + text + "'");
  long net = exp10 - frac_digits;
  __int128 n = neg ? -mant : mant;
  __int128 d = 1;
  for (; net > 0; --net) {
    n *= 10;
    if (n > ((__int128)1 << 110) || n < -((__int128)1 << 110)) throw RatOverflow();
  }
  for (; net < 0; ++net) {
    d *= 10;
    if (d > ((__int128)1 << 110)) throw RatOverflow();
  }
  return make(n, d);
}

inline std::string Rat64::decimal_str() const {
  if (den_ == 1) return std::to_string(num_);
  // Strip factors of 2 and 5; an exact decimal exists iff nothing remains.
  std::int64_t d = den_;
  int twos = 0, fives = 0;
  while (d % 2 == 0) { d /= 2; ++twos; }
  while (d % 5 == 0) { d /= 5; ++fives; }
  int digits = twos > fives ? twos : fives;
  // Caps chosen so parse() round-trips every exact string this emits:
  // frac digits stay within its 10^33 denominator guard and the scaled
  // mantissa within its 2^100 guard.
  if (d == 1 && digits <= 33) {
    __int128 scaled = num_;
    bool safe = true;
    for (int k = 0; k < digits; ++k) {
      if (scaled > ((__int128)1 << 96) || scaled < -((__int128)1 << 96)) { safe = false; break; }
      scaled *= 10;
    }
    if (safe) {
      scaled /= den_;
      bool neg = scaled < 0;
      if (neg) scaled = -scaled;
      std::string rev;
      for (int k = 0; k < digits; ++k) {
        rev += char('0' + (int)(scaled % 10));
        scaled /= 10;
      }
      std::string head = scaled == 0 ? "0" : "";
      while (scaled > 0) {
        head = char('0' + (int)(scaled % 10)) + head;
        scaled /= 10;
      }
      while (!rev.empty() && rev[0] == '0') rev.erase(0, 1);  // trailing zeros
      std::string out = head;
      if (!rev.empty()) out += "." + std::string(rev.rbegin(), rev.rend());
      return (neg ? "-" : "") + out;
    }
  }
  // Non-terminating (or oversized) denominator: 18 significant digits.
  __int128 n = num_ < 0 ? -(__int128)num_ : (__int128)num_;
  __int128 den = den_;
  __int128 ip = n / den;
  std::string head = ip == 0 ? "0" : "";
  while (ip > 0) {
    head = char('0' + (int)(ip % 10)) + head;
    ip /= 10;
  }
  __int128 rem = n % den;
  int sig = head == "0" ? 0 : (int)head.size();
  std::string frac;
  while (sig < 18 && (int)frac.size() < 18 && rem != 0) {
    rem *= 10;
    int dig = (int)(rem / den);
    rem %= den;
    frac += char('0' + dig);
    if (sig > 0 || dig != 0) ++sig;
  }
  std::string out = head;
  if (!frac.empty()) out += "." + frac;
  return (num_ < 0 ? "-" : "") + out;
}

}  // namespace stockflow
