#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace spreadlab {

class DecimalError : public Error {
 public:
  using Error::Error;
};

/// Exact base-10 fixed-point number: value = mant * 10^exp with exp <= 0
/// after normalization. The 128-bit mantissa keeps price*size products and
/// sums over whole trade tapes exact, which the cent-exact notional checks
/// rely on. Ratios (bps, probabilities, means) are taken in double via
/// to_double() instead.
class Decimal {
 public:
  using int128 = __int128;

  constexpr Decimal() = default;

  static Decimal from_int(long long v) {
    Decimal d;
    d.mant_ = v;
    d.exp_ = 0;
    d.normalize();
    return d;
  }

  /// Parses [+-]digits[.digits][eE[+-]digits]. Exact; no rounding.
  static Decimal parse(std::string_view text) {
    const char* p = text.data();
    const char* end = p + text.size();
    if (p == end) throw DecimalError("empty decimal literal");

    bool negative = false;
    if (*p == '+' || *p == '-') {
      negative = (*p == '-');
      ++p;
    }

    int128 mant = 0;
    int digits = 0;
    int frac_digits = 0;
    bool seen_point = false;
    for (; p != end; ++p) {
      if (*p == '.') {
        if (seen_point) throw DecimalError("two decimal points in '" + std::string(text) + "'");
        seen_point = true;
        continue;
      }
      if (*p == 'e' || *p == 'E') break;
      if (*p < '0' || *p > '9')
        throw DecimalError("bad character in decimal '" + std::string(text) + "'");
      mant = checked_mul(mant, 10);
      mant = checked_add(mant, *p - '0');
      ++digits;
      if (seen_point) ++frac_digits;
    }
    if (digits == 0) throw DecimalError("no digits in decimal '" + std::string(text) + "'");

    long e10 = 0;
    if (p != end) {  // exponent part
      ++p;
      bool eneg = false;
      if (p != end && (*p == '+' || *p == '-')) {
        eneg = (*p == '-');
        ++p;
      }
      if (p == end) throw DecimalError("empty exponent in '" + std::string(text) + "'");
      for (; p != end; ++p) {
        if (*p < '0' || *p > '9')
          throw DecimalError("bad exponent in '" + std::string(text) + "'");
        e10 = e10 * 10 + (*p - '0');
        if (e10 > 1000) throw DecimalError("exponent out of range in '" + std::string(text) + "'");
      }
      if (eneg) e10 = -e10;
    }

    Decimal d;
    d.mant_ = negative ? -mant : mant;
    d.exp_ = static_cast<int>(e10 - frac_digits);
    d.fold_positive_exp();
    d.normalize();
    return d;
  }

  /// Exact value of the shortest decimal literal that round-trips to v.
  /// Recovers the original text for any input that was itself a shortest
  /// representation (every conventional market-data feed).
  static Decimal from_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    if (res.ec != std::errc())
      throw DecimalError("cannot represent double as decimal");
    return parse(std::string_view(buf, res.ptr - buf));
  }

  bool is_zero() const noexcept { return mant_ == 0; }
  bool is_negative() const noexcept { return mant_ < 0; }

  Decimal operator-() const {
    Decimal d = *this;
    d.mant_ = -d.mant_;
    return d;
  }

  Decimal operator+(const Decimal& o) const {
    int128 a = mant_, b = o.mant_;
    int e = align(a, exp_, b, o.exp_);
    Decimal d;
    d.mant_ = checked_add(a, b);
    d.exp_ = e;
    d.normalize();
    return d;
  }

  Decimal operator-(const Decimal& o) const { return *this + (-o); }

  Decimal operator*(const Decimal& o) const {
    Decimal d;
    d.mant_ = checked_mul(mant_, o.mant_);
    d.exp_ = exp_ + o.exp_;
    d.normalize();
    return d;
  }

  Decimal& operator+=(const Decimal& o) { return *this = *this + o; }
  Decimal& operator-=(const Decimal& o) { return *this = *this - o; }
  Decimal& operator*=(const Decimal& o) { return *this = *this * o; }

  /// Exact division by two (always terminates in base 10).
  Decimal half() const {
    Decimal d;
    d.mant_ = checked_mul(mant_, 5);
    d.exp_ = exp_ - 1;
    d.normalize();
    return d;
  }

  /// Exact shift by a power of ten: value * 10^k.
  Decimal shifted(int k) const {
    Decimal d = *this;
    d.exp_ += k;
    d.fold_positive_exp();
    d.normalize();
    return d;
  }

  /// floor(*this / divisor) as an integer. Exact.
  long long floor_div(const Decimal& divisor) const {
    if (divisor.is_zero()) throw DecimalError("division by zero");
    int128 a = mant_, b = divisor.mant_;
    align(a, exp_, b, divisor.exp_);
    int128 q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    if (q > INT64_MAX || q < INT64_MIN) throw DecimalError("floor_div overflow");
    return static_cast<long long>(q);
  }

  /// round(*this / divisor) to nearest integer, half away from zero. Exact.
  long long round_div(const Decimal& divisor) const {
    if (divisor.is_zero()) throw DecimalError("division by zero");
    int128 a = mant_, b = divisor.mant_;
    align(a, exp_, b, divisor.exp_);
    if (b < 0) {
      a = -a;
      b = -b;
    }
    int128 q = a / b;      // truncated toward zero
    int128 r = a - q * b;  // remainder carries the sign of a
    if (2 * r >= b)
      ++q;  // half rounds away from zero
    else if (2 * r <= -b)
      --q;
    if (q > INT64_MAX || q < INT64_MIN) throw DecimalError("round_div overflow");
    return static_cast<long long>(q);
  }

  int compare(const Decimal& o) const {
    int128 a = mant_, b = o.mant_;
    align(a, exp_, b, o.exp_);
    return a < b ? -1 : (a > b ? 1 : 0);
  }

  bool operator==(const Decimal& o) const { return compare(o) == 0; }
  bool operator!=(const Decimal& o) const { return compare(o) != 0; }
  bool operator<(const Decimal& o) const { return compare(o) < 0; }
  bool operator<=(const Decimal& o) const { return compare(o) <= 0; }
  bool operator>(const Decimal& o) const { return compare(o) > 0; }
  bool operator>=(const Decimal& o) const { return compare(o) >= 0; }

  /// Canonical text: plain notation, no trailing fractional zeros, no '+'.
  std::string str() const {
    int128 m = mant_;
    bool neg = m < 0;
    if (neg) m = -m;
    std::string digits = m == 0 ? "0" : std::string();
    while (m > 0) {
      digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(m % 10)));
      m /= 10;
    }
    std::string out;
    if (exp_ == 0) {
      out = digits;
    } else {
      int frac = -exp_;
      if (static_cast<int>(digits.size()) <= frac)
        digits.insert(0, frac - digits.size() + 1, '0');
      out = digits.substr(0, digits.size() - frac) + "." + digits.substr(digits.size() - frac);
    }
    if (neg && out != "0") out.insert(out.begin(), '-');
    return out;
  }

  double to_double() const {
    std::string s = str();
    double v = 0;
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
  }

 private:
  int128 mant_ = 0;
  int exp_ = 0;

  static int128 checked_add(int128 a, int128 b) {
    int128 r;
    if (__builtin_add_overflow(a, b, &r)) throw DecimalError("decimal overflow (add)");
    return r;
  }

  static int128 checked_mul(int128 a, int128 b) {
    int128 r;
    if (__builtin_mul_overflow(a, b, &r)) throw DecimalError("decimal overflow (mul)");
    return r;
  }

  static int128 pow10(int k) {
    int128 r = 1;
    while (k-- > 0) r = checked_mul(r, 10);
    return r;
  }

  /// Rescales both mantissas to the smaller exponent; returns it.
  static int align(int128& a, int ea, int128& b, int eb) {
    if (ea == eb) return ea;
    if (ea > eb) {
      a = checked_mul(a, pow10(ea - eb));
      return eb;
    }
    b = checked_mul(b, pow10(eb - ea));
    return ea;
  }

  void fold_positive_exp() {
    if (exp_ > 0) {
      mant_ = checked_mul(mant_, pow10(exp_));
      exp_ = 0;
    }
  }

  void normalize() {
    if (mant_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ < 0 && mant_ % 10 == 0) {
      mant_ /= 10;
      ++exp_;
    }
  }
};

inline Decimal operator"" _dec(const char* s) { return Decimal::parse(s); }
inline Decimal operator"" _dec(const char* s, size_t n) {
  return Decimal::parse(std::string_view(s, n));
}

}  // namespace spreadlab
