#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spde {

// Exact rational arithmetic on 64-bit integers. Admissibility windows are
// open/closed at exact fractions (1/4, 1/2, d/8, ...), so boundary verdicts
// must never depend on floating-point rounding. Config files therefore keep
// fractions exact; doubles only appear once a window has been decided.
class Rational {
 public:
  constexpr Rational() : num_(0), den_(1) {}
  constexpr Rational(std::int64_t n) : num_(n), den_(1) {}
  Rational(std::int64_t n, std::int64_t d) : num_(n), den_(d) { normalize(); }

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }

  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  Rational operator-() const { return Rational(-num_, den_); }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(checked(a.num_, b.den_) + checked(b.num_, a.den_),
                    checked(a.den_, b.den_));
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return a + (-b);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(checked(a.num_, b.num_), checked(a.den_, b.den_));
  }
  friend Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw std::domain_error("Rational: division by zero");
    return Rational(checked(a.num_, b.den_), checked(a.den_, b.num_));
  }

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return static_cast<__int128>(a.num_) * b.den_ <
           static_cast<__int128>(b.num_) * a.den_;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator<=(const Rational& a, const Rational& b) { return !(b < a); }
  friend bool operator>=(const Rational& a, const Rational& b) { return !(a < b); }

  // Accepts "p/q", integers, and plain decimals ("0.3" -> 3/10); every form
  // is kept exact.
  static Rational parse(std::string_view text) {
    if (text.empty()) throw std::invalid_argument("Rational: empty literal");
    std::string s(text);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      std::int64_t p = parse_int(s.substr(0, slash));
      std::int64_t q = parse_int(s.substr(slash + 1));
      return Rational(p, q);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(parse_int(s));
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (frac.empty()) return Rational(parse_int(whole));
    if (frac.size() > 15) throw std::invalid_argument("Rational: too many decimal digits: " + s);
    bool neg = !whole.empty() && whole[0] == '-';
    std::int64_t w = whole.empty() || whole == "-" ? 0 : std::llabs(parse_int(whole));
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    std::int64_t f = parse_int(frac);
    if (f < 0) throw std::invalid_argument("Rational: malformed decimal: " + s);
    std::int64_t n = w * scale + f;
    return Rational(neg ? -n : n, scale);
  }

  std::string str() const {
    if (den_ == 1) return std::to_string(num_);
    return std::to_string(num_) + "/" + std::to_string(den_);
  }

 private:
  void normalize() {
    if (den_ == 0) throw std::domain_error("Rational: zero denominator");
    if (den_ < 0) { num_ = -num_; den_ = -den_; }
    std::int64_t g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) { num_ /= g; den_ /= g; }
  }

  static std::int64_t checked(std::int64_t a, std::int64_t b) {
    __int128 p = static_cast<__int128>(a) * b;
    if (p > INT64_MAX || p < INT64_MIN)
      throw std::overflow_error("Rational: overflow");
    return static_cast<std::int64_t>(p);
  }

  static std::int64_t parse_int(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("Rational: malformed literal");
    std::size_t pos = 0;
    std::int64_t v = std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("Rational: malformed literal: " + s);
    return v;
  }

  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace spde
