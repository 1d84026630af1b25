#pragma once

#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tempolearn {

// Exact rational time values. Timestamps are compared for equality all over
// the simulator, so floating point is not an option.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Rational() = default;
  constexpr Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d) : num(n), den(d) { normalize(); }

  void normalize() {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }

  friend Rational operator+(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den + b.num * a.den, a.den * b.den);
  }
  friend Rational operator-(const Rational& a, const Rational& b) {
    return Rational(a.num * b.den - b.num * a.den, a.den * b.den);
  }
  friend Rational operator*(const Rational& a, const Rational& b) {
    return Rational(a.num * b.num, a.den * b.den);
  }
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
  friend bool operator!=(const Rational& a, const Rational& b) { return !(a == b); }
  friend bool operator<(const Rational& a, const Rational& b) {
    return a.num * b.den < b.num * a.den;
  }
  friend bool operator<=(const Rational& a, const Rational& b) {
    return a.num * b.den <= b.num * a.den;
  }
  friend bool operator>(const Rational& a, const Rational& b) { return b < a; }
  friend bool operator>=(const Rational& a, const Rational& b) { return b <= a; }

  bool positive() const { return num > 0; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Prints integers bare and decimal fractions as decimals ("4", "4.9", "0.001").
// Denominators that are not of the form 2^a*5^b fall back to "n/d".
inline std::string to_string(const Rational& r) {
  std::int64_t d = r.den;
  int twos = 0, fives = 0;
  while (d % 2 == 0) {
    d /= 2;
    ++twos;
  }
  while (d % 5 == 0) {
    d /= 5;
    ++fives;
  }
  if (d != 1) return std::to_string(r.num) + "/" + std::to_string(r.den);
  // Scale to a power of ten.
  std::int64_t scale = 1;
  for (int i = fives; i < twos; ++i) scale *= 5;
  for (int i = twos; i < fives; ++i) scale *= 2;
  std::int64_t digits = r.num * scale;
  std::int64_t pow10 = r.den * scale;
  if (pow10 == 1) return std::to_string(digits);
  const bool neg = digits < 0;
  if (neg) digits = -digits;
  std::string frac = std::to_string(digits % pow10);
  std::string pad(std::to_string(pow10).size() - 1 - frac.size(), '0');
  std::string out = std::to_string(digits / pow10) + "." + pad + frac;
  while (out.back() == '0') out.pop_back();
  if (out.back() == '.') out.pop_back();
  return neg ? "-" + out : out;
}

// Parses "4", "-2", "4.9", "0.001", or "n/d".
inline Rational parse_rational(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty rational");
  const auto slash = text.find('/');
  if (slash != std::string::npos) {
    return Rational(std::stoll(text.substr(0, slash)), std::stoll(text.substr(slash + 1)));
  }
  const auto dot = text.find('.');
  if (dot == std::string::npos) return Rational(std::stoll(text));
  const std::string whole = text.substr(0, dot);
  const std::string frac = text.substr(dot + 1);
  if (frac.empty()) return Rational(std::stoll(whole));
  std::int64_t den = 1;
  for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
  const bool neg = !whole.empty() && whole[0] == '-';
  std::int64_t w = (whole.empty() || whole == "-") ? 0 : std::stoll(whole);
  if (neg) w = -w;
  const std::int64_t n = w * den + std::stoll(frac);
  return Rational(neg ? -n : n, den);
}

}  // namespace tempolearn
