#pragma once

// Coefficient types for series arithmetic: double, and an exact rational mode
// used for bit-exact golden tests.

#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "horizonlab/errors.hpp"

namespace horizonlab {

using Exact = boost::multiprecision::cpp_rational;

/// Small exact rational used for exponents (p/q with q > 0, reduced).
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr Ratio() = default;
  constexpr Ratio(std::int64_t n) : num(n), den(1) {}  // NOLINT: implicit from integer
  Ratio(std::int64_t n, std::int64_t d) : num(n), den(d) {
    if (d == 0) throw DomainError("rational exponent with zero denominator");
    normalize();
  }

  bool is_integer() const { return den == 1; }
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  friend Ratio operator+(Ratio a, Ratio b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
  friend Ratio operator-(Ratio a, Ratio b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
  friend Ratio operator*(Ratio a, Ratio b) { return {a.num * b.num, a.den * b.den}; }
  friend Ratio operator-(Ratio a) { return {-a.num, a.den}; }
  friend bool operator==(const Ratio&, const Ratio&) = default;
  friend bool operator<(Ratio a, Ratio b) { return a.num * b.den < b.num * a.den; }

  std::string str() const {
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
  }
  friend std::ostream& operator<<(std::ostream& os, const Ratio& r) { return os << r.str(); }

 private:
  void normalize() {
    if (den < 0) {
      num = -num;
      den = -den;
    }
    const auto g = std::gcd(num < 0 ? -num : num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
};

template <class T>
struct ScalarOps;

template <>
struct ScalarOps<double> {
  static double from_double(double v) { return v; }
  static double to_double(double v) { return v; }
  static bool is_zero(double v) { return v == 0.0; }
  static bool is_finite(double v) { return std::isfinite(v); }
  static bool is_negative(double v) { return v < 0.0; }
  static double abs(double v) { return std::fabs(v); }
  static double exp(double v) { return std::exp(v); }
  static double pow(double base, Ratio p) {
    if (p.is_integer()) return std::pow(base, static_cast<double>(p.num));
    if (p.den == 2 && p.num == 1) return std::sqrt(base);
    return std::pow(base, p.to_double());
  }
};

namespace detail {

inline boost::multiprecision::cpp_int exact_int_root(const boost::multiprecision::cpp_int& v,
                                                     std::int64_t n, bool& ok) {
  using boost::multiprecision::cpp_int;
  ok = false;
  if (v < 0) return 0;
  if (v == 0 || v == 1) {
    ok = true;
    return v;
  }
  // Bisection on the integer root; exact because cpp_int arithmetic is exact.
  cpp_int lo = 0;
  cpp_int hi = 1;
  while (boost::multiprecision::pow(hi, static_cast<unsigned>(n)) < v) hi *= 2;
  while (hi - lo > 1) {
    cpp_int mid = (lo + hi) / 2;
    if (boost::multiprecision::pow(mid, static_cast<unsigned>(n)) <= v)
      lo = mid;
    else
      hi = mid;
  }
  if (boost::multiprecision::pow(lo, static_cast<unsigned>(n)) == v) {
    ok = true;
    return lo;
  }
  if (boost::multiprecision::pow(hi, static_cast<unsigned>(n)) == v) {
    ok = true;
    return hi;
  }
  return 0;
}

inline Exact exact_int_pow(const Exact& base, std::int64_t e) {
  Exact result = 1;
  Exact b = e < 0 ? Exact(1) / base : base;
  auto n = e < 0 ? -e : e;
  while (n > 0) {
    if (n & 1) result *= b;
    b *= b;
    n >>= 1;
  }
  return result;
}

}  // namespace detail

template <>
struct ScalarOps<Exact> {
  // Doubles are dyadic rationals, so this conversion is exact.
  static Exact from_double(double v) {
    if (!std::isfinite(v)) throw DomainError("non-finite value in exact mode");
    return Exact(v);
  }
  static double to_double(const Exact& v) { return v.convert_to<double>(); }
  static bool is_zero(const Exact& v) { return v == 0; }
  static bool is_finite(const Exact&) { return true; }
  static bool is_negative(const Exact& v) { return v < 0; }
  static Exact abs(const Exact& v) { return v < 0 ? Exact(-v) : v; }
  static Exact exp(const Exact& v) {
    if (v == 0) return 1;
    throw DomainError("exp of a nonzero value is not representable in exact mode");
  }
  static Exact pow(const Exact& base, Ratio p) {
    if (p.is_integer()) {
      if (base == 0 && p.num < 0) throw NotInvertible("0 raised to a negative power");
      return detail::exact_int_pow(base, p.num);
    }
    if (base < 0) throw DomainError("fractional power of a negative value");
    bool ok_n = false;
    bool ok_d = false;
    auto rn = detail::exact_int_root(numerator(base), p.den, ok_n);
    auto rd = detail::exact_int_root(denominator(base), p.den, ok_d);
    if (!ok_n || !ok_d)
      throw DomainError("fractional power is irrational; not representable in exact mode");
    return detail::exact_int_pow(Exact(rn, rd), p.num);
  }
};

}  // namespace horizonlab
