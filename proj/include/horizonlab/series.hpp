#pragma once

// Truncated power series in x = phi - phi0.
//
// A Series<T> holds c_0..c_N around a base point; every binary operation
// requires equal base points and truncates to the smaller order. All
// recurrences are the standard O(N^2) ones (Cauchy product, J.C.P. Miller
// power recurrence), valid over any field T, so the same code runs in double
// and in exact rational arithmetic.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "horizonlab/errors.hpp"
#include "horizonlab/scalar.hpp"

namespace horizonlab {

inline constexpr int kDefaultOrder = 16;

template <class T = double>
class Series {
 public:
  using value_type = T;
  using ops = ScalarOps<T>;

  Series() : base_(0), c_(1, T(0)) {}
  Series(T base, std::vector<T> coeffs) : base_(std::move(base)), c_(std::move(coeffs)) {
    if (c_.empty()) throw DomainError("series needs at least one coefficient");
  }

  static Series constant(T base, T value, int order) {
    std::vector<T> c(static_cast<std::size_t>(order) + 1, T(0));
    c[0] = std::move(value);
    return Series(std::move(base), std::move(c));
  }

  // value + x: the expansion of the independent variable itself.
  static Series identity(T base, int order) {
    auto s = constant(base, base, order);
    if (order >= 1) s.c_[1] = T(1);
    return s;
  }

  const T& base_point() const { return base_; }
  int order() const { return static_cast<int>(c_.size()) - 1; }
  const std::vector<T>& coeffs() const { return c_; }
  const T& operator[](int n) const { return c_.at(static_cast<std::size_t>(n)); }
  T& operator[](int n) { return c_.at(static_cast<std::size_t>(n)); }

  Series truncated(int n) const {
    if (n > order()) throw DomainError("cannot truncate a series to a higher order");
    return Series(base_, std::vector<T>(c_.begin(), c_.begin() + n + 1));
  }

  // Zero-extend. Only meaningful when the caller knows the new coefficients
  // cannot influence the orders it reads back (triangularity).
  Series padded(int n) const {
    auto c = c_;
    if (n + 1 > static_cast<int>(c.size())) c.resize(static_cast<std::size_t>(n) + 1, T(0));
    return Series(base_, std::move(c));
  }

  // Horner evaluation at x = phi - phi0.
  T evaluate(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
    return acc;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    os << "Series@" << ops::to_double(base_) << "[";
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i];
    os << "]";
    return os.str();
  }

 private:
  T base_;
  std::vector<T> c_;
};

namespace detail {

template <class T>
void require_same_base(const Series<T>& a, const Series<T>& b) {
  if (!(a.base_point() == b.base_point()))
    throw DomainError("series base points differ (" +
                      std::to_string(ScalarOps<T>::to_double(a.base_point())) + " vs " +
                      std::to_string(ScalarOps<T>::to_double(b.base_point())) + ")");
}

template <class T>
Series<T> checked(Series<T> s) {
  for (const auto& c : s.coeffs())
    if (!ScalarOps<T>::is_finite(c)) throw DomainError("non-finite series coefficient");
  return s;
}

}  // namespace detail

template <class T>
Series<T> add(const Series<T>& a, const Series<T>& b) {
  detail::require_same_base(a, b);
  const int n = std::min(a.order(), b.order());
  std::vector<T> c(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) c[i] = a[i] + b[i];
  return detail::checked(Series<T>(a.base_point(), std::move(c)));
}

template <class T>
Series<T> neg(const Series<T>& a) {
  auto c = a.coeffs();
  for (auto& v : c) v = -v;
  return Series<T>(a.base_point(), std::move(c));
}

template <class T>
Series<T> sub(const Series<T>& a, const Series<T>& b) {
  return add(a, neg(b));
}

template <class T>
Series<T> scale(const Series<T>& a, const T& k) {
  auto c = a.coeffs();
  for (auto& v : c) v = v * k;
  return detail::checked(Series<T>(a.base_point(), std::move(c)));
}

template <class T>
Series<T> add_scalar(const Series<T>& a, const T& k) {
  auto c = a.coeffs();
  c[0] = c[0] + k;
  return detail::checked(Series<T>(a.base_point(), std::move(c)));
}

// Cauchy product: (ab)_n = sum_{m<=n} a_{n-m} b_m.
template <class T>
Series<T> mul(const Series<T>& a, const Series<T>& b) {
  detail::require_same_base(a, b);
  const int n = std::min(a.order(), b.order());
  std::vector<T> c(static_cast<std::size_t>(n) + 1, T(0));
  for (int k = 0; k <= n; ++k) {
    T acc(0);
    for (int m = 0; m <= k; ++m) acc += a[k - m] * b[m];
    c[k] = acc;
  }
  return detail::checked(Series<T>(a.base_point(), std::move(c)));
}

template <class T>
Series<T> recip(const Series<T>& a) {
  if (ScalarOps<T>::is_zero(a[0])) throw NotInvertible("series not invertible at base point");
  const int n = a.order();
  std::vector<T> b(static_cast<std::size_t>(n) + 1, T(0));
  b[0] = T(1) / a[0];
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int m = 1; m <= k; ++m) acc += a[m] * b[k - m];
    b[k] = -acc * b[0];
  }
  return detail::checked(Series<T>(a.base_point(), std::move(b)));
}

template <class T>
Series<T> div(const Series<T>& a, const Series<T>& b) {
  return mul(a, recip(b));
}

namespace detail {

template <class T>
Series<T> int_power_by_squaring(Series<T> base, std::int64_t e) {
  auto result = Series<T>::constant(base.base_point(), T(1), base.order());
  while (e > 0) {
    if (e & 1) result = mul(result, base);
    e >>= 1;
    if (e > 0) base = mul(base, base);
  }
  return result;
}

}  // namespace detail

// a^p for rational p on the principal real branch. Nonnegative integer powers
// are allowed at c0 == 0; everything else needs c0 != 0 (and c0 > 0 when p is
// not an integer).
template <class T>
Series<T> pow_rational(const Series<T>& a, Ratio p) {
  using ops = ScalarOps<T>;
  if (p.is_integer() && p.num >= 0) return detail::int_power_by_squaring(a, p.num);
  if (ops::is_zero(a[0])) throw NotInvertible("series not invertible at base point");
  if (!p.is_integer() && ops::is_negative(a[0]))
    throw DomainError("negative radicand at base point (principal real branch only)");

  const int n = a.order();
  std::vector<T> b(static_cast<std::size_t>(n) + 1, T(0));
  b[0] = ops::pow(a[0], p);
  const T pp = T(p.num) / T(p.den);
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int m = 1; m <= k; ++m) acc += ((pp + T(1)) * T(m) - T(k)) * a[m] * b[k - m];
    b[k] = acc / (T(k) * a[0]);
  }
  return detail::checked(Series<T>(a.base_point(), std::move(b)));
}

template <class T>
Series<T> sqrt_series(const Series<T>& a) {
  return pow_rational(a, Ratio(1, 2));
}

template <class T>
Series<T> exp_series(const Series<T>& a) {
  const int n = a.order();
  std::vector<T> b(static_cast<std::size_t>(n) + 1, T(0));
  b[0] = ScalarOps<T>::exp(a[0]);
  for (int k = 1; k <= n; ++k) {
    T acc(0);
    for (int m = 1; m <= k; ++m) acc += T(m) * a[m] * b[k - m];
    b[k] = acc / T(k);
  }
  return detail::checked(Series<T>(a.base_point(), std::move(b)));
}

// d/dx; the result has order N-1 (a constant series stays a zero constant).
template <class T>
Series<T> differentiate(const Series<T>& a) {
  const int n = a.order();
  if (n == 0) return Series<T>::constant(a.base_point(), T(0), 0);
  std::vector<T> c(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) c[k - 1] = T(k) * a[k];
  return Series<T>(a.base_point(), std::move(c));
}

// Antiderivative with value `constant` at x = 0; order N+1.
template <class T>
Series<T> integrate(const Series<T>& a, const T& constant) {
  const int n = a.order();
  std::vector<T> c(static_cast<std::size_t>(n) + 2);
  c[0] = constant;
  for (int k = 0; k <= n; ++k) c[k + 1] = a[k] / T(k + 1);
  return Series<T>(a.base_point(), std::move(c));
}

// a / x, requires a_0 == 0; order drops by one.
template <class T>
Series<T> divide_by_x(const Series<T>& a) {
  if (!ScalarOps<T>::is_zero(a[0])) throw DomainError("divide_by_x needs a zero constant term");
  if (a.order() == 0) throw DomainError("divide_by_x on an order-0 series");
  return Series<T>(a.base_point(), std::vector<T>(a.coeffs().begin() + 1, a.coeffs().end()));
}

template <class T>
Series<T> operator+(const Series<T>& a, const Series<T>& b) { return add(a, b); }
template <class T>
Series<T> operator-(const Series<T>& a, const Series<T>& b) { return sub(a, b); }
template <class T>
Series<T> operator-(const Series<T>& a) { return neg(a); }
template <class T>
Series<T> operator*(const Series<T>& a, const Series<T>& b) { return mul(a, b); }
template <class T>
Series<T> operator/(const Series<T>& a, const Series<T>& b) { return div(a, b); }
template <class T>
Series<T> operator*(const Series<T>& a, const T& k) { return scale(a, k); }
template <class T>
Series<T> operator*(const T& k, const Series<T>& a) { return scale(a, k); }

// Root-test radius estimate from the last `window` nonzero coefficients:
// R ~ mean |c_n|^(-1/n). Advisory only; returns +inf if all of them vanish.
template <class T>
double radius_estimate(const Series<T>& a, int window = 8) {
  using ops = ScalarOps<T>;
  double acc = 0.0;
  int used = 0;
  for (int n = a.order(); n >= 1 && used < window; --n) {
    const double c = std::fabs(ops::to_double(a[n]));
    if (c == 0.0 || !std::isfinite(c)) continue;
    acc += std::pow(c, -1.0 / n);
    ++used;
  }
  if (used == 0) return std::numeric_limits<double>::infinity();
  return acc / used;
}

template <class T>
Series<double> to_double(const Series<T>& a) {
  std::vector<double> c;
  c.reserve(a.coeffs().size());
  for (const auto& v : a.coeffs()) c.push_back(ScalarOps<T>::to_double(v));
  return Series<double>(ScalarOps<T>::to_double(a.base_point()), std::move(c));
}

}  // namespace horizonlab
