#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

#include "horizonlab/errors.hpp"

namespace horizonlab {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

// Adaptive Gauss-Kronrod; copes with integrable endpoint singularities by
// subdivision.
template <class F>
QuadResult quad(F&& f, double a, double b, double rel_tol = 1e-13, unsigned max_depth = 12) {
  if (a == b) return {};
  // Integrate over s in [0, 1]; boost's error estimate misbehaves on short
  // intervals far from the origin.
  const double w = b - a;
  auto g = [&](double s) { return w * f(a + w * s); };
  QuadResult r;
  r.value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(g, 0.0, 1.0, max_depth, rel_tol,
                                                                          &r.error);
  if (!std::isfinite(r.value)) throw DomainError("quadrature produced a non-finite value");
  return r;
}

// Root of f on [a, b] with f(a), f(b) of opposite sign.
template <class F>
double bracket_root(F&& f, double a, double b, double fa, double fb) {
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  boost::uintmax_t max_iter = 300;
  auto r = boost::math::tools::toms748_solve(f, a, b, fa, fb,
                                             boost::math::tools::eps_tolerance<double>(52), max_iter);
  // the bracket point with the smallest residual
  double best = 0.5 * (r.first + r.second), fbest = std::fabs(f(best));
  for (double x : {r.first, r.second}) {
    const double fx = std::fabs(f(x));
    if (fx < fbest) best = x, fbest = fx;
  }
  // f can vanish on a few neighbouring doubles; report the lowest of them
  if (fbest == 0.0)
    for (int i = 0; i < 64; ++i) {
      const double prev = std::nextafter(best, -INFINITY);
      if (prev < std::min(a, b) || f(prev) != 0.0) break;
      best = prev;
    }
  return best;
}

inline std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw DomainError("log grid needs 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double a = std::log(lo), b = std::log(hi);
  for (int i = 0; i < n; ++i) g[i] = std::exp(a + (b - a) * i / (n - 1));
  g.front() = lo;
  g.back() = hi;
  return g;
}

inline std::vector<double> lin_grid(double lo, double hi, int n) {
  if (n < 1) throw DomainError("grid needs n >= 1");
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = lo + (hi - lo) * i / (n - 1);
  g.back() = hi;
  return g;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_error = 0.0;  // standard error of the slope
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 3 || y.size() != n) throw DomainError("line fit needs at least 3 points");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ss += r * r;
  }
  f.slope_error = std::sqrt(ss / (n - 2) / sxx);
  return f;
}

}  // namespace horizonlab
