#pragma once

// tau(phi), the Szekeres-Kruskal chart around a simple horizon and the
// Schwarzschild-form metric functions.

#include <cmath>
#include <functional>
#include <optional>
#include <string>

#include <boost/math/quadrature/gauss.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/near_horizon.hpp"
#include "horizonlab/numerics.hpp"
#include "horizonlab/series.hpp"

namespace horizonlab {

struct HorizonEnd {
  double phi0 = 0.0;
  double chi1 = 0.0;
};

// int_a^b dphi / chi(phi). With `end`, the pole 1/(chi1 (phi - phi0)) is
// subtracted and integrated analytically.
inline double tau_of_phi(const std::function<double(double)>& chi, double a, double b,
                         std::optional<HorizonEnd> end = std::nullopt, int scan = 200) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  double prev = std::nan("");
  for (int i = 1; i < scan; ++i) {
    const double x = lo + (hi - lo) * i / scan;
    const double c = chi(x);
    if (c == 0.0 || (!std::isnan(prev) && (c < 0.0) != (prev < 0.0)))
      throw DomainError("tau_of_phi: chi has a root near phi = " + std::to_string(x) + " inside the interval");
    prev = c;
  }
  if (!end) return quad([&](double x) { return 1.0 / chi(x); }, a, b, 1e-12).value;
  const double p0 = end->phi0, c1 = end->chi1;
  if (c1 == 0.0) throw DomainError("tau_of_phi: chi1 = 0, the horizon is not simple");
  if ((a - p0) * (b - p0) < 0.0) throw DomainError("tau_of_phi: interval straddles the horizon");
  auto regular = [&](double x) {
    const double t = x - p0;
    if (t == 0.0) return 0.0;
    return 1.0 / chi(x) - 1.0 / (c1 * t);
  };
  const double log_part = std::log(std::fabs((b - p0) / (a - p0))) / c1;
  return quad(regular, a, b, 1e-12).value + log_part;
}

// Massless model: chi = C0 (N0 - N(phi)).
inline double tau_of_phi_massless(const ModelSpec& m, double q0, double N0, double a, double b, double C0 = 1.0,
                                  std::optional<double> horizon = std::nullopt) {
  const NFunction N = antiderivative_N(m, q0);
  std::function<double(double)> chi = [&](double x) { return C0 * (N0 - N(x)); };
  std::optional<HorizonEnd> end;
  if (horizon) {
    end = HorizonEnd{*horizon, -C0 * N.U_at(*horizon)};
    // accurate near phi0: N0 - N = -int_{phi0}^x U
    chi = [&, p0 = *horizon](double x) { return -C0 * N.integral(p0, x); };
  }
  return tau_of_phi(chi, a, b, end);
}

inline double tau_of_phi(const NearHorizonState<double>& s, double a, double b) {
  auto chi = [&](double x) { return s.chi.evaluate(x - s.phi0); };
  const bool touches = a == s.phi0 || b == s.phi0;
  const double span = std::max(std::fabs(a - s.phi0), std::fabs(b - s.phi0));
  if (touches || span < 0.5 * radius_estimate(s.chi)) {
    if (s.chi[1] == 0.0) throw DomainError("tau_of_phi: degenerate horizon, no logarithmic split");
    return tau_of_phi(chi, a, b, HorizonEnd{s.phi0, s.chi[1]});
  }
  return tau_of_phi(chi, a, b);
}

// ---------------------------------------------------------------------------
// Szekeres-Kruskal chart: a b = phi~ exp int (chi1/chi - 1/phi~) dphi~ and
// h_sk = h / (chi1^2 a b).

struct SKChart {
  double chi1 = 0.0;
  Series<double> ab_series;  // a b / phi~
  Series<double> h_sk_series;
  double radius = 0.0;
};

template <class T>
SKChart sk_chart(const NearHorizonState<T>& s) {
  const auto chi = to_double(s.chi);
  const auto h = to_double(s.h);
  const double chi1 = chi[1];
  if (chi1 == 0.0) throw DomainError("SK chart undefined for degenerate horizon (chi1 = 0)");
  const auto chi_over = divide_by_x(chi);  // chi / phi~
  const int n = chi_over.order();
  auto ratio = scale(recip(chi_over), chi1);
  ratio[0] = 0.0;  // chi1/(chi/phi~) - 1 has no constant term
  const auto exponent = integrate(divide_by_x(ratio), 0.0);
  SKChart c;
  c.chi1 = chi1;
  c.ab_series = exp_series(exponent.truncated(std::min(exponent.order(), n - 1)));
  const auto h_over = divide_by_x(h);
  const int m = std::min(h_over.order(), c.ab_series.order());
  c.h_sk_series = scale(mul(h_over.truncated(m), recip(c.ab_series.truncated(m))), 1.0 / (chi1 * chi1));
  c.radius = radius_estimate(chi);
  return c;
}

// Massless closed form with C0 = 1 around a simple horizon phi0:
//   h_sk = (N0 - N)/(U0^2 phi~) exp(U0 R),
//   R = int_{phi0}^{phi} [1/(N0 - N) + 1/(U0 (s - phi0))] ds.
// The displayed form carries exp(-U0 int dphi/(N0 - N)); that sign sends
// h_sk to 0 at the horizon instead of -1/U0, so the sign that reproduces the
// series chart is used.
inline double sk_closed_form_massless(const ModelSpec& m, double q0, double phi0, double phi) {
  const NFunction N = antiderivative_N(m, q0);
  const double U0 = N.U_at(phi0);
  if (U0 == 0.0) throw DomainError("SK closed form undefined at a degenerate horizon (U0 = 0)");
  const double t = phi - phi0;
  if (t == 0.0) return -1.0 / U0;
  // N0 - N(phi0 + s) = -int_0^s U and U0 s + N0 - N = -int_0^s (U - U0),
  // both by a fixed Gauss rule so the outer integrand is smooth
  auto fixed = [&](auto&& f, double s) {
    const int pieces = 1 + static_cast<int>(4 * std::fabs(s) / std::max(std::fabs(phi0), 1e-3));
    double acc = 0.0;
    for (int i = 0; i < pieces; ++i)
      acc += boost::math::quadrature::gauss<double, 30>::integrate(f, s * i / pieces, s * (i + 1) / pieces);
    return acc;
  };
  auto dN = [&](double s) { return -fixed([&](double x) { return N.U_at(phi0 + x); }, s); };
  auto dN_lin = [&](double s) { return -fixed([&](double x) { return N.U_at(phi0 + x) - U0; }, s); };
  auto integrand = [&](double s) {
    if (s == 0.0) return 0.0;
    return dN_lin(s) / (dN(s) * U0 * s);
  };
  const double R = quad(integrand, 0.0, t, 1e-12, 8).value;
  return dN(t) / (U0 * U0 * t) * std::exp(U0 * R);
}

struct Taylor01 {
  double c0 = 0.0, c1 = 0.0;
};

// Coefficients of order 0 and 1 of f about 0 from Richardson-extrapolated
// central differences.
inline Taylor01 taylor01(const std::function<double(double)>& f, double delta = 1e-3) {
  auto even = [&](double d) { return 0.5 * (f(d) + f(-d)); };
  auto odd = [&](double d) { return (f(d) - f(-d)) / (2 * d); };
  return {(4 * even(delta / 2) - even(delta)) / 3, (4 * odd(delta / 2) - odd(delta)) / 3};
}

// ---------------------------------------------------------------------------
// Schwarzschild form: ds^2 = -(D-2) H_s [dr^2/chi_s - chi_s dt^2],
// chi_s = nu chi(r^(D-2)) r^(3-D), H_s = H(r^(D-2)).

struct SchwarzschildPoint {
  double r = 0.0;
  double H_s = 0.0;
  double chi_s = 0.0;
  bool horizon = false;  // chi_s == 0
};

inline SchwarzschildPoint schwarzschild_point(int D, double r, double chi, double H) {
  if (!(r > 0.0)) throw DomainError("schwarzschild_metric needs r > 0");
  SchwarzschildPoint p;
  p.r = r;
  p.H_s = H;
  p.chi_s = chi / (D - 2.0) * std::pow(r, 3.0 - D);
  p.horizon = chi == 0.0;
  return p;
}

// Massless model with chi = C0 (N0 - N) and H = C0.
inline SchwarzschildPoint schwarzschild_metric(const ModelSpec& m, double q0, double N0, double r, double C0 = 1.0) {
  const NFunction N = antiderivative_N(m, q0);
  const double phi = std::pow(r, m.D - 2.0);
  return schwarzschild_point(m.D, r, C0 * (N0 - N(phi)), C0);
}

inline SchwarzschildPoint schwarzschild_metric(int D, const NearHorizonState<double>& s, double r) {
  const double t = std::pow(r, D - 2.0) - s.phi0;
  return schwarzschild_point(D, r, s.chi.evaluate(t), s.H.evaluate(t));
}

// ---------------------------------------------------------------------------
// Light-cone conventions: eps = |h|/h, t = u + eps v, r = u - eps v.

inline int eps_of(double h) {
  if (h == 0.0) throw DomainError("eps undefined at h = 0");
  return h > 0.0 ? 1 : -1;
}

struct TR {
  double t = 0.0, r = 0.0;
};
struct UV {
  double u = 0.0, v = 0.0;
};

inline TR to_tr(const UV& p, int eps) { return {p.u + eps * p.v, p.u - eps * p.v}; }
inline UV to_uv(const TR& p, int eps) { return {0.5 * (p.t + p.r), 0.5 * eps * (p.t - p.r)}; }

}  // namespace horizonlab
