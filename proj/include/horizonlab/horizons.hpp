#pragma once

// Horizons of the massless (pure dilaton gravity) sector: h = C0^2 [N0 - N(phi)]
// with N' = U at frozen charge. Horizons are the roots of N0 - N.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/expr.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/numerics.hpp"
#include "horizonlab/series.hpp"
#include "horizonlab/symbolic.hpp"

namespace horizonlab {

// N(phi) = int U dphi at frozen charge; symbolic when U is a power-law sum,
// otherwise quadrature from a reference point.
class NFunction {
 public:
  NFunction(Expr U, double ref = 1.0) : U_(std::move(U)), ref_(ref) {
    try {
      symbolic_ = antiderivative(U_, "phi");
    } catch (const UnsupportedForm&) {
      symbolic_.reset();
    }
  }

  const Expr& U() const { return U_; }
  const std::optional<Expr>& symbolic() const { return symbolic_; }
  double error_estimate() const { return last_error_; }

  double U_at(double phi) const { return evaluate(U_, {{"phi", phi}}); }

  double operator()(double phi) const {
    if (symbolic_) return evaluate(*symbolic_, {{"phi", phi}});
    return integral(ref_, phi);
  }

  // int_a^b U dphi by quadrature; accurate when a and b are close.
  double integral(double a, double b) const {
    auto r = quad([&](double x) { return U_at(x); }, a, b);
    last_error_ = r.error;
    return r.value;
  }

  // Same integral with x = a + (b - a) s^2, which smooths a square-root
  // branch point at a. Shallow subdivision: the integrand may be pure
  // roundoff near a degenerate horizon.
  double integral_from_branch(double a, double b) const {
    const double w = b - a;
    auto r = quad([&](double s) { return 2.0 * w * s * U_at(a + w * s * s); }, 0.0, 1.0, 1e-13, 4);
    last_error_ = r.error;
    return r.value;
  }

 private:
  Expr U_;
  std::optional<Expr> symbolic_;
  double ref_;
  mutable double last_error_ = 0.0;
};

inline NFunction antiderivative_N(const ModelSpec& m, double q0, double ref = 1.0) {
  return NFunction(m.frozen_U(q0), ref);
}

enum class Regularity { Regular, Singular };

inline const char* to_string(Regularity r) { return r == Regularity::Regular ? "regular" : "singular"; }

struct HorizonRecord {
  double phi0 = 0.0;
  double N0 = 0.0;
  int multiplicity = 1;
  Regularity regularity = Regularity::Regular;
  double leading_exponent = 1.0;
  double residual = 0.0;       // |N0 - N(phi0)|
  bool inconclusive = false;   // a derivative sat close to the degeneracy tolerance
};

inline nlohmann::json to_json(const HorizonRecord& r) {
  return {{"phi0", r.phi0},
          {"N0", r.N0},
          {"multiplicity", r.multiplicity},
          {"regularity", to_string(r.regularity)},
          {"leading_exponent", r.leading_exponent},
          {"residual", r.residual},
          {"inconclusive", r.inconclusive}};
}

struct HorizonOptions {
  double q0 = 0.0;
  int grid = 4000;
  double degeneracy_tol = 1e-8;  // relative to max(1, |N0|)
  int max_multiplicity = 8;
};

inline double degeneracy_scale(double N0) { return std::max(1.0, std::fabs(N0)); }

// Multiplicity from the derivative test: N^(i)(phi0) = 0 for 1 <= i <= m-1.
inline HorizonRecord classify_multiplicity(const ModelSpec& m, HorizonRecord rec,
                                           const HorizonOptions& opt = {}) {
  const Expr U = m.frozen_U(opt.q0);
  const int order = opt.max_multiplicity;
  Series<double> us;
  try {
    us = evaluate_series<double>(U, {{"phi", Series<double>::identity(rec.phi0, order)}});
  } catch (const DomainError&) {
    rec.regularity = Regularity::Singular;
    rec.multiplicity = 0;
    rec.leading_exponent = std::nan("");
    return rec;
  }
  rec.regularity = Regularity::Regular;
  const double tol = opt.degeneracy_tol * degeneracy_scale(rec.N0);
  int mult = 1;
  double fact = 1.0;  // (i-1)!
  for (int i = 1; i <= order; ++i) {
    if (i > 1) fact *= (i - 1);
    const double d = std::fabs(us[i - 1]) * fact;  // |N^(i)(phi0)|
    if (d > tol && d < 100 * tol) rec.inconclusive = true;
    if (d > tol) break;
    ++mult;
  }
  rec.multiplicity = mult;
  rec.leading_exponent = mult;
  return rec;
}

inline std::vector<HorizonRecord> find_horizons(const ModelSpec& m, double N0, double lo, double hi,
                                                const HorizonOptions& opt = {}) {
  if (!(lo > 0.0) || !(hi > lo)) throw DomainError("phi range must satisfy 0 < lo < hi");
  const NFunction N = antiderivative_N(m, opt.q0, lo);
  const auto grid = log_grid(lo, hi, opt.grid);
  const std::size_t n = grid.size();

  std::vector<double> F(n), Uv(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (N.symbolic()) {
      F[i] = N0 - N(grid[i]);
    } else {
      if (i > 0) acc += N.integral(grid[i - 1], grid[i]);
      F[i] = N0 - N(lo) - acc;
    }
    Uv[i] = N.U_at(grid[i]);
  }
  auto Fat = [&](double x) {
    if (N.symbolic()) return N0 - N(x);
    return N0 - N(x);
  };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (F[i] == 0.0) roots.push_back(grid[i]);
    if ((F[i] < 0.0) != (F[i + 1] < 0.0) && F[i + 1] != 0.0)
      roots.push_back(bracket_root(Fat, grid[i], grid[i + 1], F[i], F[i + 1]));
  }
  if (F[n - 1] == 0.0) roots.push_back(grid[n - 1]);

  // Even-multiplicity roots touch zero without a sign change: look at the
  // critical points of N.
  const double tol = opt.degeneracy_tol * degeneracy_scale(N0);
  std::vector<double> touching;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((Uv[i] < 0.0) == (Uv[i + 1] < 0.0) || Uv[i] == 0.0) continue;
    const double c = bracket_root([&](double x) { return N.U_at(x); }, grid[i], grid[i + 1], Uv[i], Uv[i + 1]);
    if (std::fabs(Fat(c)) <= tol) touching.push_back(c);
  }
  for (double c : touching) {
    std::erase_if(roots, [&](double r) { return std::fabs(r - c) <= 1e-6 * std::max(1.0, c); });
    roots.push_back(c);
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::fabs(a - b) <= 1e-12 * std::max(1.0, a); }),
              roots.end());

  std::vector<HorizonRecord> out;
  for (double r : roots) {
    HorizonRecord rec;
    rec.phi0 = r;
    rec.N0 = N0;
    rec.residual = std::fabs(Fat(r));
    rec = classify_multiplicity(m, rec, opt);
    if (rec.residual > 1e-12 * degeneracy_scale(N0) && rec.multiplicity < 2) rec.inconclusive = true;
    out.push_back(rec);
  }
  return out;
}

struct MetricPoint {
  double h = 0.0;
  double tau_integrand = 0.0;  // d tau / d phi
};

inline MetricPoint metric_from_N(const ModelSpec& m, double q0, double N0, double phi, double C0 = 1.0) {
  const NFunction N = antiderivative_N(m, q0);
  const double F = N0 - N(phi);
  if (F == 0.0) throw DomainError("metric_from_N: phi is a horizon (pole of the tau integrand)");
  return {C0 * C0 * F, 1.0 / (C0 * F)};
}

// ---------------------------------------------------------------------------
// Exponent of |h| ~ |phi - phi0|^p

struct ExponentFit {
  double exponent = 0.0;
  double error = 0.0;
  double t_lo = 0.0, t_hi = 0.0;
  int side = 1;
  bool analytic = true;  // U expandable as a series at phi0
};

inline ExponentFit fit_exponent(const std::function<double(double)>& h_of_t, double t_lo, double t_hi,
                                int points = 41) {
  for (int shrink = 0; shrink < 4; ++shrink) {
    const auto ts = log_grid(t_lo, t_hi, points);
    std::vector<double> x, y;
    bool crossing = false;
    double sign = 0.0;
    for (double t : ts) {
      const double h = h_of_t(t);
      if (h == 0.0 || !std::isfinite(h)) {
        crossing = true;
        break;
      }
      if (sign != 0.0 && (h > 0.0) != (sign > 0.0)) {
        crossing = true;
        break;
      }
      sign = h;
      x.push_back(std::log(t));
      y.push_back(std::log(std::fabs(h)));
    }
    if (!crossing) {
      const auto f = fit_line(x, y);
      return {f.slope, f.slope_error, t_lo, t_hi, 1, true};
    }
    t_hi /= 10.0;  // zero crossing inside the window: shrink toward the horizon
    if (t_hi <= t_lo * 10.0) break;
  }
  throw DomainError("exponent fit failed: h changes sign in every fit window");
}

// Probe h = N(phi0) - N(phi) on one side of phi0 over two decades.
inline ExponentFit singular_horizon_probe(const ModelSpec& m, double phi0, double q0 = 0.0, int side = 0,
                                          double t_lo = 1e-7, double t_hi = 1e-5) {
  const Expr U = m.frozen_U(q0);
  const NFunction N(U);
  bool analytic = true;
  try {
    evaluate_series<double>(U, {{"phi", Series<double>::identity(phi0, 2)}});
  } catch (const DomainError&) {
    analytic = false;
  }
  const double scale = std::max(1.0, std::fabs(phi0));
  std::vector<int> sides = side == 0 ? std::vector<int>{1, -1} : std::vector<int>{side};
  std::string last_error;
  for (int s : sides) {
    try {
      auto h = [&](double t) { return -N.integral_from_branch(phi0, phi0 + s * t * scale); };
      auto fit = fit_exponent(h, t_lo, t_hi);
      fit.side = s;
      fit.analytic = analytic;
      return fit;
    } catch (const DomainError& e) {
      last_error = e.what();
    }
  }
  throw DomainError("singular_horizon_probe failed on both sides: " + last_error);
}

// ---------------------------------------------------------------------------
// Degenerate loci

struct CriticalPoint {
  double phi0 = 0.0;
  double N0 = 0.0;  // the N0 at which phi0 is a double root
};

inline std::vector<CriticalPoint> double_degenerate_points(const ModelSpec& m, double q0, double lo,
                                                           double hi, int grid = 4000) {
  const NFunction N = antiderivative_N(m, q0);
  const auto g = log_grid(lo, hi, grid);
  std::vector<CriticalPoint> out;
  double prev = N.U_at(g[0]);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double cur = N.U_at(g[i]);
    if ((prev < 0.0) != (cur < 0.0)) {
      const double c = bracket_root([&](double x) { return N.U_at(x); }, g[i - 1], g[i], prev, cur);
      out.push_back({c, N(c)});
    }
    prev = cur;
  }
  return out;
}

struct TriplePoint {
  double phi0 = 0.0;
  double Lambda = 0.0;
  double U = 0.0, dU = 0.0;      // residuals at the solution
  double relation_lhs = 0.0;     // q0^2 (2 Lambda)^(D-3)
  double relation_rhs = 0.0;     // (D-3)^(2D-5)
  int iterations = 0;
};

// Solve U(phi0) = U'(phi0) = 0 for (phi0, Lambda) in the S-RN-Lambda family:
// a bracketed start on the curve U = 0, then damped Newton in (ln phi0,
// Lambda) with a finite-difference Jacobian (the model is rebuilt at each
// Lambda).
inline TriplePoint triple_degenerate(int D, int k, double q0, double phi_guess = 0.0) {
  if (q0 == 0.0) throw DomainError("triple degeneracy needs q0 != 0");
  auto residual = [&](double phi, double Lambda) {
    const auto model = build_srn(D, Lambda, k);
    const Expr U = model.frozen_U(q0);
    const Bindings b{{"phi", phi}};
    return std::pair<double, double>{evaluate(U, b), evaluate(derivative(U, "phi"), b)};
  };
  // Lambda that makes U(phi) vanish (U is affine in Lambda).
  auto lambda_on_U0 = [&](double phi) {
    const double u0 = residual(phi, 0.0).first, u1 = residual(phi, 1.0).first;
    return -u0 / (u1 - u0);
  };
  if (!(phi_guess > 0.0)) {
    // Start from a root of U'(phi, Lambda(phi)) on the curve U = 0.
    auto G = [&](double phi) { return residual(phi, lambda_on_U0(phi)).second; };
    const auto grid = log_grid(1e-4 * q0 * q0, 1e4 * q0 * q0, 801);
    double prev = G(grid[0]);
    for (std::size_t i = 1; i < grid.size() && !(phi_guess > 0.0); ++i) {
      const double cur = G(grid[i]);
      if ((prev < 0.0) != (cur < 0.0)) phi_guess = bracket_root(G, grid[i - 1], grid[i], prev, cur);
      prev = cur;
    }
    if (!(phi_guess > 0.0)) throw DomainError("no triple-degenerate point in phi in [1e-4, 1e4] q0^2");
  }
  double x = std::log(phi_guess);
  double L = lambda_on_U0(phi_guess);
  TriplePoint tp;
  for (int it = 0; it < 100; ++it) {
    auto [r1, r2] = residual(std::exp(x), L);
    const double norm = std::hypot(r1, r2);
    tp.iterations = it;
    if (norm < 1e-15) break;
    const double hx = 1e-7, hL = 1e-7 * std::max(1.0, std::fabs(L));
    auto [a1, a2] = residual(std::exp(x + hx), L);
    auto [b1, b2] = residual(std::exp(x - hx), L);
    auto [c1, c2] = residual(std::exp(x), L + hL);
    auto [d1, d2] = residual(std::exp(x), L - hL);
    const double J11 = (a1 - b1) / (2 * hx), J21 = (a2 - b2) / (2 * hx);
    const double J12 = (c1 - d1) / (2 * hL), J22 = (c2 - d2) / (2 * hL);
    const double det = J11 * J22 - J12 * J21;
    if (det == 0.0 || !std::isfinite(det)) throw DomainError("triple-degeneracy Newton: singular Jacobian");
    const double dx = -(J22 * r1 - J12 * r2) / det;
    const double dL = -(-J21 * r1 + J11 * r2) / det;
    double step = 1.0;
    for (int damp = 0; damp < 30; ++damp, step *= 0.5) {
      auto [n1, n2] = residual(std::exp(x + step * dx), L + step * dL);
      if (std::hypot(n1, n2) < norm) break;
    }
    x += step * dx;
    L += step * dL;
    if (std::fabs(step * dx) < 1e-16 && std::fabs(step * dL) < 1e-16 * std::max(1.0, std::fabs(L))) break;
  }
  tp.phi0 = std::exp(x);
  tp.Lambda = L;
  std::tie(tp.U, tp.dU) = residual(tp.phi0, tp.Lambda);
  if (std::hypot(tp.U, tp.dU) > 1e-9) throw DomainError("triple-degeneracy solve did not converge");
  tp.relation_lhs = q0 * q0 * std::pow(2.0 * tp.Lambda, D - 3);
  tp.relation_rhs = std::pow(static_cast<double>(D - 3), 2 * D - 5);
  return tp;
}

inline nlohmann::json to_json(const TriplePoint& t) {
  return {{"phi0", t.phi0},         {"Lambda", t.Lambda},           {"U", t.U},
          {"dU", t.dU},             {"relation_lhs", t.relation_lhs}, {"relation_rhs", t.relation_rhs},
          {"iterations", t.iterations}};
}

}  // namespace horizonlab
