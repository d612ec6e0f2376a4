#pragma once

// Vecton -> scalaron map. For a gauge coupling X(phi, psi; f2) the on-shell
// field strength fbar2 <= 0 solves 2 fbar2 X'(fbar2)^2 + q^2 = 0, and the
// scalaron potential is X_eff = X - 2 fbar2 X' = X + q^2/X' = X + s q sqrt(-2 fbar2).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/expr.hpp"
#include "horizonlab/model.hpp"

namespace horizonlab {

struct GaugeCoupling {
  Expr X;
  Expr dX;   // dX/df2
  Expr d2X;  // d2X/df2^2

  static GaugeCoupling from(const Expr& X) {
    GaugeCoupling gc{X, derivative(X, "f2"), cst(0.0)};
    gc.d2X = derivative(gc.dX, "f2");
    return gc;
  }

  Bindings at(double phi, double psi, double f2) const {
    return {{"phi", phi}, {"psi", psi}, {"f2", f2}};
  }
  double value(double phi, double psi, double f2) const { return evaluate(X, at(phi, psi, f2)); }
  double slope(double phi, double psi, double f2) const { return evaluate(dX, at(phi, psi, f2)); }
  double curvature(double phi, double psi, double f2) const {
    return evaluate(d2X, at(phi, psi, f2));
  }
};

inline GaugeCoupling gauge_coupling(const ModelSpec& m) {
  if (!m.gauge_X) throw DomainError("model '" + m.name + "' carries no gauge coupling X");
  return GaugeCoupling::from(*m.gauge_X);
}

enum class BranchPolicy { Homotopy, Strict };

struct FbarSolution {
  double fbar2 = 0.0;
  std::vector<double> roots;  // every root found in the scanned bracket
  double residual = 0.0;      // |2 F X'^2 + q^2|
};

namespace detail {

// g(F) = 2 F X'(F)^2 + q^2; nullopt outside the domain of X.
inline std::optional<double> fbar_equation(const GaugeCoupling& gc, double phi, double psi, double q,
                                           double F) {
  try {
    const double xp = gc.slope(phi, psi, F);
    const double g = 2.0 * F * xp * xp + q * q;
    if (!std::isfinite(g)) return std::nullopt;
    return g;
  } catch (const DomainError&) {
    return std::nullopt;
  }
}

inline std::optional<double> newton_polish(const GaugeCoupling& gc, double phi, double psi, double q,
                                           double F, double lo, double hi) {
  for (int it = 0; it < 50; ++it) {
    double xp, xpp;
    try {
      xp = gc.slope(phi, psi, F);
      xpp = gc.curvature(phi, psi, F);
    } catch (const DomainError&) {
      return std::nullopt;
    }
    const double g = 2.0 * F * xp * xp + q * q;
    const double dg = 2.0 * xp * xp + 4.0 * F * xp * xpp;
    if (!std::isfinite(g) || !std::isfinite(dg) || dg == 0.0) return std::nullopt;
    double next = F - g / dg;
    if (next < lo || next > hi) next = 0.5 * (F + (next < lo ? lo : hi));
    if (std::fabs(next - F) <= 4 * std::numeric_limits<double>::epsilon() * std::fabs(F)) return next;
    F = next;
  }
  return F;
}

// All sign changes of g on [-B, 0), growing B geometrically until a root is
// seen or the domain of X ends.
inline std::vector<double> scan_fbar_roots(const GaugeCoupling& gc, double phi, double psi, double q) {
  if (q == 0.0) return {0.0};
  double x0 = 0.0;
  try {
    x0 = gc.slope(phi, psi, 0.0);
  } catch (const DomainError&) {
  }
  double B = (x0 != 0.0 && std::isfinite(x0)) ? 4.0 * q * q / (2.0 * x0 * x0) : 1.0;
  const int n = 256;
  std::vector<double> roots;
  for (int grow = 0; grow < 14 && roots.empty(); ++grow, B *= 8.0) {
    double F_prev = 0.0;
    double g_prev = q * q;
    bool domain_ended = false;
    for (int i = 1; i <= n && !domain_ended; ++i) {
      double F = -B * static_cast<double>(i) / n;
      auto g = fbar_equation(gc, phi, psi, q, F);
      if (!g) {
        // Locate the domain edge and test the last admissible value.
        double ok = F_prev, bad = F;
        for (int b = 0; b < 200 && std::fabs(bad - ok) > 1e-15 * std::fabs(ok) + 1e-300; ++b) {
          const double mid = 0.5 * (ok + bad);
          if (fbar_equation(gc, phi, psi, q, mid))
            ok = mid;
          else
            bad = mid;
        }
        domain_ended = true;
        if (ok == F_prev) break;
        F = ok;
        g = fbar_equation(gc, phi, psi, q, F);
        if (!g) break;
      }
      if ((*g < 0.0) != (g_prev < 0.0) || *g == 0.0) {
        double r = F;
        if (*g != 0.0) {
          boost::uintmax_t max_iter = 200;
          auto f = [&](double x) {
            auto v = fbar_equation(gc, phi, psi, q, x);
            return v ? *v : (g_prev < 0.0 ? 1.0 : -1.0) * std::numeric_limits<double>::max();
          };
          auto br = boost::math::tools::toms748_solve(f, F, F_prev, *g, g_prev,
                                                      boost::math::tools::eps_tolerance<double>(52),
                                                      max_iter);
          r = 0.5 * (br.first + br.second);
          if (auto p = newton_polish(gc, phi, psi, q, r, F, F_prev)) r = *p;
        }
        if (roots.empty() || std::fabs(roots.back() - r) > 1e-12 * std::fabs(r)) roots.push_back(r);
      }
      F_prev = F;
      g_prev = *g;
    }
    if (domain_ended) break;
  }
  return roots;
}

inline std::string list_roots(const std::vector<double>& roots) {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < roots.size(); ++i) os << (i ? ", " : "") << roots[i];
  return os.str();
}

}  // namespace detail

inline FbarSolution solve_fbar(const GaugeCoupling& gc, double phi, double psi, double q,
                               BranchPolicy policy = BranchPolicy::Homotopy) {
  FbarSolution sol;
  sol.roots = detail::scan_fbar_roots(gc, phi, psi, q);
  if (sol.roots.empty()) throw DomainError("no real branch for fbar2 at q = " + std::to_string(q));
  if (sol.roots.size() == 1) {
    sol.fbar2 = sol.roots.front();
  } else if (policy == BranchPolicy::Strict) {
    throw DomainError("ambiguous branch: fbar2 roots " + detail::list_roots(sol.roots));
  } else {
    // Continue the q = 0 root F = 0 along q and keep the root it lands on.
    double F = 0.0;
    const int steps = 64;
    for (int s = 1; s <= steps; ++s) {
      const double qs = q * s / steps;
      auto local = detail::scan_fbar_roots(gc, phi, psi, qs);
      if (local.empty()) throw DomainError("homotopy in q lost the fbar2 branch");
      F = *std::min_element(local.begin(), local.end(), [&](double a, double b) {
        return std::fabs(a - F) < std::fabs(b - F);
      });
    }
    sol.fbar2 = *std::min_element(sol.roots.begin(), sol.roots.end(), [&](double a, double b) {
      return std::fabs(a - F) < std::fabs(b - F);
    });
  }
  const double xp = gc.slope(phi, psi, sol.fbar2);
  sol.residual = std::fabs(2.0 * sol.fbar2 * xp * xp + q * q);
  return sol;
}

struct XeffResult {
  double value = 0.0;
  double fbar2 = 0.0;
  double form_legendre = 0.0;  // X - 2 F X'
  double form_charge = 0.0;    // X + q^2 / X'
  double form_root = 0.0;      // X + s q sqrt(-2F)
  int root_sign = 1;           // s
};

inline XeffResult x_eff(const GaugeCoupling& gc, double phi, double psi, double q,
                        BranchPolicy policy = BranchPolicy::Homotopy) {
  XeffResult r;
  r.fbar2 = solve_fbar(gc, phi, psi, q, policy).fbar2;
  const double X = gc.value(phi, psi, r.fbar2);
  const double xp = gc.slope(phi, psi, r.fbar2);
  r.form_legendre = X - 2.0 * r.fbar2 * xp;
  r.form_charge = q == 0.0 ? X : X + q * q / xp;
  const double root = q * std::sqrt(std::max(0.0, -2.0 * r.fbar2));
  const double plus = X + root, minus = X - root;
  r.root_sign = std::fabs(plus - r.form_legendre) <= std::fabs(minus - r.form_legendre) ? 1 : -1;
  r.form_root = r.root_sign > 0 ? plus : minus;
  const double scale = std::max({std::fabs(X), std::fabs(2.0 * r.fbar2 * xp), std::fabs(r.form_legendre)});
  const double tol = 1e-10 * std::max(scale, 1e-300);
  if (std::fabs(r.form_legendre - r.form_charge) > tol || std::fabs(r.form_root - r.form_legendre) > tol)
    throw DomainError("branch/sign inconsistency between X_eff forms at phi = " + std::to_string(phi) +
                      ", q = " + std::to_string(q));
  r.value = r.form_legendre;
  return r;
}

// Closed forms of the dual scalaron potential for the spherical couplings.
inline double closed_form_xeff(int D, double Lambda, double lambda2, double phi, double q) {
  if (D == 3) return -2.0 * Lambda * phi - q * q / (lambda2 * Lambda * phi);
  if (D == 4)
    return -2.0 * Lambda * std::sqrt(phi) *
           std::sqrt(1.0 + q * q / (lambda2 * Lambda * Lambda * phi * phi));
  throw DomainError("no closed form for X_eff in D = " + std::to_string(D));
}

struct IdentityReport {
  double dphi_total = 0.0, dphi_partial = 0.0;
  double dpsi_total = 0.0, dpsi_partial = 0.0;
  double residual_phi = 0.0, residual_psi = 0.0;
  double error_estimate = 0.0;  // Richardson estimate of the stencil error
  bool ok = false;
};

// dX_eff/dphi and dX_eff/dpsi by central differences against the partial
// derivatives of X at fixed fbar2.
inline IdentityReport verify_identities(const GaugeCoupling& gc, double phi, double psi, double q,
                                        double h_step, BranchPolicy policy = BranchPolicy::Homotopy) {
  const std::size_t n_roots = detail::scan_fbar_roots(gc, phi, psi, q).size();
  auto xe = [&](double ph, double ps) {
    try {
      if (detail::scan_fbar_roots(gc, ph, ps, q).size() != n_roots)
        throw DomainError("branch count changes");
      return x_eff(gc, ph, ps, q, policy).value;
    } catch (const DomainError&) {
      throw DomainError("stencil straddles branch point near phi = " + std::to_string(phi));
    }
  };
  auto central = [&](double h, bool in_phi) {
    if (in_phi) return (xe(phi + h, psi) - xe(phi - h, psi)) / (2 * h);
    return (xe(phi, psi + h) - xe(phi, psi - h)) / (2 * h);
  };
  IdentityReport rep;
  const double F = solve_fbar(gc, phi, psi, q, policy).fbar2;
  const auto b = gc.at(phi, psi, F);
  rep.dphi_partial = evaluate(derivative(gc.X, "phi"), b);
  rep.dpsi_partial = evaluate(derivative(gc.X, "psi"), b);
  const double d1 = central(h_step, true), d2 = central(h_step / 2, true);
  rep.dphi_total = (4 * d2 - d1) / 3;
  rep.error_estimate = std::fabs(d2 - d1);
  if (depends_on(gc.X, "psi")) {
    const double e1 = central(h_step, false), e2 = central(h_step / 2, false);
    rep.dpsi_total = (4 * e2 - e1) / 3;
    rep.error_estimate = std::max(rep.error_estimate, std::fabs(e2 - e1));
  }
  rep.residual_phi = std::fabs(rep.dphi_total - rep.dphi_partial);
  rep.residual_psi = std::fabs(rep.dpsi_total - rep.dpsi_partial);
  const double tol = rep.error_estimate + 1e-8 * std::max(1.0, std::fabs(rep.dphi_partial));
  rep.ok = rep.residual_phi <= tol && rep.residual_psi <= tol;
  return rep;
}

struct VectonField {
  double a_u = 0.0;
  double a_v = 0.0;
};

inline VectonField reconstruct_vecton(const ModelSpec& m, double phi, double q_dot) {
  if (m.m2 == 0.0)
    throw DomainError("massless limit: vecton gauge-ambiguous, q is a constant charge");
  if (!(phi > 0.0)) throw DomainError("reconstruct_vecton needs phi > 0");
  return {q_dot / (m.m2 * phi), -q_dot / (m.m2 * phi)};
}

// Scalaron from the light-cone field strength: -2 f2 = (f_uv/h)^2 and
// q = X'(f2) f_uv / h.
inline double scalaron_from_field(const GaugeCoupling& gc, double phi, double psi, double h, double f_uv) {
  if (h == 0.0) throw DomainError("scalaron_from_field: h = 0");
  const double e = f_uv / h;
  return gc.slope(phi, psi, -0.5 * e * e) * e;
}

}  // namespace horizonlab
