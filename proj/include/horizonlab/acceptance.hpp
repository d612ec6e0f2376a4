#pragma once

// Acceptance checks 1-10, shared by the acceptance binary and `selftest`.
// Each returns one line of verdict plus a detail string.

#include <chrono>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "horizonlab/coordinates.hpp"
#include "horizonlab/duality.hpp"
#include "horizonlab/dynamics.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/integrals.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/near_horizon.hpp"

namespace horizonlab::acceptance {

struct Result {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

// Draws until `admissible` accepts; expansions that throw count as
// inadmissible.
template <class Draw, class Use>
int sample_admissible(int wanted, Draw&& draw, Use&& use, int max_tries = 2000) {
  int got = 0;
  for (int tries = 0; got < wanted && tries < max_tries; ++tries) {
    try {
      if (use(draw())) ++got;
    } catch (const DomainError&) {
    }
  }
  return got;
}

}  // namespace detail

// 1. Recurrence closure for D=3 and D=4 at 25 random points each.
inline Result criterion1() {
  Result r{1, "recurrence closure of the order-16 series", false, "", 0.0};
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> uphi(0.3, 3.0), uq(-1.5, 1.5), uH(0.5, 2.0), coin(0.0, 1.0);
  struct Point {
    double phi0, q0, H0;
  };
  auto draw = [&] { return Point{uphi(rng), uq(rng), (coin(rng) < 0.5 ? -1.0 : 1.0) * uH(rng)}; };
  double worst = 0.0;
  int counts[2] = {0, 0};
  const ModelSpec models[2] = {build_model("d3"), build_model("d4", {{"Lambda", 1.0}, {"m2", 1.0}})};
  for (int k = 0; k < 2; ++k) {
    const auto& m = models[k];
    counts[k] = detail::sample_admissible(25, draw, [&](const Point& p) {
      const double U0 = evaluate(m.U, {{"phi", p.phi0}, {"q", p.q0}, {"psi", 0.0}});
      if (std::fabs(U0) < 1e-3) return false;  // degenerate: not a regular simple horizon
      const auto s = expand<double>(m, p.phi0, p.q0, p.H0, 16);
      worst = std::max(worst, residual(m, s).worst);
      return true;
    });
  }
  // exact rational mode
  bool exact_zero = true;
  const auto m3 = build_model("d3");
  for (auto [a, b, c] : {std::tuple{Exact(1), Exact(1), Exact(1)}, {Exact(3, 2), Exact(1, 2), Exact(2)},
                         {Exact(2), Exact(-1, 3), Exact(-1)}, {Exact(5, 4), Exact(3, 4), Exact(1, 2)}})
    exact_zero = exact_zero && residual(m3, expand<Exact>(m3, a, b, c, 16)).exact_zero;
  r.pass = counts[0] == 25 && counts[1] == 25 && worst <= 1e-10 && exact_zero;
  r.detail = "points D3=" + std::to_string(counts[0]) + " D4=" + std::to_string(counts[1]) +
             ", worst scaled residual " + detail::fmt(worst) + " (limit 1e-10), exact mode " +
             (exact_zero ? "identically zero" : "NONZERO");
  return r;
}

// 2. Worked example: D=3, Lambda=-1, lambda2=1, m2=1, phi0=q0=H0=1.
inline Result criterion2() {
  Result r{2, "worked-example coefficients", false, "", 0.0};
  const auto m = build_d3(-1.0, 1.0, 1.0);
  const auto s = expand<Exact>(m, Exact(1), Exact(1), Exact(1), 2);
  struct Pin {
    const char* name;
    Exact got, want;
  };
  const Pin pins[] = {{"chi1", s.chi[1], Exact(-3)},   {"P0", s.P[0], Exact(1, 3)},
                      {"q1", s.q[1], Exact(-1, 3)},    {"H1", s.H[1], Exact(1, 27)},
                      {"chi2", s.chi[2], Exact(-1, 3)}, {"h2", s.h[2], Exact(-2, 3)}};
  r.pass = true;
  std::string miss;
  for (const auto& p : pins) {
    if (p.got != p.want) {
      r.pass = false;
      miss += std::string(" ") + p.name + "=" + p.got.str() + " (expected " + p.want.str() + ")";
    }
  }
  r.detail = r.pass ? "all six coefficients exact" : "mismatch:" + miss;
  return r;
}

// 3. Massless collapse: h_n against the Taylor coefficients of C0^2 (N0 - N).
inline Result criterion3() {
  Result r{3, "massless collapse onto C0^2 (N0 - N)", false, "", 0.0};
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> uL(-1.0, 1.0), uq(0.0, 1.5), uphi(0.5, 3.0), uC(0.5, 2.0);
  double worst = 0.0;
  int sets = 0;
  struct P {
    double Lambda, q0, phi0, C0;
  };
  auto draw = [&] { return P{uL(rng), uq(rng), uphi(rng), uC(rng)}; };
  sets = detail::sample_admissible(10, draw, [&](const P& p) {
    const auto m = build_srn(4, p.Lambda, 1);
    const NFunction N = antiderivative_N(m, p.q0);
    if (!N.symbolic() || std::fabs(N.U_at(p.phi0)) < 1e-3) return false;
    const int order = 16;
    const auto s = expand<double>(m, p.phi0, p.q0, p.C0, order);
    const auto taylor =
        evaluate_series<double>(*N.symbolic(), {{"phi", Series<double>::identity(p.phi0, order)}});
    for (int n = 1; n <= order; ++n) {
      const double want = -p.C0 * p.C0 * taylor[n];
      worst = std::max(worst, std::fabs(s.h[n] - want) / std::max(1.0, std::fabs(want)));
    }
    worst = std::max(worst, std::fabs(s.h[0]));
    return true;
  });
  r.pass = sets == 10 && worst <= 1e-12;
  r.detail = std::to_string(sets) + " S-RN-Lambda sets, worst coefficient mismatch " + detail::fmt(worst) +
             " (limit 1e-12)";
  return r;
}

// 4. Duality closed forms on 50x50 grids and the on-shell identities.
inline Result criterion4() {
  Result r{4, "duality closed forms and identities", false, "", 0.0};
  std::ostringstream d;
  r.pass = true;
  const auto phis = log_grid(0.05, 20.0, 50);
  const auto qs = lin_grid(-5.0, 5.0, 50);
  for (auto [D, Lambda] : {std::pair{4, 1.0}, std::pair{3, -1.0}}) {
    const double lambda2 = 1.0;
    const auto gc = GaugeCoupling::from(spherical_gauge_coupling(D, Lambda, lambda2));
    double worst = 0.0;
    for (double phi : phis)
      for (double q : qs) {
        const double num = x_eff(gc, phi, 0.0, q).value;
        const double closed = closed_form_xeff(D, Lambda, lambda2, phi, q);
        worst = std::max(worst, std::fabs(num - closed) / std::max(std::fabs(closed), 1e-300));
      }
    std::mt19937_64 rng(400 + D);
    std::uniform_real_distribution<double> uphi(0.2, 5.0), uq(-2.0, 2.0);
    double ident = 0.0;
    bool ok = true;
    for (int i = 0; i < 20; ++i) {
      const auto rep = verify_identities(gc, uphi(rng), 0.0, uq(rng), 1e-3);
      ok = ok && rep.ok;
      ident = std::max({ident, rep.residual_phi, rep.residual_psi});
    }
    const bool pass = worst <= 1e-10 && ident <= 1e-6 && ok;
    r.pass = r.pass && pass;
    d << "D=" << D << ": closed-form rel err " << detail::fmt(worst) << ", identity residual "
      << detail::fmt(ident) << (pass ? " ok" : " FAIL") << "; ";
  }
  r.detail = d.str();
  return r;
}

// 5. RN merger into a double root and the triple-degenerate solve.
inline Result criterion5() {
  Result r{5, "RN horizon merger and triple degeneracy", false, "", 0.0};
  const auto m = build_srn(4, 0.0, 1);
  std::ostringstream d;
  r.pass = true;
  for (double q0 : {0.6, 1.2, 2.0}) {
    HorizonOptions opt;
    opt.q0 = q0;
    const double pe = q0 * q0 / 2;
    const double Ne = antiderivative_N(m, q0)(pe);
    const auto two = find_horizons(m, Ne * 1.01, 0.01 * pe, 100 * pe, opt);
    const auto one = find_horizons(m, Ne, 0.01 * pe, 100 * pe, opt);
    const bool ok2 = two.size() == 2 && two[0].multiplicity == 1 && two[1].multiplicity == 1 &&
                     two[0].phi0 < pe && two[1].phi0 > pe;
    const bool ok1 = one.size() == 1 && one[0].multiplicity == 2 && std::fabs(one[0].phi0 - pe) <= 1e-8 * pe;
    r.pass = r.pass && ok1 && ok2;
    d << "q0=" << q0 << (ok2 ? " two simple" : " SPLIT-FAIL") << (ok1 ? ", double at q0^2/2" : ", MERGE-FAIL")
      << "; ";
    const auto tp = triple_degenerate(4, 1, q0);
    const double rel = std::fabs(2 * tp.Lambda * q0 * q0 - 1);
    const bool ok3 = std::fabs(tp.phi0 - q0 * q0) <= 1e-10 * q0 * q0 && rel <= 1e-10 &&
                     std::fabs(std::fabs(tp.relation_lhs) - tp.relation_rhs) <= 1e-10;
    r.pass = r.pass && ok3;
    d << "triple phi0=" << detail::fmt(tp.phi0) << " |2 Lambda q0^2 - 1|=" << detail::fmt(rel) << "; ";
  }
  r.detail = d.str();
  return r;
}

// 6. SK chart: series against the massless closed form.
inline Result criterion6() {
  Result r{6, "SK series against the massless closed form", false, "", 0.0};
  struct Case {
    ModelSpec m;
    double q0, N0;
  };
  const std::vector<Case> cases = {{build_model("d4"), 0.0, 8.0},
                                   {build_srn(4, 0.0, 1), 0.8, 7.0},
                                   {build_srn(4, -0.3, 1), 0.5, 6.0},
                                   {build_srn(4, 0.05, 1), 1.0, 9.0},
                                   {build_srn(5, 0.2, 1), 0.4, 5.0}};
  double worst = 0.0, worst0 = 0.0;
  int horizons = 0;
  for (const auto& c : cases) {
    HorizonOptions opt;
    opt.q0 = c.q0;
    for (const auto& h : find_horizons(c.m, c.N0, 0.05, 50.0, opt)) {
      if (h.multiplicity != 1) continue;
      ++horizons;
      const double U0 = antiderivative_N(c.m, c.q0).U_at(h.phi0);
      const auto s = expand<double>(c.m, h.phi0, c.q0, 1.0, 16);
      const auto chart = sk_chart(s);
      const auto t = taylor01([&](double x) { return sk_closed_form_massless(c.m, c.q0, h.phi0, h.phi0 + x); },
                              1e-3 * std::min(1.0, h.phi0));
      worst = std::max({worst, std::fabs(t.c0 - chart.h_sk_series[0]), std::fabs(t.c1 - chart.h_sk_series[1])});
      worst0 = std::max({worst0, std::fabs(chart.h_sk_series[0] + 1.0 / U0),
                         std::fabs(sk_closed_form_massless(c.m, c.q0, h.phi0, h.phi0) + 1.0 / U0)});
    }
  }
  r.pass = horizons >= 5 && worst <= 1e-9 && worst0 <= 1e-12;
  r.detail = std::to_string(horizons) + " simple horizons, order 0/1 mismatch " + detail::fmt(worst) +
             " (limit 1e-9), |h_sk(0) + 1/U0| " + detail::fmt(worst0);
  return r;
}

// 7. Series launch versus the phi flow, and constraint drift in tau.
inline Result criterion7() {
  Result r{7, "series and integrator cross-validation", false, "", 0.0};
  const auto m = build_d3(-1.0, 1.0, 1.0);
  const auto s16 = expand<double>(m, 1.0, 1.0, 1.0, 16);
  const auto s32 = expand<double>(m, 1.0, 1.0, 1.0, 32);
  const auto l = launch_from_horizon(s16, 0.05);
  PhiOptions po;
  po.tol = 1e-12;
  const auto tr = integrate_phi(m, l.state, 1.5, po);
  const auto& e = tr.x.back();
  const double t = 0.5;
  double mis = std::max({std::fabs(e.chi - s32.chi.evaluate(t)), std::fabs(e.H - s32.H.evaluate(t)),
                         std::fabs(e.q - s32.q.evaluate(t)), std::fabs(e.P - s32.P.evaluate(t))});
  if (!tr.events.empty() || e.phi != 1.5) mis = std::nan("");
  double drift = 0.0;
  const double tol = 1e-10;
  TauOptions to;
  to.tol = tol;
  for (double span : {-3.0, 0.5}) {
    const auto tt = integrate_tau(m, to_tau_state(m, l.state), 0.0, span, to);
    drift = std::max(drift, tt.max_drift);
  }
  r.pass = mis <= 1e-6 && drift <= 10 * tol;
  r.detail = "mismatch at phi~=0.5: " + detail::fmt(mis) + " (limit 1e-6, series radius estimate " +
             detail::fmt(radius_estimate(s32.chi)) + "), constraint drift " + detail::fmt(drift) +
             " (limit 1e-9)";
  return r;
}

// 8. Leading exponents at singular and degenerate horizons.
inline Result criterion8() {
  Result r{8, "singular-horizon exponents", false, "", 0.0};
  const double e1 = singular_horizon_probe(build_model("d4"), 4.0).exponent;
  const double e2 = singular_horizon_probe(build_srn(4, 0.0, 1), 0.5, 1.0).exponent;
  const double e3 = singular_horizon_probe(build_singular_sqrt(-1.0, 1.0), 1.0, 0.0, +1).exponent;
  // linear scalaron with q0 = 0 integrated toward h -> 0
  const double gc = 2.0, b = 1.0, h0 = 1.0;
  const auto m = build_linear_scalaron(gc);
  const auto ls = solve_linear_scalaron(gc, b, 0.0, 0.0, ScalaronSign::Constraint);
  const auto s0 = make_tau_state(m, ls.phitilde_of_h(h0), -h0 * h0 * gc * gc / (4 * b * b * b), h0, ls.q_of_h(h0),
                                 -h0 * gc / (2 * b));
  TauOptions to;
  to.tol = 1e-12;
  const auto tr = integrate_tau(m, s0, 0.0, -14.0, to);
  std::vector<double> lx, ly;
  for (const auto& x : tr.x) {
    const double pt = std::fabs(x[kPhi]);
    if (pt > 1e-10 && pt < 1e-3) {
      lx.push_back(std::log(pt));
      ly.push_back(std::log(std::fabs(x[kH])));
    }
  }
  const double e4 = lx.size() >= 3 ? fit_line(lx, ly).slope : std::nan("");
  auto near = [](double v, double w) { return std::fabs(v - w) <= 0.01; };
  r.pass = near(e1, 1.0) && near(e2, 2.0) && near(e3, 1.5) && near(e4, 0.5);
  r.detail = "simple " + detail::fmt(e1) + ", double " + detail::fmt(e2) + ", sqrt branch " + detail::fmt(e3) +
             ", linear scalaron h vs |phi~| " + detail::fmt(e4);
  return r;
}

// 9. Portrait pins.
inline Result criterion9() {
  Result r{9, "portrait pins", false, "", 0.0};
  bool half = true;
  for (double d : {-0.5, 0.0, 1.0, 5.0}) half = half && portrait_w(1.0, d) == 0.5;
  double prev = 1.0;
  bool to_one = true;
  for (int k = 2; k <= 14; ++k) {
    const double dev = std::fabs(portrait_w(std::pow(10.0, -k), 0.0) - 1.0);
    to_one = to_one && dev <= prev;
    prev = dev;
  }
  to_one = to_one && prev <= 1e-13;
  const auto st = portrait_curve(0.3, PortraitBranch::Static, default_portrait_grid(PortraitBranch::Static));
  const bool pole = std::find(st.poles.begin(), st.poles.end(), -1.0) != st.poles.end();
  double worst = 0.0;
  std::size_t n = 0;
  for (const auto& c : portrait_family({-0.5, -0.25, 0.0, 0.5, 1.0, 5.0})) {
    for (const auto& s : c.samples) {
      const double a = std::fabs(s.h), eps = s.h > 0 ? 1.0 : -1.0;
      const double w = std::pow(a, c.delta) / std::fabs(1 + eps * std::pow(a, 1 + 2 * c.delta));
      worst = std::max(worst, std::fabs(s.w - w) / std::max(1.0, std::fabs(w)));
      ++n;
    }
  }
  r.pass = half && to_one && pole && worst <= 1e-12;
  r.detail = std::string("w(1)=1/2 ") + (half ? "exact" : "FAIL") + ", delta=0 limit " +
             (to_one ? "-> 1" : "FAIL") + ", pole at h=-1 " + (pole ? "flagged" : "MISSED") + ", " +
             std::to_string(n) + " samples re-evaluated, worst " + detail::fmt(worst);
  return r;
}

// 10. Separable integral conservation and insensitivity to v(psi).
inline Result criterion10() {
  Result r{10, "separable integral conservation", false, "", 0.0};
  const double tol = 1e-10;
  std::ostringstream d;
  r.pass = true;
  for (int a : {0, 1, 2}) {
    double g1[2] = {0, 0}, sd[2] = {0, 0};
    bool ok = true;
    int i = 0;
    for (VKind v : {VKind::Exp, VKind::Cosh}) {
      const auto m = build_separable_power(a, v, -1.0, 0.5);
      TauOptions to;
      to.tol = tol;
      const auto tr = integrate_tau(m, make_tau_state(m, 1.5, 0.3, -0.8, 0.0, 0.0, 0.2, 0.4), 0.0, -2.0, to);
      const auto rep = conservation_report(m, tr.x, tol);
      ok = ok && rep.ok && tr.events.empty();
      g1[i] = rep.g1;
      sd[i] = rep.stddev;
      ++i;
    }
    ok = ok && std::fabs(g1[0] - g1[1]) <= 1e-6;
    r.pass = r.pass && ok;
    d << "a=" << a << ": g1 " << detail::fmt(g1[0]) << "/" << detail::fmt(g1[1]) << ", std "
      << detail::fmt(sd[0]) << "/" << detail::fmt(sd[1]) << (ok ? "" : " FAIL") << "; ";
  }
  r.detail = d.str() + "limit 10*tol = " + detail::fmt(10 * tol);
  return r;
}

inline std::vector<Result> run_all(const std::function<void(const Result&)>& on_result = {}) {
  using Clock = std::chrono::steady_clock;
  const std::vector<std::function<Result()>> checks = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                       criterion6, criterion7, criterion8, criterion9, criterion10};
  std::vector<Result> out;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto t0 = Clock::now();
    Result res;
    try {
      res = checks[i]();
    } catch (const std::exception& e) {
      res.id = static_cast<int>(i) + 1;
      res.title = "criterion " + std::to_string(i + 1);
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    if (res.id == 1 && res.seconds >= 10.0) {
      res.pass = false;
      res.detail += "; runtime " + detail::fmt(res.seconds) + " s over the 10 s budget";
    }
    if (res.id == 4 && res.seconds >= 5.0) {
      res.pass = false;
      res.detail += "; runtime " + detail::fmt(res.seconds) + " s over the 5 s budget";
    }
    if (on_result) on_result(res);
    out.push_back(res);
  }
  return out;
}

inline std::string format_line(const Result& r) {
  std::ostringstream os;
  os << "criterion " << r.id << ": " << (r.pass ? "PASS" : "FAIL") << "  " << r.title << " -- " << r.detail
     << " [" << detail::fmt(r.seconds) << " s]";
  return os.str();
}

}  // namespace horizonlab::acceptance
