#pragma once

// Numerical integration in tau (first-order system with the energy
// constraint monitored) and in phi (the horizon-adapted variables).

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/near_horizon.hpp"

namespace horizonlab {

// Potentials and the phi-derivatives the flows need.
struct FlowPotentials {
  Expr U, Uq, Uphi, Upsi, zinv, zinv_phi, Zinv, Zinv_phi;
  bool has_psi = false;
  bool massless = false;

  static FlowPotentials from(const ModelSpec& m) {
    FlowPotentials f;
    f.U = m.U;
    f.Uq = derivative(m.U, "q");
    f.Uphi = derivative(m.U, "phi");
    f.Upsi = derivative(m.U, "psi");
    f.zinv = m.zbar_inv;
    f.zinv_phi = derivative(m.zbar_inv, "phi");
    f.has_psi = m.has_psi && m.Z.has_value();
    f.Zinv = f.has_psi ? pow(*m.Z, Ratio(-1)) : cst(0.0);
    f.Zinv_phi = derivative(f.Zinv, "phi");
    f.massless = m.massless();
    return f;
  }

  struct Values {
    double U, Uq, Uphi, Upsi, zinv, zinv_phi, Zinv, Zinv_phi;
  };

  Values at(double phi, double q, double psi) const {
    const Bindings b{{"phi", phi}, {"q", q}, {"psi", psi}};
    Values v{};
    v.U = evaluate(U, b);
    v.Uq = evaluate(Uq, b);
    v.Uphi = evaluate(Uphi, b);
    v.Upsi = has_psi ? evaluate(Upsi, b) : 0.0;
    v.zinv = evaluate(zinv, b);
    v.zinv_phi = evaluate(zinv_phi, b);
    v.Zinv = has_psi ? evaluate(Zinv, b) : 0.0;
    v.Zinv_phi = has_psi ? evaluate(Zinv_phi, b) : 0.0;
    return v;
  }
};

// ---------------------------------------------------------------------------
// tau system: phi' = chi, chi' = -h U, h' = h g,
// g' = -h U_phi - (Zbar^-1)_phi p^2 - (Z^-1)_phi eta^2,
// q' = Zbar^-1 p, p' = -h U_q / 2, psi' = Z^-1 eta, eta' = -h U_psi / 2,
// with C = chi g + h U + Zbar^-1 p^2 + Z^-1 eta^2 = 0.

enum TauIndex { kPhi = 0, kChi, kH, kG, kQ, kP, kPsi, kEta };
using StateTau = std::array<double, 8>;

inline const std::array<const char*, 8>& tau_names() {
  static const std::array<const char*, 8> n{"phi", "chi", "h", "g", "q", "p", "psi", "eta"};
  return n;
}

struct ConstraintValue {
  double value = 0.0;
  double scale = 0.0;  // sum of the magnitudes of the four terms
};

inline ConstraintValue constraint(const FlowPotentials& f, const StateTau& s) {
  const auto v = f.at(s[kPhi], s[kQ], s[kPsi]);
  const double t[4] = {s[kChi] * s[kG], s[kH] * v.U, v.zinv * s[kP] * s[kP], v.Zinv * s[kEta] * s[kEta]};
  return {t[0] + t[1] + t[2] + t[3], std::fabs(t[0]) + std::fabs(t[1]) + std::fabs(t[2]) + std::fabs(t[3])};
}

inline void tau_rhs(const FlowPotentials& f, const StateTau& s, StateTau& d) {
  const auto v = f.at(s[kPhi], s[kQ], s[kPsi]);
  const double h = s[kH];
  d[kPhi] = s[kChi];
  d[kChi] = -h * v.U;
  d[kH] = h * s[kG];
  d[kG] = -h * v.Uphi - v.zinv_phi * s[kP] * s[kP] - v.Zinv_phi * s[kEta] * s[kEta];
  d[kQ] = v.zinv * s[kP];
  d[kP] = -0.5 * h * v.Uq;
  d[kPsi] = v.Zinv * s[kEta];
  d[kEta] = -0.5 * h * v.Upsi;
}

// Initial data with g fixed by the constraint.
inline StateTau make_tau_state(const ModelSpec& m, double phi, double chi, double h, double q, double p,
                               double psi = 0.0, double eta = 0.0) {
  if (chi == 0.0) throw DomainError("initial chi = 0: g is not fixed by the constraint");
  const auto f = FlowPotentials::from(m);
  const auto v = f.at(phi, q, psi);
  StateTau s{phi, chi, h, 0.0, q, p, psi, eta};
  s[kG] = -(h * v.U + v.zinv * p * p + v.Zinv * eta * eta) / chi;
  return s;
}

struct TauOptions {
  double tol = 1e-10;
  double h_event = 1e-8;  // stop when |h| < h_event * max|h|
  double dt0 = 1e-3;
  std::size_t max_steps = 200000;
};

struct FlowEvent {
  std::string kind;
  double t = 0.0;
  std::string message;
};

struct TauTrajectory {
  std::vector<double> t;
  std::vector<StateTau> x;
  std::vector<double> constraint;  // C / max scale
  std::vector<double> curvature;   // R = g' / h
  std::vector<FlowEvent> events;
  double max_drift = 0.0;
  bool drift_flagged = false;  // drift above 10 tol
  double tol = 0.0;
};

namespace detail {

// Stepping loop shared by both flows. `check` returns a non-empty event
// kind to stop after an accepted step.
template <class State, class Rhs, class Record, class Check>
std::vector<FlowEvent> drive(Rhs&& rhs, State& x, double t0, double t1, double tol, double dt0,
                             std::size_t max_steps, Record&& record, Check&& check) {
  namespace ode = boost::numeric::odeint;
  auto stepper = ode::make_controlled(tol, tol, ode::runge_kutta_fehlberg78<State>());
  std::vector<FlowEvent> events;
  const double dir = t1 >= t0 ? 1.0 : -1.0;
  double t = t0, dt = dir * std::min(std::fabs(dt0), std::fabs(t1 - t0));
  record(t, x);
  std::size_t steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > max_steps) {
      events.push_back({"max_steps", t, "step budget exhausted"});
      break;
    }
    if (dir * (t + dt - t1) > 0.0) dt = t1 - t;
    ode::controlled_step_result res;
    try {
      res = stepper.try_step(rhs, x, t, dt);
    } catch (const DomainError& e) {
      events.push_back({"domain", t, e.what()});
      break;
    }
    if (res == ode::fail) {
      if (std::fabs(dt) < 1e-14 * std::max(1.0, std::fabs(t))) {
        events.push_back({"singularity", t, "step size underflow near tau = " + std::to_string(t)});
        break;
      }
      continue;
    }
    bool finite = true;
    for (double v : x) finite = finite && std::isfinite(v);
    if (!finite) {
      events.push_back({"non_finite", t, "state became non-finite"});
      break;
    }
    record(t, x);
    if (auto e = check(t, x); !e.kind.empty()) {
      events.push_back(e);
      break;
    }
  }
  return events;
}

}  // namespace detail

inline TauTrajectory integrate_tau(const ModelSpec& m, StateTau s0, double t0, double t1,
                                   const TauOptions& opt = {}) {
  const auto f = FlowPotentials::from(m);
  if (!f.has_psi && (s0[kPsi] != 0.0 || s0[kEta] != 0.0))
    throw DomainError("model has no extra scalar: psi and eta must be 0");
  {
    const auto c = constraint(f, s0);
    if (std::fabs(c.value) > 1e3 * opt.tol * std::max(c.scale, 1e-300))
      throw DomainError("initial data violate the constraint (C = " + std::to_string(c.value) + ")");
  }
  TauTrajectory tr;
  tr.tol = opt.tol;
  double hmax = std::fabs(s0[kH]), cscale = 0.0;
  std::vector<double> raw;
  auto rhs = [&](const StateTau& x, StateTau& d, double) { tau_rhs(f, x, d); };
  auto record = [&](double t, const StateTau& x) {
    tr.t.push_back(t);
    tr.x.push_back(x);
    const auto c = constraint(f, x);
    raw.push_back(c.value);
    cscale = std::max(cscale, c.scale);
    StateTau d;
    tau_rhs(f, x, d);
    tr.curvature.push_back(x[kH] != 0.0 ? d[kG] / x[kH] : std::nan(""));
  };
  auto check = [&](double t, const StateTau& x) -> FlowEvent {
    hmax = std::max(hmax, std::fabs(x[kH]));
    if (std::fabs(x[kH]) < opt.h_event * hmax) return {"horizon", t, "|h| fell below the event threshold"};
    return {};
  };
  tr.events = detail::drive(rhs, s0, t0, t1, opt.tol, opt.dt0, opt.max_steps, record, check);
  const double c0 = raw.front();
  for (double c : raw) {
    const double rel = std::fabs(c - c0) / std::max(cscale, 1e-300);
    tr.constraint.push_back(c / std::max(cscale, 1e-300));
    tr.max_drift = std::max(tr.max_drift, rel);
  }
  tr.drift_flagged = tr.max_drift > 10 * opt.tol;
  return tr;
}

// ---------------------------------------------------------------------------
// phi system: chi' = -H U, q' = P Zbar^-1, (chi P)' = -H U_q / 2,
// H' = -H P^2 Zbar^-1.

struct StatePhi {
  double phi = 0.0, chi = 0.0, H = 0.0, q = 0.0, P = 0.0;
};

struct PhiOptions {
  double tol = 1e-10;
  double chi_event = 1e-8;  // stop when |chi| < chi_event * max|chi|
  double dphi0 = 1e-4;
  std::size_t max_steps = 200000;
};

struct PhiTrajectory {
  std::vector<double> phi;
  std::vector<StatePhi> x;
  std::vector<FlowEvent> events;
};

inline PhiTrajectory integrate_phi(const ModelSpec& m, const StatePhi& s0, double phi1, const PhiOptions& opt = {}) {
  if (m.has_psi) throw DomainError("the phi system has no extra scalar; use the tau system");
  if (s0.chi == 0.0) throw DomainError("integrate_phi cannot start on a horizon (chi = 0)");
  const auto pot = Potentials::from(m);
  using Y = std::array<double, 4>;  // chi, H, q, P
  auto rhs = [&](const Y& y, Y& d, double phi) {
    const Bindings b{{"phi", phi}, {"q", y[2]}};
    const double U = evaluate(pot.U, b), zinv = evaluate(pot.zinv, b);
    d[0] = -y[1] * U;
    d[1] = -y[1] * y[3] * y[3] * zinv;
    d[2] = y[3] * zinv;
    d[3] = pot.massless ? 0.0 : (-0.5 * y[1] * evaluate(pot.Uq, b) - d[0] * y[3]) / y[0];
  };
  PhiTrajectory tr;
  double cmax = std::fabs(s0.chi);
  auto record = [&](double phi, const Y& y) {
    tr.phi.push_back(phi);
    tr.x.push_back({phi, y[0], y[1], y[2], y[3]});
  };
  auto check = [&](double phi, const Y& y) -> FlowEvent {
    cmax = std::max(cmax, std::fabs(y[0]));
    if (std::fabs(y[0]) < opt.chi_event * cmax) return {"horizon", phi, "|chi| fell below the event threshold"};
    return {};
  };
  Y y{s0.chi, s0.H, s0.q, s0.P};
  tr.events = detail::drive(rhs, y, s0.phi, phi1, opt.tol, opt.dphi0, opt.max_steps, record, check);
  return tr;
}

inline StateTau to_tau_state(const ModelSpec& m, const StatePhi& s) {
  return make_tau_state(m, s.phi, s.chi, s.H * s.chi, s.q, s.chi * s.P);
}

// ---------------------------------------------------------------------------
// Start a numerical flow from the near-horizon series at phi0 + dphi.

struct Launch {
  StatePhi state;
  double truncation = 0.0;  // largest |c_N| |dphi|^N over the four series
  double radius = 0.0;
  bool beyond_radius = false;
  std::string warning;
};

inline Launch launch_from_horizon(const NearHorizonState<double>& s, double dphi) {
  if (dphi == 0.0) throw DomainError("launch offset must be nonzero");
  Launch l;
  l.state = {s.phi0 + dphi, s.chi.evaluate(dphi), s.H.evaluate(dphi), s.q.evaluate(dphi), s.P.evaluate(dphi)};
  for (const auto* ser : {&s.chi, &s.H, &s.q, &s.P}) {
    const int n = ser->order();
    l.truncation = std::max(l.truncation, std::fabs((*ser)[n]) * std::pow(std::fabs(dphi), n));
  }
  l.radius = radius_estimate(s.chi);
  if (std::fabs(dphi) > 0.5 * l.radius) {
    l.beyond_radius = true;
    l.warning = "launch offset exceeds half the estimated radius of convergence";
  }
  return l;
}

inline nlohmann::json to_json(const TauTrajectory& tr) {
  nlohmann::json j;
  j["columns"] = {"tau", "phi", "chi", "h", "g", "q", "p", "psi", "eta", "constraint", "R"};
  j["max_drift"] = tr.max_drift;
  j["drift_flagged"] = tr.drift_flagged;
  j["events"] = nlohmann::json::array();
  for (const auto& e : tr.events) j["events"].push_back({{"kind", e.kind}, {"t", e.t}, {"message", e.message}});
  j["samples"] = tr.t.size();
  return j;
}

}  // namespace horizonlab
