#pragma once

// Power-series solution (chi, H, q, P) of the static system in the phi
// gauge around a horizon phi0:
//   q' = P Zbar^-1,  (chi P)' = -H U_q / 2,  chi' = -H U,  H' = -H P^2 Zbar^-1,
// with chi(phi0) = 0 and h = H chi. The extra scalar is frozen at psi = 0.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/expr.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/scalar.hpp"
#include "horizonlab/series.hpp"

namespace horizonlab {

enum class Branch { Regular, Degenerate, Massless };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::Regular: return "regular";
    case Branch::Degenerate: return "degenerate";
    case Branch::Massless: return "massless";
  }
  return "?";
}

template <class T = double>
struct NearHorizonState {
  T phi0{}, q0{}, H0{};
  Series<T> chi, H, q, P, h;
  int order = 0;
  Branch branch = Branch::Regular;
};

// U, U_q and Zbar^-1 with psi frozen at 0.
struct Potentials {
  Expr U, Uq, zinv;
  bool massless = false;

  static Potentials from(const ModelSpec& m) {
    Potentials p;
    p.U = substitute(m.U, "psi", cst(0.0));
    p.Uq = derivative(p.U, "q");
    p.zinv = m.zbar_inv;
    p.massless = m.zbar_inv.is_zero();
    return p;
  }
};

namespace detail {

template <class T>
T conv(const std::vector<T>& a, const std::vector<T>& b, int n) {
  T acc(0);
  for (int m = 0; m <= n; ++m) acc += a[static_cast<std::size_t>(m)] * b[static_cast<std::size_t>(n - m)];
  return acc;
}

template <class T>
std::vector<T> conv_all(const std::vector<T>& a, const std::vector<T>& b, int n) {
  std::vector<T> out(static_cast<std::size_t>(n) + 1, T(0));
  for (int k = 0; k <= n; ++k) out[static_cast<std::size_t>(k)] = conv(a, b, k);
  return out;
}

template <class T>
std::vector<T> padded(std::vector<T> v, int n) {
  if (static_cast<int>(v.size()) < n + 1) v.resize(static_cast<std::size_t>(n) + 1, T(0));
  return v;
}

// Expansion of a potential through order n with the q series padded by zeros.
template <class T>
std::vector<T> expand_potential(const Expr& e, const T& phi0, const std::vector<T>& q, int n) {
  SeriesBindings<T> env{{"phi", Series<T>::identity(phi0, n)}};
  if (depends_on(e, "q")) {
    auto qc = padded(q, n);
    qc.resize(static_cast<std::size_t>(n) + 1);
    env.emplace("q", Series<T>(phi0, std::move(qc)));
  }
  auto s = evaluate_series<T>(e, env);
  return padded(s.coeffs(), n);
}

template <class T>
bool near_zero(const T& v, double tol) {
  if constexpr (std::is_same_v<T, double>) {
    return std::fabs(v) <= tol;
  } else {
    (void)tol;
    return ScalarOps<T>::is_zero(v);
  }
}

// Working arrays of one expansion. Index n of chi/H/q/P is the coefficient
// of phi~^n.
template <class T>
struct Work {
  const Potentials* pot;
  T phi0;
  std::vector<T> chi, H, q, P;
};

template <class T>
void push_q_H(Work<T>& w, int n) {
  // q_{n+1} = (Zbar^-1 P)^(n)/(n+1), H_{n+1} = -(Zbar^-1 P^2 H)^(n)/(n+1)
  const auto zi = expand_potential(w.pot->zinv, w.phi0, w.q, n);
  const auto P = padded(w.P, n);
  const auto P2 = conv_all(P, P, n);
  const auto P2H = conv_all(P2, padded(w.H, n), n);
  const T np1(n + 1);
  w.q.push_back(conv(zi, P, n) / np1);
  w.H.push_back(-conv(zi, P2H, n) / np1);
}

}  // namespace detail

struct ExpandOptions {
  double zero_tol = 1e-12;  // |U0|, |U_q0| below this count as zero (double mode)
};

template <class T>
NearHorizonState<T> finish_state(const T& phi0, const T& q0, const T& H0, detail::Work<T>& w, int N,
                                 Branch b) {
  NearHorizonState<T> s;
  s.phi0 = phi0;
  s.q0 = q0;
  s.H0 = H0;
  s.order = N;
  s.branch = b;
  auto cut = [&](const std::vector<T>& v) {
    auto c = detail::padded(v, N);
    c.resize(static_cast<std::size_t>(N) + 1);
    return Series<T>(phi0, std::move(c));
  };
  s.chi = cut(w.chi);
  s.H = cut(w.H);
  s.q = cut(w.q);
  s.P = cut(w.P);
  s.h = mul(s.H, s.chi);
  return s;
}

// Regular branch: at step n solve chi_{n+1}, then P_n, then q_{n+1}, H_{n+1}.
template <class T>
NearHorizonState<T> extend_regular(const Potentials& pot, const T& phi0, const T& q0, const T& H0, int N) {
  detail::Work<T> w{&pot, phi0, {T(0)}, {H0}, {q0}, {}};
  for (int n = 0; n <= N; ++n) {
    const auto U = detail::expand_potential(pot.U, phi0, w.q, n);
    const auto Uq = detail::expand_potential(pot.Uq, phi0, w.q, n);
    const auto H = detail::padded(w.H, n);
    const T np1(n + 1);
    w.chi.push_back(-detail::conv(U, H, n) / np1);
    const T& chi1 = w.chi[1];
    if (ScalarOps<T>::is_zero(chi1))
      throw DomainError("internal: chi1 = 0 on the regular branch (should be degenerate)");
    T rhs = -detail::conv(Uq, H, n) / (T(2) * np1);
    for (int m = 0; m < n; ++m) rhs -= w.chi[static_cast<std::size_t>(n + 1 - m)] * w.P[static_cast<std::size_t>(m)];
    w.P.push_back(rhs / chi1);
    detail::push_q_H(w, n);
  }
  return finish_state(phi0, q0, H0, w, N, Branch::Regular);
}

// Massless branch: P = 0, q = q0 and H = H0 are constant; only chi runs.
template <class T>
NearHorizonState<T> extend_massless(const Potentials& pot, const T& phi0, const T& q0, const T& H0, int N) {
  detail::Work<T> w{&pot, phi0, {T(0)}, {H0}, {q0}, {}};
  const auto U = detail::expand_potential(pot.U, phi0, w.q, N);
  for (int n = 0; n <= N; ++n) {
    w.chi.push_back(-U[static_cast<std::size_t>(n)] * H0 / T(n + 1));
    w.P.push_back(T(0));
  }
  return finish_state(phi0, q0, H0, w, N, Branch::Massless);
}

// Double-degenerate branch (U0 = U_q0 = 0, chi1 = 0). The (chi P) relation at
// order n+2 fixes P_n; it is affine in P_n, so two trial values determine it.
template <class T>
NearHorizonState<T> extend_degenerate(const Potentials& pot, const T& phi0, const T& q0, const T& H0, int N,
                                      double zero_tol = 1e-12) {
  detail::Work<T> w{&pot, phi0, {T(0)}, {H0}, {q0}, {}};
  {
    const auto U = detail::expand_potential(pot.U, phi0, w.q, 1);
    w.chi.push_back(-U[0] * H0);  // chi1, zero up to roundoff
  }
  auto trial = [&](int n, const T& t) {
    auto v = w;
    v.P.push_back(t);
    detail::push_q_H(v, n);
    const auto U = detail::expand_potential(pot.U, phi0, v.q, n + 1);
    const auto Uq = detail::expand_potential(pot.Uq, phi0, v.q, n + 1);
    const auto H = detail::padded(v.H, n + 1);
    v.chi.push_back(-detail::conv(U, H, n + 1) / T(n + 2));
    // r = 2(n+2)(chi P)^(n+2) + (U_q H)^(n+1)
    const T r = T(2) * T(n + 2) * detail::conv(v.chi, detail::padded(v.P, n + 2), n + 2) +
                detail::conv(Uq, H, n + 1);
    return std::pair<T, detail::Work<T>>{r, std::move(v)};
  };
  for (int n = 0; n <= N; ++n) {
    if (n == 0) {
      // chi2 = -U^(1) H0 / 2 must not vanish
      auto probe = trial(0, T(0)).second;
      if (detail::near_zero(probe.chi[2], zero_tol * std::fabs(ScalarOps<T>::to_double(H0))))
        throw UnsupportedForm("higher degeneracy: unsupported (U and U' both vanish at phi0)");
    }
    const T r0 = trial(n, T(0)).first;
    const T r1 = trial(n, T(1)).first;
    if (ScalarOps<T>::is_zero(T(r1 - r0)))
      throw DomainError("degenerate branch: P_" + std::to_string(n) + " undetermined");
    const T t = -r0 / (r1 - r0);
    w = trial(n, t).second;
  }
  return finish_state(phi0, q0, H0, w, N, Branch::Degenerate);
}

template <class T = double>
NearHorizonState<T> expand(const ModelSpec& m, const T& phi0, const T& q0, const T& H0, int N = kDefaultOrder,
                           const ExpandOptions& opt = {}) {
  if (N < 1) throw DomainError("expansion order must be >= 1");
  if (ScalarOps<T>::is_zero(H0)) throw DomainError("H0 must be nonzero (h vanishes identically)");
  m.require_charge(ScalarOps<T>::to_double(q0));
  const auto pot = Potentials::from(m);
  if (pot.massless) return extend_massless(pot, phi0, q0, H0, N);
  const std::vector<T> qv{q0};
  const T U0 = detail::expand_potential(pot.U, phi0, qv, 0)[0];
  const T Uq0 = detail::expand_potential(pot.Uq, phi0, qv, 0)[0];
  const bool u0 = detail::near_zero(U0, opt.zero_tol);
  const bool uq0 = detail::near_zero(Uq0, opt.zero_tol);
  if (!u0) return extend_regular(pot, phi0, q0, H0, N);
  if (!uq0) throw DomainError("no regular expansion: U = 0 but U_q != 0 at the horizon (P0 infinite)");
  return extend_degenerate(pot, phi0, q0, H0, N, opt.zero_tol);
}

// Order-1 state: chi1 = -U0 H0, P0 = U_q0 / (2 U0), q1 = Zbar^-1 P0, ...
template <class T = double>
NearHorizonState<T> init_quadruple(const ModelSpec& m, const T& phi0, const T& q0, const T& H0) {
  return expand(m, phi0, q0, H0, 1);
}

template <class T>
NearHorizonState<T> extend_to_order(const ModelSpec& m, const NearHorizonState<T>& s, int N) {
  return expand(m, s.phi0, s.q0, s.H0, N);
}

// ---------------------------------------------------------------------------
// Residuals

template <class T = double>
struct ResidualReport {
  // q' - P Zbar^-1, (chi P)' + H U_q/2, chi' + H U, H' + H P^2 Zbar^-1, and the
  // energy constraint chi H' + H chi' + H^2 U + chi H P^2 Zbar^-1.
  std::vector<Series<T>> equations;
  std::vector<double> max_scaled;  // per equation, max_n |r_n| / scale_n
  double worst = 0.0;
  int worst_order = -1;
  bool exact_zero = true;
};

inline const char* residual_name(int i) {
  static const char* names[] = {"q", "chiP", "chi", "H", "constraint"};
  return names[i];
}

template <class T>
ResidualReport<T> residual(const ModelSpec& m, const NearHorizonState<T>& s) {
  const auto pot = Potentials::from(m);
  const int N = s.order;
  const T& b = s.phi0;
  const std::vector<T>& q = s.q.coeffs();
  auto ser = [&](std::vector<T> v) { return Series<T>(b, detail::padded(std::move(v), N)).truncated(N); };
  const auto U = ser(detail::expand_potential(pot.U, b, q, N));
  const auto Uq = ser(detail::expand_potential(pot.Uq, b, q, N));
  const auto zi = ser(detail::expand_potential(pot.zinv, b, q, N));
  auto absd = [](const Series<T>& a) {
    std::vector<double> c;
    for (const auto& v : a.coeffs()) c.push_back(std::fabs(ScalarOps<T>::to_double(v)));
    return Series<double>(0.0, std::move(c));
  };
  const Series<T> half = Series<T>::constant(b, T(1) / T(2), N);
  const auto P2 = mul(s.P, s.P);
  const auto chiP = mul(s.chi, s.P);

  // each equation as lhs + rhs with a magnitude series for scaling
  struct Eq {
    Series<T> a, c;
    Series<double> sa, sc;
  };
  std::vector<Eq> eqs;
  auto push = [&](const Series<T>& a, const Series<T>& c, const Series<double>& sa, const Series<double>& sc) {
    eqs.push_back({a.truncated(N - 1), c.truncated(N - 1), sa.truncated(N - 1), sc.truncated(N - 1)});
  };
  const auto dq = differentiate(s.q);
  const auto dchiP = differentiate(chiP);
  const auto dchi = differentiate(s.chi);
  const auto dH = differentiate(s.H);
  const auto HU = mul(s.H, U);
  const auto HPPz = mul(mul(s.H, P2), zi);
  push(dq, neg(mul(s.P, zi)), absd(dq), mul(absd(s.P), absd(zi)));
  push(dchiP, mul(mul(half, s.H), Uq), absd(dchiP), mul(mul(absd(half), absd(s.H)), absd(Uq)));
  push(dchi, HU, absd(dchi), mul(absd(s.H), absd(U)));
  push(dH, HPPz, absd(dH), mul(mul(absd(s.H), mul(absd(s.P), absd(s.P))), absd(zi)));
  {
    const auto t1 = mul(s.chi, dH), t2 = mul(s.H, dchi), t3 = mul(s.H, HU), t4 = mul(s.chi, HPPz);
    const auto sH = absd(s.H), sc = absd(s.chi);
    push(add(t1, t2), add(t3, t4), add(mul(sc, absd(dH)), mul(sH, absd(dchi))),
         add(mul(sH, mul(sH, absd(U))), mul(sc, mul(mul(sH, mul(absd(s.P), absd(s.P))), absd(zi)))));
  }

  ResidualReport<T> rep;
  for (std::size_t i = 0; i < eqs.size(); ++i) {
    const auto r = add(eqs[i].a, eqs[i].c);
    rep.equations.push_back(r);
    double worst = 0.0;
    const bool skip = s.branch == Branch::Massless && (i == 1);  // q is a frozen charge
    for (int n = 0; n <= r.order(); ++n) {
      if (!ScalarOps<T>::is_zero(r[n]) && !skip) rep.exact_zero = false;
      if (skip) continue;
      const double scale = std::max(eqs[i].sa[n] + eqs[i].sc[n], 1e-300);
      const double v = std::fabs(ScalarOps<T>::to_double(r[n]));
      const double rel = v == 0.0 ? 0.0 : v / scale;
      if (rel > worst) worst = rel;
      if (rel > rep.worst) {
        rep.worst = rel;
        rep.worst_order = n;
      }
    }
    rep.max_scaled.push_back(worst);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Serialisation

template <class T>
nlohmann::json coeffs_json(const Series<T>& s) {
  nlohmann::json a = nlohmann::json::array();
  for (const auto& c : s.coeffs()) {
    if constexpr (std::is_same_v<T, double>)
      a.push_back(c);
    else
      a.push_back(c.str());
  }
  return a;
}

template <class T>
nlohmann::json to_json(const NearHorizonState<T>& s) {
  nlohmann::json j;
  j["phi0"] = ScalarOps<T>::to_double(s.phi0);
  j["q0"] = ScalarOps<T>::to_double(s.q0);
  j["H0"] = ScalarOps<T>::to_double(s.H0);
  j["order"] = s.order;
  j["branch"] = to_string(s.branch);
  j["chi"] = coeffs_json(s.chi);
  j["H"] = coeffs_json(s.H);
  j["q"] = coeffs_json(s.q);
  j["P"] = coeffs_json(s.P);
  j["h"] = coeffs_json(s.h);
  j["radius_estimate"] = radius_estimate(s.chi);
  return j;
}

// ---------------------------------------------------------------------------
// Integrable model U = g q, Zbar = -1 with h = exp(a + b tau):
//   q = q0 + h g/(2 b^2),  phi~ = s q0 h g/b^2 - h^2 g^2/(8 b^4).
// The displayed form has s = +1; integrating the static equations with
// chi(h -> 0) = 0 gives s = -1, which is what the energy constraint accepts.

enum class ScalaronSign { Displayed, Constraint };

struct LinearScalaron {
  double g = 0.0, b = 0.0, q0 = 0.0, a = 0.0;
  ScalaronSign sign = ScalaronSign::Displayed;

  double s() const { return sign == ScalaronSign::Displayed ? 1.0 : -1.0; }
  double q_of_h(double h) const { return q0 + h * g / (2 * b * b); }
  double phitilde_of_h(double h) const {
    return s() * q0 * h * g / (b * b) - h * h * g * g / (8 * b * b * b * b);
  }
  double tau_of_h(double h) const {
    if (!(h > 0.0)) throw DomainError("tau(h) needs h > 0 (h = exp(a + b tau))");
    return (std::log(h) - a) / b;
  }
  double h_of_tau(double tau) const { return std::exp(a + b * tau); }

  // Root of A h^2 - B h + phi~ = 0 on the branch h -> 0 as phi~ -> 0.
  double h_of_phitilde(double pt) const {
    const double A = g * g / (8 * b * b * b * b);
    const double B = s() * q0 * g / (b * b);
    if (A == 0.0) {
      if (B == 0.0) throw DomainError("linear scalaron: g = 0 leaves phi~ identically 0");
      return pt / B;
    }
    const double disc = B * B - 4 * A * pt;
    if (disc < 0.0) throw DomainError("linear scalaron: negative discriminant, phi~ outside the domain");
    if (B == 0.0) return std::sqrt(-pt / A);  // h ~ +sqrt|phi~|; the other sign is the mirror root
    return 2 * pt / (B + std::copysign(std::sqrt(disc), B));
  }
};

inline LinearScalaron solve_linear_scalaron(double g, double b, double q0, double a,
                                            ScalaronSign sign = ScalaronSign::Displayed) {
  if (b == 0.0) throw DomainError("linear scalaron needs b != 0");
  return {g, b, q0, a, sign};
}

}  // namespace horizonlab
