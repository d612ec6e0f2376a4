#pragma once

// Reduced two-dimensional gravity models. Every model is described by the
// potential U(phi, q, psi), the inverse scalaron kinetic potential
// Zbar^-1(phi) and, when an extra scalar is present, its kinetic potential
// Z(phi). Massless models carry Zbar^-1 == 0 and a frozen charge q.

#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizonlab/errors.hpp"
#include "horizonlab/expr.hpp"
#include "horizonlab/symbolic.hpp"

namespace horizonlab {

using Params = std::map<std::string, double>;

struct ModelSpec {
  std::string name;
  std::string provenance;
  int D = 4;
  Ratio nu{1, 2};
  double Lambda = 0.0;
  double lambda2 = 1.0;
  double m2 = 0.0;
  int k = 0;
  double k_nu = 0.0;

  Expr U;                      // U(phi, q, psi)
  Expr zbar_inv = cst(0.0);    // Zbar^-1(phi); identically 0 when massless
  std::optional<Expr> Z;       // kinetic potential of psi, absent when no extra scalar
  std::optional<Expr> gauge_X; // X(phi, psi, f2) the scalaron potential was built from

  bool has_psi = false;
  // Set when the scalaron potential is not available for q != 0; evaluation
  // with a nonzero charge must then be refused with this message.
  std::string charge_error;
  Params params;  // parameters the model was built with (q0 default etc.)

  bool massless() const { return zbar_inv.is_zero(); }

  double param(const std::string& key, double fallback) const {
    auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
  }

  void require_charge(double q) const {
    if (!charge_error.empty() && q != 0.0) throw DomainError(charge_error);
  }

  Expr U_q() const { return derivative(U, "q"); }
  Expr U_phi() const { return derivative(U, "phi"); }
  Expr U_psi() const { return derivative(U, "psi"); }

  // U with q and psi frozen, as a function of phi alone.
  Expr frozen_U(double q0, double psi0 = 0.0) const {
    require_charge(q0);
    return substitute(substitute(U, "q", cst(q0)), "psi", cst(psi0));
  }
};

namespace detail {

inline const Expr& phi() {
  static const Expr v = var("phi");
  return v;
}
inline const Expr& q() {
  static const Expr v = var("q");
  return v;
}
inline const Expr& psi() {
  static const Expr v = var("psi");
  return v;
}

inline Expr massive_zbar_inv(double m2) { return -m2 * phi(); }

}  // namespace detail

// X(phi, f2) = -2 Lambda phi^nu (1 + lambda^2 phi^(2(1-nu)) f2 / 2)^nu in the
// Weyl frame (for D = 3 the Weyl factor is trivial).
inline Expr spherical_gauge_coupling(int D, double Lambda, double lambda2) {
  if (D < 3) throw DomainError("spacetime dimension D must be >= 3");
  const Ratio nu(1, D - 2);
  const Expr f2 = var("f2");
  const Expr inner =
      1.0 + 0.5 * lambda2 * pow(detail::phi(), Ratio(2) * (Ratio(1) - nu)) * f2;
  return -2.0 * Lambda * pow(detail::phi(), nu) * pow(inner, nu);
}

inline ModelSpec build_d3(double Lambda, double lambda2, double m2) {
  if (Lambda * lambda2 == 0.0) throw DomainError("D=3 model needs Lambda * lambda2 != 0");
  ModelSpec m;
  m.name = "d3";
  m.provenance = "D=3 reduction, dual scalaron potential -2 Lambda phi - q^2/(lambda^2 Lambda phi)";
  m.D = 3;
  m.nu = Ratio(1);
  m.Lambda = Lambda;
  m.lambda2 = lambda2;
  m.m2 = m2;
  m.k = 0;
  m.k_nu = 0.0;
  using namespace detail;
  m.U = -2.0 * Lambda * phi() - pow(q(), 2) * pow(lambda2 * Lambda * phi(), -1);
  m.zbar_inv = massive_zbar_inv(m2);
  m.gauge_X = spherical_gauge_coupling(3, Lambda, lambda2);
  m.params = {{"Lambda", Lambda}, {"lambda2", lambda2}, {"m2", m2}, {"D", 3}};
  return m;
}

inline ModelSpec build_spherical(int D, double Lambda, double lambda2, double m2, int k) {
  if (D < 3) throw DomainError("spacetime dimension D must be >= 3");
  if (D == 3) return build_d3(Lambda, lambda2, m2);
  using namespace detail;
  ModelSpec m;
  m.D = D;
  m.nu = Ratio(1, D - 2);
  m.Lambda = Lambda;
  m.lambda2 = lambda2;
  m.m2 = m2;
  m.k = k;
  m.k_nu = static_cast<double>(k) * (D - 2) * (D - 3);
  m.params = {{"Lambda", Lambda}, {"lambda2", lambda2}, {"m2", m2}, {"k", k}, {"D", D}};
  const Expr V = m.k_nu * pow(phi(), -m.nu);
  m.zbar_inv = massive_zbar_inv(m2);
  if (Lambda != 0.0) m.gauge_X = spherical_gauge_coupling(D, Lambda, lambda2);

  if (Lambda == 0.0) {
    m.name = "spherical";
    m.provenance = "spherical reduction with Lambda = 0: pure dilaton potential k_nu phi^-nu";
    m.U = V;
    m.charge_error = "X_eff undefined: Lambda = 0 removes the gauge coupling, q must be 0";
    return m;
  }
  if (D == 4) {
    if (lambda2 == 0.0) throw DomainError("D=4 dual potential needs lambda2 != 0");
    m.name = "d4";
    m.provenance =
        "spherical D=4 reduction (Weyl frame), dual scalaron potential "
        "2k phi^-1/2 - 2 Lambda sqrt(phi) sqrt(1 + q^2/(lambda^2 Lambda^2 phi^2))";
    const Expr radicand =
        1.0 + pow(q(), 2) * pow(lambda2 * Lambda * Lambda * pow(phi(), 2), -1);
    m.U = V - 2.0 * Lambda * sqrt(phi()) * sqrt(radicand);
    return m;
  }
  m.name = "spherical";
  m.provenance = "spherical D>=5 reduction at zero scalaron; X_eff has no closed form";
  m.U = V - 2.0 * Lambda * pow(phi(), m.nu);
  m.charge_error =
      "X_eff undefined in closed form for D >= 5; use the duality module numerically";
  return m;
}

// Massless S-RN-Lambda family: U = k_nu phi^-nu - 2 Lambda phi^nu - q^2 phi^(nu-2).
inline ModelSpec build_srn(int D, double Lambda, int k, double m2 = 0.0) {
  if (D < 3) throw DomainError("spacetime dimension D must be >= 3");
  using namespace detail;
  ModelSpec m;
  m.name = "srn";
  m.provenance = "Schwarzschild/Reissner-Nordstrom-Lambda potential in D dimensions";
  m.D = D;
  m.nu = Ratio(1, D - 2);
  m.Lambda = Lambda;
  m.m2 = m2;
  m.k = k;
  m.k_nu = static_cast<double>(k) * (D - 2) * (D - 3);
  m.U = m.k_nu * pow(phi(), -m.nu) - 2.0 * Lambda * pow(phi(), m.nu) -
        pow(q(), 2) * pow(phi(), m.nu - Ratio(2));
  m.zbar_inv = massive_zbar_inv(m2);
  m.params = {{"Lambda", Lambda}, {"k", k}, {"m2", m2}, {"D", D}};
  return m;
}

inline ModelSpec build_cyl3(double Q) {
  ModelSpec m;
  m.name = "cyl3";
  m.provenance = "cylindrical D=3 reduction, U = -8 Q^2 phi^-3";
  m.D = 3;
  m.nu = Ratio(1);
  m.U = -8.0 * Q * Q * pow(detail::phi(), -3);
  m.params = {{"Q", Q}};
  m.charge_error = "cylindrical model has no scalaron; q must be 0";
  return m;
}

// Special cylindrical D=4 case with one charge Q and the sigma-field eta in
// the psi slot.
inline ModelSpec build_cyl4_special(double Q, bool with_eta) {
  using namespace detail;
  ModelSpec m;
  m.name = "cyl4";
  m.provenance = "cylindrical D=4 special case, U = -(Q^2/2) phi^-5/2 e^-eta, Z = -phi/2";
  m.D = 4;
  m.nu = Ratio(1, 2);
  const Expr base = -0.5 * Q * Q * pow(phi(), Ratio(-5, 2));
  m.U = with_eta ? base * exp(-psi()) : base;
  if (with_eta) {
    m.Z = -0.5 * phi();
    m.has_psi = true;
  }
  m.params = {{"Q", Q}, {"with_eta", with_eta ? 1.0 : 0.0}};
  m.charge_error = "cylindrical model has no scalaron; q must be 0";
  return m;
}

inline double v_eff_cyl(double phi, double xi, double eta, double Q1, double Q2) {
  if (!(phi > 0.0)) throw DomainError("v_eff_cyl needs phi > 0");
  return -std::cosh(xi) / (2.0 * phi * phi) *
         (Q1 * Q1 * std::exp(-eta) - 2.0 * Q1 * Q2 * std::tanh(xi) + Q2 * Q2 * std::exp(eta));
}

// Pure dilaton gravity with the non-analytic potential -2 Lambda sqrt(phi^2 - q_r^2).
inline ModelSpec build_singular_sqrt(double Lambda, double q_r) {
  ModelSpec m;
  m.name = "sqrt";
  m.provenance = "singular-horizon example U = -2 Lambda sqrt(phi^2 - q_r^2)";
  m.D = 3;
  m.nu = Ratio(1);
  m.Lambda = Lambda;
  m.U = -2.0 * Lambda * sqrt(pow(detail::phi(), 2) - q_r * q_r);
  m.params = {{"Lambda", Lambda}, {"q_r", q_r}};
  m.charge_error = "sqrt model has no scalaron; q must be 0";
  return m;
}

// U = g q with Zbar = -1 and no phi dependence.
inline ModelSpec build_linear_scalaron(double g) {
  ModelSpec m;
  m.name = "linear";
  m.provenance = "integrable near-horizon approximation U = g q, Zbar = -1";
  m.U = g * detail::q();
  m.zbar_inv = cst(-1.0);
  m.params = {{"g", g}};
  return m;
}

enum class VKind { Exp, Cosh, Quad };

inline VKind v_kind_from_string(const std::string& s) {
  if (s == "exp") return VKind::Exp;
  if (s == "cosh") return VKind::Cosh;
  if (s == "quad") return VKind::Quad;
  throw DomainError("unknown v(psi) kind '" + s + "' (expected exp, cosh or quad)");
}

inline Expr v_factor(VKind kind) {
  const Expr& p = detail::psi();
  switch (kind) {
    case VKind::Exp: return exp(p);
    case VKind::Cosh: return 0.5 * (exp(p) + exp(-p));
    case VKind::Quad: return 1.0 + pow(p, 2);
  }
  return cst(1.0);
}

// Z = (g0/u) (int u dphi + c), the kinetic potential admitting the extra
// integral for U = u(phi) v(psi).
inline Expr derive_Z(const Expr& u_factor, double g0, double c) {
  Expr N;
  try {
    N = antiderivative(u_factor, "phi");
  } catch (const UnsupportedForm& e) {
    throw UnsupportedForm(std::string(e.what()) +
                          "; derive_Z has no numeric mode, supply a power-law u(phi)");
  }
  return g0 * (N + c) * pow(u_factor, -1);
}

inline ModelSpec build_separable(const Expr& u_factor, VKind v, double g0, double c) {
  ModelSpec m;
  m.name = "separable";
  m.provenance = "separable potential U = u(phi) v(psi) with Z = (g0/u) int u dphi";
  m.U = u_factor * v_factor(v);
  m.Z = derive_Z(u_factor, g0, c);
  m.has_psi = true;
  m.params = {{"g0", g0}, {"c", c}};
  m.charge_error = "separable model has no scalaron; q must be 0";
  return m;
}

inline ModelSpec build_separable_power(double a, VKind v, double g0, double c) {
  const Ratio ra(static_cast<std::int64_t>(std::llround(a * 2)), 2);
  if (std::fabs(ra.to_double() - a) > 0.0)
    throw DomainError("separable power a must be a multiple of 1/2");
  auto m = build_separable(pow(detail::phi(), ra), v, g0, c);
  m.params["a"] = a;
  return m;
}

// ---------------------------------------------------------------------------
// Custom models from JSON: {"name": ..., "U": expr, "Zbar": expr?, "Z": expr?}

inline void require_vars(const Expr& e, const std::set<std::string>& allowed, const std::string& what) {
  for (const auto& v : variables(e))
    if (!allowed.count(v))
      throw DomainError(what + " uses variable '" + v + "'; allowed: phi, q, psi");
}

inline ModelSpec build_custom(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("U")) throw DomainError("custom model needs a 'U' expression");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "U" && it.key() != "Zbar" && it.key() != "Z" && it.key() != "name")
      throw DomainError("unknown key '" + it.key() + "' in custom model");
  ModelSpec m;
  m.name = j.value("name", std::string("custom"));
  m.provenance = "user-supplied expression trees";
  m.U = expr_from_json(j["U"]);
  require_vars(m.U, {"phi", "q", "psi"}, "U");
  if (j.contains("Zbar")) {
    const Expr zbar = expr_from_json(j["Zbar"]);
    require_vars(zbar, {"phi"}, "Zbar");
    m.zbar_inv = pow(zbar, -1);
  }
  if (j.contains("Z")) {
    m.Z = expr_from_json(j["Z"]);
    require_vars(*m.Z, {"phi", "psi"}, "Z");
    m.has_psi = true;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Named catalog

struct CatalogEntry {
  std::string name;
  std::string summary;
  Params defaults;
};

inline const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = {
      {"d3", "D=3 spherical reduction with the dual scalaron",
       {{"Lambda", -1.0}, {"lambda2", 1.0}, {"m2", 1.0}, {"q0", 0.0}}},
      {"d4", "D=4 spherical reduction with the dual scalaron (Lambda=0: pure dilaton gravity)",
       {{"Lambda", 0.0}, {"lambda2", 1.0}, {"m2", 0.0}, {"k", 1.0}, {"q0", 0.0}}},
      {"spherical", "general-D spherical reduction",
       {{"D", 5.0}, {"Lambda", -1.0}, {"lambda2", 1.0}, {"m2", 0.0}, {"k", 1.0}, {"q0", 0.0}}},
      {"srn", "Schwarzschild/Reissner-Nordstrom-Lambda potential, charge q0",
       {{"D", 4.0}, {"Lambda", 0.0}, {"k", 1.0}, {"m2", 0.0}, {"q0", 0.0}}},
      {"cyl3", "cylindrical D=3 reduction", {{"Q", 1.0}}},
      {"cyl4", "cylindrical D=4 special case with one charge", {{"Q", 1.0}, {"with_eta", 0.0}}},
      {"sqrt", "pure dilaton gravity with a square-root branch point",
       {{"Lambda", -1.0}, {"q_r", 1.0}}},
      {"linear", "integrable model U = g q, Zbar = -1", {{"g", 2.0}, {"q0", 0.0}}},
      {"separable", "separable U = phi^a v(psi) with derived Z",
       {{"a", 1.0}, {"g0", -1.0}, {"c", 0.5}, {"v", 0.0}}},
  };
  return entries;
}

inline const CatalogEntry& catalog_entry(const std::string& name) {
  for (const auto& e : catalog())
    if (e.name == name) return e;
  throw DomainError("unknown model '" + name + "'");
}

inline int as_int_param(double v, const std::string& key) {
  if (std::nearbyint(v) != v) throw DomainError("parameter " + key + " must be an integer");
  return static_cast<int>(v);
}

// Build a catalog model; `overrides` replace the defaults key by key. Keys
// that the entry does not know are rejected. q0/H0/phi0/N0/C0 are run
// parameters and pass through untouched.
inline ModelSpec build_model(const std::string& name, const Params& overrides = {}) {
  const auto& entry = catalog_entry(name);
  static const std::set<std::string> run_keys = {"q0", "H0", "phi0", "N0", "C0"};
  Params p = entry.defaults;
  for (const auto& [k, v] : overrides) {
    if (!p.count(k) && !run_keys.count(k))
      throw DomainError("model '" + name + "' has no parameter '" + k + "'");
    p[k] = v;
  }
  auto get = [&](const char* k) { return p.at(k); };
  ModelSpec m;
  if (name == "d3") {
    m = build_d3(get("Lambda"), get("lambda2"), get("m2"));
  } else if (name == "d4") {
    m = build_spherical(4, get("Lambda"), get("lambda2"), get("m2"), as_int_param(get("k"), "k"));
  } else if (name == "spherical") {
    m = build_spherical(as_int_param(get("D"), "D"), get("Lambda"), get("lambda2"), get("m2"),
                        as_int_param(get("k"), "k"));
  } else if (name == "srn") {
    m = build_srn(as_int_param(get("D"), "D"), get("Lambda"), as_int_param(get("k"), "k"),
                  get("m2"));
  } else if (name == "cyl3") {
    m = build_cyl3(get("Q"));
  } else if (name == "cyl4") {
    m = build_cyl4_special(get("Q"), get("with_eta") != 0.0);
  } else if (name == "sqrt") {
    m = build_singular_sqrt(get("Lambda"), get("q_r"));
  } else if (name == "linear") {
    m = build_linear_scalaron(get("g"));
  } else if (name == "separable") {
    static const VKind kinds[] = {VKind::Exp, VKind::Cosh, VKind::Quad};
    const int vi = as_int_param(get("v"), "v");
    if (vi < 0 || vi > 2) throw DomainError("separable v must be 0 (exp), 1 (cosh) or 2 (quad)");
    m = build_separable_power(get("a"), kinds[vi], get("g0"), get("c"));
  }
  for (const auto& [k, v] : p) m.params[k] = v;
  m.name = name;
  return m;
}

inline nlohmann::json model_to_json(const ModelSpec& m) {
  nlohmann::json j;
  j["name"] = m.name;
  j["provenance"] = m.provenance;
  j["D"] = m.D;
  j["nu"] = {m.nu.num, m.nu.den};
  j["Lambda"] = m.Lambda;
  j["lambda2"] = m.lambda2;
  j["m2"] = m.m2;
  j["k"] = m.k;
  j["k_nu"] = m.k_nu;
  j["U"] = to_json(m.U);
  j["Zbar_inv"] = to_json(m.zbar_inv);
  if (m.Z) j["Z"] = to_json(*m.Z);
  if (m.gauge_X) j["X"] = to_json(*m.gauge_X);
  j["params"] = m.params;
  return j;
}

}  // namespace horizonlab
