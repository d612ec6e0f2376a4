#include <random>

#include "catch_amalgamated.hpp"
#include "horizonlab/model.hpp"

using namespace horizonlab;
using Catch::Approx;

namespace {

double U_at(const ModelSpec& m, double phi, double q = 0.0, double psi = 0.0) {
  return evaluate(m.U, {{"phi", phi}, {"q", q}, {"psi", psi}});
}

}  // namespace

TEST_CASE("D=4 spherical potential", "[model]") {
  const auto m = build_spherical(4, 1.0, 1.0, 1.0, 0);
  REQUIRE(U_at(m, 1.0) == Approx(-2.0));
  for (int k : {-1, 0, 1}) {
    const auto mk = build_spherical(4, 1.0, 1.0, 1.0, k);
    REQUIRE(U_at(mk, 1.0, 1.0) == Approx(2.0 * k - 2.0 * std::sqrt(2.0)));
    for (double phi : {0.3, 2.0, 7.5})
      REQUIRE(U_at(mk, phi) == Approx(2 * k / std::sqrt(phi) - 2 * std::sqrt(phi)));
  }
  REQUIRE(m.nu == Ratio(1, 2));
  REQUIRE(build_spherical(6, 1.0, 1.0, 0.0, 1).k_nu == 12.0);
  REQUIRE(build_spherical(6, 1.0, 1.0, 0.0, 1).nu == Ratio(1, 4));
}

TEST_CASE("D=3 model", "[model]") {
  const auto m = build_d3(-1.0, 1.0, 1.0);
  REQUIRE(U_at(m, 1.0, 1.0) == Approx(3.0));
  REQUIRE(evaluate(m.U_q(), {{"phi", 1.0}, {"q", 1.0}}) == Approx(2.0));
  REQUIRE(U_at(m, 2.5, 0.0) == Approx(5.0));
  REQUIRE_THROWS_AS(build_d3(0.0, 1.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(build_d3(1.0, 0.0, 1.0), DomainError);
}

TEST_CASE("errors on dimension and missing coupling", "[model]") {
  REQUIRE_THROWS_AS(build_spherical(2, 1.0, 1.0, 0.0, 1), DomainError);
  const auto flat = build_spherical(4, 0.0, 1.0, 0.0, 1);
  REQUIRE_NOTHROW(flat.frozen_U(0.0));
  REQUIRE_THROWS_WITH(flat.frozen_U(0.5), Catch::Matchers::ContainsSubstring("X_eff undefined"));
}

TEST_CASE("cylindrical models", "[model]") {
  REQUIRE(U_at(build_cyl3(1.0), 1.0) == Approx(-8.0));
  REQUIRE(build_cyl3(0.0).U.is_zero());
  const auto c = build_cyl4_special(1.0, true);
  REQUIRE(U_at(c, 1.0, 0.0, 0.0) == Approx(-0.5));
  for (double eta : {-1.0, 0.4, 2.0})
    REQUIRE(U_at(c, 1.7, 0.0, eta) == Approx(std::exp(-eta) * U_at(c, 1.7, 0.0, 0.0)));
  REQUIRE(evaluate(*c.Z, {{"phi", 4.0}}) == Approx(-2.0));
  REQUIRE_FALSE(build_cyl4_special(1.0, false).has_psi);
}

TEST_CASE("effective geometric potential", "[model]") {
  const double phi = 1.3, eta = 0.7, Q1 = 0.9, Q2 = -1.4, xi = 0.35;
  REQUIRE(v_eff_cyl(phi, 0.0, eta, Q1, 0.0) == Approx(-Q1 * Q1 * std::exp(-eta) / (2 * phi * phi)));
  // the bracket is even under (Q1 <-> Q2, eta -> -eta) at fixed xi, and under
  // (Q2 -> -Q2, xi -> -xi)
  REQUIRE(v_eff_cyl(phi, xi, eta, Q1, Q2) == Approx(v_eff_cyl(phi, xi, -eta, Q2, Q1)));
  REQUIRE(v_eff_cyl(phi, xi, eta, Q1, Q2) == Approx(v_eff_cyl(phi, -xi, eta, Q1, -Q2)));
  REQUIRE(v_eff_cyl(phi, xi, eta, Q1, Q2) != Approx(v_eff_cyl(phi, -xi, -eta, Q2, Q1)));
  REQUIRE(v_eff_cyl(2 * phi, xi, eta, Q1, Q2) == Approx(v_eff_cyl(phi, xi, eta, Q1, Q2) / 4));
  REQUIRE_THROWS_AS(v_eff_cyl(0.0, xi, eta, Q1, Q2), DomainError);
}

TEST_CASE("zero-scalaron limit is pure dilaton gravity", "[model][property]") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  const std::vector<ModelSpec> models = {build_model("d3"), build_model("d4", {{"Lambda", 0.7}}),
                                         build_model("spherical"), build_model("srn", {{"Lambda", -0.3}}),
                                         build_model("srn", {{"D", 6}, {"Lambda", 0.2}})};
  for (const auto& m : models) {
    for (int i = 0; i < 20; ++i) {
      const double phi = u(rng);
      const double nu = m.nu.to_double();
      const double expect = m.k_nu * std::pow(phi, -nu) - 2 * m.Lambda * std::pow(phi, nu);
      INFO(m.name << " phi=" << phi);
      REQUIRE(U_at(m, phi) == Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("massive scalaron kinetic potential", "[model]") {
  for (double m2 : {1.0, -0.4, 3.0}) {
    const auto m = build_d3(-1.0, 1.0, m2);
    for (double phi : {0.2, 1.0, 5.0}) {
      const double zbar = 1.0 / evaluate(m.zbar_inv, {{"phi", phi}});
      REQUIRE(zbar * (-m2 * phi) == Approx(1.0));
    }
  }
  REQUIRE(build_d3(-1.0, 1.0, 0.0).massless());
}

TEST_CASE("catalog construction and overrides", "[model]") {
  REQUIRE(catalog().size() == 9);
  for (const auto& e : catalog()) REQUIRE_NOTHROW(build_model(e.name));
  REQUIRE_THROWS_AS(build_model("nope"), DomainError);
  REQUIRE_THROWS_WITH(build_model("d3", {{"Q", 1.0}}), Catch::Matchers::ContainsSubstring("no parameter"));
  REQUIRE_THROWS_AS(build_model("srn", {{"D", 4.5}}), DomainError);
  const auto m = build_model("d4", {{"Lambda", 2.0}, {"q0", 0.5}});
  REQUIRE(m.Lambda == 2.0);
  REQUIRE(m.param("q0", 0.0) == 0.5);
  const auto j = model_to_json(m);
  REQUIRE(j["name"] == "d4");
  REQUIRE(expr_from_json(j["U"]).str() == m.U.str());
}

TEST_CASE("custom models from JSON", "[model][json]") {
  const auto j = nlohmann::json::parse(R"({"name":"mine",
      "U":{"op":"mul","args":[{"op":"const","value":-2},{"op":"var","name":"phi"}]},
      "Zbar":{"op":"const","value":-1}})");
  const auto m = build_custom(j);
  REQUIRE(m.name == "mine");
  REQUIRE(evaluate(m.U, {{"phi", 3.0}}) == Approx(-6.0));
  REQUIRE(evaluate(m.zbar_inv, {}) == Approx(-1.0));
  auto bad = j;
  bad["U"] = nlohmann::json::parse(R"({"op":"var","name":"x"})");
  REQUIRE_THROWS_WITH(build_custom(bad), Catch::Matchers::ContainsSubstring("variable 'x'"));
  auto extra = j;
  extra["W"] = 1;
  REQUIRE_THROWS_AS(build_custom(extra), DomainError);
}

TEST_CASE("derived kinetic potential for separable models", "[model][separable]") {
  const double g0 = -1.3, c = 0.4;
  for (int a : {0, 1, 2, 3}) {
    const Expr Z = derive_Z(pow(var("phi"), Ratio(a)), g0, c);
    for (double phi : {0.5, 1.0, 2.2}) {
      const double expect = g0 * phi / (a + 1) + g0 * c * std::pow(phi, -a);
      REQUIRE(evaluate(Z, {{"phi", phi}}) == Approx(expect));
      // Z u = g0 (int u + c)
      REQUIRE(evaluate(Z, {{"phi", phi}}) * std::pow(phi, a) ==
              Approx(g0 * (std::pow(phi, a + 1) / (a + 1) + c)));
    }
  }
  REQUIRE(evaluate(derive_Z(cst(1.0), g0, c), {{"phi", 2.0}}) == Approx(g0 * (2.0 + c)));
  REQUIRE_THROWS_AS(derive_Z(pow(var("phi"), -1), g0, c), UnsupportedForm);
}
