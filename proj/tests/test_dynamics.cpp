#include "catch_amalgamated.hpp"
#include "horizonlab/coordinates.hpp"
#include "horizonlab/dynamics.hpp"

using namespace horizonlab;
using Catch::Approx;

TEST_CASE("Schwarzschild tau flow keeps N0 and H fixed", "[dynamics]") {
  // massless: chi = C0 (N0 - N), h = C0 chi; start at phi = 9 with N0 = 8
  const auto m = build_model("d4");
  const auto N = antiderivative_N(m, 0.0);
  const auto s0 = make_tau_state(m, 9.0, 8.0 - N(9.0), 8.0 - N(9.0), 0.0, 0.0);
  const auto tr = integrate_tau(m, s0, 0.0, 6.0);
  REQUIRE(tr.x.size() > 10);
  REQUIRE_FALSE(tr.drift_flagged);
  REQUIRE(tr.max_drift <= 10 * tr.tol);
  for (std::size_t i = 0; i < tr.x.size(); i += 7) {
    const auto& x = tr.x[i];
    REQUIRE(x[kChi] + N(x[kPhi]) == Approx(8.0).epsilon(1e-9));
    REQUIRE(std::fabs(x[kH] - x[kChi]) <= 1e-9);
    // tau(phi) from the coordinate module
    if (std::fabs(x[kPhi] - 4.0) > 1e-6)
      REQUIRE(tau_of_phi_massless(m, 0.0, 8.0, 9.0, x[kPhi], 1.0, 4.0) == Approx(tr.t[i]).epsilon(1e-8));
  }
}

TEST_CASE("horizon event stops the tau flow", "[dynamics]") {
  const auto m = build_model("d4");
  const auto N = antiderivative_N(m, 0.0);
  const double chi = 8.0 - N(4.5);
  TauOptions opt;
  opt.h_event = 1e-3;
  const auto tr = integrate_tau(m, make_tau_state(m, 4.5, chi, chi, 0.0, 0.0), 0.0, 100.0, opt);
  REQUIRE_FALSE(tr.events.empty());
  REQUIRE(tr.events.back().kind == "horizon");
  REQUIRE(tr.t.back() < 100.0);
}

TEST_CASE("linear scalaron flow matches the closed form", "[dynamics][scalaron]") {
  const double gc = 0.7, b = 1.0, q0 = 0.3;
  const auto m = build_linear_scalaron(gc);
  const auto ok = solve_linear_scalaron(gc, b, q0, 0.0, ScalaronSign::Constraint);
  const auto shown = solve_linear_scalaron(gc, b, q0, 0.0, ScalaronSign::Displayed);
  const double h0 = 1.0;
  const double chi0 = -h0 * gc * q0 / b - h0 * h0 * gc * gc / (4 * b * b * b);
  const StateTau s0 = make_tau_state(m, ok.phitilde_of_h(h0), chi0, h0, ok.q_of_h(h0), -h0 * gc / (2 * b));
  REQUIRE(s0[kG] == Approx(b).epsilon(1e-14));
  const auto tr = integrate_tau(m, s0, 0.0, -12.0);
  REQUIRE(tr.max_drift <= 10 * tr.tol);
  for (std::size_t i = 0; i < tr.x.size(); ++i) {
    const auto& x = tr.x[i];
    const double h = ok.h_of_tau(tr.t[i]);
    REQUIRE(std::fabs(x[kH] - h) <= 1e-9);
    REQUIRE(std::fabs(x[kPhi] - ok.phitilde_of_h(h)) <= 1e-9);
    REQUIRE(std::fabs(x[kQ] - ok.q_of_h(h)) <= 1e-9);
  }
  // the displayed sign is off by 2 q0 h g / b^2
  const double h = 0.5;
  REQUIRE(shown.phitilde_of_h(h) - ok.phitilde_of_h(h) == Approx(2 * q0 * h * gc / (b * b)));
}

TEST_CASE("series launch agrees with the phi flow", "[dynamics][series]") {
  const auto m = build_model("d3");
  const auto s = expand<double>(m, 1.0, 1.0, 1.0, 20);
  const auto l = launch_from_horizon(s, 1e-3);
  REQUIRE_FALSE(l.beyond_radius);
  REQUIRE(l.truncation <= 1e-30);
  const auto tr = integrate_phi(m, l.state, 1.05);
  REQUIRE(tr.events.empty());
  const auto& end = tr.x.back();
  REQUIRE(end.phi == Approx(1.05));
  REQUIRE(std::fabs(end.chi - s.chi.evaluate(0.05)) <= 1e-9);
  REQUIRE(std::fabs(end.H - s.H.evaluate(0.05)) <= 1e-9);
  REQUIRE(std::fabs(end.q - s.q.evaluate(0.05)) <= 1e-9);
  REQUIRE(std::fabs(end.P - s.P.evaluate(0.05)) <= 1e-9);

  // and the tau flow from the same point keeps the constraint
  const auto tt = integrate_tau(m, to_tau_state(m, l.state), 0.0, -3.0);
  REQUIRE(tt.max_drift <= 10 * tt.tol);
  REQUIRE(std::isfinite(tt.curvature.front()));
}

TEST_CASE("launch warns beyond the convergence radius", "[dynamics][series]") {
  const auto m = build_model("d4");
  const auto s = expand<double>(m, 4.0, 0.0, 1.0, 16);
  const auto l = launch_from_horizon(s, 3.5);
  REQUIRE(l.beyond_radius);
  REQUIRE_FALSE(l.warning.empty());
  REQUIRE_THROWS_AS(launch_from_horizon(s, 0.0), DomainError);
}

TEST_CASE("dynamics input errors", "[dynamics]") {
  const auto m = build_model("d4");
  REQUIRE_THROWS_AS(make_tau_state(m, 4.0, 0.0, 1.0, 0.0, 0.0), DomainError);
  auto s = make_tau_state(m, 9.0, -4.0, -4.0, 0.0, 0.0);
  s[kG] += 1.0;
  REQUIRE_THROWS_WITH(integrate_tau(m, s, 0.0, 1.0), Catch::Matchers::ContainsSubstring("constraint"));
  auto t = make_tau_state(m, 9.0, -4.0, -4.0, 0.0, 0.0);
  t[kPsi] = 0.3;
  REQUIRE_THROWS_AS(integrate_tau(m, t, 0.0, 1.0), DomainError);
  REQUIRE_THROWS_AS(integrate_phi(m, StatePhi{4.0, 0.0, 1.0, 0.0, 0.0}, 5.0), DomainError);
}

TEST_CASE("flow toward phi = 0 reports where the potential fails", "[dynamics]") {
  // N0 = -1: chi = -1 - 4 sqrt(phi) has no root and phi reaches 0 at finite tau
  const auto m = build_model("d4");
  const auto N = antiderivative_N(m, 0.0);
  const double chi = -1.0 - N(1.0);
  const auto tr = integrate_tau(m, make_tau_state(m, 1.0, chi, chi, 0.0, 0.0), 0.0, 50.0);
  REQUIRE_FALSE(tr.events.empty());
  REQUIRE(tr.events.back().kind != "horizon");
  REQUIRE(tr.t.back() < 50.0);
  REQUIRE(tr.x.back()[kPhi] < 1e-3);
}
