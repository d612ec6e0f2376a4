#include "catch_amalgamated.hpp"
#include "horizonlab/coordinates.hpp"

using namespace horizonlab;
using Catch::Approx;

TEST_CASE("tau of phi away from horizons", "[coordinates]") {
  // chi = 2 + phi: tau = ln((2 + b)/(2 + a))
  auto chi = [](double x) { return 2.0 + x; };
  REQUIRE(tau_of_phi(chi, 0.0, 3.0) == Approx(std::log(2.5)).epsilon(1e-12));
  REQUIRE(tau_of_phi(chi, 3.0, 0.0) == Approx(-std::log(2.5)).epsilon(1e-12));
  REQUIRE(tau_of_phi(chi, 1.0, 1.0) == 0.0);
  REQUIRE_THROWS_AS(tau_of_phi(chi, -3.0, 1.0), DomainError);
}

TEST_CASE("tau of phi near a horizon uses the logarithmic split", "[coordinates]") {
  // Schwarzschild D=4, N0 = 8: chi = 8 - 4 sqrt(phi), phi0 = 4, chi1 = -1
  const auto m = build_model("d4");
  auto exact = [](double a, double b) {
    // int dphi/(8 - 4 sqrt(phi)) with s = sqrt(phi): -s/2 - ln|2 - s|
    auto F = [](double p) {
      const double s = std::sqrt(p);
      // 2 - s = (4 - p)/(2 + s) keeps the log accurate next to the horizon
      return -s / 2 - std::log(std::fabs(4 - p)) + std::log(2 + s);
    };
    return F(b) - F(a);
  };
  for (auto [a, b] : {std::pair{4.0 + 1e-9, 5.0}, {4.0 + 1e-4, 9.0}, {1.0, 4.0 - 1e-7}, {0.5, 3.0}}) {
    const double t = tau_of_phi_massless(m, 0.0, 8.0, a, b, 1.0, 4.0);
    INFO(a << " " << b);
    REQUIRE(std::fabs(t - exact(a, b)) <= 1e-10 * std::max(1.0, std::fabs(t)));
    const double back = tau_of_phi_massless(m, 0.0, 8.0, b, a, 1.0, 4.0);
    REQUIRE(back == Approx(-t).epsilon(1e-13));
  }
  REQUIRE_THROWS_AS(tau_of_phi_massless(m, 0.0, 8.0, 3.0, 5.0), DomainError);
}

TEST_CASE("tau from a near-horizon series", "[coordinates]") {
  const auto m = build_model("d4");
  const auto s = expand<double>(m, 4.0, 0.0, 1.0, 20);
  const double t = tau_of_phi(s, 4.0 + 1e-6, 4.5);
  const double ref = tau_of_phi_massless(m, 0.0, 8.0, 4.0 + 1e-6, 4.5, 1.0, 4.0);
  REQUIRE(t == Approx(ref).epsilon(1e-9));
}

TEST_CASE("SK chart series of the worked example", "[coordinates][sk]") {
  const auto s = expand<double>(build_model("d3"), 1.0, 1.0, 1.0, 10);
  const auto c = sk_chart(s);
  REQUIRE(c.chi1 == Approx(-3.0));
  REQUIRE(c.ab_series[0] == Approx(1.0));
  // -(1/U0)(1 + (U_phi/U0) phi~) with U0 = 3, U_phi = 1
  REQUIRE(c.h_sk_series[0] == Approx(-1.0 / 3).epsilon(1e-13));
  REQUIRE(c.h_sk_series[1] == Approx(-1.0 / 9).epsilon(1e-12));
  // ab / phi~ = exp(-(chi2/chi1) phi~ + ...)
  REQUIRE(c.ab_series[1] == Approx(-s.chi[2] / s.chi[1]).epsilon(1e-13));
}

TEST_CASE("SK chart rejects degenerate horizons", "[coordinates][sk]") {
  const auto m = build_srn(4, 0.0, 1);
  const double q0 = 1.2, pe = q0 * q0 / 2;
  const auto s = expand<double>(m, pe, q0, 1.0, 8);
  REQUIRE(s.chi[1] == Approx(0.0).margin(1e-14));
  REQUIRE_THROWS_WITH(sk_chart(s), Catch::Matchers::ContainsSubstring("degenerate horizon"));
}

TEST_CASE("massless SK closed form agrees with the series", "[coordinates][sk]") {
  struct Case {
    ModelSpec m;
    double q0, phi0;
  };
  std::vector<Case> cases = {{build_model("d4"), 0.0, 4.0},
                             {build_srn(4, 0.0, 1), 0.8, 2.5},
                             {build_srn(4, -0.3, 1), 0.5, 1.7},
                             {build_srn(5, 0.2, 1), 0.4, 1.3}};
  for (const auto& c : cases) {
    const auto s = expand<double>(c.m, c.phi0, c.q0, 1.0, 16);
    const auto chart = sk_chart(s);
    const double U0 = antiderivative_N(c.m, c.q0).U_at(c.phi0);
    auto f = [&](double t) { return sk_closed_form_massless(c.m, c.q0, c.phi0, c.phi0 + t); };
    const auto t = taylor01(f, 1e-3);
    INFO(c.m.name << " phi0=" << c.phi0);
    REQUIRE(f(0.0) == Approx(-1.0 / U0));
    REQUIRE(std::fabs(t.c0 - chart.h_sk_series[0]) <= 1e-9);
    REQUIRE(std::fabs(t.c1 - chart.h_sk_series[1]) <= 1e-9);
  }
}

TEST_CASE("SK closed form is finite between RN horizons", "[coordinates][sk]") {
  const auto m = build_srn(4, 0.0, 1);
  const double q0 = 1.0;
  // N = 4 sqrt(phi) + 2/sqrt(phi); N0 = 6.5 gives sqrt(phi) = 1/2 and 1.125... roots
  const auto hs = find_horizons(m, 6.5, 0.01, 100.0, HorizonOptions{q0});
  REQUIRE(hs.size() == 2);
  const double mid = 0.5 * (hs[0].phi0 + hs[1].phi0);
  const double v = sk_closed_form_massless(m, q0, hs[0].phi0, mid);
  REQUIRE(std::isfinite(v));
}

TEST_CASE("Schwarzschild form of the metric", "[coordinates]") {
  const auto m = build_model("d4");
  for (double N0 : {2.0, 8.0}) {
    for (double r : {0.5, 1.0, 3.0}) {
      const auto p = schwarzschild_metric(m, 0.0, N0, r);
      REQUIRE(p.chi_s == Approx(N0 / (2 * r) - 2.0));
      REQUIRE(p.H_s == 1.0);
    }
  }
  // with Lambda, k and charge: N0/(2r) - 2k + (2 Lambda/3) r^2 - q0^2/r^2
  const double Lambda = 0.3, q0 = 0.7, N0 = 5.0;
  const auto rn = build_srn(4, Lambda, 1);
  for (double r : {0.6, 1.4, 2.0}) {
    const auto p = schwarzschild_metric(rn, q0, N0, r);
    REQUIRE(p.chi_s == Approx(N0 / (2 * r) - 2 + 2 * Lambda / 3 * r * r - q0 * q0 / (r * r)).epsilon(1e-12));
  }
  REQUIRE(schwarzschild_metric(m, 0.0, 8.0, 2.0).chi_s == Approx(0.0).margin(1e-14));
  REQUIRE_THROWS_AS(schwarzschild_metric(m, 0.0, 8.0, 0.0), DomainError);

  const auto s = expand<double>(m, 4.0, 0.0, 1.0, 16);
  const auto p = schwarzschild_metric(4, s, 2.05);
  REQUIRE(p.chi_s == Approx(8.0 / (2 * 2.05) - 2.0).epsilon(1e-10));
}

TEST_CASE("light-cone conventions", "[coordinates]") {
  REQUIRE(eps_of(-0.2) == -1);
  REQUIRE(eps_of(3.0) == 1);
  REQUIRE_THROWS_AS(eps_of(0.0), DomainError);
  for (int eps : {-1, 1}) {
    const TR p{1.3, -0.4};
    const auto back = to_tr(to_uv(p, eps), eps);
    REQUIRE(back.t == Approx(p.t));
    REQUIRE(back.r == Approx(p.r));
  }
}
