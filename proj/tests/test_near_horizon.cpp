#include <random>

#include "catch_amalgamated.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/near_horizon.hpp"

using namespace horizonlab;
using Catch::Approx;

namespace {

// U = phi - 1 - q^2/2 (plus extra), Zbar^-1 = -phi: rational potentials with a
// double zero structure at (phi0, q0) = (1, 0).
ModelSpec toy(const Expr& U) {
  ModelSpec m;
  m.name = "toy";
  m.U = U;
  m.zbar_inv = -1.0 * var("phi");
  return m;
}

double U0_of(const ModelSpec& m, double phi, double q) { return evaluate(m.frozen_U(q), {{"phi", phi}}); }

}  // namespace

TEST_CASE("D=3 worked example in exact arithmetic", "[near_horizon][exact]") {
  const auto m = build_d3(-1.0, 1.0, 1.0);
  const auto s = expand<Exact>(m, Exact(1), Exact(1), Exact(1), 2);
  REQUIRE(s.branch == Branch::Regular);
  REQUIRE(s.chi[0] == 0);
  REQUIRE(s.chi[1] == Exact(-3));
  REQUIRE(s.P[0] == Exact(1, 3));
  REQUIRE(s.q[1] == Exact(-1, 3));
  REQUIRE(s.chi[2] == Exact(-1, 3));
  REQUIRE(s.h[0] == 0);
  REQUIRE(s.h[1] == Exact(-3));
  REQUIRE(s.h[2] == Exact(-2, 3));
  // h2 = H0 chi2 + H1 chi1 fixes H1 from the two values above
  const Exact H1 = (Exact(-2, 3) - Exact(-1, 3)) / Exact(-3);
  REQUIRE(H1 == Exact(1, 9));
  REQUIRE(s.H[1] == H1);
}

TEST_CASE("order-2 coefficients match the closed expressions", "[near_horizon]") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int t = 0; t < 10; ++t) {
    const auto m = build_spherical(4, -u(rng), u(rng), u(rng), 1);
    const double phi0 = u(rng), q0 = u(rng) - 1.0, H0 = u(rng);
    const auto s = expand(m, phi0, q0, H0, 4);
    const Bindings b{{"phi", phi0}, {"q", q0}};
    const double U = evaluate(m.U, b), Uq = evaluate(m.U_q(), b), Uphi = evaluate(m.U_phi(), b);
    const double zi = evaluate(m.zbar_inv, b);
    const double P0 = Uq / (2 * U);
    REQUIRE(s.chi[1] == Approx(-U * H0).epsilon(1e-14));
    REQUIRE(s.P[0] == Approx(P0).epsilon(1e-14));
    REQUIRE(s.q[1] == Approx(zi * P0).epsilon(1e-14));
    REQUIRE(s.chi[2] == Approx(-0.5 * (Uphi + U * P0 * P0 * zi) * H0).epsilon(1e-12));
    REQUIRE(s.h[2] == Approx(-0.5 * (Uphi - U * P0 * P0 * zi) * H0 * H0).epsilon(1e-12));
  }
}

TEST_CASE("zero charge switches the scalaron off", "[near_horizon]") {
  const auto s = init_quadruple(build_d3(-1.0, 1.0, 1.0), 1.3, 0.0, 0.7);
  REQUIRE(s.P[0] == 0.0);
  REQUIRE(s.q[1] == 0.0);
  REQUIRE(s.H[1] == 0.0);
}

TEST_CASE("linear in H0", "[near_horizon]") {
  const auto m = build_d3(-1.0, 1.0, 1.0);
  const auto a = init_quadruple(m, 1.2, 0.8, 1.0);
  const auto b = init_quadruple(m, 1.2, 0.8, 2.5);
  REQUIRE(b.chi[1] == Approx(2.5 * a.chi[1]));
  REQUIRE(b.H[1] == Approx(2.5 * a.H[1]));
  REQUIRE(b.P[0] == Approx(a.P[0]));
  REQUIRE(b.q[1] == Approx(a.q[1]));
}

TEST_CASE("residual closure on random data", "[near_horizon][property]") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  for (int t = 0; t < 10; ++t) {
    const auto m3 = build_d3(-u(rng), u(rng), u(rng));
    const auto s3 = expand(m3, u(rng), u(rng) - 1.0, u(rng), 16);
    REQUIRE(residual(m3, s3).worst <= 1e-10);
    const auto m4 = build_spherical(4, u(rng), u(rng), -u(rng), 1);
    const auto s4 = expand(m4, u(rng), u(rng) - 1.0, u(rng), 16);
    REQUIRE(residual(m4, s4).worst <= 1e-10);
  }
  // exact mode: identically zero
  const auto m = build_d3(-2.0, 1.0, 3.0);
  const auto s = expand<Exact>(m, Exact(3, 2), Exact(1, 2), Exact(2), 10);
  REQUIRE(residual(m, s).exact_zero);
}

TEST_CASE("residual flags a perturbed coefficient", "[near_horizon]") {
  const auto m = build_d3(-1.0, 1.0, 1.0);
  auto s = expand(m, 1.0, 1.0, 1.0, 8);
  REQUIRE(residual(m, s).worst <= 1e-12);
  s.q[4] += 1e-3;
  const auto r = residual(m, s);
  REQUIRE(r.max_scaled[0] > 1e-6);
  // q' carries q4 at order 3; lower orders are untouched
  for (int n = 0; n < 3; ++n) REQUIRE(std::fabs(r.equations[0][n]) < 1e-14);
  REQUIRE(r.equations[0][3] == Approx(4e-3).epsilon(1e-6));

  // an independently chosen P0 breaks the system at order 0
  auto t = expand(m, 1.0, 1.0, 1.0, 8);
  t.P[0] += 0.1;
  REQUIRE(residual(m, t).max_scaled[1] > 1e-3);
}

TEST_CASE("massless expansion is the Taylor series of N0 - N", "[near_horizon]") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0.2, 1.5);
  for (int t = 0; t < 5; ++t) {
    const int D = 4 + t % 3;
    const auto m = build_srn(D, u(rng) - 0.8, 1);
    const double phi0 = 2 * u(rng), q0 = u(rng), H0 = u(rng);
    const auto s = expand(m, phi0, q0, H0, 12);
    REQUIRE(s.branch == Branch::Massless);
    const Expr N = antiderivative(m.frozen_U(q0), "phi");
    const auto Ns = evaluate_series<double>(N, {{"phi", Series<double>::identity(phi0, 12)}});
    for (int n = 1; n <= 12; ++n) {
      INFO("D=" << D << " n=" << n);
      REQUIRE(s.h[n] == Approx(-H0 * H0 * Ns[n]).epsilon(1e-12).margin(1e-14));
      REQUIRE(s.q[n] == 0.0);
      REQUIRE(s.H[n] == 0.0);
    }
  }
}

TEST_CASE("double-degenerate branch", "[near_horizon][degenerate]") {
  // D=4 S-RN-Lambda with a massive scalaron, q0 = 0, U(phi0) = 0 at phi0 = 1/Lambda
  const double Lambda = 0.5;
  const auto m = build_srn(4, Lambda, 1, 1.0);
  const double phi0 = 1 / Lambda;
  REQUIRE(std::fabs(U0_of(m, phi0, 0.0)) < 1e-14);
  const auto s = expand(m, phi0, 0.0, 1.3, 12);
  REQUIRE(s.branch == Branch::Degenerate);
  REQUIRE(std::fabs(s.h[1]) < 1e-14);
  REQUIRE(std::fabs(s.h[2]) > 1e-3);
  REQUIRE(residual(m, s).worst <= 1e-10);

  // off the locus the regular branch takes over with a small chi1
  const auto r = expand(m, phi0 * (1 + 1e-4), 0.0, 1.3, 8);
  REQUIRE(r.branch == Branch::Regular);
  REQUIRE(std::fabs(r.chi[1]) < 1e-3);
  REQUIRE(r.chi[2] == Approx(s.chi[2]).epsilon(1e-3));

  // massless degenerate: Taylor series of N0 - N with N'(phi0) = 0
  const auto ml = expand(build_srn(4, Lambda, 1), phi0, 0.0, 1.0, 6);
  REQUIRE(ml.h[1] == Approx(0.0).margin(1e-14));
  REQUIRE(ml.h[2] == Approx(-0.5 * evaluate(build_srn(4, Lambda, 1).U_phi(), {{"phi", phi0}, {"q", 0.0}})));
}

TEST_CASE("degenerate branch in exact arithmetic", "[near_horizon][degenerate][exact]") {
  const Expr phi = var("phi"), q = var("q");
  const auto m = toy(phi - 1.0 - 0.5 * pow(q, 2) + 0.5 * pow(phi - 1.0, 2) * q);
  const auto s = expand<Exact>(m, Exact(1), Exact(0), Exact(1), 8);
  REQUIRE(s.branch == Branch::Degenerate);
  REQUIRE(s.chi[1] == 0);
  REQUIRE(s.chi[2] == Exact(-1, 2));
  REQUIRE(residual(m, s).exact_zero);

  // U_qq Zbar^-1 = (n+1)(n+2) U_phi makes P_n undetermined (a resonance)
  REQUIRE_THROWS_WITH(expand<Exact>(toy(phi - 1.0 - pow(q, 2)), Exact(1), Exact(0), Exact(1), 4),
                      Catch::Matchers::ContainsSubstring("P_0 undetermined"));
}

TEST_CASE("degenerate error paths", "[near_horizon][degenerate]") {
  const Expr phi = var("phi"), q = var("q");
  REQUIRE_THROWS_WITH(expand(toy(pow(phi - 1.0, 2) - pow(q, 2)), 1.0, 0.0, 1.0, 4),
                      Catch::Matchers::ContainsSubstring("higher degeneracy"));
  REQUIRE_THROWS_WITH(expand(toy(phi - 1.0 + q), 1.0, 0.0, 1.0, 4),
                      Catch::Matchers::ContainsSubstring("no regular expansion"));
  REQUIRE_THROWS_AS(expand(build_d3(-1.0, 1.0, 1.0), 1.0, 1.0, 0.0, 4), DomainError);
}

TEST_CASE("zero padding never reaches lower orders", "[near_horizon]") {
  const auto m = build_spherical(4, 1.0, 1.0, 1.0, 1);
  const auto pot = Potentials::from(m);
  const std::vector<double> q{0.7, -0.2, 0.05};
  const auto short_ = detail::expand_potential(pot.U, 1.4, q, 6);
  auto longer = q;
  for (double c : {0.3, -1.1, 0.9, 2.0}) longer.push_back(c);
  const auto full = detail::expand_potential(pot.U, 1.4, longer, 6);
  for (int n = 0; n <= 2; ++n) REQUIRE(short_[n] == full[n]);
  REQUIRE(short_[3] != full[3]);
}

TEST_CASE("extend_to_order keeps lower coefficients", "[near_horizon]") {
  const auto m = build_d3(-1.0, 1.0, 1.0);
  const auto a = expand(m, 1.1, 0.6, 0.9, 6);
  const auto b = extend_to_order(m, a, 12);
  for (int n = 0; n <= 6; ++n) {
    REQUIRE(b.chi[n] == a.chi[n]);
    REQUIRE(b.P[n] == a.P[n]);
  }
  REQUIRE(to_json(b)["chi"].size() == 13);
}

TEST_CASE("integrable linear scalaron", "[near_horizon][linear]") {
  const auto ls = solve_linear_scalaron(2.0, 1.0, 1.0, 0.0);
  REQUIRE(ls.q_of_h(1.0) == Approx(2.0));
  REQUIRE(ls.phitilde_of_h(1.0) == Approx(1.5));
  for (double h : {1e-4, 0.01, 0.3})
    REQUIRE(ls.h_of_phitilde(ls.phitilde_of_h(h)) == Approx(h).epsilon(1e-12));
  // simple horizon: d phi~/dh = q0 g/b^2 at h = 0
  REQUIRE(ls.phitilde_of_h(1e-8) / 1e-8 == Approx(2.0).epsilon(1e-6));

  const auto z = solve_linear_scalaron(2.0, 1.0, 0.0, 0.0);
  REQUIRE(z.phitilde_of_h(0.1) == Approx(-0.005));
  REQUIRE(z.h_of_phitilde(-0.005) == Approx(0.1));
  REQUIRE_THROWS_AS(z.h_of_phitilde(0.01), DomainError);
  REQUIRE_THROWS_AS(solve_linear_scalaron(2.0, 0.0, 1.0, 0.0), DomainError);
  REQUIRE(z.tau_of_h(z.h_of_tau(0.7)) == Approx(0.7));

  const auto c = solve_linear_scalaron(2.0, 1.0, 1.0, 0.0, ScalaronSign::Constraint);
  REQUIRE(c.phitilde_of_h(1.0) == Approx(-2.5));
}
