#include <random>

#include "catch_amalgamated.hpp"
#include "horizonlab/horizons.hpp"

using namespace horizonlab;
using Catch::Approx;

TEST_CASE("antiderivative of the potential", "[horizons]") {
  const double Lambda = 0.4, q0 = 0.9;
  const auto m = build_srn(4, Lambda, 1);
  const auto N = antiderivative_N(m, q0);
  REQUIRE(N.symbolic());
  for (double phi : {0.2, 1.0, 6.0}) {
    const double expect =
        4 * std::sqrt(phi) - 4.0 / 3 * Lambda * std::pow(phi, 1.5) + 2 * q0 * q0 / std::sqrt(phi);
    REQUIRE(N(phi) == Approx(expect).epsilon(1e-14));
    // N' = U
    const double d = (N(phi * (1 + 1e-6)) - N(phi * (1 - 1e-6))) / (2e-6 * phi);
    REQUIRE(d == Approx(N.U_at(phi)).epsilon(1e-8));
  }
  const auto cyl = antiderivative_N(build_cyl3(1.5), 0.0);
  REQUIRE(cyl(2.0) == Approx(4 * 2.25 / 4.0));
  const NFunction zero(cst(0.0));
  REQUIRE(zero(1.0) == zero(7.0));

  // quadrature fallback for the branch-point potential
  const auto s = antiderivative_N(build_singular_sqrt(-1.0, 1.0), 0.0);
  REQUIRE_FALSE(s.symbolic());
  const double a = 2.0, b = 3.0;
  auto F = [](double x) { return x * std::sqrt(x * x - 1) - std::acosh(x); };  // int 2 sqrt(x^2-1)
  REQUIRE(s.integral(a, b) == Approx(F(b) - F(a)).epsilon(1e-12));
}

TEST_CASE("Schwarzschild horizon", "[horizons]") {
  const auto m = build_model("d4");
  for (double N0 : {2.0, 8.0, 13.0}) {
    const auto hs = find_horizons(m, N0, 0.01, 100.0);
    REQUIRE(hs.size() == 1);
    REQUIRE(hs[0].phi0 == Approx(N0 * N0 / 16).epsilon(1e-13));
    REQUIRE(hs[0].multiplicity == 1);
    REQUIRE(hs[0].regularity == Regularity::Regular);
    REQUIRE(hs[0].residual <= 1e-12 * std::max(1.0, N0));
  }
  REQUIRE(find_horizons(m, 1e6, 0.01, 100.0).empty());
}

TEST_CASE("RN horizons merge into an extremal double root", "[horizons]") {
  const auto m = build_srn(4, 0.0, 1);
  const double q0 = 1.2;
  HorizonOptions opt;
  opt.q0 = q0;
  const double pe = q0 * q0 / 2;
  const double Ne = 4 * std::sqrt(pe) + 2 * q0 * q0 / std::sqrt(pe);
  auto two = find_horizons(m, Ne * 1.01, 0.01, 100.0, opt);
  REQUIRE(two.size() == 2);
  REQUIRE(two[0].multiplicity == 1);
  REQUIRE(two[1].multiplicity == 1);
  REQUIRE(find_horizons(m, Ne * 0.99, 0.01, 100.0, opt).empty());
  auto one = find_horizons(m, Ne, 0.01, 100.0, opt);
  REQUIRE(one.size() == 1);
  REQUIRE(one[0].phi0 == Approx(pe).epsilon(1e-10));
  REQUIRE(one[0].multiplicity == 2);
}

TEST_CASE("triple-degenerate point", "[horizons]") {
  for (double q0 : {0.5, 1.0, 2.3}) {
    const auto tp = triple_degenerate(4, 1, q0);
    REQUIRE(tp.phi0 == Approx(q0 * q0).epsilon(1e-10));
    REQUIRE(std::fabs(2 * tp.Lambda * q0 * q0 - 1) <= 1e-10);
    REQUIRE(std::fabs(tp.relation_lhs) == Approx(tp.relation_rhs).epsilon(1e-10));
    const auto m = build_srn(4, tp.Lambda, 1);
    HorizonOptions opt;
    opt.q0 = q0;
    HorizonRecord rec;
    rec.phi0 = tp.phi0;
    rec.N0 = antiderivative_N(m, q0)(tp.phi0);
    REQUIRE(classify_multiplicity(m, rec, opt).multiplicity == 3);

    // splitting: nearby Lambda and N0 give three simple horizons
    const auto mp = build_srn(4, tp.Lambda * 0.98, 1);
    const auto Np = antiderivative_N(mp, q0);
    const auto crit = double_degenerate_points(mp, q0, 0.05 * q0 * q0, 20 * q0 * q0);
    REQUIRE(crit.size() == 2);
    const double N0 = 0.5 * (crit[0].N0 + crit[1].N0);
    auto hs = find_horizons(mp, N0, 0.05 * q0 * q0, 20 * q0 * q0, opt);
    REQUIRE(hs.size() == 3);
    for (const auto& h : hs) REQUIRE(h.multiplicity == 1);
    (void)Np;
  }
}

TEST_CASE("leading exponents", "[horizons]") {
  // simple
  const auto sch = build_model("d4");
  auto f1 = singular_horizon_probe(sch, 4.0);
  REQUIRE(f1.exponent == Approx(1.0).margin(0.01));
  // double degenerate
  const double q0 = 1.0;
  auto f2 = singular_horizon_probe(build_srn(4, 0.0, 1), q0 * q0 / 2, q0);
  REQUIRE(f2.exponent == Approx(2.0).margin(0.01));
  // branch point of sqrt(phi^2 - q_r^2)
  const auto sq = build_singular_sqrt(-1.0, 1.0);
  auto f3 = singular_horizon_probe(sq, 1.0, 0.0, +1);
  REQUIRE_FALSE(f3.analytic);
  REQUIRE(f3.exponent == Approx(1.5).margin(0.01));
  HorizonRecord rec;
  rec.phi0 = 1.0;
  REQUIRE(classify_multiplicity(sq, rec).regularity == Regularity::Singular);
}

TEST_CASE("metric from N", "[horizons]") {
  const auto m = build_model("d4");
  const double N0 = 8.0;
  for (double phi : {0.5, 2.0, 9.0}) {
    const auto p = metric_from_N(m, 0.0, N0, phi);
    REQUIRE(p.h == Approx(N0 - 4 * std::sqrt(phi)));
    REQUIRE(p.tau_integrand == Approx(1 / (N0 - 4 * std::sqrt(phi))));
  }
  REQUIRE_THROWS_AS(metric_from_N(m, 0.0, N0, 4.0), DomainError);

  // d ln h / d phi = -U/(N0 - N)
  const auto rn = build_srn(4, 0.1, 1);
  const auto N = antiderivative_N(rn, 0.5);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.5, 3.0);
  for (int i = 0; i < 10; ++i) {
    const double phi = u(rng), d = 1e-5;
    const double lp = std::log(std::fabs(metric_from_N(rn, 0.5, 9.0, phi + d).h));
    const double lm = std::log(std::fabs(metric_from_N(rn, 0.5, 9.0, phi - d).h));
    REQUIRE((lp - lm) / (2 * d) == Approx(-N.U_at(phi) / (9.0 - N(phi))).epsilon(1e-7));
  }
}

TEST_CASE("h changes sign across odd horizons only", "[horizons]") {
  const auto m = build_srn(4, 0.0, 1);
  const double q0 = 1.0, pe = 0.5, Ne = 4 * std::sqrt(pe) + 2 / std::sqrt(pe);
  auto sgn = [&](double N0, double phi) { return metric_from_N(m, q0, N0, phi).h > 0; };
  HorizonOptions opt;
  opt.q0 = q0;
  for (const auto& r : find_horizons(m, Ne + 0.3, 0.01, 50.0, opt))
    REQUIRE(sgn(Ne + 0.3, r.phi0 * 0.999) != sgn(Ne + 0.3, r.phi0 * 1.001));
  REQUIRE(sgn(Ne, pe * 0.99) == sgn(Ne, pe * 1.01));
}
