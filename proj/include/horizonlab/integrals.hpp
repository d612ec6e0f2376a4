#pragma once

// Additional integral of motion for separable potentials and the
// topological portrait w(h; delta).

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "horizonlab/dynamics.hpp"
#include "horizonlab/errors.hpp"
#include "horizonlab/model.hpp"
#include "horizonlab/numerics.hpp"
#include "horizonlab/parallel.hpp"

namespace horizonlab {

// Max |Z u - g0 (int u + c)| over random phi in [lo, hi]; int u is taken by
// quadrature from lo so the constant is compared through differences.
inline double derived_Z_defect(const Expr& u, const Expr& Z, double g0, double lo, double hi, unsigned seed = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pick(lo, hi);
  auto Zu = [&](double p) { return evaluate(Z, {{"phi", p}}) * evaluate(u, {{"phi", p}}); };
  double worst = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double a = pick(rng), b = pick(rng);
    const double iu = quad([&](double p) { return evaluate(u, {{"phi", p}}); }, a, b).value;
    worst = std::max(worst, std::fabs((Zu(b) - Zu(a)) - g0 * iu));
  }
  return worst;
}

inline double kinetic_Z(const ModelSpec& m, double phi) {
  if (!m.Z) throw DomainError("model '" + m.name + "' has no kinetic potential Z");
  return evaluate(*m.Z, {{"phi", phi}});
}

// Z hdot/h - g1 phidot with hdot/h = g and phidot = chi.
inline double integral_value(const ModelSpec& m, const StateTau& x, double g1) {
  if (x[kH] == 0.0) throw DomainError("integral has a pole at h = 0");
  return kinetic_Z(m, x[kPhi]) * x[kG] - g1 * x[kChi];
}

inline double fit_g1(const ModelSpec& m, const StateTau& a, const StateTau& b) {
  if (a[kChi] == b[kChi]) throw DomainError("g1 fit needs two samples with different phidot");
  return (kinetic_Z(m, a[kPhi]) * a[kG] - kinetic_Z(m, b[kPhi]) * b[kG]) / (a[kChi] - b[kChi]);
}

struct ConservationReport {
  double g1 = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  double max_dev = 0.0;
  std::size_t samples = 0;
  std::size_t fit_i = 0, fit_j = 0;
  double tol = 0.0;
  bool ok = false;  // stddev <= 10 tol
};

// g1 from the first sample and the first later one whose phidot differs by
// more than 1%.
inline ConservationReport conservation_report(const ModelSpec& m, const std::vector<StateTau>& xs, double tol) {
  if (xs.size() < 3) throw DomainError("conservation check needs at least 3 samples");
  ConservationReport r;
  r.tol = tol;
  const double c0 = xs.front()[kChi];
  std::size_t j = 1;
  while (j + 1 < xs.size() && std::fabs(xs[j][kChi] - c0) <= 1e-2 * std::max(1.0, std::fabs(c0))) ++j;
  r.fit_j = j;
  r.g1 = fit_g1(m, xs.front(), xs[j]);
  std::vector<double> v;
  for (const auto& x : xs) v.push_back(integral_value(m, x, r.g1));
  double s = 0.0;
  for (double x : v) s += x;
  r.mean = s / v.size();
  double ss = 0.0;
  for (double x : v) {
    ss += (x - r.mean) * (x - r.mean);
    r.max_dev = std::max(r.max_dev, std::fabs(x - r.mean));
  }
  r.stddev = std::sqrt(ss / v.size());
  r.samples = v.size();
  r.ok = r.stddev <= 10 * tol;
  return r;
}

inline nlohmann::json to_json(const ConservationReport& r) {
  return {{"g1", r.g1},         {"mean", r.mean},   {"stddev", r.stddev}, {"max_dev", r.max_dev},
          {"samples", r.samples}, {"fit_samples", {r.fit_i, r.fit_j}}, {"tol", r.tol}, {"ok", r.ok}};
}

// ---------------------------------------------------------------------------
// Portrait: w = |h|^delta / |1 + eps |h|^(1 + 2 delta)|, eps = sign(h).

enum class PortraitBranch { Static, Cosmological };

inline const char* to_string(PortraitBranch b) { return b == PortraitBranch::Static ? "static" : "cosmological"; }

inline void require_delta(double delta) {
  if (!(delta >= -0.5)) throw DomainError("portrait needs delta >= -1/2 (got " + std::to_string(delta) + ")");
}

inline double portrait_w(double h, double delta) {
  require_delta(delta);
  if (h == 0.0) throw DomainError("portrait formula is singular at h = 0");
  const double a = std::fabs(h);
  const double eps = h > 0 ? 1.0 : -1.0;
  const double den = std::fabs(1.0 + eps * std::pow(a, 1.0 + 2.0 * delta));
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(a, delta) / den;
}

struct PortraitSample {
  double h = 0.0, w = 0.0;
};

struct PortraitCurve {
  double delta = 0.0;
  PortraitBranch branch = PortraitBranch::Cosmological;
  std::vector<PortraitSample> samples;
  std::vector<double> poles;  // grid points dropped because w is infinite
  bool pole_everywhere = false;
};

inline std::vector<double> default_portrait_grid(PortraitBranch b, int n = 400) {
  std::vector<double> g;
  if (b == PortraitBranch::Cosmological) {
    for (double x : log_grid(1e-6, 1e6, n)) g.push_back(x);
  } else {
    // h = -1 + (1 - s) with s running log-spaced toward both ends
    for (double s : log_grid(1e-6, 0.5, n / 2)) g.push_back(-s);
    for (double s : log_grid(1e-6, 0.5, n / 2)) g.push_back(-1.0 + s);
    g.push_back(-1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return g;
}

inline PortraitCurve portrait_curve(double delta, PortraitBranch branch, const std::vector<double>& h_grid) {
  require_delta(delta);
  PortraitCurve c;
  c.delta = delta;
  c.branch = branch;
  c.pole_everywhere = branch == PortraitBranch::Static && delta == -0.5;
  for (double h : h_grid) {
    const bool ok = branch == PortraitBranch::Static ? (h >= -1.0 && h < 0.0) : h > 0.0;
    if (!ok)
      throw DomainError("h = " + std::to_string(h) + " is outside the " + to_string(branch) + " branch");
    const double w = portrait_w(h, delta);
    if (!std::isfinite(w) || c.pole_everywhere) {
      c.poles.push_back(h);
      continue;
    }
    c.samples.push_back({h, w});
  }
  return c;
}

// Curves for several delta values, computed concurrently, in input order.
inline std::vector<PortraitCurve> portrait_family(const std::vector<double>& deltas, int grid = 400) {
  struct Job {
    double delta;
    PortraitBranch branch;
  };
  std::vector<Job> jobs;
  for (double d : deltas) {
    require_delta(d);
    jobs.push_back({d, PortraitBranch::Static});
    jobs.push_back({d, PortraitBranch::Cosmological});
  }
  return parallel_map(jobs, [grid](const Job& j) {
    return portrait_curve(j.delta, j.branch, default_portrait_grid(j.branch, grid));
  });
}

struct SingularPoint {
  int id = 0;
  double h = 0.0, w = 0.0;  // infinities as +inf
  PortraitBranch branch = PortraitBranch::Cosmological;
  std::string approach;
  std::string tag;
};

// Limits of the delta-curve. As h -> 0, w |h|^-delta -> 1.
inline std::vector<SingularPoint> singular_points(double delta) {
  require_delta(delta);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<SingularPoint> out;
  auto near_zero = [&](PortraitBranch b) {
    const std::string dir = b == PortraitBranch::Static ? "h -> 0-" : "h -> 0+";
    if (delta > 0) out.push_back({0, 0.0, 0.0, b, dir, "node (initial singularity)"});
    else if (delta == 0) out.push_back({1, 0.0, 1.0, b, dir, "saddle (horizon)"});
    else out.push_back({4, 0.0, inf, b, dir, "limit"});
  };
  const bool static_live = delta > -0.5;
  if (static_live) {
    near_zero(PortraitBranch::Static);
    out.push_back({2, -1.0, inf, PortraitBranch::Static, "h -> -1+", "pole of the static branch"});
  }
  near_zero(PortraitBranch::Cosmological);
  out.push_back({3, 1.0, 0.5, PortraitBranch::Cosmological, "h = 1", "common point of all cosmological curves"});
  out.push_back({5, inf, 0.0, PortraitBranch::Cosmological, "h -> +inf", "limit"});
  return out;
}

inline std::string portrait_csv_header() { return "delta,branch,h,w,flags"; }

inline std::string format17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << std::scientific << v;
  return os.str();
}

inline std::string portrait_csv(const std::vector<PortraitCurve>& curves) {
  std::ostringstream os;
  os << portrait_csv_header() << "\n";
  for (const auto& c : curves) {
    for (const auto& s : c.samples)
      os << format17(c.delta) << "," << to_string(c.branch) << "," << format17(s.h) << "," << format17(s.w) << ",\n";
    for (double p : c.poles) os << format17(c.delta) << "," << to_string(c.branch) << "," << format17(p) << ",inf,pole\n";
  }
  return os.str();
}

// Static SVG; h and w are compressed with x/(1+|x|) so infinite limits sit
// on the frame.
inline std::string portrait_svg(const std::vector<PortraitCurve>& curves, int size = 600) {
  std::ostringstream os;
  const double pad = 30, span = size - 2 * pad;
  auto X = [&](double h) { return pad + span * (0.5 + 0.5 * h / (1 + std::fabs(h))); };
  auto Y = [&](double w) { return pad + span * (1 - w / (1 + w)); };
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\">\n";
  os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << span << "\" height=\"" << span
     << "\" fill=\"none\" stroke=\"#888\"/>\n";
  static const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  int k = 0;
  double last_delta = std::nan("");
  for (const auto& c : curves) {
    if (c.delta != last_delta) {
      last_delta = c.delta;
      ++k;
    }
    if (c.samples.empty()) continue;
    os << "<polyline fill=\"none\" stroke=\"" << colours[(k - 1) % 6] << "\" points=\"";
    for (const auto& s : c.samples) os << X(s.h) << "," << Y(s.w) << " ";
    os << "\"><title>delta=" << c.delta << " " << to_string(c.branch) << "</title></polyline>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace horizonlab
