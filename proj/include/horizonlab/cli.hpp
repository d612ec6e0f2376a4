#pragma once

// Command-line front end. run() returns 0 on success, 1 on domain errors
// and 2 on usage errors.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "horizonlab/acceptance.hpp"
#include "horizonlab/config.hpp"
#include "horizonlab/coordinates.hpp"
#include "horizonlab/duality.hpp"
#include "horizonlab/dynamics.hpp"
#include "horizonlab/horizons.hpp"
#include "horizonlab/integrals.hpp"
#include "horizonlab/near_horizon.hpp"
#include "horizonlab/parallel.hpp"

namespace horizonlab::cli {

// JSON with scalar arrays kept on one line.
inline void dump_json(const nlohmann::json& j, std::ostream& os, int indent = 0) {
  const std::string pad(indent, ' '), inner(indent + 2, ' ');
  if (j.is_object()) {
    if (j.empty()) {
      os << "{}";
      return;
    }
    os << "{\n";
    std::size_t i = 0;
    for (auto it = j.begin(); it != j.end(); ++it, ++i) {
      os << inner << nlohmann::json(it.key()).dump() << ": ";
      dump_json(it.value(), os, indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << "}";
  } else if (j.is_array()) {
    bool flat = true;
    for (const auto& e : j) flat = flat && !e.is_structured();
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) os << (i ? ", " : "") << j[i].dump();
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << inner;
      dump_json(j[i], os, indent + 2);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << pad << "]";
  } else {
    os << j.dump();
  }
}

inline std::string json_text(const nlohmann::json& j) {
  std::ostringstream os;
  dump_json(j, os);
  os << "\n";
  return os.str();
}

// "3", "-0.25", "1/3" or "2.5e-3".
inline Exact parse_exact(const std::string& s) {
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    const Exact num = parse_exact(s.substr(0, slash)), den = parse_exact(s.substr(slash + 1));
    if (den == 0) throw DomainError("zero denominator in '" + s + "'");
    return num / den;
  }
  std::string mant = s;
  long exp10 = 0;
  if (auto e = s.find_first_of("eE"); e != std::string::npos) {
    mant = s.substr(0, e);
    exp10 = std::stol(s.substr(e + 1));
  }
  bool neg = false;
  std::size_t i = 0;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    i = 1;
  }
  boost::multiprecision::cpp_int digits = 0;
  long frac = 0;
  bool dot = false, any = false;
  for (; i < mant.size(); ++i) {
    const char c = mant[i];
    if (c == '.' && !dot) {
      dot = true;
    } else if (c >= '0' && c <= '9') {
      digits = digits * 10 + (c - '0');
      any = true;
      if (dot) ++frac;
    } else {
      throw DomainError("not a number: '" + s + "'");
    }
  }
  if (!any) throw DomainError("not a number: '" + s + "'");
  Exact v(digits);
  const long p = exp10 - frac;
  Exact ten(10);
  for (long k = 0; k < std::labs(p); ++k) {
    if (p > 0)
      v *= ten;
    else
      v /= ten;
  }
  return neg ? -v : v;
}

inline double parse_number(const std::string& s) {
  try {
    if (s.find('/') != std::string::npos) return ScalarOps<Exact>::to_double(parse_exact(s));
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw DomainError("not a number: '" + s + "'");
    return v;
  } catch (const std::logic_error&) {
    throw DomainError("not a number: '" + s + "'");
  }
}

inline std::string csv_num(double v) { return format17(v); }

struct Grid3 {
  double lo = 0.0, hi = 1.0;
  int n = 10;
};

inline Grid3 grid3(const std::vector<std::string>& v, const std::string& what) {
  if (v.size() != 3) throw DomainError(what + " needs three values: lo hi n");
  Grid3 g{parse_number(v[0]), parse_number(v[1]), static_cast<int>(parse_number(v[2]))};
  if (g.n < 1) throw DomainError(what + " needs n >= 1");
  return g;
}

// Everything the subcommands parse into.
struct Inputs {
  std::string config_path;
  std::string model;
  std::map<std::string, std::string> raw;  // numeric flags as typed
  std::vector<std::string> sets;           // --set key=value
  std::optional<int> order, grid;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::string out, format;
  bool exact = false;
  std::vector<std::string> range, phi_grid, q_grid, r_grid, span, init, q0_list;
  std::string coords = "schwarzschild";
  std::string delta_list = "-0.5,0,1,5";
  std::string svg_path, traj_path, events_path, show_name;
  std::optional<double> from_horizon;
};

class Runner {
 public:
  Runner(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int run(int argc, const char* const* argv) {
    CLI::App app{"horizonlab: static solutions and horizons of two-dimensional dilaton gravity models"};
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand
    app.add_option("--config", in_.config_path, "JSON run configuration (flags override it)");
    app.add_option("--seed", in_.seed, "random seed for property subcommands");
    app.add_option("-o,--out", in_.out, "write the main output to this file");

    auto* catalog = app.add_subcommand("catalog", "Model catalog: spherical, cylindrical, S-RN-Lambda, separable");
    catalog->require_subcommand(1);
    auto* cat_list = catalog->add_subcommand("list", "List catalog models with their origin");
    auto* cat_show = catalog->add_subcommand("show", "Dump a model's expression trees as JSON");
    cat_show->add_option("name", in_.show_name, "catalog name")->required();

    auto* duality = app.add_subcommand("duality", "Vecton-scalaron duality and the effective potential X_eff");
    duality->require_subcommand(1);
    auto* dual_check = duality->add_subcommand(
        "check", "Grid of X_eff: Legendre-type elimination of the field strength against the closed forms");
    model_opts(dual_check);
    dual_check->add_option("--phi-grid", in_.phi_grid, "lo hi n")->expected(3);
    dual_check->add_option("--q-grid", in_.q_grid, "lo hi n")->expected(3);

    auto* horizons = app.add_subcommand("horizons", "Horizons as zeros of N0 - N(phi), N' = U");
    horizons->require_subcommand(1);
    auto* hz_find = horizons->add_subcommand("find", "Roots of N0 - N with multiplicity and regularity");
    model_opts(hz_find);
    hz_find->add_option("--range", in_.range, "phi range lo hi")->expected(2);
    auto* hz_deg = horizons->add_subcommand(
        "degeneracy", "Double (U = 0) and triple (U = U' = 0) degenerate loci; q0^2 (2 Lambda)^(D-3) relation");
    model_opts(hz_deg);
    hz_deg->add_option("--range", in_.range, "phi range lo hi")->expected(2);
    hz_deg->add_option("--q0-list", in_.q0_list, "charges for the triple-point table")->delimiter(',');

    auto* expand_cmd = app.add_subcommand(
        "expand", "Near-horizon series from the horizon recurrences (regular, degenerate, massless branches)");
    model_opts(expand_cmd);
    expand_cmd->add_flag("--exact", in_.exact, "exact rational arithmetic");

    auto* integ = app.add_subcommand(
        "integrate", "First-order tau system with the energy constraint monitored (RKF78)");
    model_opts(integ);
    integ->add_option("--from-horizon", in_.from_horizon, "launch from the series at phi0 + dphi");
    integ->add_option("--init", in_.init, "phi chi h q p [psi eta]; g follows from the constraint")->expected(5, 7);
    integ->add_option("--span", in_.span, "tau0 tau1")->expected(2)->required();
    integ->add_option("--events", in_.events_path, "write the event log JSON here");

    auto* sk = app.add_subcommand("sk", "Szekeres-Kruskal chart around a simple horizon from the series");
    model_opts(sk);
    sk->add_option("--span", in_.span, "phi~ range lo hi")->expected(2);

    auto* metric = app.add_subcommand("metric", "Metric functions in Schwarzschild form, r = phi^(1/(D-2))");
    model_opts(metric);
    metric->add_option("--coords", in_.coords, "coordinate form (schwarzschild)");
    metric->add_option("--r-grid", in_.r_grid, "lo hi n")->expected(3);

    auto* portrait = app.add_subcommand(
        "portrait", "Topological portrait w = |h|^delta / |1 + eps |h|^(1+2 delta)| of the integrable model");
    portrait->add_option("--delta-list", in_.delta_list, "comma-separated delta values (>= -1/2)");
    portrait->add_option("--grid", in_.grid, "samples per branch");
    portrait->add_option("--svg", in_.svg_path, "also write an SVG rendering");

    auto* integral = app.add_subcommand(
        "integral", "Additional integral Z hdot/h - g1 phidot for separable potentials");
    integral->require_subcommand(1);
    auto* int_check = integral->add_subcommand("check", "Conservation report along a trajectory CSV");
    model_opts(int_check);
    int_check->add_option("--traj", in_.traj_path, "CSV written by `integrate`")->required();

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks and print one line per criterion");

    try {
      app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
      out_ << app.help();
      return 0;
    } catch (const CLI::CallForAllHelp&) {
      out_ << app.help("", CLI::AppFormatMode::All);
      return 0;
    } catch (const CLI::ParseError& e) {
      err_ << "usage error: " << e.what() << "\n";
      err_ << "run with --help for usage\n";
      return 2;
    }

    // sub-subcommand help is reported through the leaf
    try {
      if (*cat_list) return cmd_catalog_list();
      if (*cat_show) return cmd_catalog_show();
      if (*dual_check) return cmd_duality();
      if (*hz_find) return cmd_horizons_find();
      if (*hz_deg) return cmd_horizons_degeneracy();
      if (*expand_cmd) return cmd_expand();
      if (*integ) return cmd_integrate();
      if (*sk) return cmd_sk();
      if (*metric) return cmd_metric();
      if (*portrait) return cmd_portrait();
      if (*int_check) return cmd_integral_check();
      if (*selftest) return cmd_selftest();
    } catch (const UsageError& e) {
      err_ << "usage error: " << e.what() << "\n";
      return 2;
    } catch (const std::exception& e) {
      err_ << "error: " << e.what() << "\n";
      return 1;
    }
    err_ << "usage error: no command\n";
    return 2;
  }

 private:
  struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  void model_opts(CLI::App* sub) {
    sub->add_option("model", in_.model, "catalog name or path to a custom-potential JSON file");
    for (const auto& key : RunConfig::override_keys()) {
      sub->add_option_function<std::string>(
          "--" + key, [this, key](const std::string& v) { in_.raw[key] = v; }, "override " + key);
    }
    sub->add_option("--set", in_.sets, "key=value override (repeatable)");
    sub->add_option("--order", in_.order, "series order");
    sub->add_option("--tol", in_.tol, "integrator tolerance");
    sub->add_option("--grid", in_.grid, "grid size");
    sub->add_option("--format", in_.format, "json|csv|svg");
  }

  // Config file < flags.
  RunConfig config() {
    RunConfig c;
    if (!in_.config_path.empty()) c = load_config(in_.config_path);
    if (!in_.model.empty()) {
      const bool is_file = in_.model.size() > 5 && in_.model.substr(in_.model.size() - 5) == ".json";
      if (is_file) {
        c.custom_path = in_.model;
      } else {
        c.model = in_.model;
        c.custom_path.clear();
      }
    }
    for (const auto& [k, v] : in_.raw) c.set_override(k, parse_number(v));
    for (const auto& s : in_.sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos) throw UsageError("--set expects key=value, got '" + s + "'");
      c.set_override(s.substr(0, eq), parse_number(s.substr(eq + 1)));
      in_.raw[s.substr(0, eq)] = s.substr(eq + 1);
    }
    if (in_.order) c.order = *in_.order;
    if (in_.tol) c.tol = *in_.tol;
    if (in_.grid) c.grid = *in_.grid;
    if (in_.seed) c.seed = *in_.seed;
    if (!in_.out.empty()) c.output = in_.out;
    if (!in_.format.empty()) c.format = in_.format;
    if (c.model.empty() && c.custom_path.empty()) throw UsageError("a model name is required");
    cfg_ = c;
    return c;
  }

  void emit(const std::string& text) {
    if (cfg_.output.empty()) {
      out_ << text;
      return;
    }
    std::ofstream f(cfg_.output);
    if (!f) throw DomainError("cannot write '" + cfg_.output + "'");
    f << text;
  }

  static void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw DomainError("cannot write '" + path + "'");
    f << text;
  }

  double need(const RunConfig& c, const std::string& key) {
    if (auto v = c.get(key)) return *v;
    throw UsageError("--" + key + " is required");
  }

  int cmd_catalog_list() {
    cfg_.output = in_.out;
    std::ostringstream os;
    for (const auto& e : horizonlab::catalog()) {
      const auto m = build_model(e.name);
      os << e.name << "\t" << e.summary << "\t[" << m.provenance << "]\n";
    }
    emit(os.str());
    return 0;
  }

  int cmd_catalog_show() {
    cfg_.output = in_.out;
    emit(json_text(model_to_json(build_model(in_.show_name))));
    return 0;
  }

  int cmd_duality() {
    const auto c = config();
    const auto m = c.build();
    if (!m.gauge_X) throw DomainError("model '" + m.name + "' has no gauge coupling X to dualise");
    const auto gc = GaugeCoupling::from(*m.gauge_X);
    const auto pg = in_.phi_grid.empty() ? Grid3{0.1, 10.0, 20} : grid3(in_.phi_grid, "--phi-grid");
    const auto qg = in_.q_grid.empty() ? Grid3{-2.0, 2.0, 21} : grid3(in_.q_grid, "--q-grid");
    const bool closed = (m.D == 3 || m.D == 4) && m.k_nu == 2.0 * m.k && !m.has_psi;
    struct Pt {
      double phi, q;
    };
    std::vector<Pt> pts;
    for (double phi : lin_grid(pg.lo, pg.hi, pg.n))
      for (double q : lin_grid(qg.lo, qg.hi, qg.n)) pts.push_back({phi, q});
    const auto rows = parallel_map(pts, [&](const Pt& p) {
      std::ostringstream os;
      os << csv_num(p.phi) << "," << csv_num(p.q) << ",";
      try {
        const auto xe = x_eff(gc, p.phi, 0.0, p.q);
        const auto rep = verify_identities(gc, p.phi, 0.0, p.q, 1e-3);
        os << csv_num(xe.fbar2) << "," << csv_num(xe.value) << ","
           << (closed ? csv_num(closed_form_xeff(m.D, m.Lambda, m.lambda2, p.phi, p.q)) : std::string("nan")) << ","
           << csv_num(rep.residual_phi) << "," << csv_num(rep.residual_psi) << ",";
      } catch (const DomainError& e) {
        os << "nan,nan,nan,nan,nan," << '"' << e.what() << '"';
      }
      return os.str();
    });
    std::ostringstream os;
    os << "phi,q,fbar2,xeff_numeric,xeff_closed,identity_residual_phi,identity_residual_psi,error\n";
    for (const auto& r : rows) os << r << "\n";
    emit(os.str());
    return 0;
  }

  std::pair<double, double> range_or(double lo, double hi) {
    if (in_.range.empty()) return {lo, hi};
    if (in_.range.size() != 2) throw UsageError("--range needs lo hi");
    return {parse_number(in_.range[0]), parse_number(in_.range[1])};
  }

  int cmd_horizons_find() {
    const auto c = config();
    const auto m = c.build();
    HorizonOptions opt;
    opt.q0 = c.q0(m);
    if (in_.grid) opt.grid = *in_.grid;
    const auto [lo, hi] = range_or(0.01, 100.0);
    const double N0 = need(c, "N0");
    nlohmann::json j;
    j["model"] = m.name;
    j["N0"] = N0;
    j["q0"] = opt.q0;
    j["horizons"] = nlohmann::json::array();
    for (const auto& r : find_horizons(m, N0, lo, hi, opt)) j["horizons"].push_back(to_json(r));
    emit(json_text(j));
    return 0;
  }

  int cmd_horizons_degeneracy() {
    const auto c = config();
    const auto m = c.build();
    const double q0 = c.q0(m);
    const auto [lo, hi] = range_or(0.01, 100.0);
    nlohmann::json j;
    j["model"] = m.name;
    j["double"] = nlohmann::json::array();
    for (const auto& p : double_degenerate_points(m, q0, lo, hi))
      j["double"].push_back({{"phi0", p.phi0}, {"N0", p.N0}});
    j["triple"] = nlohmann::json::array();
    std::vector<double> qs;
    for (const auto& s : in_.q0_list) qs.push_back(parse_number(s));
    if (qs.empty() && q0 != 0.0) qs.push_back(q0);
    for (double q : qs) {
      auto t = to_json(triple_degenerate(m.D, m.k == 0 ? 1 : m.k, q));
      t["q0"] = q;
      t["q0_squared"] = q * q;
      j["triple"].push_back(t);
    }
    emit(json_text(j));
    return 0;
  }

  int cmd_expand() {
    const auto c = config();
    const auto m = c.build();
    need(c, "phi0");
    const int order = c.order;
    nlohmann::json j;
    if (in_.exact) {
      auto ex = [&](const std::string& key, const std::string& fallback) {
        auto it = in_.raw.find(key);
        return parse_exact(it != in_.raw.end() ? it->second : fallback);
      };
      std::ostringstream q0s;
      q0s.precision(17);
      q0s << c.q0(m);
      const auto s = expand<Exact>(m, ex("phi0", "0"), ex("q0", q0s.str()), ex("H0", "1"), order);
      j = to_json(s);
      const auto r = residual(m, s);
      j["residual_exact_zero"] = r.exact_zero;
    } else {
      const auto s = expand<double>(m, c.get_or("phi0", 0.0), c.q0(m), c.get_or("H0", 1.0), order);
      j = to_json(s);
      const auto r = residual(m, s);
      nlohmann::json res;
      for (std::size_t i = 0; i < r.max_scaled.size(); ++i) res[residual_name(static_cast<int>(i))] = r.max_scaled[i];
      j["residual"] = res;
    }
    j["model"] = m.name;
    emit(json_text(j));
    return 0;
  }

  static std::string tau_csv(const TauTrajectory& tr) {
    std::ostringstream os;
    os << "tau,phi,chi,h,g,q,p,psi,eta,constraint,R\n";
    for (std::size_t i = 0; i < tr.t.size(); ++i) {
      os << csv_num(tr.t[i]);
      for (double v : tr.x[i]) os << "," << csv_num(v);
      os << "," << csv_num(tr.constraint[i]) << "," << csv_num(tr.curvature[i]) << "\n";
    }
    return os.str();
  }

  int cmd_integrate() {
    const auto c = config();
    const auto m = c.build();
    if (in_.span.size() != 2) throw UsageError("--span needs tau0 tau1");
    const double t0 = parse_number(in_.span[0]), t1 = parse_number(in_.span[1]);
    StateTau s0{};
    nlohmann::json launch;
    if (in_.from_horizon) {
      const auto s = expand<double>(m, need(c, "phi0"), c.q0(m), c.get_or("H0", 1.0), c.order);
      const auto l = launch_from_horizon(s, *in_.from_horizon);
      s0 = to_tau_state(m, l.state);
      launch = {{"truncation", l.truncation}, {"radius", l.radius}, {"warning", l.warning}};
    } else if (!in_.init.empty()) {
      std::vector<double> v;
      for (const auto& x : in_.init) v.push_back(parse_number(x));
      v.resize(7, 0.0);
      s0 = make_tau_state(m, v[0], v[1], v[2], v[3], v[4], v[5], v[6]);
    } else {
      throw UsageError("integrate needs --from-horizon or --init");
    }
    TauOptions opt;
    opt.tol = c.tol;
    const auto tr = integrate_tau(m, s0, t0, t1, opt);
    emit(tau_csv(tr));
    auto log = to_json(tr);
    if (!launch.is_null()) log["launch"] = launch;
    if (!in_.events_path.empty())
      write_file(in_.events_path, json_text(log));
    else
      err_ << json_text(log);
    return 0;
  }

  int cmd_sk() {
    const auto c = config();
    const auto m = c.build();
    const auto s = expand<double>(m, need(c, "phi0"), c.q0(m), c.get_or("H0", 1.0), c.order);
    const auto chart = sk_chart(s);
    double lo = -0.25 * chart.radius, hi = 0.25 * chart.radius;
    if (!std::isfinite(lo)) lo = -0.5, hi = 0.5;
    if (!in_.span.empty()) {
      if (in_.span.size() != 2) throw UsageError("--span needs lo hi");
      lo = parse_number(in_.span[0]);
      hi = parse_number(in_.span[1]);
    }
    std::ostringstream os;
    os << "phitilde,h,ab,h_sk\n";
    for (double t : lin_grid(lo, hi, std::max(2, c.grid == 400 ? 41 : c.grid))) {
      os << csv_num(t) << "," << csv_num(s.h.evaluate(t)) << "," << csv_num(t * chart.ab_series.evaluate(t)) << ","
         << csv_num(chart.h_sk_series.evaluate(t)) << "\n";
    }
    emit(os.str());
    return 0;
  }

  int cmd_metric() {
    const auto c = config();
    const auto m = c.build();
    if (in_.coords != "schwarzschild") throw UsageError("--coords supports only 'schwarzschild'");
    const auto g = in_.r_grid.empty() ? Grid3{0.5, 5.0, 46} : grid3(in_.r_grid, "--r-grid");
    std::ostringstream os;
    os << "r,H_s,chi_s\n";
    std::optional<NearHorizonState<double>> series;
    if (!m.massless()) series = expand<double>(m, need(c, "phi0"), c.q0(m), c.get_or("H0", 1.0), c.order);
    for (double r : lin_grid(g.lo, g.hi, g.n)) {
      const auto p = series ? schwarzschild_metric(m.D, *series, r)
                            : schwarzschild_metric(m, c.q0(m), need(c, "N0"), r, c.get_or("C0", 1.0));
      os << csv_num(p.r) << "," << csv_num(p.H_s) << "," << csv_num(p.chi_s) << "\n";
    }
    emit(os.str());
    return 0;
  }

  int cmd_portrait() {
    cfg_.output = in_.out;
    std::vector<double> deltas;
    std::stringstream ss(in_.delta_list);
    for (std::string tok; std::getline(ss, tok, ',');)
      if (!tok.empty()) deltas.push_back(parse_number(tok));
    if (deltas.empty()) throw UsageError("--delta-list is empty");
    const auto fam = portrait_family(deltas, in_.grid.value_or(400));
    emit(portrait_csv(fam));
    if (!in_.svg_path.empty()) write_file(in_.svg_path, portrait_svg(fam));
    return 0;
  }

  int cmd_integral_check() {
    const auto c = config();
    const auto m = c.build();
    std::ifstream f(in_.traj_path);
    if (!f) throw DomainError("cannot open trajectory '" + in_.traj_path + "'");
    std::string line;
    std::getline(f, line);
    std::vector<std::string> head;
    {
      std::stringstream hs(line);
      for (std::string t; std::getline(hs, t, ',');) head.push_back(t);
    }
    std::array<int, 8> col{};
    for (int k = 0; k < 8; ++k) {
      auto it = std::find(head.begin(), head.end(), tau_names()[k]);
      if (it == head.end()) throw DomainError(std::string("trajectory CSV lacks column '") + tau_names()[k] + "'");
      col[k] = static_cast<int>(it - head.begin());
    }
    std::vector<StateTau> xs;
    while (std::getline(f, line)) {
      if (line.empty()) continue;
      std::vector<double> v;
      std::stringstream ls(line);
      for (std::string t; std::getline(ls, t, ',');) v.push_back(parse_number(t));
      StateTau x{};
      for (int k = 0; k < 8; ++k) x[k] = v.at(static_cast<std::size_t>(col[k]));
      xs.push_back(x);
    }
    const auto rep = conservation_report(m, xs, c.tol);
    emit(json_text(to_json(rep)));
    return rep.ok ? 0 : 1;
  }

  int cmd_selftest() {
    int failed = 0;
    acceptance::run_all([&](const acceptance::Result& r) {
      out_ << acceptance::format_line(r) << std::endl;
      if (!r.pass) ++failed;
    });
    out_ << (10 - failed) << "/10 criteria pass\n";
    return failed == 0 ? 0 : 1;
  }

  std::ostream& out_;
  std::ostream& err_;
  Inputs in_;
  RunConfig cfg_;
};

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  Runner r(out, err);
  return r.run(argc, argv);
}

}  // namespace horizonlab::cli
