#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "catch_amalgamated.hpp"
#include "horizonlab/cli.hpp"

using namespace horizonlab;

namespace {

struct Call {
  int rc;
  std::string out, err;
};

Call call(std::vector<std::string> args) {
  args.insert(args.begin(), "horizonlab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {rc, out.str(), err.str()};
}

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("horizonlab_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("run config survives a JSON round trip", "[config]") {
  RunConfig c;
  c.model = "d3";
  c.set_override("q0", 1.0);
  c.set_override("H0", 2.0);
  c.order = 8;
  c.tol = 1e-9;
  c.format = "csv";
  c.seed = 42;
  const auto back = config_from_json(to_json(c));
  REQUIRE(back.model == "d3");
  REQUIRE(back.overrides == c.overrides);
  REQUIRE(back.order == 8);
  REQUIRE(back.tol == 1e-9);
  REQUIRE(back.format == "csv");
  REQUIRE(back.seed == 42);
}

TEST_CASE("config rejects unknown keys and bad values", "[config]") {
  using nlohmann::json;
  REQUIRE_THROWS_AS(config_from_json(json{{"modle", "d3"}}), DomainError);
  REQUIRE_THROWS_AS(config_from_json(json{{"overrides", {{"zz", 1.0}}}}), DomainError);
  REQUIRE_THROWS_AS(config_from_json(json{{"format", "xml"}}), DomainError);
  REQUIRE_THROWS_AS(config_from_json(json{{"order", 0}}), DomainError);
  REQUIRE_THROWS_AS(config_from_json(json{{"order", "many"}}), DomainError);
  REQUIRE_THROWS_AS(config_from_json(json::array()), DomainError);

  RunConfig c;
  REQUIRE_THROWS_AS(c.set_override("bogus", 1.0), DomainError);
  c.model = "d3";
  c.set_override("a", 1.0);  // a known key, but not a d3 parameter
  REQUIRE_THROWS_AS(c.build(), DomainError);
}

TEST_CASE("exact numbers parse as rationals", "[cli]") {
  REQUIRE(cli::parse_exact("1/3") == Exact(1) / 3);
  REQUIRE(cli::parse_exact("-0.25") == Exact(-1) / 4);
  REQUIRE(cli::parse_exact("2.5e-3") == Exact(1) / 400);
  REQUIRE(cli::parse_exact("12") == Exact(12));
  REQUIRE_THROWS_AS(cli::parse_exact("abc"), DomainError);
  REQUIRE_THROWS_AS(cli::parse_exact("1/0"), DomainError);
  REQUIRE(cli::parse_number("1/4") == 0.25);
  REQUIRE_THROWS_AS(cli::parse_number("3x"), DomainError);
}

TEST_CASE("exit codes separate usage errors from failures", "[cli]") {
  REQUIRE(call({"--help"}).rc == 0);
  REQUIRE(call({"catalog", "list"}).rc == 0);

  auto r = call({"expand"});
  REQUIRE(r.rc == 2);
  REQUIRE(r.err.find("usage error") != std::string::npos);
  REQUIRE(call({"no-such-command"}).rc == 2);
  REQUIRE(call({"horizons", "find", "d4"}).rc == 2);  // --N0 missing
  REQUIRE(call({"horizons", "find", "d4", "--N0", "eight"}).rc != 0);

  r = call({"horizons", "find", "no-such-model", "--N0", "1"});
  REQUIRE(r.rc == 1);
  REQUIRE(r.err.rfind("error: ", 0) == 0);
}

TEST_CASE("expand prints exact coefficients", "[cli]") {
  const auto r = call({"expand", "d3", "--phi0", "1", "--q0", "1", "--H0", "1", "--order", "2", "--exact"});
  REQUIRE(r.rc == 0);
  REQUIRE(r.out.find(R"("chi": ["0", "-3", "-1/3"])") != std::string::npos);
  REQUIRE(r.out.find(R"("h": ["0", "-3", "-2/3"])") != std::string::npos);
}

TEST_CASE("horizons find reports the massless D=4 root", "[cli]") {
  const auto r = call({"horizons", "find", "d4", "--N0", "8"});
  REQUIRE(r.rc == 0);
  const auto j = nlohmann::json::parse(r.out);
  REQUIRE(j["model"] == "d4");
  REQUIRE(j["horizons"].size() == 1);
  REQUIRE(j["horizons"][0]["phi0"].get<double>() == 4.0);
  REQUIRE(j["horizons"][0]["multiplicity"] == 1);
}

TEST_CASE("flags override the config file", "[cli][config]") {
  const auto path = tmp_path("cfg.json");
  {
    std::ofstream f(path);
    f << R"({"model": "d4", "overrides": {"N0": 5}})";
  }
  auto r = call({"--config", path, "horizons", "find"});
  REQUIRE(r.rc == 0);
  REQUIRE(nlohmann::json::parse(r.out)["N0"].get<double>() == 5.0);

  r = call({"--config", path, "horizons", "find", "--N0", "8"});
  REQUIRE(r.rc == 0);
  REQUIRE(nlohmann::json::parse(r.out)["N0"].get<double>() == 8.0);

  r = call({"--config", path, "horizons", "find", "--set", "N0=8"});
  REQUIRE(r.rc == 0);
  REQUIRE(nlohmann::json::parse(r.out)["N0"].get<double>() == 8.0);

  {
    std::ofstream f(path);
    f << R"({"model": "d4", "colour": "red"})";
  }
  REQUIRE(call({"--config", path, "horizons", "find", "--N0", "8"}).rc == 1);
  std::filesystem::remove(path);
}

TEST_CASE("portrait CSV does not depend on the worker count", "[cli][portrait]") {
  const std::vector<std::string> args{"portrait", "--delta-list", "-0.5,0,0.5,1", "--grid", "60"};
  ::setenv("HORIZONLAB_THREADS", "1", 1);
  const auto one = call(args);
  ::setenv("HORIZONLAB_THREADS", "4", 1);
  const auto four = call(args);
  ::unsetenv("HORIZONLAB_THREADS");
  REQUIRE(one.rc == 0);
  REQUIRE(four.rc == 0);
  REQUIRE(one.out == four.out);
  REQUIRE(one.out.rfind("delta,branch,h,w,flags\n", 0) == 0);
  REQUIRE(one.out.find(",pole\n") != std::string::npos);  // delta = -1/2 static branch

  REQUIRE(call({"portrait", "--delta-list", "-0.75"}).rc == 1);
}

TEST_CASE("integrate output feeds the integral check", "[cli][integrals]") {
  const auto traj = tmp_path("traj.csv");
  const auto events = tmp_path("events.json");
  auto r = call({"integrate", "separable", "--init", "1.5", "0.3", "-0.8", "0", "0", "0.2", "0.4", "--span", "0",
                 "-2", "-o", traj, "--events", events});
  REQUIRE(r.rc == 0);
  REQUIRE(slurp(traj).rfind("tau,phi,chi,h,g,q,p,psi,eta,constraint,R\n", 0) == 0);
  const auto log = nlohmann::json::parse(slurp(events));
  REQUIRE(log.contains("events"));

  r = call({"integral", "check", "separable", "--traj", traj});
  INFO(r.out << r.err);
  REQUIRE(r.rc == 0);
  const auto rep = nlohmann::json::parse(r.out);
  REQUIRE(rep["ok"] == true);
  REQUIRE(std::fabs(rep["g1"].get<double>() + 1.0) <= 1e-6);

  // a model without the extra scalar cannot take psi initial data
  REQUIRE(call({"integrate", "d4", "--init", "9", "1", "1", "0", "0", "0.2", "0.4", "--span", "0", "1"}).rc == 1);
  std::filesystem::remove(traj);
  std::filesystem::remove(events);
}
