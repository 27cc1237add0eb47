#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "surfquant/cli.hpp"

using surfquant::cli::run;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("sphere potential is 0.5 in the quadratic gauge and flagged ambiguous") {
  const Outcome o = invoke({"potential", "--surface", "sphere", "--n", "3", "--R", "1"});
  REQUIRE(o.code == 0);
  const json doc = json::parse(o.out);
  CHECK(doc["schema"] == 1);
  CHECK(doc["seed"] == 42);
  CHECK(doc["rows"][0]["gauge"] == "default");
  CHECK(doc["rows"][0]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(doc["rows"][1]["value"].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(doc["rows"][2]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(doc["summary"]["ambiguity"] == "AMBIGUOUS");
}

TEST_CASE("expression parse errors exit with 2 and a diagnostic") {
  const Outcome o = invoke({"potential", "--f", "x1+*x2", "--dim", "2"});
  CHECK(o.code == 2);
  CHECK(o.out.empty());
  CHECK(o.err.find("offset 3") != std::string::npos);
  CHECK(o.err.find("grammar") != std::string::npos);
}

TEST_CASE("algebra check on the ellipsoid passes") {
  const Outcome o = invoke({"algebra-check", "--surface", "ellipsoid", "--points", "20"});
  CHECK(o.code == 0);
  const json doc = json::parse(o.out);
  CHECK(doc["rows"].size() == 20);
  CHECK(doc["summary"]["status"] == "pass");
}

TEST_CASE("identical configuration gives byte-identical output") {
  const std::vector<std::string> args{"ambiguity", "--surface", "torus", "--points", "6", "--seed", "9"};
  CHECK(invoke(args).out == invoke(args).out);
  const std::vector<std::string> other{"ambiguity", "--surface", "torus", "--points", "6", "--seed", "10"};
  CHECK(invoke(args).out != invoke(other).out);
}

TEST_CASE("usage errors") {
  CHECK(invoke({}).code == 2);
  CHECK(invoke({"potential", "--surface", "klein"}).code == 2);
  CHECK(invoke({"potential", "--surface", "sphere", "--k", "2"}).code == 2);
  CHECK(invoke({"potential", "--f", "x1^2+x2^2-1"}).code == 2);
  CHECK(invoke({"potential", "--hbar", "0"}).code == 2);
  CHECK(invoke({"spectrum", "--surface", "sphere"}).code == 2);
  CHECK(invoke({"spectrum", "--surface", "circle", "--grid", "8"}).code == 2);
  CHECK(invoke({"potential", "--format", "xml"}).code == 2);
  CHECK(invoke({"--help"}).code == 0);
}

TEST_CASE("tightened tolerances turn into check failures") {
  const Outcome o = invoke({"algebra-check", "--surface", "torus", "--points", "3", "--tol-algebra", "0"});
  CHECK(o.code == 1);
  CHECK(json::parse(o.out)["summary"]["status"] == "fail");
}

TEST_CASE("hbar precedence: flag over environment over default") {
  setenv("SURFQUANT_HBAR", "2", 1);
  json env = json::parse(invoke({"potential"}).out);
  CHECK(env["hbar_source"] == "environment");
  CHECK(env["rows"][0]["value"].get<double>() == doctest::Approx(2.0));
  json flag = json::parse(invoke({"potential", "--hbar", "0.5"}).out);
  CHECK(flag["hbar_source"] == "flag");
  CHECK(flag["rows"][0]["value"].get<double>() == doctest::Approx(0.125));
  setenv("SURFQUANT_HBAR", "abc", 1);
  CHECK(invoke({"potential"}).code == 2);
  unsetenv("SURFQUANT_HBAR");
  CHECK(json::parse(invoke({"potential"}).out)["hbar_source"] == "default");
}

TEST_CASE("csv and text formats") {
  const Outcome csv = invoke({"drift", "--surface", "parabola", "--points", "3", "--format", "csv"});
  CHECK(csv.code == 0);
  CHECK(csv.out.rfind("x_1,x_2,drift_1,drift_2", 0) == 0);
  CHECK(std::count(csv.out.begin(), csv.out.end(), '\n') == 4);
  const Outcome curve = invoke({"potential", "--surface", "ellipse", "--along-curve", "--points", "8", "--format", "csv"});
  CHECK(curve.code == 0);
  CHECK(std::count(curve.out.begin(), curve.out.end(), '\n') == 9);
  const Outcome text = invoke({"spectrum", "--surface", "circle", "--grid", "64", "--levels", "3", "--format", "text"});
  CHECK(text.code == 0);
  CHECK(text.out.find("multiplicity") != std::string::npos);
}

TEST_CASE("selftest and the remaining subcommands run") {
  CHECK(invoke({"selftest"}).code == 0);
  CHECK(invoke({"geometry", "--surface", "torus", "--points", "4"}).code == 0);
  CHECK(invoke({"conversion", "--surface", "parabola"}).code == 0);
  const json conv = json::parse(invoke({"conversion", "--surface", "parabola"}).out);
  CHECK(conv["summary"]["verdict"] == "OBSTRUCTED");
  const json custom = json::parse(invoke({"geometry", "--f", "x1^2+x2^2-4", "--dim", "2", "--point", "3,0"}).out);
  CHECK(custom["rows"][0]["x"][0].get<double>() == doctest::Approx(2.0));
}
