#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "catch2/catch_amalgamated.hpp"
#include "qlm/config.hpp"
#include "qlm/output.hpp"

using namespace qlm;

namespace {

struct RunResult {
  int status;
  std::string out;
};

// Runs the CLI binary (tests execute from the build directory).
RunResult run_cli(const std::string& args) {
  const std::string cmd = "./qlm " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int rc = pclose(pipe);
  return {WIFEXITED(rc) ? WEXITSTATUS(rc) : -1, out};
}

}  // namespace

TEST_CASE("config file parsing with flag overrides") {
  std::istringstream in(R"(
task = "mass"   # top-level
[spacetime]
name = "schwarzschild"
M = 2.5
[surface]
name = "sphere"
r = 12.0
L = 16
[output]
format = "csv"
[sweep]
radii = [10, 20, 40]
[tolerances]
theorem1_residual = 1e-5
)");
  RunConfig cfg = parse_config_stream(in);
  CHECK(cfg.task == "mass");
  CHECK(cfg.spacetime == "schwarzschild");
  CHECK(cfg.spacetime_params.at("M") == 2.5);
  CHECK(cfg.surface_params.at("r") == 12.0);
  CHECK(cfg.L == 16);
  CHECK(cfg.format == "csv");
  REQUIRE(cfg.radii.size() == 3);
  CHECK(cfg.radii[2] == 40.0);
  CHECK(cfg.tolerance("theorem1_residual", 1.0) == 1e-5);
  CHECK(cfg.tolerance("absent", 0.25) == 0.25);

  apply_flags(cfg, {"--r", "9", "--format", "json", "--M", "1"});
  CHECK(cfg.surface_params.at("r") == 9.0);
  CHECK(cfg.spacetime_params.at("M") == 1.0);
  CHECK(cfg.format == "json");
  cfg.validate();
}

TEST_CASE("config validation rejects bad inputs") {
  RunConfig cfg;
  cfg.L = 4;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.L = 8;
  cfg.format = "xml";
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.format = "json";
  cfg.tolerances["x"] = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.tolerances.clear();
  cfg.validate();

  CHECK_THROWS_AS(apply_flags(cfg, {"--bogus", "1"}), ConfigError);
  CHECK_THROWS_AS(apply_flags(cfg, {"--r"}), ConfigError);
  std::istringstream bad("[surface]\nr = abc\n");
  CHECK_THROWS_AS(parse_config_stream(bad), ConfigError);
}

TEST_CASE("band limit honors explicit grid size requests") {
  RunConfig cfg;
  cfg.L = 16;
  CHECK(cfg.effective_band_limit() == 16);
  cfg.n_theta = 33;
  CHECK(cfg.effective_band_limit() == 32);
  cfg.n_theta = 0;
  cfg.n_phi = 130;
  CHECK(cfg.effective_band_limit() == 64);
}

TEST_CASE("deterministic number formatting and CSV rendering") {
  CHECK(format_number(1.0557280900843) == "1.05572809008");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(2.0) == "2");
  const std::string csv =
      render_csv({"a", "b"}, {{1.0, 0.5}, {2.0, 0.25}});
  CHECK(csv == "a,b\n1,0.5\n2,0.25\n");
  JsonObject o;
  o.field("name", "x\"y").field("v", 0.125).field("ok", true);
  CHECK(o.str() == "{\"name\": \"x\\\"y\", \"v\": 0.125, \"ok\": true}");
}

TEST_CASE("cli computes the Schwarzschild mass and is deterministic") {
  const std::string args =
      "mass --spacetime schwarzschild --M 1 --surface sphere --r 10 --L 16";
  RunResult a = run_cli(args);
  REQUIRE(a.status == 0);
  CHECK(a.out.find("\"E\": 1.05572808") != std::string::npos);
  CHECK(a.out.find("\"M_irr\": 5") != std::string::npos);
  RunResult b = run_cli(args);
  CHECK(a.out == b.out);
}

TEST_CASE("cli rejects horizon surfaces with the convexity message") {
  RunResult r = run_cli("mass --surface sphere --r 2 --spacetime schwarzschild --M 1");
  CHECK(r.status != 0);
  CHECK(r.out.find("non-convex: |H| below threshold") != std::string::npos);
}

TEST_CASE("cli enforces the minimum band limit") {
  RunResult r = run_cli("mass --surface sphere --r 1 --L 4");
  CHECK(r.status != 0);
  CHECK(r.out.find("band limit L must be >= 8") != std::string::npos);
}

TEST_CASE("cli verify passes on the flat baseline") {
  RunResult r = run_cli(
      "verify --suite all --spacetime minkowski-spherical --surface sphere --r 1 "
      "--L 16");
  CHECK(r.status == 0);
  CHECK(r.out.find("\"passed\": true") != std::string::npos);
  // a tightened tolerance must flip the exit status
  RunResult bad = run_cli(
      "verify --suite theorem1 --spacetime minkowski-spherical --surface sphere "
      "--r 1 --L 16 --tol theorem1_residual=1e-30");
  CHECK(bad.status != 0);
  CHECK(bad.out.find("\"passed\": false") != std::string::npos);
}

TEST_CASE("cli flags override a config file") {
  const char* path = "qlm_test_config.toml";
  {
    std::ofstream f(path);
    f << "[spacetime]\nname = \"schwarzschild\"\nM = 1.0\n"
      << "[surface]\nname = \"sphere\"\nr = 100.0\nL = 16\n";
  }
  RunResult r = run_cli(std::string("mass --config ") + path + " --r 10");
  std::remove(path);
  REQUIRE(r.status == 0);
  CHECK(r.out.find("\"r\": 10") != std::string::npos);
  CHECK(r.out.find("\"E\": 1.05572808") != std::string::npos);
}

TEST_CASE("cli sweep emits the radius table in csv") {
  RunResult r = run_cli(
      "sweep --spacetime schwarzschild --M 1 --r 10,20 --L 8 --format csv");
  REQUIRE(r.status == 0);
  CHECK(r.out.rfind("r,E\n", 0) == 0);
  CHECK(r.out.find("\n10,1.05572809") != std::string::npos);
  CHECK(r.out.find("\n20,1.02633403") != std::string::npos);
}
