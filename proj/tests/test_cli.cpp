#include "doctest.h"

#include "nacs/field_io.hpp"
#include "nacs/periodic.hpp"
#include "nacs/runner.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace nacs;
namespace fs = std::filesystem;

namespace {

const char *kPeriodic = R"(# torus
[run]
mode = solve

[geometry]
type = periodic
L1 = 6.283185307179586
L2 = 6.283185307179586
M1 = 32
M2 = 32

[params]
N = 2
kappa = 3
lambda = 5.092958178940651

[vortices]
vortex1 = 1.5707963267948966 1.5707963267948966 1
vortex2 = 4.71238898038469 3.141592653589793 1
)";

fs::path scratch(const std::string &name) {
  auto p = fs::temp_directory_path() / ("nacs_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int line_of(const std::string &text) {
  try {
    parse_config(text, "t.cfg");
  } catch (const ConfigError &e) {
    return e.line();
  }
  return -1;
}

} // namespace

TEST_CASE("config parsing") {
  const auto c = parse_config(kPeriodic);
  CHECK(c.mode == RunMode::solve);
  CHECK(c.geometry == Geometry::periodic);
  CHECK(c.params.N == 2);
  CHECK(c.params.kappa == 3.0);
  CHECK(c.M1 == 32);
  CHECK(c.vortices.points1.size() == 1);
  CHECK(c.vortices.points2.size() == 1);
  CHECK(c.vortices.points2[0].x == doctest::Approx(4.71238898038469));
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors carry line numbers") {
  CHECK(line_of("[params]\nN = 2\nkappa = abc\n") == 3);
  CHECK(line_of("[params]\nN 2\n") == 2);
  CHECK(line_of("\n\n[bogus]\n") == 3);
  CHECK(line_of("[params]\nN = 2\nN = 3\n") == 3);
  CHECK(line_of("N = 2\n") == 1);
  CHECK(line_of("[vortices]\nvortex1 = 1 2\n") == 2);
  CHECK(line_of("[vortices]\nvortex3 = 1 2 1\n") == 2);
  CHECK(line_of("[run]\nmode = fly\n") == 2);
  try {
    parse_config("[params]\nkappa = x\n", "t.cfg");
    FAIL("expected an error");
  } catch (const ConfigError &e) {
    CHECK(std::string(e.what()).rfind("t.cfg:2:", 0) == 0);
  }
}

TEST_CASE("config validation enforces module preconditions") {
  auto c = parse_config(kPeriodic);
  c.params.kappa = 0.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = parse_config(kPeriodic);
  c.M1 = 33;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = parse_config(kPeriodic);
  c.mode = RunMode::sweep;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.bradlow_factors = {2, 4};
  CHECK_NOTHROW(c.validate());
  CHECK(c.sweep_lambdas()[1] == doctest::Approx(16.0 / std::numbers::pi));
  c.bradlow_factors = {4, 2};
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("binary dump round trip is bit exact") {
  auto c = parse_config(kPeriodic);
  const auto r = minimize_constrained(
      {c.params, c.vortices, c.domain, c.M1, c.M2, c.tol, c.max_iter});
  const auto dir = scratch("dump");
  fs::create_directories(dir);
  write_field_binary(dir / "f.bin", r);
  const auto back = read_field_binary(dir / "f.bin");
  CHECK(back.geometry == r.geometry);
  CHECK(back.u1.grid() == r.u1.grid());
  CHECK(back.converged == r.converged);
  CHECK(std::memcmp(&back.c1, &r.c1, sizeof(double)) == 0);
  for (auto [a, b] : {std::pair{&back.u1, &r.u1}, {&back.u2, &r.u2},
                      {&back.v1, &r.v1}, {&back.v2, &r.v2}})
    CHECK(std::memcmp(a->values().data(), b->values().data(),
                      a->size() * sizeof(double)) == 0);
  std::ofstream(dir / "junk.bin") << "not a dump";
  CHECK_THROWS_AS(read_field_binary(dir / "junk.bin"), std::runtime_error);
  fs::remove_all(dir);
}

TEST_CASE("solve then verify through the runner, reruns are identical") {
  auto c = parse_config(kPeriodic);
  std::ostringstream log;
  c.output = scratch("run_a");
  REQUIRE(run(c, log) == kExitOk);
  const auto summary = slurp(c.output / "summary.txt");
  CHECK(summary.find("flux_u1 = 12.566") != std::string::npos);
  CHECK(fs::exists(c.output / "fields.csv"));
  const auto csv = slurp(c.output / "fields.csv");
  CHECK(csv.rfind("# geometry = periodic\n", 0) == 0);
  CHECK(csv.find("# columns = x,y,u1,u2,v1,v2\n") != std::string::npos);

  auto v = c;
  v.mode = RunMode::verify;
  CHECK(run(v, log) == kExitOk);
  CHECK(slurp(c.output / "verify.txt").find("all_pass = true") !=
        std::string::npos);

  auto b = c;
  b.output = scratch("run_b");
  REQUIRE(run(b, log) == kExitOk);
  CHECK(slurp(c.output / "fields.bin") == slurp(b.output / "fields.bin"));
  CHECK(slurp(c.output / "fields.csv") == slurp(b.output / "fields.csv"));
  fs::remove_all(c.output);
  fs::remove_all(b.output);
}

TEST_CASE("runner reports infeasibility with the bound and a config error") {
  auto c = parse_config(kPeriodic);
  c.params.lambda = 0.6;
  c.output = scratch("infeasible");
  std::ostringstream log;
  CHECK(run(c, log) == kExitFailed);
  const auto s = slurp(c.output / "summary.txt");
  CHECK(s.find("bradlow_bound = 1.27323954") != std::string::npos);
  CHECK(s.find("unconverged = true") != std::string::npos);
  CHECK(fs::exists(c.output / "fields.bin"));
  fs::remove_all(c.output);

  c = parse_config(kPeriodic);
  c.params.kappa = 1.0;
  CHECK(run(c, log) == kExitConfig);
}
