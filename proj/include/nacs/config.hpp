#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nacs/coupling.hpp"
#include "nacs/lattice.hpp"
#include "nacs/vortex.hpp"

namespace nacs {

enum class RunMode { solve, second, sweep, verify };

const char *to_string(RunMode m);
RunMode run_mode_from_string(const std::string &s);

/// Parse or validation failure; `line` is 0 when not tied to a line.
class ConfigError : public std::runtime_error {
public:
  ConfigError(const std::string &source, int line, const std::string &msg);
  int line() const { return line_; }

private:
  int line_;
};

/// Everything a run needs. Populated from a flat key-value file:
///
///   [run]       mode = solve | second | sweep | verify, output = dir,
///               input = dump for verify, seed = n
///   [geometry]  type = periodic | planar, L1, L2 (torus) or R (box),
///               M1, M2, mu
///   [params]    N, kappa, lambda
///   [vortices]  vortex1 = x y m, vortex2 = x y m (repeatable)
///   [solver]    tol, max_iter, verify_tol, path_nodes, xi0
///   [sweep]     lambdas = l1 l2 ..., or bradlow_factors = f1 f2 ...
struct RunConfig {
  RunMode mode = RunMode::solve;
  Geometry geometry = Geometry::periodic;
  CouplingParams params;
  VortexSet vortices;
  TorusDomain domain{0.0, 0.0};
  double R = 0.0;
  int M1 = 128, M2 = 128;
  double mu = kDefaultMu;
  double tol = 1e-8;
  int max_iter = 10000;
  double verify_tol = 1e-6;
  int path_nodes = 32;
  double xi0 = 2.0;
  std::vector<double> lambdas;
  std::vector<double> bradlow_factors;
  std::filesystem::path output = "out";
  std::optional<std::filesystem::path> input;
  std::optional<unsigned long long> seed;
  std::string source = "<config>";

  /// Module preconditions checked before dispatch. Throws ConfigError.
  void validate() const;
  /// Lambdas of a sweep, resolving Bradlow factors.
  std::vector<double> sweep_lambdas() const;
};

RunConfig parse_config(const std::string &text,
                       const std::string &source = "<config>");
RunConfig load_config(const std::filesystem::path &path);

} // namespace nacs
