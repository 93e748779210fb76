#pragma once

#include <string>
#include <vector>

#include "nacs/periodic.hpp"

namespace nacs {

/// Discretized path from the local minimizer (first sample) to a far
/// endpoint of lower energy (last sample). Samples are packed (v1, v2).
struct PassPath {
  std::vector<std::vector<double>> samples;
  std::vector<double> energies;

  std::size_t argmax() const;
  double max_energy() const;
};

struct Endpoint {
  ScalarField v1, v2;
  /// Shift actually used (after doubling).
  double xi0 = 0.0;
  double energy = 0.0;
  double base_energy = 0.0;
};

/// v - xi0 componentwise, doubling xi0 until the energy drops by more than
/// one below the minimizer. Throws std::invalid_argument for xi0 <= 1 or an
/// unconverged minimizer, std::runtime_error once xi0 exceeds 100.
Endpoint make_endpoint(const SolveResult &local_min,
                       const PeriodicProblem &problem, double xi0 = 2.0);

struct MountainPassOptions {
  int nodes = 32;
  int max_sweeps = 200;
  /// Initial pseudo-time step of the preconditioned descent.
  double step = 0.5;
  /// Stop deforming once a sweep lowers the path maximum by less than this
  /// (relative).
  double stall = 1e-6;
  /// Distinctness floor as a multiple of sqrt(|Omega|).
  double distinct_factor = 1e-2;
  /// Energy margin for the degenerate-minimum diagnostic.
  double degenerate_eps = 1e-6;
  double xi0 = 2.0;
};

struct MountainPassResult {
  SolveResult solution;
  PassPath path;
  /// Path maximum after each accepted deformation sweep (first entry is the
  /// initial path).
  std::vector<double> max_history;
  double theta0 = 0.0;
  double minimizer_energy = 0.0;
  /// L2 distance between the critical point and the minimizer.
  double distance = 0.0;
  double distinct_floor = 0.0;
  bool distinct = false;
  int sweeps = 0;
  /// Empty on success; "strict-minimum violated" (degenerate minimum) or a
  /// solver status otherwise.
  std::string diagnostic;

  explicit MountainPassResult(const Grid &g) : solution(g) {}
};

/// String-method mountain pass between the minimizer and make_endpoint's
/// shifted state, followed by a Newton-MINRES polish of the highest node.
/// Periodic problems only.
MountainPassResult mountain_pass(const SolveResult &local_min,
                                 const PeriodicProblem &problem,
                                 const MountainPassOptions &opt = {});

} // namespace nacs
