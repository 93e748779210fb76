#pragma once

#include "nacs/functional.hpp"

namespace nacs {

struct PlanarProblem {
  CouplingParams params;
  VortexSet vortices;
  /// Half width of the square box [-R, R]^2.
  double R = 0.0;
  int M1 = 128, M2 = 128;
  double mu = kDefaultMu;
  double tol = 1e-8;
  int max_iter = 10000;

  /// Smallest admissible half width: farthest vortex plus five decay
  /// lengths 1 / (sigma0 sqrt(2 lambda)).
  static double min_half_width(const CouplingParams &params,
                               const VortexSet &vortices);
  void validate() const;
  Grid make_grid() const;
};

/// Discrete I for the given fluctuations. The box edge values of v enter
/// as given.
double planar_energy(const ScalarField &v1, const ScalarField &v2,
                     const PlanarProblem &problem);

/// Minimize I on the truncated box with u = 0 on the box edge. `warm`
/// (same grid) seeds the iteration.
SolveResult solve_planar(const PlanarProblem &problem,
                         const SolveResult *warm = nullptr);

struct DecayFit {
  double rate_w = 0.0;
  double rate_grad = 0.0;
  int samples = 0;
  /// False when the annulus holds too few resolvable samples (e.g. vacuum).
  bool signal = false;
};

/// Least-squares exponential rates of |w|^2 and |grad w|^2 over the annulus
/// R/2 < |x| < 0.9 R, with w = ((N-1) u1 + u2, u1 - u2).
DecayFit fit_decay_rate(const SolveResult &result, const CouplingParams &params);

} // namespace nacs
