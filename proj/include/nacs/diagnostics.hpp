#pragma once

#include <string>
#include <vector>

#include "nacs/periodic.hpp"
#include "nacs/planar.hpp"

namespace nacs {

struct FluxReport {
  /// U(1) and Cartan SU(N) magnetic fluxes from the integrated field.
  double flux_u1 = 0.0;
  double flux_sun = 0.0;
  double charge_u1 = 0.0;
  double charge_sun = 0.0;
  /// sqrt(2N) * flux_u1.
  double energy = 0.0;
  int n1 = 0, n2 = 0;
  /// Closed-form quantized values for the same data.
  double expected_flux_u1 = 0.0;
  double expected_flux_sun = 0.0;
  double expected_energy = 0.0;
  /// False when the input solution was not converged.
  bool trusted = false;
};

/// 4 pi ((N-1) n1 + n2) / sqrt(2N) and 4 pi sqrt((N-1)/(2N)) (n1 - n2).
double quantized_flux_u1(int N, int n1, int n2);
double quantized_flux_sun(int N, int n1, int n2);

/// Fluxes from the quadrature of the smooth right-hand side S(u): the
/// field strengths are -(1/sqrt(2N)) ((N-1) S1 + S2) and
/// -sqrt((N-1)/(2N)) (S1 - S2).
FluxReport compute_fluxes(const SolveResult &result,
                          const CouplingParams &params,
                          const VortexSet &vortices);

/// Largest relative deviation among flux_u1, flux_sun (absolute when the
/// expected value is zero, scaled by |flux_u1|) and energy.
double flux_relative_error(const FluxReport &r);

struct SweepEntry {
  double lambda = 0.0;
  bool converged = false;
  bool infeasible = false;
  std::string status;
  /// L2 norms of e^{u_i} - 1.
  double norm1 = 0.0, norm2 = 0.0;
  double el_residual = 0.0;
  double energy_value = 0.0;
  double c1 = 0.0, c2 = 0.0;
  int iterations = 0;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  double bradlow = 0.0;
  bool all_converged = false;
  /// Strictly decreasing norms over the converged entries (in order).
  bool decreasing1 = false, decreasing2 = false;
};

/// L2 norms of e^{u_i} - 1 over the grid.
std::array<double, 2> vacuum_distance(const SolveResult &r);

/// Solve for each lambda (ascending), warm starting from the previous
/// converged member. Failures are recorded and the sweep continues.
SweepReport lambda_sweep(const PeriodicProblem &problem,
                         const std::vector<double> &lambdas);
SweepReport lambda_sweep(const PlanarProblem &problem,
                         const std::vector<double> &lambdas);

} // namespace nacs
