#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "nacs/functional.hpp"

namespace nacs {

struct PeriodicProblem {
  CouplingParams params;
  VortexSet vortices;
  TorusDomain domain{0.0, 0.0};
  int M1 = 128, M2 = 128;
  double tol = 1e-8;
  int max_iter = 10000;

  /// kappa > 1, valid grid, vortices inside the cell.
  void validate() const;
  Grid make_grid() const;
};

/// Integrals entering the constraints and the fixed point for the means.
struct ConstraintState {
  double E1 = 0, E2 = 0; // int e^{u0_i + w_i}
  double Q1 = 0, Q2 = 0; // int e^{2 u0_i + 2 w_i}
  double X = 0;          // int e^{u0_1 + u0_2 + w_1 + w_2}
  double b1 = 0, b2 = 0;
  double area = 0;
};

/// Raised when (w1, w2) leaves the admissible set and the square roots
/// defining the means become imaginary.
class ConstraintViolation : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

ConstraintState constraint_state(std::span<const double> w1,
                                 std::span<const double> w2,
                                 const BackgroundPair &bg,
                                 const CouplingParams &params,
                                 const VortexSet &vortices);

/// (E1^2 - 4(N-1+kappa) b1 Q1 / (N^2 lambda),
///  E2^2 - 4(N-1)(1+(N-1)kappa) b2 Q2 / (N^2 lambda)).
std::array<double, 2> constraint_margin(const ConstraintState &s,
                                        const CouplingParams &params);
std::array<double, 2> constraint_margin(const ScalarField &w1,
                                        const ScalarField &w2,
                                        const BackgroundPair &bg,
                                        const CouplingParams &params,
                                        const VortexSet &vortices);

struct FixedPointResult {
  double c1 = 0, c2 = 0;
  double root_X = 0; // e^{c1}
  /// |f(X0)| / X0.
  double residual = 0;
  double lo = 0, hi = 0;
  int iterations = 0;
};

/// The maps whose composition defines the means: e^{c1} = f1(e^{c2}),
/// e^{c2} = f2(e^{c1}), f(X) = X - f1(f2(X)).
struct MeanMaps {
  ConstraintState s;
  CouplingParams p;
  double f1(double Y) const;
  double f2(double Z) const;
  double f(double X) const { return X - f1(f2(X)); }
  double df1(double Y) const;
  double df2(double Z) const;
  double df(double X) const { return 1.0 - df1(f2(X)) * df2(X); }
};

/// Bisection on [0, X_hi] (X_hi doubled from 1 until f > 0), Newton polish.
/// Throws ConstraintViolation outside the admissible set and
/// std::runtime_error when no sign change is found.
FixedPointResult solve_mean_fixed_point(const ConstraintState &s,
                                        const CouplingParams &params);

/// Plain Newton iteration from `x0`, independent of the bracketing solver.
FixedPointResult solve_mean_fixed_point_newton(const ConstraintState &s,
                                               const CouplingParams &params,
                                               double x0 = 1.0);

/// J(w) on mean-zero pairs and the objective used by the constrained
/// minimization.
class ReducedFunctional {
public:
  ReducedFunctional(const VortexFunctional &f, const VortexSet &vortices);

  const VortexFunctional &full() const { return f_; }
  ConstraintState state(std::span<const double> w) const;
  FixedPointResult means(std::span<const double> w) const;
  /// J from its closed form using the fixed-point means.
  double value(std::span<const double> w) const;
  /// I(w + c(w)).
  double value_via_I(std::span<const double> w) const;
  /// Mean-free gradient of I at w + c(w); returns the sup residual there.
  double gradient(std::span<const double> w, std::span<double> g) const;
  /// Interior floor for the margins, 1e-10 |Omega|^2.
  double floor() const;

private:
  const VortexFunctional &f_;
  VortexSet vortices_;
};

/// Constrained minimization of J, followed by Newton polishing of the full
/// system. Status is "converged", "infeasible", "boundary approach",
/// "max iterations" or a solver diagnostic.
SolveResult minimize_constrained(const PeriodicProblem &problem,
                                 const SolveResult *warm = nullptr);

/// Mean-zero parts of v and their margins.
std::array<double, 2> solution_margins(const SolveResult &r,
                                       const BackgroundPair &bg,
                                       const CouplingParams &params,
                                       const VortexSet &vortices);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
};

struct DiagnosticReport {
  std::vector<Check> checks;
  bool all_pass() const;
  const Check *find(const std::string &name) const;
};

/// Report-only verification: sign of u away from vortex nodes, integral
/// identities, Euler-Lagrange residual, constraint margins and the bounds
/// e^{c_i} <= 1 (torus); residual and integrated source identities (box).
DiagnosticReport verify_solution(const SolveResult &result,
                                 const CouplingParams &params,
                                 const VortexSet &vortices,
                                 double mu = kDefaultMu,
                                 double el_tol = 1e-6);

/// Relative residuals of the integrated equations
/// int S_i + 4 pi n_i over the sum of the magnitudes of the terms.
std::array<double, 2> integral_identity_residuals(const SolveResult &result,
                                                  const CouplingParams &params,
                                                  const VortexSet &vortices);

} // namespace nacs
