#pragma once

#include <span>
#include <string>
#include <vector>

#include "nacs/coupling.hpp"
#include "nacs/lattice.hpp"
#include "nacs/optimize.hpp"
#include "nacs/vortex.hpp"

namespace nacs {

/// Discrete version of the variational functional shared by both
/// geometries:
///
///   I(v) = s ( 1/2 int grad v^T A(kappa) grad v
///            + lambda/2 int q^T A(1/kappa) q + int (A(kappa) h)^T v )
///
/// with q_i = e^{u0_i + v_i} - 1 and s = 1 on the plane, s = N on the torus.
/// The unknown vector stores v1 followed by v2 (2 * grid.size() entries).
/// On a box the edge nodes are fixed at v = -u0 (u = 0 there) and are not
/// degrees of freedom.
///
/// Gradients are returned as densities, i.e. Riesz representatives in the
/// quadrature-weighted inner product `dot`. The gradient equals
/// -s A(kappa) r with r = Laplacian(v) - S(u0 + v) - h the Euler-Lagrange
/// residual.
class VortexFunctional {
public:
  VortexFunctional(const CouplingParams &params, BackgroundPair background);

  const Grid &grid() const { return bg_.u01.grid(); }
  const BackgroundPair &background() const { return bg_; }
  const CouplingParams &params() const { return params_; }
  Geometry geometry() const { return grid().geometry(); }
  std::size_t size() const { return 2 * grid().size(); }
  double scale() const { return scale_; }
  const Matrix2 &A() const { return A_; }
  const Matrix2 &A_inv_kappa() const { return Ainv_; }

  /// Zero vector with box edge values set to -u0.
  std::vector<double> initial_guess() const;
  /// Overwrite box edge values with -u0; no-op on the torus.
  void apply_boundary(std::span<double> v) const;
  /// Zero the entries that are not degrees of freedom.
  void mask_fixed(std::span<double> d) const;

  /// Throws std::domain_error when e^{u} overflows.
  double value(std::span<const double> v) const;
  void residual(std::span<const double> v, std::span<double> r) const;
  void gradient(std::span<const double> v, std::span<double> g) const;
  void hessian_apply(std::span<const double> v, std::span<const double> d,
                     std::span<double> out) const;
  /// Approximate inverse Hessian, (k^2 s A + s lambda A(1/kappa))^{-1} per
  /// mode. `drop_mean` removes the constant mode on the torus.
  void precondition(std::span<const double> r, std::span<double> z,
                    bool drop_mean = false) const;
  double dot(std::span<const double> a, std::span<const double> b) const;
  /// Max |r| over degrees of freedom.
  double residual_sup(std::span<const double> v) const;

  /// Totals u_i = u0_i + v_i.
  std::vector<double> totals(std::span<const double> v) const;

private:
  CouplingParams params_;
  BackgroundPair bg_;
  SmoothRhs rhs_;
  Matrix2 A_, Ainv_;
  double scale_ = 1.0;
  std::vector<double> weight_; // quadrature weight per node, zero on fixed nodes
};

struct SolveResult {
  Geometry geometry = Geometry::planar;
  ScalarField v1, v2, u1, u2;
  /// Means c_i of v_i (torus only).
  double c1 = 0.0, c2 = 0.0;
  double el_residual = 0.0;
  double energy_value = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Constraint margins at the final point (torus only).
  double margin1 = 0.0, margin2 = 0.0;
  /// "converged", "max iterations", "boundary approach", "infeasible", ...
  std::string status;

  explicit SolveResult(const Grid &g)
      : v1(g), v2(g), u1(g), u2(g) {}

  /// v1 followed by v2.
  std::vector<double> packed() const;
};

/// Objective adapter over the full functional (all modes free, box edges
/// fixed). Overflowing trial points evaluate to +infinity.
class FunctionalObjective : public Objective {
public:
  explicit FunctionalObjective(const VortexFunctional &f) : f_(f) {}
  std::size_t size() const override { return f_.size(); }
  double value(std::span<const double> x) override;
  double gradient(std::span<const double> x, std::span<double> g) override;
  void precondition(std::span<const double> g, std::span<double> z) override {
    f_.precondition(g, z);
  }
  double dot(std::span<const double> a,
             std::span<const double> b) const override {
    return f_.dot(a, b);
  }
  bool has_hessian() const override { return true; }
  void hessian_apply(std::span<const double> x, std::span<const double> d,
                     std::span<double> out) override {
    f_.hessian_apply(x, d, out);
  }

private:
  const VortexFunctional &f_;
};

/// Fill v, u and the residual of a result from a packed state.
void fill_result(SolveResult &out, const VortexFunctional &f,
                 std::span<const double> v);

} // namespace nacs
