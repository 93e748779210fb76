#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nacs {

/// Smooth objective in a weighted inner product. Gradients are Riesz
/// representatives with respect to `dot`.
class Objective {
public:
  virtual ~Objective() = default;
  virtual std::size_t size() const = 0;
  /// +infinity outside the domain of definition.
  virtual double value(std::span<const double> x) = 0;
  /// Writes the gradient and returns the convergence measure at x (the sup
  /// norm of the Euler-Lagrange residual for the vortex functionals).
  virtual double gradient(std::span<const double> x, std::span<double> g) = 0;
  virtual void precondition(std::span<const double> g, std::span<double> z) = 0;
  virtual double dot(std::span<const double> a,
                     std::span<const double> b) const = 0;
  virtual bool has_hessian() const { return false; }
  virtual void hessian_apply(std::span<const double> x,
                             std::span<const double> d, std::span<double> out);
};

struct OptimOptions {
  int max_iter = 10000;
  /// Stop once the convergence measure drops below this.
  double tol = 1e-8;
  double armijo = 1e-4;
  int max_backtracks = 40;
  /// Restart conjugacy every so many steps.
  int restart = 100;
  /// Newton: cap on inner MINRES iterations.
  int krylov_max = 300;
};

struct OptimResult {
  int iterations = 0;
  bool converged = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  double residual = std::numeric_limits<double>::infinity();
  std::string status;
  /// Objective value after every accepted step (the first entry is the start).
  std::vector<double> history;
};

/// Preconditioned nonlinear conjugate gradients (Polak-Ribiere+) with Armijo
/// backtracking. Accepted steps never increase the value.
OptimResult ncg_minimize(Objective &f, std::vector<double> &x,
                         const OptimOptions &opt);

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;
using InnerProduct =
    std::function<double(std::span<const double>, std::span<const double>)>;

struct KrylovResult {
  int iterations = 0;
  /// Preconditioned residual norm relative to the right-hand side.
  double relative_residual = 0.0;
};

/// Preconditioned MINRES for a symmetric (possibly indefinite) operator.
/// Starts from x = 0.
KrylovResult minres(const LinearOp &A, const LinearOp &M_inv,
                    const InnerProduct &dot, std::span<const double> b,
                    std::span<double> x, double rtol, int max_iter);

/// Newton-Krylov for a critical point of f. The merit function is
/// <g, P g>, so the iteration also converges to saddle points.
OptimResult newton_krylov(Objective &f, std::vector<double> &x,
                          const OptimOptions &opt);

} // namespace nacs
