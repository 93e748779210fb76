#pragma once

#include <array>

namespace nacs {

/// Scalar couplings of the reduced 2x2 vortex system.
///
/// `lambda` is 1/(4 kappa_1^2) and `kappa` is kappa_1/kappa_2; the Higgs
/// vacuum scale is fixed to 1.
struct CouplingParams {
  int N = 2;
  double kappa = 1.0;
  double lambda = 1.0;

  /// Throws std::invalid_argument unless N >= 2, kappa > 0, lambda > 0.
  void validate() const;
  /// validate() plus kappa > 1, required by every doubly periodic solver.
  void validate_periodic() const;

  /// Decay exponent sigma_0 = min{1, kappa}.
  double sigma0() const;
  /// Chern-Simons level of the U(1) factor, 1/(2 sqrt(lambda)).
  double kappa1() const;
  /// Chern-Simons level of the SU(N) factor, kappa1 / kappa.
  double kappa2() const;
};

struct Matrix2 {
  std::array<std::array<double, 2>, 2> a{};

  double operator()(int i, int j) const { return a[i][j]; }
  double &operator()(int i, int j) { return a[i][j]; }

  static Matrix2 identity() { return Matrix2{{{{1.0, 0.0}, {0.0, 1.0}}}}; }
  Matrix2 transpose() const;
  Matrix2 inverse() const;
  double trace() const { return a[0][0] + a[1][1]; }
  double determinant() const { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }
  bool is_symmetric(double tol = 0.0) const;
  std::array<double, 2> apply(std::array<double, 2> x) const;
};

Matrix2 operator*(const Matrix2 &x, const Matrix2 &y);
Matrix2 operator*(double s, const Matrix2 &x);
Matrix2 operator+(const Matrix2 &x, const Matrix2 &y);

/// Coupling matrix K with unit row sums; the smooth part of the system is
/// lambda * K diag(e^u) K (e^u - 1).
Matrix2 build_K(const CouplingParams &params);

/// A(N, kappa) from the variational form, or A(N, 1/kappa) when
/// `use_inverse_kappa` is set. Symmetric positive definite.
Matrix2 build_A(const CouplingParams &params, bool use_inverse_kappa);

/// Smallest eigenvalue of a symmetric 2x2 matrix. Throws
/// std::invalid_argument for non-symmetric input.
double smallest_eigenvalue(const Matrix2 &A);

/// Closed-form coercivity constant in its customary form. It coincides with
/// the smallest eigenvalue of N * A(N, kappa), not of A itself; regression
/// use only.
double printed_alpha0(const CouplingParams &params);

/// Pointwise smooth right-hand side of the vortex equations expressed in
/// the exponentials E_i = e^{u_i}. K is assembled once per parameter set so
/// grid loops can call it without re-deriving it.
class SmoothRhs {
public:
  explicit SmoothRhs(const CouplingParams &params);

  std::array<double, 2> operator()(double e1, double e2) const;

  /// Jacobian d(rhs_i)/d(u_j) at the given exponentials.
  Matrix2 jacobian(double e1, double e2) const;

  double lambda() const { return lambda_; }

private:
  double lambda_;
  Matrix2 K_;
};

/// lambda-scaled smooth right-hand side at (u1, u2), Dirac terms excluded.
/// Throws std::domain_error when e^{u} overflows or u is not finite.
std::array<double, 2> rhs_smooth(double u1, double u2,
                                 const CouplingParams &params);

/// g(t1, t2) whose global minimum -N^2/(4(N-1)) at (1/2, 1/2) yields the
/// Bradlow bound.
double g_eval(double t1, double t2, const CouplingParams &params);

/// Necessary lower bound on lambda for periodic solutions:
/// 16 pi ((N-1) n1 + n2) / (N |Omega|).
double bradlow_lambda_min(const CouplingParams &params, int n1, int n2,
                          double area);

/// Smallest lambda for which the inequality constraints of the admissible
/// set can hold at all. By Cauchy-Schwarz E_i^2 <= |Omega| Q_i, so both
/// constraint coefficients must not exceed |Omega|.
double admissible_lambda_min(const CouplingParams &params, int n1, int n2,
                             double area);

/// Constants b_1, b_2 appearing in the periodic functional.
std::array<double, 2> periodic_b(const CouplingParams &params, int n1, int n2);

} // namespace nacs
