#include "nacs/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nacs {

void CouplingParams::validate() const {
  if (N < 2)
    throw std::invalid_argument("N must be >= 2, got " + std::to_string(N));
  if (!(kappa > 0.0) || !std::isfinite(kappa))
    throw std::invalid_argument("kappa must be positive and finite");
  if (!(lambda > 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("lambda must be positive and finite");
}

void CouplingParams::validate_periodic() const {
  validate();
  if (!(kappa > 1.0))
    throw std::invalid_argument(
        "periodic solvers require kappa > 1, got kappa = " +
        std::to_string(kappa));
}

double CouplingParams::sigma0() const { return std::min(1.0, kappa); }
double CouplingParams::kappa1() const { return 0.5 / std::sqrt(lambda); }
double CouplingParams::kappa2() const { return kappa1() / kappa; }

Matrix2 Matrix2::transpose() const {
  return Matrix2{{{{a[0][0], a[1][0]}, {a[0][1], a[1][1]}}}};
}

Matrix2 Matrix2::inverse() const {
  const double det = determinant();
  if (det == 0.0 || !std::isfinite(det))
    throw std::domain_error("singular 2x2 matrix");
  return Matrix2{{{{a[1][1] / det, -a[0][1] / det},
                   {-a[1][0] / det, a[0][0] / det}}}};
}

bool Matrix2::is_symmetric(double tol) const {
  const double scale = std::max({std::abs(a[0][1]), std::abs(a[1][0]), 1.0});
  return std::abs(a[0][1] - a[1][0]) <= tol * scale;
}

std::array<double, 2> Matrix2::apply(std::array<double, 2> x) const {
  return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
}

Matrix2 operator*(const Matrix2 &x, const Matrix2 &y) {
  Matrix2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = x(i, 0) * y(0, j) + x(i, 1) * y(1, j);
  return r;
}

Matrix2 operator*(double s, const Matrix2 &x) {
  Matrix2 r = x;
  for (auto &row : r.a)
    for (auto &v : row)
      v *= s;
  return r;
}

Matrix2 operator+(const Matrix2 &x, const Matrix2 &y) {
  Matrix2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      r(i, j) = x(i, j) + y(i, j);
  return r;
}

Matrix2 build_K(const CouplingParams &p) {
  const double N = p.N, k = p.kappa;
  return Matrix2{{{{(N - 1.0 + k) / N, (1.0 - k) / N},
                   {(N - 1.0) * (1.0 - k) / N, (1.0 + (N - 1.0) * k) / N}}}};
}

Matrix2 build_A(const CouplingParams &p, bool use_inverse_kappa) {
  const double N = p.N;
  const double inv = use_inverse_kappa ? p.kappa : 1.0 / p.kappa;
  const double off = (1.0 - inv) / N;
  return Matrix2{{{{(N - 1.0 + inv) / N, off},
                   {off, (1.0 / (N - 1.0) + inv) / N}}}};
}

double smallest_eigenvalue(const Matrix2 &A) {
  if (!A.is_symmetric(1e-14))
    throw std::invalid_argument("smallest_eigenvalue expects a symmetric matrix");
  const double d = A(0, 0) - A(1, 1);
  const double b = 0.5 * (A(0, 1) + A(1, 0));
  return 0.5 * (A.trace() - std::hypot(d, 2.0 * b));
}

double printed_alpha0(const CouplingParams &p) {
  const double N = p.N, k = p.kappa;
  const double c = 1.0 - 1.0 / k;
  return 0.5 * (((N - 1.0) * (N - 1.0) + 1.0) / (N - 1.0) + 2.0 / k -
                std::sqrt(N * N * (N - 2.0) * (N - 2.0) /
                              ((N - 1.0) * (N - 1.0)) +
                          4.0 * c * c));
}

SmoothRhs::SmoothRhs(const CouplingParams &p)
    : lambda_(p.lambda), K_(build_K(p)) {}

// Factored form; exactly zero at the vacuum.
std::array<double, 2> SmoothRhs::operator()(double e1, double e2) const {
  const double d1 = e1 - 1.0, d2 = e2 - 1.0;
  const double t1 = e1 * (K_(0, 0) * d1 + K_(0, 1) * d2);
  const double t2 = e2 * (K_(1, 0) * d1 + K_(1, 1) * d2);
  return {lambda_ * (K_(0, 0) * t1 + K_(0, 1) * t2),
          lambda_ * (K_(1, 0) * t1 + K_(1, 1) * t2)};
}

Matrix2 SmoothRhs::jacobian(double e1, double e2) const {
  const double E[2] = {e1, e2};
  const double s[2] = {K_(0, 0) * (e1 - 1.0) + K_(0, 1) * (e2 - 1.0),
                       K_(1, 0) * (e1 - 1.0) + K_(1, 1) * (e2 - 1.0)};
  // d t_j / d u_m = delta_jm E_j s_j + E_j K_jm E_m
  Matrix2 dt;
  for (int j = 0; j < 2; ++j)
    for (int m = 0; m < 2; ++m)
      dt(j, m) = (j == m ? E[j] * s[j] : 0.0) + E[j] * K_(j, m) * E[m];
  return lambda_ * (K_ * dt);
}

std::array<double, 2> rhs_smooth(double u1, double u2,
                                 const CouplingParams &params) {
  const double e1 = std::exp(u1), e2 = std::exp(u2);
  if (!std::isfinite(e1) || !std::isfinite(e2) || std::isnan(u1) ||
      std::isnan(u2))
    throw std::domain_error("rhs_smooth: e^u is not finite");
  return SmoothRhs(params)(e1, e2);
}

double g_eval(double t1, double t2, const CouplingParams &p) {
  const double N = p.N, k = p.kappa;
  return (N - 1.0 + k) * t1 * t1 + (1.0 / (N - 1.0) + k) * t2 * t2 -
         2.0 * (k - 1.0) * t1 * t2 - N * t1 - N / (N - 1.0) * t2;
}

double bradlow_lambda_min(const CouplingParams &p, int n1, int n2,
                          double area) {
  if (!(area > 0.0))
    throw std::invalid_argument("area must be positive");
  if (n1 < 0 || n2 < 0)
    throw std::invalid_argument("vortex numbers must be non-negative");
  return 16.0 * std::numbers::pi * ((p.N - 1.0) * n1 + n2) / (p.N * area);
}

std::array<double, 2> periodic_b(const CouplingParams &p, int n1, int n2) {
  const double N = p.N, k = p.kappa, pi4 = 4.0 * std::numbers::pi;
  return {pi4 * ((1.0 + (N - 1.0) * k) * n1 + (k - 1.0) * n2) / k,
          pi4 * ((N - 1.0) * (k - 1.0) * n1 + (N - 1.0 + k) * n2) /
              ((N - 1.0) * k)};
}

double admissible_lambda_min(const CouplingParams &p, int n1, int n2,
                             double area) {
  if (!(area > 0.0))
    throw std::invalid_argument("area must be positive");
  const double N = p.N, k = p.kappa;
  const auto b = periodic_b(p, n1, n2);
  const double l1 = 4.0 * (N - 1.0 + k) * b[0] / (N * N * area);
  const double l2 = 4.0 * (N - 1.0) * (1.0 + (N - 1.0) * k) * b[1] / (N * N * area);
  return std::max(l1, l2);
}

} // namespace nacs
