#include "doctest.h"

#include "nacs/coupling.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace nacs;

namespace {

// Brute-force lambda * K diag(E) K (E - 1) by explicit products.
std::array<double, 2> matrix_oracle(double u1, double u2,
                                    const CouplingParams &p) {
  const double N = p.N, k = p.kappa;
  const double K[2][2] = {{(N - 1 + k) / N, (1 - k) / N},
                          {(N - 1) * (1 - k) / N, (1 + (N - 1) * k) / N}};
  const double E[2] = {std::exp(u1), std::exp(u2)};
  double t[2];
  for (int j = 0; j < 2; ++j)
    t[j] = E[j] * (K[j][0] * (E[0] - 1) + K[j][1] * (E[1] - 1));
  return {p.lambda * (K[0][0] * t[0] + K[0][1] * t[1]),
          p.lambda * (K[1][0] * t[0] + K[1][1] * t[1])};
}

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

} // namespace

TEST_CASE("K matrix closed forms") {
  auto K = build_K({2, 3.0, 1.0});
  CHECK(K(0, 0) == doctest::Approx(2.0));
  CHECK(K(0, 1) == doctest::Approx(-1.0));
  CHECK(K(1, 0) == doctest::Approx(-1.0));
  CHECK(K(1, 1) == doctest::Approx(2.0));

  auto I = build_K({2, 1.0, 1.0});
  CHECK(I(0, 0) == 1.0);
  CHECK(I(0, 1) == 0.0);
  CHECK(I(1, 0) == 0.0);
  CHECK(I(1, 1) == 1.0);

  auto K3 = build_K({3, 2.0, 1.0});
  CHECK(K3(0, 0) == doctest::Approx(4.0 / 3));
  CHECK(K3(0, 1) == doctest::Approx(-1.0 / 3));
  CHECK(K3(1, 0) == doctest::Approx(-2.0 / 3));
  CHECK(K3(1, 1) == doctest::Approx(5.0 / 3));
}

TEST_CASE("K has unit row sums") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> kd(0.05, 20.0);
  for (int t = 0; t < 200; ++t) {
    CouplingParams p{2 + t % 6, kd(rng), 1.0};
    auto K = build_K(p);
    CHECK(K(0, 0) + K(0, 1) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(K(1, 0) + K(1, 1) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("A matrix and its eigenvalues") {
  auto A = build_A({2, 3.0, 1.0}, false);
  CHECK(A(0, 0) == doctest::Approx(2.0 / 3));
  CHECK(A(0, 1) == doctest::Approx(1.0 / 3));
  CHECK(A(1, 1) == doctest::Approx(2.0 / 3));
  CHECK(smallest_eigenvalue(A) == doctest::Approx(1.0 / 3).epsilon(1e-14));
  CHECK(smallest_eigenvalue(Matrix2::identity()) == 1.0);

  auto A1 = build_A({2, 1.0, 1.0}, false);
  CHECK(A1(0, 0) == 1.0);
  CHECK(A1(0, 1) == 0.0);
  CHECK(A1(1, 1) == 1.0);

  // A(N, 1/kappa) swaps 1/kappa for kappa.
  auto Ai = build_A({2, 3.0, 1.0}, true);
  CHECK(Ai(0, 0) == doctest::Approx(2.0));
  CHECK(Ai(0, 1) == doctest::Approx(-1.0));
  CHECK(Ai(1, 1) == doctest::Approx(2.0));

  auto A32 = build_A({3, 2.0, 1.0}, false);
  CHECK(smallest_eigenvalue(A32) > 0.0);

  Matrix2 ns{{{{1.0, 2.0}, {0.0, 1.0}}}};
  CHECK_THROWS_AS(smallest_eigenvalue(ns), std::invalid_argument);
}

TEST_CASE("A is symmetric positive definite for random params") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> kd(-6.0, 6.0);
  for (int t = 0; t < 500; ++t) {
    CouplingParams p{2 + t % 9, std::exp(kd(rng)), 1.0};
    for (bool inv : {false, true}) {
      auto A = build_A(p, inv);
      CHECK(A.is_symmetric());
      const double lmin = smallest_eigenvalue(A);
      const double lmax = A.trace() - lmin;
      CHECK(lmin > 0.0);
      CHECK(lmin * lmax == doctest::Approx(A.determinant()).epsilon(1e-10));
    }
  }
}

TEST_CASE("A(kappa)^-1 diag(U) A(1/kappa) reproduces K diag(U) K") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> d(0.1, 3.0);
  for (int t = 0; t < 100; ++t) {
    CouplingParams p{2 + t % 5, d(rng) * 2.0, 1.0};
    Matrix2 U{{{{d(rng), 0.0}, {0.0, d(rng)}}}};
    auto lhs = build_A(p, false).inverse() * U * build_A(p, true);
    auto K = build_K(p);
    auto rhs = K * U * K;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        CHECK(lhs(i, j) == doctest::Approx(rhs(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("printed coercivity constant is the smallest eigenvalue of N A") {
  for (int N : {2, 3, 4, 7})
    for (double k : {0.3, 1.0, 2.0, 3.0, 10.0}) {
      CouplingParams p{N, k, 1.0};
      const double eigNA = N * smallest_eigenvalue(build_A(p, false));
      CHECK(printed_alpha0(p) == doctest::Approx(eigNA).epsilon(1e-12));
    }
  CHECK(printed_alpha0({2, 3.0, 1.0}) == doctest::Approx(2.0 / 3));
  CHECK(smallest_eigenvalue(build_A({2, 3.0, 1.0}, false)) ==
        doctest::Approx(1.0 / 3));
}

TEST_CASE("smooth rhs vanishes at the vacuum") {
  for (int N : {2, 3, 5})
    for (double k : {0.5, 1.0, 3.0}) {
      auto r = rhs_smooth(0.0, 0.0, {N, k, 2.5});
      CHECK(r[0] == 0.0);
      CHECK(r[1] == 0.0);
    }
}

TEST_CASE("smooth rhs matches the N=2, kappa=3 expansion") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(-8.0, 0.5);
  CouplingParams p{2, 3.0, 1.7};
  for (int t = 0; t < 1000; ++t) {
    const double u1 = d(rng), u2 = d(rng);
    const double e1 = std::exp(u1), e2 = std::exp(u2);
    const double r1 = p.lambda * (4 * e1 * e1 - e1 * e2 - 2 * e2 * e2 -
                                  2 * e1 + e2);
    const double r2 = p.lambda * (-2 * e1 * e1 - e1 * e2 + 4 * e2 * e2 +
                                  e1 - 2 * e2);
    auto r = rhs_smooth(u1, u2, p);
    // Cancellation near the vacuum: compare against the term magnitude.
    const double s = p.lambda * (4 * e1 * e1 + e1 * e2 + 4 * e2 * e2 + 2 * e1 + 2 * e2);
    CHECK(std::abs(r[0] - r1) <= 1e-12 * s);
    CHECK(std::abs(r[1] - r2) <= 1e-12 * s);
  }
}

TEST_CASE("smooth rhs matches the matrix-product oracle") {
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> d(-6.0, 1.0), kd(-3.0, 3.0),
      ld(0.1, 20.0);
  for (int t = 0; t < 1000; ++t) {
    CouplingParams p{2 + t % 6, std::exp(kd(rng)), ld(rng)};
    const double u1 = d(rng), u2 = d(rng);
    auto r = rhs_smooth(u1, u2, p);
    auto o = matrix_oracle(u1, u2, p);
    const double e1 = std::exp(u1), e2 = std::exp(u2);
    const double s = p.lambda * (1.0 + p.N) * (1.0 + p.kappa) *
                     (1.0 + p.kappa) * (e1 + e2) * (1.0 + e1 + e2);
    CHECK(std::abs(r[0] - o[0]) <= 1e-12 * s);
    CHECK(std::abs(r[1] - o[1]) <= 1e-12 * s);
  }
}

TEST_CASE("smooth rhs jacobian matches finite differences") {
  CouplingParams p{3, 2.2, 1.3};
  SmoothRhs f(p);
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> d(-3.0, 0.3);
  for (int t = 0; t < 50; ++t) {
    const double u1 = d(rng), u2 = d(rng), h = 1e-6;
    auto J = f.jacobian(std::exp(u1), std::exp(u2));
    auto p1 = f(std::exp(u1 + h), std::exp(u2));
    auto m1 = f(std::exp(u1 - h), std::exp(u2));
    auto p2 = f(std::exp(u1), std::exp(u2 + h));
    auto m2 = f(std::exp(u1), std::exp(u2 - h));
    for (int i = 0; i < 2; ++i) {
      CHECK(J(i, 0) == doctest::Approx((p1[i] - m1[i]) / (2 * h)).epsilon(1e-6));
      CHECK(J(i, 1) == doctest::Approx((p2[i] - m2[i]) / (2 * h)).epsilon(1e-6));
    }
  }
}

TEST_CASE("smooth rhs rejects overflow") {
  CouplingParams p{2, 3.0, 1.0};
  CHECK_THROWS_AS(rhs_smooth(800.0, 0.0, p), std::domain_error);
  CHECK_THROWS_AS(rhs_smooth(0.0, std::nan(""), p), std::domain_error);
}

TEST_CASE("g function minimum and Hessian") {
  for (int N : {2, 3, 6})
    for (double k : {0.5, 1.0, 3.0}) {
      CouplingParams p{N, k, 1.0};
      const double gmin = -double(N) * N / (4.0 * (N - 1));
      CHECK(g_eval(0.5, 0.5, p) == doctest::Approx(gmin).epsilon(1e-14));
      CHECK(g_eval(0.0, 0.0, p) == 0.0);
      // The Hessian of the quadratic g is 2N A(N, 1/kappa).
      auto A = build_A(p, true);
      const double h = 1e-3;
      const double gxx = (g_eval(0.5 + h, 0.5, p) - 2 * g_eval(0.5, 0.5, p) +
                          g_eval(0.5 - h, 0.5, p)) / (h * h);
      const double gyy = (g_eval(0.5, 0.5 + h, p) - 2 * g_eval(0.5, 0.5, p) +
                          g_eval(0.5, 0.5 - h, p)) / (h * h);
      const double gxy = (g_eval(0.5 + h, 0.5 + h, p) - g_eval(0.5 + h, 0.5 - h, p) -
                          g_eval(0.5 - h, 0.5 + h, p) + g_eval(0.5 - h, 0.5 - h, p)) /
                         (4 * h * h);
      CHECK(gxx == doctest::Approx(2.0 * N * A(0, 0)).epsilon(1e-6));
      CHECK(gyy == doctest::Approx(2.0 * N * A(1, 1)).epsilon(1e-6));
      CHECK(gxy == doctest::Approx(2.0 * N * A(0, 1)).epsilon(1e-6));
    }

  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  CouplingParams p{2, 3.0, 1.0};
  for (int t = 0; t < 10000; ++t)
    CHECK(g_eval(d(rng), d(rng), p) >= -1.0 - 1e-14);
}

TEST_CASE("Bradlow bound") {
  CouplingParams p{2, 3.0, 1.0};
  const double pi = std::numbers::pi;
  CHECK(bradlow_lambda_min(p, 1, 1, 4 * pi * pi) == doctest::Approx(4.0 / pi));
  CHECK(bradlow_lambda_min(p, 0, 0, 1.0) == 0.0);
  CHECK(bradlow_lambda_min({3, 2.0, 1.0}, 2, 1, 1.0) ==
        doctest::Approx(80.0 * pi / 3));
  CHECK_THROWS_AS(bradlow_lambda_min(p, 1, 1, 0.0), std::invalid_argument);
}

TEST_CASE("periodic constants and admissibility threshold") {
  const double pi = std::numbers::pi;
  CouplingParams p{2, 3.0, 1.0};
  auto b = periodic_b(p, 1, 1);
  CHECK(b[0] == doctest::Approx(4 * pi * (4.0 + 2.0) / 3.0));
  CHECK(b[1] == doctest::Approx(4 * pi * (2.0 + 4.0) / 3.0));
  // Summing the integrated equations: b = N A(kappa) 4 pi n.
  for (int N : {2, 3, 5})
    for (double k : {1.5, 3.0}) {
      CouplingParams q{N, k, 1.0};
      auto A = build_A(q, false);
      auto bb = periodic_b(q, 2, 1);
      auto ref = (double(N) * A).apply({4 * pi * 2, 4 * pi * 1});
      CHECK(bb[0] == doctest::Approx(ref[0]).epsilon(1e-13));
      CHECK(bb[1] == doctest::Approx(ref[1]).epsilon(1e-13));
    }
  const double area = 4 * pi * pi;
  CHECK(admissible_lambda_min(p, 1, 1, area) == doctest::Approx(8.0 / pi));
  CHECK(admissible_lambda_min(p, 1, 1, area) >=
        bradlow_lambda_min(p, 1, 1, area));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(CouplingParams({1, 1.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CouplingParams({2, 0.0, 1.0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(CouplingParams({2, 1.0, -1.0}).validate(), std::invalid_argument);
  CHECK_NOTHROW(CouplingParams({2, 1.0, 1.0}).validate());
  CHECK_THROWS_AS(CouplingParams({2, 1.0, 1.0}).validate_periodic(),
                  std::invalid_argument);
  CouplingParams p{2, 3.0, 4.0};
  CHECK(p.sigma0() == 1.0);
  CHECK(CouplingParams({2, 0.5, 1.0}).sigma0() == 0.5);
  CHECK(p.kappa1() == doctest::Approx(0.25));
  CHECK(p.kappa2() == doctest::Approx(0.25 / 3));
}
