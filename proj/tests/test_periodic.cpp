#include "doctest.h"

#include "nacs/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace nacs;

namespace {

constexpr double pi = std::numbers::pi;
const double L = 2.0 * pi;

PeriodicProblem flux_problem(double lambda, int M = 64) {
  PeriodicProblem p;
  p.params = {2, 3.0, lambda};
  p.domain = {L, L};
  p.M1 = p.M2 = M;
  // Nodes of an M x M grid.
  p.vortices.points1 = {{L * 0.25, L * 0.25, 1}};
  p.vortices.points2 = {{L * 0.75, L * 0.5, 1}};
  return p;
}

// A random state inside the admissible set for random couplings.
std::pair<ConstraintState, CouplingParams> random_state(std::mt19937_64 &rng) {
  std::uniform_real_distribution<double> U(0.0, 1.0);
  CouplingParams p;
  p.N = 2 + static_cast<int>(U(rng) * 4);
  p.kappa = 1.0 + 1e-3 + 4.0 * U(rng);
  const int n1 = 1 + static_cast<int>(U(rng) * 3);
  const int n2 = static_cast<int>(U(rng) * 3);
  ConstraintState s;
  s.area = 1.0 + 50.0 * U(rng);
  s.E1 = s.area * (0.1 + 0.9 * U(rng));
  s.E2 = s.area * (0.1 + 0.9 * U(rng));
  s.Q1 = s.E1 * s.E1 / s.area * (1.0 + U(rng));
  s.Q2 = s.E2 * s.E2 / s.area * (1.0 + U(rng));
  s.X = std::sqrt(s.Q1 * s.Q2) * (0.05 + 0.95 * U(rng));
  const double N = p.N, k = p.kappa;
  p.lambda = 1.0;
  const auto b = periodic_b(p, n1, n2);
  s.b1 = b[0];
  s.b2 = b[1];
  const double l1 = 4.0 * (N - 1.0 + k) * b[0] * s.Q1 / (N * N * s.E1 * s.E1);
  const double l2 = 4.0 * (N - 1.0) * (1.0 + (N - 1.0) * k) * b[1] * s.Q2 /
                    (N * N * s.E2 * s.E2);
  p.lambda = std::max(l1, l2) * (1.0 + 1e-3 + 5.0 * U(rng));
  return {s, p};
}

std::vector<double> feasible_w(const ReducedFunctional &J, std::mt19937_64 &rng,
                               double noise) {
  const auto &f = J.full();
  const Grid &g = f.grid();
  const std::size_t n = g.size();
  std::normal_distribution<double> nd(0.0, 1.0);
  std::vector<double> w(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = -std::log(std::exp(f.background().u01[k]) + 0.1) + noise * nd(rng);
    w[n + k] =
        -std::log(std::exp(f.background().u02[k]) + 0.1) + noise * nd(rng);
  }
  project_mean_zero(g, std::span<double>(w).subspan(0, n));
  project_mean_zero(g, std::span<double>(w).subspan(n, n));
  return w;
}

} // namespace

TEST_CASE("mean fixed point: bisection and Newton agree on random states") {
  std::mt19937_64 rng(2024);
  for (int t = 0; t < 100; ++t) {
    const auto [s, p] = random_state(rng);
    const auto a = solve_mean_fixed_point(s, p);
    const auto b = solve_mean_fixed_point_newton(s, p);
    CHECK(std::abs(a.root_X - b.root_X) <= 1e-10 * a.root_X);
    CHECK(a.residual < 1e-12);
    const MeanMaps m{s, p};
    CHECK(m.f(0.0) < 0.0);
    // The means satisfy both relations.
    CHECK(std::exp(a.c1) == doctest::Approx(m.f1(std::exp(a.c2))).epsilon(1e-10));
    CHECK(std::exp(a.c2) == doctest::Approx(m.f2(std::exp(a.c1))).epsilon(1e-10));
    double prev = -INFINITY;
    for (int i = 1; i <= 50; ++i) {
      const double X = a.hi * 2.0 * i / 50.0;
      const double q = m.f(X) / X;
      CHECK(q > prev);
      prev = q;
    }
  }
}

TEST_CASE("mean fixed point tends to the decoupled closed form as kappa -> 1") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    auto [s, p] = random_state(rng);
    const double N = p.N;
    auto closed = [&](double E, double Q, double a, double b, double c) {
      return (a * E + std::sqrt(a * a * E * E - 4.0 * c * b * Q / p.lambda)) /
             (2.0 * c * Q);
    };
    for (double dk : {1e-12, 1e-8}) {
      p.kappa = 1.0 + dk;
      const auto b = periodic_b(p, 1, 1);
      s.b1 = b[0];
      s.b2 = b[1];
      const double l1 = 4.0 * N * b[0] * s.Q1 / (N * N * s.E1 * s.E1);
      const double l2 = 4.0 * (N - 1.0) * N * b[1] * s.Q2 / (N * N * s.E2 * s.E2);
      p.lambda = 2.0 * std::max(l1, l2);
      const auto r = solve_mean_fixed_point(s, p);
      const double X1 = closed(s.E1, s.Q1, N, s.b1, N);
      const double X2 = closed(s.E2, s.Q2, N / (N - 1.0), s.b2, N / (N - 1.0));
      const double tol = dk < 1e-10 ? 1e-10 : 1e2 * dk;
      CHECK(std::abs(r.root_X - X1) <= tol * X1);
      CHECK(std::abs(std::exp(r.c2) - X2) <= tol * X2);
    }
  }
}

TEST_CASE("mean fixed point rejects states outside the admissible set") {
  std::mt19937_64 rng(9);
  auto [s, p] = random_state(rng);
  p.lambda *= 1e-3;
  CHECK_THROWS_AS(solve_mean_fixed_point(s, p), ConstraintViolation);
  p.lambda *= 1e3;
  p.kappa = 1.0;
  CHECK_THROWS_AS(solve_mean_fixed_point(s, p), std::invalid_argument);
}

TEST_CASE("constraint margin just above the threshold") {
  auto p = flux_problem(1.0);
  const Grid g = p.make_grid();
  const auto adm = admissible_lambda_min(p.params, 1, 1, g.area());
  CHECK(adm == doctest::Approx(8.0 / pi));
  const auto bg = periodic_background(p.vortices, g);
  ScalarField w1(g), w2(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    w1[k] = -bg.u01[k];
    w2[k] = -bg.u02[k];
  }
  project_mean_zero(g, w1.span());
  project_mean_zero(g, w2.span());
  // w = -u0 makes e^{u0 + w} constant, the Cauchy-Schwarz equality case.
  p.params.lambda = 1.1 * adm;
  auto m = constraint_margin(w1, w2, bg, p.params, p.vortices);
  CHECK(m[0] > 0.0);
  CHECK(m[1] > 0.0);
  p.params.lambda = 0.9 * adm;
  m = constraint_margin(w1, w2, bg, p.params, p.vortices);
  CHECK(m[0] < 0.0);
  CHECK(m[1] < 0.0);
}

TEST_CASE("reduced functional equals the full functional at w + c") {
  const auto p = flux_problem(16.0 / pi);
  VortexFunctional f(p.params, periodic_background(p.vortices, p.make_grid()));
  ReducedFunctional J(f, p.vortices);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 5; ++t) {
    const auto w = feasible_w(J, rng, 0.05);
    const double a = J.value(w), b = J.value_via_I(w);
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)));
  }
}

TEST_CASE("gradients of I and J match central differences on the torus") {
  const auto p = flux_problem(16.0 / pi, 32);
  VortexFunctional f(p.params, periodic_background(p.vortices, p.make_grid()));
  ReducedFunctional J(f, p.vortices);
  std::mt19937_64 rng(13);
  std::normal_distribution<double> nd(0.0, 1.0);
  const auto w = feasible_w(J, rng, 0.05);
  const std::size_t n = f.grid().size();
  std::vector<double> gI(2 * n), gJ(2 * n), d(2 * n), a(2 * n), b(2 * n);
  f.gradient(w, gI);
  J.gradient(w, gJ);
  const double eps = 1e-4;
  for (int t = 0; t < 10; ++t) {
    for (auto &x : d)
      x = nd(rng);
    project_mean_zero(f.grid(), std::span<double>(d).subspan(0, n));
    project_mean_zero(f.grid(), std::span<double>(d).subspan(n, n));
    for (std::size_t k = 0; k < d.size(); ++k) {
      a[k] = w[k] + eps * d[k];
      b[k] = w[k] - eps * d[k];
    }
    const double fdI = (f.value(a) - f.value(b)) / (2 * eps);
    const double fdJ = (J.value(a) - J.value(b)) / (2 * eps);
    const double anI = f.dot(gI, d), anJ = f.dot(gJ, d);
    CHECK(std::abs(fdI - anI) <= 1e-6 * std::max(1.0, std::abs(anI)));
    CHECK(std::abs(fdJ - anJ) <= 1e-6 * std::max(1.0, std::abs(anJ)));
  }
}

TEST_CASE("periodic vacuum is returned exactly") {
  PeriodicProblem p;
  p.params = {3, 2.0, 0.7};
  p.domain = {3.0, 5.0};
  p.M1 = 16;
  p.M2 = 24;
  const auto r = minimize_constrained(p);
  CHECK(r.converged);
  for (std::size_t k = 0; k < r.v1.size(); ++k) {
    CHECK(std::abs(r.v1[k]) < 1e-8);
    CHECK(std::abs(r.v2[k]) < 1e-8);
  }
  CHECK(verify_solution(r, p.params, {}).all_pass());
}

TEST_CASE("periodic minimizer satisfies the structural properties") {
  const auto p = flux_problem(16.0 / pi);
  auto r = minimize_constrained(p);
  REQUIRE(r.converged);
  const auto rep = verify_solution(r, p.params, p.vortices);
  for (const auto &c : rep.checks) {
    INFO(c.name << " = " << c.value);
    CHECK(c.pass);
  }
  // The means of the solution are the fixed point of its mean-free part.
  VortexFunctional f(p.params, periodic_background(p.vortices, p.make_grid()));
  ReducedFunctional J(f, p.vortices);
  auto w = r.packed();
  const std::size_t n = r.v1.size();
  for (std::size_t k = 0; k < n; ++k) {
    w[k] -= r.c1;
    w[n + k] -= r.c2;
  }
  const auto fp = J.means(w);
  CHECK(fp.c1 == doctest::Approx(r.c1).epsilon(1e-8));
  CHECK(fp.c2 == doctest::Approx(r.c2).epsilon(1e-8));
  r.v2(5, 7) += 1e-3;
  r.u2(5, 7) += 1e-3;
  CHECK_FALSE(verify_solution(r, p.params, p.vortices).find("el_residual")->pass);
}

TEST_CASE("periodic solver reports infeasibility below the threshold") {
  const auto p = flux_problem(0.5 * 4.0 / pi);
  const auto r = minimize_constrained(p);
  CHECK_FALSE(r.converged);
  CHECK(r.status.rfind("infeasible", 0) == 0);
}

TEST_CASE("periodic problem validation") {
  auto p = flux_problem(5.0);
  p.params.kappa = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = flux_problem(5.0);
  p.vortices.points1[0].x = 10.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
