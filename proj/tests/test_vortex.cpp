#include "doctest.h"

#include "nacs/vortex.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

using namespace nacs;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("vortex set totals and validation") {
  VortexSet v;
  v.points1 = {{0.0, 0.0, 2}, {1.0, 1.0, 1}};
  v.points2 = {{0.5, 0.0, 1}};
  CHECK(v.n1() == 3);
  CHECK(v.n2() == 1);
  CHECK_NOTHROW(v.validate());
  v.points2[0].multiplicity = 0;
  CHECK_THROWS_AS(v.validate(), std::invalid_argument);
  CHECK(VortexSet{}.empty());
}

TEST_CASE("planar background without vortices is trivial") {
  auto g = Grid::box({5.0, 5.0}, 16, 16);
  auto bg = planar_background({}, 10.0, g);
  for (int c = 0; c < 2; ++c)
    for (std::size_t k = 0; k < g.size(); ++k) {
      CHECK(bg.u0(c)[k] == 0.0);
      CHECK(bg.h(c)[k] == 0.0);
    }
  CHECK_THROWS_AS(planar_background({}, 0.0, g), std::invalid_argument);
  CHECK_THROWS_AS(planar_background({}, 1.0, Grid::torus({1, 1}, 8, 8)),
                  std::invalid_argument);
}

TEST_CASE("planar source integrates to 4 pi per vortex") {
  // Box of half width 60 and mu = 1: the tail beyond the box is below 3e-4.
  auto g = Grid::box({60.0, 60.0}, 600, 600);
  VortexSet v;
  v.points1 = {{0.0, 0.0, 1}};
  v.points2 = {{3.0, -2.0, 2}};
  auto bg = planar_background(v, 1.0, g);
  CHECK(integrate(bg.h1) == doctest::Approx(4 * pi).epsilon(1e-3));
  CHECK(integrate(bg.h2) == doctest::Approx(8 * pi).epsilon(1e-3));
}

TEST_CASE("planar background closed form") {
  auto g = Grid::box({8.0, 8.0}, 40, 40);
  VortexSet v;
  const double px = g.x(20), py = g.y(20);
  v.points1 = {{px, py, 1}};
  const double mu = 10.0;
  auto bg = planar_background(v, mu, g);
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j) {
      const double x = g.x(i) - px, y = g.y(j) - py, r2 = x * x + y * y;
      CHECK(bg.u01(i, j) <= 0.0);
      if (r2 > 1e-20) {
        CHECK(bg.u01(i, j) < 0.0);
        CHECK(std::abs(bg.u01(i, j) - std::log(r2) + std::log(mu + r2)) < 1e-12);
      } else {
        CHECK(bg.u01(i, j) == kLogClamp);
        CHECK(std::exp(bg.u01(i, j)) < 1e-300);
      }
      CHECK(bg.u02(i, j) == 0.0);
    }
  auto mask = vortex_node_mask(g, v, 0);
  CHECK(mask[g.index(20, 20)] == 1);
  CHECK(mask[g.index(20, 21)] == 0);
}

TEST_CASE("planar source L2 norm scales like 1/sqrt(mu)") {
  VortexSet v;
  v.points1 = {{0.0, 0.0, 1}};
  const double C = std::sqrt(16 * pi / 3); // exact continuum constant
  double fitted = 0.0;
  for (double mu : {1.0, 10.0, 100.0}) {
    const double R = 40.0 * std::sqrt(mu);
    auto g = Grid::box({R, R}, 400, 400);
    auto bg = planar_background(v, mu, g);
    ScalarField h2(g);
    for (std::size_t k = 0; k < g.size(); ++k)
      h2[k] = bg.h1[k] * bg.h1[k];
    const double norm = std::sqrt(integrate(h2));
    CHECK(norm * std::sqrt(mu) == doctest::Approx(C).epsilon(1e-2));
    fitted = std::max(fitted, norm * std::sqrt(mu));
  }
  CHECK(fitted <= 1.01 * C);
}

TEST_CASE("periodic background") {
  const double L = 2 * pi;
  auto g = Grid::torus({L, L}, 32, 32);
  auto empty = periodic_background({}, g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    CHECK(empty.u01[k] == 0.0);
    CHECK(empty.h2[k] == 0.0);
  }

  VortexSet v;
  v.points1 = {{g.x(8), g.y(8), 1}};
  v.points2 = {{g.x(20), g.y(12), 2}, {1.234, 5.0, 1}};
  auto bg = periodic_background(v, g);
  double m1 = 0, m2 = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    m1 += bg.u01[k];
    m2 += bg.u02[k];
  }
  CHECK(std::abs(m1 / g.size()) < 1e-14);
  CHECK(std::abs(m2 / g.size()) < 1e-14);
  CHECK(bg.h1[0] == doctest::Approx(4 * pi / g.area()));
  CHECK(bg.h2[0] == doctest::Approx(12 * pi / g.area()));

  // Vortex on a node: the band-limited delta is a Kronecker delta there, so
  // the Laplacian equals the sink exactly at every other node.
  auto L1 = laplacian(bg.u01);
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j)
      if (!(i == 8 && j == 8))
        CHECK(L1(i, j) == doctest::Approx(-4 * pi / g.area()).epsilon(1e-10));
  // Total mass 4 pi at the vortex node.
  CHECK((L1(8, 8) + 4 * pi / g.area()) * g.hx() * g.hy() ==
        doctest::Approx(4 * pi).epsilon(1e-10));

  CHECK_THROWS_AS(periodic_background(VortexSet{{{L + 0.1, 1.0, 1}}, {}}, g),
                  std::invalid_argument);
  CHECK_THROWS_AS(periodic_background({}, Grid::box({1, 1}, 8, 8)),
                  std::invalid_argument);
}

TEST_CASE("periodic background off-node vortex converges under refinement") {
  // Pointwise Laplacians of an off-node band-limited delta oscillate, so
  // check the field itself at shared far nodes.
  const double L = 2 * pi;
  VortexSet v;
  v.points1 = {{1.0, 2.0, 1}};
  auto at = [&](int M) {
    auto g = Grid::torus({L, L}, M, M);
    return periodic_background(v, g).u01;
  };
  auto u32 = at(32), u64 = at(64), u128 = at(128);
  auto far_diff = [&](const ScalarField &c, const ScalarField &f) {
    const int r = f.grid().M1() / c.grid().M1();
    double e = 0.0;
    for (int i = 0; i < 32; ++i)
      for (int j = 0; j < 32; ++j) {
        const double x = u32.grid().x(i), y = u32.grid().y(j);
        double dx = std::remainder(x - 1.0, L), dy = std::remainder(y - 2.0, L);
        if (std::hypot(dx, dy) > 1.5) {
          const int ci = i * c.grid().M1() / 32, cj = j * c.grid().M1() / 32;
          e = std::max(e, std::abs(c(ci, cj) - f(ci * r, cj * r)));
        }
      }
    return e;
  };
  const double d1 = far_diff(u32, u64), d2 = far_diff(u64, u128);
  CHECK(d2 < 0.6 * d1);
  CHECK(d2 < 1e-2);
}

TEST_CASE("periodic background is translation covariant") {
  const double L = 3.0;
  auto g = Grid::torus({L, L}, 16, 16);
  VortexSet a, b;
  a.points1 = {{g.x(2), g.y(3), 1}};
  b.points1 = {{g.x(5), g.y(15), 1}};
  auto ua = periodic_background(a, g).u01;
  auto ub = periodic_background(b, g).u01;
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j)
      CHECK(ub((i + 3) % 16, (j + 12) % 16) ==
            doctest::Approx(ua(i, j)).epsilon(1e-12).scale(1.0));
}
