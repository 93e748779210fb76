#include "nacs/vortex.hpp"

#include "fftw_lock.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nacs {

namespace {

int total(const std::vector<Vortex> &pts) {
  int n = 0;
  for (const auto &p : pts)
    n += p.multiplicity;
  return n;
}

double wrap_delta(double d, double L) { return d - L * std::round(d / L); }

} // namespace

int VortexSet::n1() const { return total(points1); }
int VortexSet::n2() const { return total(points2); }

void VortexSet::validate() const {
  for (const auto *pts : {&points1, &points2})
    for (const auto &p : *pts) {
      if (!std::isfinite(p.x) || !std::isfinite(p.y))
        throw std::invalid_argument("vortex coordinates must be finite");
      if (p.multiplicity < 1)
        throw std::invalid_argument("vortex multiplicity must be >= 1, got " +
                                    std::to_string(p.multiplicity));
    }
}

BackgroundPair planar_background(const VortexSet &vortices, double mu,
                                 const Grid &grid) {
  if (grid.geometry() != Geometry::planar)
    throw std::invalid_argument("planar_background requires a box grid");
  if (!(mu > 0.0) || !std::isfinite(mu))
    throw std::invalid_argument("mu must be positive");
  vortices.validate();
  const auto box = grid.box_domain();
  for (int c = 0; c < 2; ++c)
    for (const auto &p : vortices.points(c))
      if (std::abs(p.x) > box.R1 || std::abs(p.y) > box.R2)
        throw std::invalid_argument("vortex point outside the box");

  BackgroundPair bg{ScalarField(grid), ScalarField(grid), ScalarField(grid),
                    ScalarField(grid), mu, Geometry::planar};
  for (int c = 0; c < 2; ++c) {
    auto &u0 = c == 0 ? bg.u01 : bg.u02;
    auto &h = c == 0 ? bg.h1 : bg.h2;
    for (int i = 0; i < grid.M1(); ++i)
      for (int j = 0; j < grid.M2(); ++j) {
        double u = 0.0, hh = 0.0;
        for (const auto &p : vortices.points(c)) {
          const double dx = grid.x(i) - p.x, dy = grid.y(j) - p.y;
          const double r2 = dx * dx + dy * dy;
          const double den = mu + r2;
          hh += p.multiplicity * 4.0 * mu / (den * den);
          u -= r2 > 0.0 ? p.multiplicity * std::log1p(mu / r2)
                        : std::numeric_limits<double>::infinity();
        }
        u0(i, j) = std::max(u, kLogClamp);
        h(i, j) = hh;
      }
  }
  return bg;
}

BackgroundPair periodic_background(const VortexSet &vortices,
                                   const Grid &grid) {
  if (grid.geometry() != Geometry::periodic)
    throw std::invalid_argument("periodic_background requires a torus grid");
  vortices.validate();
  const double L1 = grid.extent1(), L2 = grid.extent2(), area = grid.area();
  for (int c = 0; c < 2; ++c)
    for (const auto &p : vortices.points(c))
      if (!(p.x >= 0.0 && p.x < L1 && p.y >= 0.0 && p.y < L2))
        throw std::invalid_argument("vortex point outside the fundamental cell");

  BackgroundPair bg{ScalarField(grid), ScalarField(grid), ScalarField(grid),
                    ScalarField(grid), 0.0, Geometry::periodic};
  const int M1 = grid.M1(), M2 = grid.M2(), Mh = M2 / 2 + 1;
  const double twopi = 2.0 * std::numbers::pi;
  const std::size_t nc = static_cast<std::size_t>(M1) * Mh;

  for (int c = 0; c < 2; ++c) {
    const auto &pts = vortices.points(c);
    const int n = c == 0 ? vortices.n1() : vortices.n2();
    (c == 0 ? bg.h1 : bg.h2).values().assign(
        grid.size(), 4.0 * std::numbers::pi * n / area);
    if (pts.empty())
      continue;

    fftw_complex *spec =
        static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * nc));
    double *out = static_cast<double *>(fftw_malloc(sizeof(double) * grid.size()));
    for (int i = 0; i < M1; ++i) {
      const int m1 = i <= M1 / 2 ? i : i - M1;
      const double k1 = twopi * m1 / L1;
      for (int j = 0; j < Mh; ++j) {
        const double k2 = twopi * j / L2;
        const double s = k1 * k1 + k2 * k2;
        std::complex<double> acc = 0.0;
        if (s > 0.0)
          for (const auto &p : pts) {
            // Nyquist bins carry the cosine part only.
            const std::complex<double> e1 =
                2 * i == M1 ? std::complex<double>(std::cos(k1 * p.x), 0.0)
                            : std::polar(1.0, -k1 * p.x);
            const std::complex<double> e2 =
                2 * j == M2 ? std::complex<double>(std::cos(k2 * p.y), 0.0)
                            : std::polar(1.0, -k2 * p.y);
            acc += -2.0 * twopi * p.multiplicity * e1 * e2 / (area * s);
          }
        const std::size_t k = static_cast<std::size_t>(i) * Mh + j;
        spec[k][0] = acc.real();
        spec[k][1] = acc.imag();
      }
    }
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_plan plan =
          fftw_plan_dft_c2r_2d(M1, M2, spec, out, FFTW_ESTIMATE);
      fftw_execute(plan);
      fftw_destroy_plan(plan);
    }
    auto &u0 = c == 0 ? bg.u01 : bg.u02;
    std::copy(out, out + grid.size(), u0.values().begin());
    fftw_free(spec);
    fftw_free(out);
  }
  return bg;
}

std::vector<char> vortex_node_mask(const Grid &grid, const VortexSet &vortices,
                                   int component) {
  std::vector<char> mask(grid.size(), 0);
  const double tol = 1e-9 * std::min(grid.hx(), grid.hy());
  const bool torus = grid.geometry() == Geometry::periodic;
  for (const auto &p : vortices.points(component))
    for (int i = 0; i < grid.M1(); ++i)
      for (int j = 0; j < grid.M2(); ++j) {
        double dx = grid.x(i) - p.x, dy = grid.y(j) - p.y;
        if (torus) {
          dx = wrap_delta(dx, grid.extent1());
          dy = wrap_delta(dy, grid.extent2());
        }
        if (std::abs(dx) <= tol && std::abs(dy) <= tol)
          mask[grid.index(i, j)] = 1;
      }
  return mask;
}

} // namespace nacs
