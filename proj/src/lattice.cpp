#include "nacs/lattice.hpp"

#include "fftw_lock.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <tuple>

namespace nacs {

std::mutex &detail::fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

const char *to_string(Geometry g) {
  return g == Geometry::planar ? "planar" : "periodic";
}

Geometry geometry_from_string(const std::string &s) {
  if (s == "planar")
    return Geometry::planar;
  if (s == "periodic")
    return Geometry::periodic;
  throw std::invalid_argument("unknown geometry '" + s + "'");
}

void TorusDomain::validate() const {
  if (!(L1 > 0.0) || !(L2 > 0.0))
    throw std::invalid_argument("torus edges must be positive");
}

void PlanarBox::validate() const {
  if (!(R1 > 0.0) || !(R2 > 0.0))
    throw std::invalid_argument("box half widths must be positive");
}

void GridSpec::validate() const {
  if (M1 < 8 || M2 < 8 || M1 % 2 != 0 || M2 % 2 != 0)
    throw std::invalid_argument("grid sizes must be even and >= 8, got " +
                                std::to_string(M1) + "x" + std::to_string(M2));
}

Grid Grid::torus(const TorusDomain &d, int M1, int M2) {
  d.validate();
  Grid g;
  g.spec_ = GridSpec{M1, M2, Geometry::periodic};
  g.spec_.validate();
  g.ex1_ = d.L1;
  g.ex2_ = d.L2;
  g.hx_ = d.L1 / M1;
  g.hy_ = d.L2 / M2;
  return g;
}

Grid Grid::box(const PlanarBox &b, int M1, int M2) {
  b.validate();
  Grid g;
  g.spec_ = GridSpec{M1, M2, Geometry::planar};
  g.spec_.validate();
  g.ex1_ = 2.0 * b.R1;
  g.ex2_ = 2.0 * b.R2;
  g.hx_ = g.ex1_ / (M1 - 1);
  g.hy_ = g.ex2_ / (M2 - 1);
  g.x0_ = -b.R1;
  g.y0_ = -b.R2;
  return g;
}

TorusDomain Grid::torus_domain() const {
  if (geometry() != Geometry::periodic)
    throw std::logic_error("grid is not periodic");
  return {ex1_, ex2_};
}

PlanarBox Grid::box_domain() const {
  if (geometry() != Geometry::planar)
    throw std::logic_error("grid is not planar");
  return {0.5 * ex1_, 0.5 * ex2_};
}

double Grid::weight(int i, int j) const {
  double w = hx_ * hy_;
  if (geometry() == Geometry::planar) {
    if (i == 0 || i == M1() - 1)
      w *= 0.5;
    if (j == 0 || j == M2() - 1)
      w *= 0.5;
  }
  return w;
}

bool Grid::operator==(const Grid &o) const {
  return spec_.M1 == o.spec_.M1 && spec_.M2 == o.spec_.M2 &&
         spec_.geometry == o.spec_.geometry && ex1_ == o.ex1_ &&
         ex2_ == o.ex2_;
}

ScalarField::ScalarField(Grid grid, double value)
    : grid_(std::move(grid)), values_(grid_.size(), value) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field size does not match grid");
}

namespace {

struct FftwDeleter {
  void operator()(void *p) const { fftw_free(p); }
};
using RealBuf = std::unique_ptr<double[], FftwDeleter>;
using ComplexBuf = std::unique_ptr<fftw_complex[], FftwDeleter>;

RealBuf alloc_real(std::size_t n) {
  return RealBuf(static_cast<double *>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuf alloc_complex(std::size_t n) {
  return ComplexBuf(
      static_cast<fftw_complex *>(fftw_malloc(sizeof(fftw_complex) * n)));
}

struct Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

Plans torus_plans(int M1, int M2) {
  static std::map<std::pair<int, int>, Plans> cache;
  std::lock_guard lock(detail::fftw_planner_mutex());
  auto it = cache.find({M1, M2});
  if (it != cache.end())
    return it->second;
  const std::size_t nc = static_cast<std::size_t>(M1) * (M2 / 2 + 1);
  auto r = alloc_real(static_cast<std::size_t>(M1) * M2);
  auto c = alloc_complex(nc);
  Plans p;
  p.forward = fftw_plan_dft_r2c_2d(M1, M2, r.get(), c.get(), FFTW_ESTIMATE);
  p.backward = fftw_plan_dft_c2r_2d(M1, M2, c.get(), r.get(), FFTW_ESTIMATE);
  cache.emplace(std::make_pair(M1, M2), p);
  return p;
}

fftw_plan dst_plan(int n1, int n2) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard lock(detail::fftw_planner_mutex());
  auto it = cache.find({n1, n2});
  if (it != cache.end())
    return it->second;
  auto a = alloc_real(static_cast<std::size_t>(n1) * n2);
  auto b = alloc_real(static_cast<std::size_t>(n1) * n2);
  fftw_plan p = fftw_plan_r2r_2d(n1, n2, a.get(), b.get(), FFTW_RODFT00,
                                 FFTW_RODFT00, FFTW_ESTIMATE);
  cache.emplace(std::make_pair(n1, n2), p);
  return p;
}

void require_torus(const Grid &g, const char *what) {
  if (g.geometry() != Geometry::periodic)
    throw std::invalid_argument(std::string(what) + " requires a torus grid");
}

// Wavenumber of DFT bin `m` on an axis with M samples over length L.
double wavenumber(int m, int M, double L) {
  const int mm = m <= M / 2 ? m : m - M;
  return 2.0 * std::numbers::pi * mm / L;
}

// Visit the half spectrum of a torus grid: f(i, j, s, index).
template <class F> void for_each_mode(const Grid &g, F &&f) {
  const int M1 = g.M1(), M2 = g.M2(), Mh = M2 / 2 + 1;
  for (int i = 0; i < M1; ++i) {
    const double k1 = wavenumber(i, M1, g.extent1());
    for (int j = 0; j < Mh; ++j) {
      const double k2 = 2.0 * std::numbers::pi * j / g.extent2();
      f(i, j, k1 * k1 + k2 * k2, static_cast<std::size_t>(i) * Mh + j);
    }
  }
}

// Scalar spectral multiplier on the torus: out = IFFT(sym(s) * FFT(in)).
template <class Sym>
void torus_multiplier(const Grid &g, std::span<const double> in,
                      std::span<double> out, Sym &&sym) {
  const Plans p = torus_plans(g.M1(), g.M2());
  const std::size_t n = g.size();
  const std::size_t nc = static_cast<std::size_t>(g.M1()) * (g.M2() / 2 + 1);
  auto r = alloc_real(n);
  auto c = alloc_complex(nc);
  std::copy(in.begin(), in.end(), r.get());
  fftw_execute_dft_r2c(p.forward, r.get(), c.get());
  const double scale = 1.0 / static_cast<double>(n);
  for_each_mode(g, [&](int, int, double s, std::size_t k) {
    const double m = sym(s) * scale;
    c[k][0] *= m;
    c[k][1] *= m;
  });
  fftw_execute_dft_c2r(p.backward, c.get(), r.get());
  std::copy(r.get(), r.get() + n, out.begin());
}

} // namespace

double integrate(const Grid &grid, std::span<const double> f) {
  if (f.size() != grid.size())
    throw std::invalid_argument("integrate: size mismatch");
  double sum = 0.0;
  if (grid.geometry() == Geometry::periodic) {
    for (double v : f)
      sum += v;
    return sum * grid.hx() * grid.hy();
  }
  for (int i = 0; i < grid.M1(); ++i)
    for (int j = 0; j < grid.M2(); ++j)
      sum += grid.weight(i, j) * f[grid.index(i, j)];
  return sum;
}

double integrate(const ScalarField &f) { return integrate(f.grid(), f.span()); }

void project_mean_zero(const Grid &grid, std::span<double> f) {
  const double mean = integrate(grid, f) / grid.area();
  for (double &v : f)
    v -= mean;
}

ScalarField poisson_solve_mean_zero(const ScalarField &f, double tolerance) {
  const Grid &g = f.grid();
  require_torus(g, "poisson_solve_mean_zero");
  const double total = integrate(f);
  if (std::abs(total) > tolerance * g.area())
    std::cerr << "warning: poisson_solve_mean_zero: source has integral "
              << total << ", mean removed\n";
  ScalarField u(g);
  torus_multiplier(g, f.span(), u.span(),
                   [](double s) { return s > 0.0 ? -1.0 / s : 0.0; });
  return u;
}

void laplacian(const Grid &g, std::span<const double> f,
               std::span<double> out) {
  if (f.size() != g.size() || out.size() != g.size())
    throw std::invalid_argument("laplacian: size mismatch");
  if (g.geometry() == Geometry::periodic) {
    torus_multiplier(g, f, out, [](double s) { return -s; });
    return;
  }
  const double ax = 1.0 / (g.hx() * g.hx()), ay = 1.0 / (g.hy() * g.hy());
  const int M1 = g.M1(), M2 = g.M2();
  for (int i = 0; i < M1; ++i)
    for (int j = 0; j < M2; ++j) {
      const std::size_t k = g.index(i, j);
      if (g.is_boundary(i, j)) {
        out[k] = 0.0;
        continue;
      }
      out[k] = ax * (f[k + M2] - 2.0 * f[k] + f[k - M2]) +
               ay * (f[k + 1] - 2.0 * f[k] + f[k - 1]);
    }
}

ScalarField laplacian(const ScalarField &f) {
  ScalarField out(f.grid());
  laplacian(f.grid(), f.span(), out.span());
  return out;
}

double grad_inner(const Grid &g, std::span<const double> f,
                  std::span<const double> h) {
  if (f.size() != g.size() || h.size() != g.size())
    throw std::invalid_argument("grad_inner: size mismatch");
  if (g.geometry() == Geometry::periodic) {
    const Plans p = torus_plans(g.M1(), g.M2());
    const std::size_t n = g.size();
    const std::size_t nc = static_cast<std::size_t>(g.M1()) * (g.M2() / 2 + 1);
    auto r = alloc_real(n);
    auto cf = alloc_complex(nc);
    auto ch = alloc_complex(nc);
    std::copy(f.begin(), f.end(), r.get());
    fftw_execute_dft_r2c(p.forward, r.get(), cf.get());
    std::copy(h.begin(), h.end(), r.get());
    fftw_execute_dft_r2c(p.forward, r.get(), ch.get());
    // Parseval over the half spectrum: interior columns count twice.
    const int Mh = g.M2() / 2 + 1;
    double sum = 0.0;
    for_each_mode(g, [&](int, int j, double s, std::size_t k) {
      const double mult = (j == 0 || (j == Mh - 1)) ? 1.0 : 2.0;
      sum += mult * s * (cf[k][0] * ch[k][0] + cf[k][1] * ch[k][1]);
    });
    return sum * g.area() / (static_cast<double>(n) * static_cast<double>(n));
  }
  const int M1 = g.M1(), M2 = g.M2();
  const double hx = g.hx(), hy = g.hy();
  double sum = 0.0;
  // x-edges between (i, j) and (i+1, j), weighted by the trapezoid y-weight.
  for (int i = 0; i + 1 < M1; ++i)
    for (int j = 0; j < M2; ++j) {
      const std::size_t k = g.index(i, j);
      const double wy = (j == 0 || j == M2 - 1) ? 0.5 : 1.0;
      sum += wy * (f[k + M2] - f[k]) * (h[k + M2] - h[k]) * hy / hx;
    }
  for (int i = 0; i < M1; ++i)
    for (int j = 0; j + 1 < M2; ++j) {
      const std::size_t k = g.index(i, j);
      const double wx = (i == 0 || i == M1 - 1) ? 0.5 : 1.0;
      sum += wx * (f[k + 1] - f[k]) * (h[k + 1] - h[k]) * hx / hy;
    }
  return sum;
}

double grad_inner(const ScalarField &f, const ScalarField &g) {
  if (!(f.grid() == g.grid()))
    throw std::invalid_argument("grad_inner: grid mismatch");
  return grad_inner(f.grid(), f.span(), g.span());
}

void apply_modal(const Grid &g, std::span<const double> in1,
                 std::span<const double> in2, std::span<double> out1,
                 std::span<double> out2,
                 const std::function<Matrix2(double)> &symbol,
                 bool drop_mean) {
  const std::size_t n = g.size();
  if (in1.size() != n || in2.size() != n || out1.size() != n ||
      out2.size() != n)
    throw std::invalid_argument("apply_modal: size mismatch");

  if (g.geometry() == Geometry::periodic) {
    const Plans p = torus_plans(g.M1(), g.M2());
    const std::size_t nc = static_cast<std::size_t>(g.M1()) * (g.M2() / 2 + 1);
    auto r = alloc_real(n);
    auto c1 = alloc_complex(nc);
    auto c2 = alloc_complex(nc);
    std::copy(in1.begin(), in1.end(), r.get());
    fftw_execute_dft_r2c(p.forward, r.get(), c1.get());
    std::copy(in2.begin(), in2.end(), r.get());
    fftw_execute_dft_r2c(p.forward, r.get(), c2.get());
    const double scale = 1.0 / static_cast<double>(n);
    // Symbols depend on s only; cache per distinct s.
    std::map<double, Matrix2> memo;
    for_each_mode(g, [&](int i, int j, double s, std::size_t k) {
      Matrix2 m;
      if (drop_mean && i == 0 && j == 0) {
        m = Matrix2{};
      } else {
        auto it = memo.find(s);
        if (it == memo.end())
          it = memo.emplace(s, symbol(s)).first;
        m = it->second;
      }
      for (int part = 0; part < 2; ++part) {
        const double a = c1[k][part], b = c2[k][part];
        c1[k][part] = scale * (m(0, 0) * a + m(0, 1) * b);
        c2[k][part] = scale * (m(1, 0) * a + m(1, 1) * b);
      }
    });
    fftw_execute_dft_c2r(p.backward, c1.get(), r.get());
    std::copy(r.get(), r.get() + n, out1.begin());
    fftw_execute_dft_c2r(p.backward, c2.get(), r.get());
    std::copy(r.get(), r.get() + n, out2.begin());
    return;
  }

  // Box: discrete sine transform on the interior nodes.
  const int n1 = g.M1() - 2, n2 = g.M2() - 2;
  const std::size_t ni = static_cast<std::size_t>(n1) * n2;
  fftw_plan plan = dst_plan(n1, n2);
  auto a1 = alloc_real(ni), a2 = alloc_real(ni), b1 = alloc_real(ni),
       b2 = alloc_real(ni);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      a1[static_cast<std::size_t>(i) * n2 + j] = in1[g.index(i + 1, j + 1)];
      a2[static_cast<std::size_t>(i) * n2 + j] = in2[g.index(i + 1, j + 1)];
    }
  fftw_execute_r2r(plan, a1.get(), b1.get());
  fftw_execute_r2r(plan, a2.get(), b2.get());
  const double scale = 1.0 / (4.0 * (n1 + 1.0) * (n2 + 1.0));
  std::vector<double> sx(n1), sy(n2);
  for (int i = 0; i < n1; ++i) {
    const double t = std::sin(std::numbers::pi * (i + 1) / (2.0 * (n1 + 1)));
    sx[i] = 4.0 * t * t / (g.hx() * g.hx());
  }
  for (int j = 0; j < n2; ++j) {
    const double t = std::sin(std::numbers::pi * (j + 1) / (2.0 * (n2 + 1)));
    sy[j] = 4.0 * t * t / (g.hy() * g.hy());
  }
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      const std::size_t k = static_cast<std::size_t>(i) * n2 + j;
      const Matrix2 m = symbol(sx[i] + sy[j]);
      const double x = b1[k], y = b2[k];
      b1[k] = scale * (m(0, 0) * x + m(0, 1) * y);
      b2[k] = scale * (m(1, 0) * x + m(1, 1) * y);
    }
  fftw_execute_r2r(plan, b1.get(), a1.get());
  fftw_execute_r2r(plan, b2.get(), a2.get());
  std::fill(out1.begin(), out1.end(), 0.0);
  std::fill(out2.begin(), out2.end(), 0.0);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      out1[g.index(i + 1, j + 1)] = a1[static_cast<std::size_t>(i) * n2 + j];
      out2[g.index(i + 1, j + 1)] = a2[static_cast<std::size_t>(i) * n2 + j];
    }
}

} // namespace nacs
