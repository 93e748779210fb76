#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nacs/coupling.hpp"

namespace nacs {

enum class Geometry { planar, periodic };

const char *to_string(Geometry g);
Geometry geometry_from_string(const std::string &s);

/// Rectangular fundamental cell [0, L1) x [0, L2).
struct TorusDomain {
  double L1 = 0.0;
  double L2 = 0.0;
  double area() const { return L1 * L2; }
  void validate() const;
};

/// Truncated plane [-R1, R1] x [-R2, R2].
struct PlanarBox {
  double R1 = 0.0;
  double R2 = 0.0;
  double area() const { return 4.0 * R1 * R2; }
  void validate() const;
};

struct GridSpec {
  int M1 = 128;
  int M2 = 128;
  Geometry geometry = Geometry::periodic;
  /// M1, M2 >= 8 and even.
  void validate() const;
};

/// Sample layout of a uniform grid together with its physical extents.
///
/// Torus nodes sit at x_i = i L1 / M1 (no duplicated seam). Box nodes
/// include both edges: x_i = -R1 + i * 2 R1 / (M1 - 1). Storage is
/// row-major with x as the slow index: index(i, j) = i * M2 + j.
class Grid {
public:
  static Grid torus(const TorusDomain &d, int M1, int M2);
  static Grid box(const PlanarBox &b, int M1, int M2);

  Geometry geometry() const { return spec_.geometry; }
  const GridSpec &spec() const { return spec_; }
  int M1() const { return spec_.M1; }
  int M2() const { return spec_.M2; }
  std::size_t size() const {
    return static_cast<std::size_t>(spec_.M1) * spec_.M2;
  }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * spec_.M2 + j;
  }

  double hx() const { return hx_; }
  double hy() const { return hy_; }
  double x(int i) const { return x0_ + i * hx_; }
  double y(int j) const { return y0_ + j * hy_; }
  /// L1 * L2 for the torus, (2 R1)(2 R2) for the box.
  double area() const { return ex1_ * ex2_; }
  /// Cell edge (torus) or full box width (planar) along each axis.
  double extent1() const { return ex1_; }
  double extent2() const { return ex2_; }

  TorusDomain torus_domain() const;
  PlanarBox box_domain() const;

  /// Box nodes on the outer edge; always false on the torus.
  bool is_boundary(int i, int j) const {
    return spec_.geometry == Geometry::planar &&
           (i == 0 || j == 0 || i == spec_.M1 - 1 || j == spec_.M2 - 1);
  }
  /// Quadrature weight of node (i, j): rectangle rule on the torus,
  /// trapezoid rule on the box.
  double weight(int i, int j) const;

  bool operator==(const Grid &o) const;

private:
  GridSpec spec_;
  double ex1_ = 0.0, ex2_ = 0.0;
  double hx_ = 0.0, hy_ = 0.0;
  double x0_ = 0.0, y0_ = 0.0;
};

class ScalarField {
public:
  explicit ScalarField(Grid grid, double value = 0.0);
  ScalarField(Grid grid, std::vector<double> values);

  const Grid &grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }

  double &operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double &operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::vector<double> &values() { return values_; }
  const std::vector<double> &values() const { return values_; }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }

  /// Fill with f(x, y).
  template <class F> void fill(F &&f) {
    for (int i = 0; i < grid_.M1(); ++i)
      for (int j = 0; j < grid_.M2(); ++j)
        (*this)(i, j) = f(grid_.x(i), grid_.y(j));
  }

private:
  Grid grid_;
  std::vector<double> values_;
};

/// Quadrature of f over its domain.
double integrate(const ScalarField &f);
double integrate(const Grid &grid, std::span<const double> f);

/// Mean-zero u with spectral Laplacian equal to f - mean(f). Torus only.
/// Emits a warning on stderr when |integral of f| exceeds
/// `tolerance * area`.
ScalarField poisson_solve_mean_zero(const ScalarField &f,
                                    double tolerance = 1e-8);

/// Spectral Laplacian on the torus; five-point stencil on box interior
/// nodes (edge nodes of the result are zero).
ScalarField laplacian(const ScalarField &f);
void laplacian(const Grid &grid, std::span<const double> f,
               std::span<double> out);

/// Integral of grad f . grad g. Spectral on the torus, forward differences
/// with trapezoid weights on the box (consistent with the five-point
/// Laplacian). Throws std::invalid_argument on grid mismatch.
double grad_inner(const ScalarField &f, const ScalarField &g);
double grad_inner(const Grid &grid, std::span<const double> f,
                  std::span<const double> g);

/// Per-mode 2x2 operator applied to a field pair. The symbol is a function
/// of s, the eigenvalue of -Laplacian for the mode: |k|^2 on the torus,
/// the discrete Dirichlet eigenvalue on box interiors (box edge values are
/// zero in the output). On the torus `drop_mean` zeroes the k = 0 mode.
void apply_modal(const Grid &grid, std::span<const double> in1,
                 std::span<const double> in2, std::span<double> out1,
                 std::span<double> out2,
                 const std::function<Matrix2(double)> &symbol,
                 bool drop_mean = false);

/// Remove the discrete mean in place.
void project_mean_zero(const Grid &grid, std::span<double> f);

} // namespace nacs
