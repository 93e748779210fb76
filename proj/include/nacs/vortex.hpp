#pragma once

#include <vector>

#include "nacs/lattice.hpp"

namespace nacs {

struct Vortex {
  double x = 0.0;
  double y = 0.0;
  int multiplicity = 1;
};

/// Prescribed zeros of the two Higgs components.
struct VortexSet {
  std::vector<Vortex> points1;
  std::vector<Vortex> points2;

  int n1() const;
  int n2() const;
  bool empty() const { return points1.empty() && points2.empty(); }
  const std::vector<Vortex> &points(int component) const {
    return component == 0 ? points1 : points2;
  }
  /// Finite coordinates and positive multiplicities.
  void validate() const;
};

/// Background data. `h1`, `h2` are the smooth sources absorbing the Dirac
/// masses: planar h_i = sum 4 mu / (mu + |x - p|^2)^2, periodic h_i is the
/// constant 4 pi n_i / |Omega|. In both geometries the fluctuation obeys
/// Laplacian(v) = S(u0 + v) + h.
struct BackgroundPair {
  ScalarField u01;
  ScalarField u02;
  ScalarField h1;
  ScalarField h2;
  double mu = 0.0;
  Geometry geometry = Geometry::planar;

  const ScalarField &u0(int c) const { return c == 0 ? u01 : u02; }
  const ScalarField &h(int c) const { return c == 0 ? h1 : h2; }
};

/// Log-scale floor for u0 at vortex nodes; e^{-700} underflows cleanly.
inline constexpr double kLogClamp = -700.0;
inline constexpr double kDefaultMu = 10.0;

/// u0_i = -sum m ln(1 + mu / |x - p|^2) clamped at kLogClamp.
/// Requires a box grid that contains every vortex point and mu > 0.
BackgroundPair planar_background(const VortexSet &vortices, double mu,
                                 const Grid &grid);

/// Mean-zero solution of Laplacian(u0_i) = 4 pi sum delta_p - 4 pi n_i/|Omega|
/// built from the band-limited Fourier series of the deltas. Requires a
/// torus grid and vortex points inside [0, L1) x [0, L2).
BackgroundPair periodic_background(const VortexSet &vortices,
                                   const Grid &grid);

/// Nodes of `grid` that coincide with a vortex of the given component
/// (within 1e-9 of a grid spacing, periodic distance on the torus).
std::vector<char> vortex_node_mask(const Grid &grid, const VortexSet &vortices,
                                   int component);

} // namespace nacs
