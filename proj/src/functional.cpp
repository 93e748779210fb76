#include "nacs/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nacs {

namespace {

double checked_exp(double x) {
  const double e = std::exp(x);
  if (!std::isfinite(e))
    throw std::domain_error("e^u overflow in functional evaluation");
  return e;
}

} // namespace

VortexFunctional::VortexFunctional(const CouplingParams &params,
                                   BackgroundPair background)
    : params_(params), bg_(std::move(background)), rhs_(params),
      A_(build_A(params, false)), Ainv_(build_A(params, true)) {
  params_.validate();
  const Grid &g = grid();
  scale_ = g.geometry() == Geometry::periodic ? double(params.N) : 1.0;
  weight_.resize(g.size());
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j)
      weight_[g.index(i, j)] = g.is_boundary(i, j) ? 0.0 : g.weight(i, j);
}

std::vector<double> VortexFunctional::initial_guess() const {
  std::vector<double> v(size(), 0.0);
  apply_boundary(v);
  return v;
}

void VortexFunctional::apply_boundary(std::span<double> v) const {
  const Grid &g = grid();
  if (g.geometry() != Geometry::planar)
    return;
  const std::size_t n = g.size();
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j)
      if (g.is_boundary(i, j)) {
        const std::size_t k = g.index(i, j);
        v[k] = -bg_.u01[k];
        v[n + k] = -bg_.u02[k];
      }
}

void VortexFunctional::mask_fixed(std::span<double> d) const {
  if (geometry() != Geometry::planar)
    return;
  const std::size_t n = grid().size();
  for (std::size_t k = 0; k < n; ++k)
    if (weight_[k] == 0.0) {
      d[k] = 0.0;
      d[n + k] = 0.0;
    }
}

double VortexFunctional::value(std::span<const double> v) const {
  const Grid &g = grid();
  const std::size_t n = g.size();
  auto v1 = v.subspan(0, n), v2 = v.subspan(n, n);
  const double grad = 0.5 * A_(0, 0) * grad_inner(g, v1, v1) +
                      A_(0, 1) * grad_inner(g, v1, v2) +
                      0.5 * A_(1, 1) * grad_inner(g, v2, v2);
  const double lam = params_.lambda;
  double pot = 0.0;
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j) {
      const std::size_t k = g.index(i, j);
      const double q1 = checked_exp(bg_.u01[k] + v1[k]) - 1.0;
      const double q2 = checked_exp(bg_.u02[k] + v2[k]) - 1.0;
      const double h1 = bg_.h1[k], h2 = bg_.h2[k];
      const double quad = Ainv_(0, 0) * q1 * q1 + 2.0 * Ainv_(0, 1) * q1 * q2 +
                          Ainv_(1, 1) * q2 * q2;
      const double lin = (A_(0, 0) * h1 + A_(0, 1) * h2) * v1[k] +
                         (A_(1, 0) * h1 + A_(1, 1) * h2) * v2[k];
      pot += g.weight(i, j) * (0.5 * lam * quad + lin);
    }
  return scale_ * (grad + pot);
}

void VortexFunctional::residual(std::span<const double> v,
                                std::span<double> r) const {
  const Grid &g = grid();
  const std::size_t n = g.size();
  laplacian(g, v.subspan(0, n), r.subspan(0, n));
  laplacian(g, v.subspan(n, n), r.subspan(n, n));
  for (std::size_t k = 0; k < n; ++k) {
    const double e1 = checked_exp(bg_.u01[k] + v[k]);
    const double e2 = checked_exp(bg_.u02[k] + v[n + k]);
    const auto s = rhs_(e1, e2);
    r[k] -= s[0] + bg_.h1[k];
    r[n + k] -= s[1] + bg_.h2[k];
  }
  mask_fixed(r);
}

void VortexFunctional::gradient(std::span<const double> v,
                                std::span<double> gr) const {
  residual(v, gr);
  const std::size_t n = grid().size();
  for (std::size_t k = 0; k < n; ++k) {
    const double r1 = gr[k], r2 = gr[n + k];
    gr[k] = -scale_ * (A_(0, 0) * r1 + A_(0, 1) * r2);
    gr[n + k] = -scale_ * (A_(1, 0) * r1 + A_(1, 1) * r2);
  }
}

void VortexFunctional::hessian_apply(std::span<const double> v,
                                     std::span<const double> d,
                                     std::span<double> out) const {
  const Grid &g = grid();
  const std::size_t n = g.size();
  std::vector<double> dm(d.begin(), d.end());
  mask_fixed(dm);
  std::span<const double> dd(dm);
  laplacian(g, dd.subspan(0, n), out.subspan(0, n));
  laplacian(g, dd.subspan(n, n), out.subspan(n, n));
  const double lam = params_.lambda;
  for (std::size_t k = 0; k < n; ++k) {
    const double e1 = checked_exp(bg_.u01[k] + v[k]);
    const double e2 = checked_exp(bg_.u02[k] + v[n + k]);
    const double q1 = e1 - 1.0, q2 = e2 - 1.0;
    const double aq1 = Ainv_(0, 0) * q1 + Ainv_(0, 1) * q2;
    const double aq2 = Ainv_(1, 0) * q1 + Ainv_(1, 1) * q2;
    // Potential Hessian: lambda (diag(E A'q) + diag(E) A' diag(E)).
    const double h11 = lam * (e1 * aq1 + e1 * Ainv_(0, 0) * e1);
    const double h12 = lam * e1 * Ainv_(0, 1) * e2;
    const double h22 = lam * (e2 * aq2 + e2 * Ainv_(1, 1) * e2);
    const double l1 = out[k], l2 = out[n + k];
    out[k] = scale_ * (-(A_(0, 0) * l1 + A_(0, 1) * l2) + h11 * dd[k] +
                       h12 * dd[n + k]);
    out[n + k] = scale_ * (-(A_(1, 0) * l1 + A_(1, 1) * l2) + h12 * dd[k] +
                           h22 * dd[n + k]);
  }
  mask_fixed(out);
}

void VortexFunctional::precondition(std::span<const double> r,
                                    std::span<double> z,
                                    bool drop_mean) const {
  const std::size_t n = grid().size();
  const double sc = scale_, lam = params_.lambda;
  const Matrix2 A = A_, B = Ainv_;
  apply_modal(
      grid(), r.subspan(0, n), r.subspan(n, n), z.subspan(0, n),
      z.subspan(n, n),
      [&](double s) { return (sc * s * A + sc * lam * B).inverse(); },
      drop_mean);
}

double VortexFunctional::dot(std::span<const double> a,
                             std::span<const double> b) const {
  const std::size_t n = grid().size();
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    s += weight_[k] * (a[k] * b[k] + a[n + k] * b[n + k]);
  return s;
}

double VortexFunctional::residual_sup(std::span<const double> v) const {
  std::vector<double> r(size());
  residual(v, r);
  double m = 0.0;
  for (double x : r)
    m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> VortexFunctional::totals(std::span<const double> v) const {
  const std::size_t n = grid().size();
  std::vector<double> u(2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    u[k] = bg_.u01[k] + v[k];
    u[n + k] = bg_.u02[k] + v[n + k];
  }
  return u;
}

double FunctionalObjective::value(std::span<const double> x) {
  try {
    return f_.value(x);
  } catch (const std::domain_error &) {
    return std::numeric_limits<double>::infinity();
  }
}

double FunctionalObjective::gradient(std::span<const double> x,
                                     std::span<double> g) {
  f_.gradient(x, g);
  // The residual is recovered from g = -s A r.
  const Matrix2 Ai = (f_.scale() * f_.A()).inverse();
  const std::size_t n = f_.grid().size();
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r1 = -(Ai(0, 0) * g[k] + Ai(0, 1) * g[n + k]);
    const double r2 = -(Ai(1, 0) * g[k] + Ai(1, 1) * g[n + k]);
    m = std::max({m, std::abs(r1), std::abs(r2)});
  }
  return m;
}

std::vector<double> SolveResult::packed() const {
  std::vector<double> v(v1.values());
  v.insert(v.end(), v2.values().begin(), v2.values().end());
  return v;
}

void fill_result(SolveResult &out, const VortexFunctional &f,
                 std::span<const double> v) {
  const std::size_t n = f.grid().size();
  out.geometry = f.geometry();
  std::copy(v.begin(), v.begin() + n, out.v1.values().begin());
  std::copy(v.begin() + n, v.end(), out.v2.values().begin());
  const auto u = f.totals(v);
  std::copy(u.begin(), u.begin() + n, out.u1.values().begin());
  std::copy(u.begin() + n, u.end(), out.u2.values().begin());
  out.el_residual = f.residual_sup(v);
  out.energy_value = f.value(v);
  if (f.geometry() == Geometry::periodic) {
    out.c1 = integrate(out.v1) / f.grid().area();
    out.c2 = integrate(out.v2) / f.grid().area();
  }
}

} // namespace nacs
