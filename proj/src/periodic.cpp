#include "nacs/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nacs {

void PeriodicProblem::validate() const {
  params.validate_periodic();
  domain.validate();
  GridSpec{M1, M2, Geometry::periodic}.validate();
  vortices.validate();
  for (int c = 0; c < 2; ++c)
    for (const auto &p : vortices.points(c))
      if (!(p.x >= 0.0 && p.x < domain.L1 && p.y >= 0.0 && p.y < domain.L2))
        throw std::invalid_argument("vortex point outside the fundamental cell");
}

Grid PeriodicProblem::make_grid() const {
  return Grid::torus(domain, M1, M2);
}

ConstraintState constraint_state(std::span<const double> w1,
                                 std::span<const double> w2,
                                 const BackgroundPair &bg,
                                 const CouplingParams &params,
                                 const VortexSet &vortices) {
  const Grid &g = bg.u01.grid();
  ConstraintState s;
  const double dA = g.hx() * g.hy();
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double a = std::exp(bg.u01[k] + w1[k]);
    const double b = std::exp(bg.u02[k] + w2[k]);
    s.E1 += a;
    s.E2 += b;
    s.Q1 += a * a;
    s.Q2 += b * b;
    s.X += a * b;
  }
  s.E1 *= dA;
  s.E2 *= dA;
  s.Q1 *= dA;
  s.Q2 *= dA;
  s.X *= dA;
  if (!std::isfinite(s.Q1) || !std::isfinite(s.Q2))
    throw std::domain_error("constraint integrals overflow");
  const auto b = periodic_b(params, vortices.n1(), vortices.n2());
  s.b1 = b[0];
  s.b2 = b[1];
  s.area = g.area();
  return s;
}

std::array<double, 2> constraint_margin(const ConstraintState &s,
                                        const CouplingParams &p) {
  const double N = p.N, k = p.kappa, lam = p.lambda;
  return {s.E1 * s.E1 - 4.0 * (N - 1.0 + k) * s.b1 / (N * N * lam) * s.Q1,
          s.E2 * s.E2 -
              4.0 * (N - 1.0) * (1.0 + (N - 1.0) * k) * s.b2 / (N * N * lam) *
                  s.Q2};
}

std::array<double, 2> constraint_margin(const ScalarField &w1,
                                        const ScalarField &w2,
                                        const BackgroundPair &bg,
                                        const CouplingParams &params,
                                        const VortexSet &vortices) {
  return constraint_margin(
      constraint_state(w1.span(), w2.span(), bg, params, vortices), params);
}

namespace {

double disc1(const MeanMaps &m, double Y) {
  const double N = m.p.N, k = m.p.kappa;
  const double P = N * m.s.E1 + (k - 1.0) * Y * m.s.X;
  return P * P - 4.0 * (N - 1.0 + k) * m.s.b1 * m.s.Q1 / m.p.lambda;
}

double disc2(const MeanMaps &m, double Z) {
  const double N = m.p.N, k = m.p.kappa;
  const double P = N / (N - 1.0) * m.s.E2 + (k - 1.0) * Z * m.s.X;
  return P * P - 4.0 * (1.0 / (N - 1.0) + k) * m.s.b2 * m.s.Q2 / m.p.lambda;
}

} // namespace

double MeanMaps::f1(double Y) const {
  const double N = p.N, k = p.kappa;
  const double D = disc1(*this, Y);
  if (D < 0.0)
    throw ConstraintViolation("first mean equation has no real root");
  const double P = N * s.E1 + (k - 1.0) * Y * s.X;
  return (P + std::sqrt(D)) / (2.0 * (N - 1.0 + k) * s.Q1);
}

double MeanMaps::f2(double Z) const {
  const double N = p.N, k = p.kappa;
  const double D = disc2(*this, Z);
  if (D < 0.0)
    throw ConstraintViolation("second mean equation has no real root");
  const double P = N / (N - 1.0) * s.E2 + (k - 1.0) * Z * s.X;
  return (P + std::sqrt(D)) / (2.0 * (1.0 / (N - 1.0) + k) * s.Q2);
}

double MeanMaps::df1(double Y) const {
  return (p.kappa - 1.0) * f1(Y) * s.X / std::sqrt(disc1(*this, Y));
}

double MeanMaps::df2(double Z) const {
  return (p.kappa - 1.0) * f2(Z) * s.X / std::sqrt(disc2(*this, Z));
}

namespace {

void check_state(const ConstraintState &s, const CouplingParams &p) {
  if (!(s.E1 > 0 && s.E2 > 0 && s.Q1 > 0 && s.Q2 > 0 && s.X > 0))
    throw std::invalid_argument("constraint integrals must be positive");
  const auto m = constraint_margin(s, p);
  if (m[0] < 0.0 || m[1] < 0.0)
    throw ConstraintViolation("state outside the admissible set");
}

FixedPointResult finish(const MeanMaps &m, double X, FixedPointResult r) {
  r.root_X = X;
  r.c1 = std::log(X);
  r.c2 = std::log(m.f2(X));
  r.residual = std::abs(m.f(X)) / X;
  return r;
}

} // namespace

FixedPointResult solve_mean_fixed_point(const ConstraintState &s,
                                        const CouplingParams &params) {
  if (!(params.kappa > 1.0))
    throw std::invalid_argument("mean fixed point requires kappa > 1");
  check_state(s, params);
  const MeanMaps m{s, params};
  double lo = 0.0, hi = 1.0;
  int it = 0;
  while (m.f(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (++it > 2000 || !std::isfinite(hi))
      throw std::runtime_error("mean fixed point: no sign change found");
  }
  const double lo0 = lo, hi0 = hi;
  while (hi - lo > 1e-15 * hi && it < 4000) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi)
      break;
    (m.f(mid) > 0.0 ? hi : lo) = mid;
    ++it;
  }
  // Newton polish, kept inside the bracket.
  double X = 0.5 * (lo + hi);
  for (int k = 0; k < 8; ++k) {
    const double fx = m.f(X);
    if (fx == 0.0)
      break;
    const double next = X - fx / m.df(X);
    if (!(next > lo0 && next < hi0))
      break;
    if (std::abs(next - X) <= 1e-16 * X) {
      X = next;
      break;
    }
    X = next;
    ++it;
  }
  FixedPointResult r;
  r.lo = lo0;
  r.hi = hi0;
  r.iterations = it;
  return finish(m, X, r);
}

FixedPointResult solve_mean_fixed_point_newton(const ConstraintState &s,
                                               const CouplingParams &params,
                                               double x0) {
  if (!(params.kappa > 1.0))
    throw std::invalid_argument("mean fixed point requires kappa > 1");
  check_state(s, params);
  const MeanMaps m{s, params};
  double X = x0;
  int it = 0;
  for (; it < 200; ++it) {
    const double fx = m.f(X);
    double next = X - fx / m.df(X);
    if (!(next > 0.0))
      next = 0.5 * X;
    const double step = std::abs(next - X);
    X = next;
    if (step <= 1e-15 * X)
      break;
  }
  FixedPointResult r;
  r.iterations = it;
  r.lo = r.hi = X;
  return finish(m, X, r);
}

ReducedFunctional::ReducedFunctional(const VortexFunctional &f,
                                     const VortexSet &vortices)
    : f_(f), vortices_(vortices) {
  if (f.geometry() != Geometry::periodic)
    throw std::invalid_argument("reduced functional lives on the torus");
}

ConstraintState ReducedFunctional::state(std::span<const double> w) const {
  const std::size_t n = f_.grid().size();
  return constraint_state(w.subspan(0, n), w.subspan(n, n), f_.background(),
                          f_.params(), vortices_);
}

FixedPointResult ReducedFunctional::means(std::span<const double> w) const {
  return solve_mean_fixed_point(state(w), f_.params());
}

double ReducedFunctional::value(std::span<const double> w) const {
  const auto s = state(w);
  const auto c = solve_mean_fixed_point(s, f_.params());
  const Grid &g = f_.grid();
  const std::size_t n = g.size();
  const double N = f_.params().N, lam = f_.params().lambda;
  const Matrix2 A = N * f_.A();
  auto w1 = w.subspan(0, n), w2 = w.subspan(n, n);
  const double grad = 0.5 * A(0, 0) * grad_inner(g, w1, w1) +
                      A(0, 1) * grad_inner(g, w1, w2) +
                      0.5 * A(1, 1) * grad_inner(g, w2, w2);
  const double pot =
      0.5 * lam *
      (N * (s.area - std::exp(c.c1) * s.E1) +
       N / (N - 1.0) * (s.area - std::exp(c.c2) * s.E2));
  const double n1 = vortices_.n1(), n2 = vortices_.n2();
  return grad + pot - 2.0 * std::numbers::pi * N * (n1 + n2 / (N - 1.0)) +
         s.b1 * c.c1 + s.b2 * c.c2;
}

double ReducedFunctional::value_via_I(std::span<const double> w) const {
  const auto c = means(w);
  const std::size_t n = f_.grid().size();
  std::vector<double> v(w.begin(), w.end());
  for (std::size_t k = 0; k < n; ++k) {
    v[k] += c.c1;
    v[n + k] += c.c2;
  }
  return f_.value(v);
}

double ReducedFunctional::gradient(std::span<const double> w,
                                   std::span<double> g) const {
  const auto c = means(w);
  const Grid &grid = f_.grid();
  const std::size_t n = grid.size();
  std::vector<double> v(w.begin(), w.end());
  for (std::size_t k = 0; k < n; ++k) {
    v[k] += c.c1;
    v[n + k] += c.c2;
  }
  std::vector<double> r(2 * n);
  f_.residual(v, r);
  double m = 0.0;
  for (double x : r)
    m = std::max(m, std::abs(x));
  const Matrix2 A = f_.scale() * f_.A();
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = -(A(0, 0) * r[k] + A(0, 1) * r[n + k]);
    g[n + k] = -(A(1, 0) * r[k] + A(1, 1) * r[n + k]);
  }
  project_mean_zero(grid, g.subspan(0, n));
  project_mean_zero(grid, g.subspan(n, n));
  return m;
}

double ReducedFunctional::floor() const {
  const double a = f_.grid().area();
  return 1e-10 * a * a;
}

namespace {

class ReducedObjective : public Objective {
public:
  explicit ReducedObjective(const ReducedFunctional &J) : J_(J) {}
  std::size_t size() const override { return J_.full().size(); }
  double value(std::span<const double> w) override {
    try {
      const auto m = constraint_margin(J_.state(w), J_.full().params());
      if (m[0] < J_.floor() || m[1] < J_.floor()) {
        last_floor_hit_ = true;
        return std::numeric_limits<double>::infinity();
      }
      return J_.value(w);
    } catch (const std::domain_error &) {
      last_floor_hit_ = true;
      return std::numeric_limits<double>::infinity();
    }
  }
  double gradient(std::span<const double> w, std::span<double> g) override {
    return J_.gradient(w, g);
  }
  void precondition(std::span<const double> g, std::span<double> z) override {
    J_.full().precondition(g, z, true);
  }
  double dot(std::span<const double> a,
             std::span<const double> b) const override {
    return J_.full().dot(a, b);
  }
  bool floor_hit() const { return last_floor_hit_; }

private:
  const ReducedFunctional &J_;
  bool last_floor_hit_ = false;
};

std::vector<double> mean_free(const Grid &g, std::span<const double> v) {
  std::vector<double> w(v.begin(), v.end());
  const std::size_t n = g.size();
  project_mean_zero(g, std::span<double>(w).subspan(0, n));
  project_mean_zero(g, std::span<double>(w).subspan(n, n));
  return w;
}

} // namespace

SolveResult minimize_constrained(const PeriodicProblem &problem,
                                 const SolveResult *warm) {
  problem.validate();
  const Grid g = problem.make_grid();
  const CouplingParams &p = problem.params;
  VortexFunctional f(p, periodic_background(problem.vortices, g));
  ReducedFunctional J(f, problem.vortices);
  SolveResult out(g);
  out.geometry = Geometry::periodic;
  const std::size_t n = g.size();

  const int n1 = problem.vortices.n1(), n2 = problem.vortices.n2();
  const double adm = admissible_lambda_min(p, n1, n2, g.area());
  const double brad = bradlow_lambda_min(p, n1, n2, g.area());
  auto fail = [&](const std::string &status, std::span<const double> v) {
    fill_result(out, f, v);
    out.converged = false;
    out.status = status;
    return out;
  };

  // Starting point: the warm start, else w = P0(-ln(e^{u0} + delta)) with
  // the largest delta that lands strictly inside the admissible set.
  std::vector<double> w;
  auto inside = [&](std::span<const double> cand) {
    try {
      const auto m = constraint_margin(J.state(cand), p);
      return m[0] > J.floor() && m[1] > J.floor();
    } catch (const std::domain_error &) {
      return false;
    }
  };
  if (warm && warm->v1.grid() == g) {
    auto cand = mean_free(g, warm->packed());
    if (inside(cand))
      w = std::move(cand);
  }
  if (w.empty() && !(p.lambda < adm)) {
    for (double delta = 1.0; delta >= 1e-8; delta *= 0.1) {
      std::vector<double> cand(2 * n);
      for (std::size_t k = 0; k < n; ++k) {
        cand[k] = -std::log(std::exp(f.background().u01[k]) + delta);
        cand[n + k] = -std::log(std::exp(f.background().u02[k]) + delta);
      }
      cand = mean_free(g, cand);
      if (inside(cand)) {
        w = std::move(cand);
        break;
      }
    }
  }
  if (w.empty()) {
    std::vector<double> zero(2 * n, 0.0);
    const auto m = constraint_margin(J.state(zero), p);
    out.margin1 = m[0];
    out.margin2 = m[1];
    fail("infeasible", zero);
    out.status = "infeasible: admissible set empty or unreachable (lambda = " +
                 std::to_string(p.lambda) + ", Bradlow bound " +
                 std::to_string(brad) + ", constraint threshold " +
                 std::to_string(adm) + ")";
    return out;
  }

  ReducedObjective obj(J);
  OptimOptions opt;
  opt.max_iter = std::min(problem.max_iter, 3000);
  opt.tol = std::max(problem.tol, 1e-3);
  const auto r1 = ncg_minimize(obj, w, opt);
  int iterations = r1.iterations;

  auto to_v = [&](std::span<const double> ww) {
    const auto c = J.means(ww);
    std::vector<double> v(ww.begin(), ww.end());
    for (std::size_t k = 0; k < n; ++k) {
      v[k] += c.c1;
      v[n + k] += c.c2;
    }
    return v;
  };
  auto v = to_v(w);
  const auto mw = constraint_margin(J.state(w), p);
  out.margin1 = mw[0];
  out.margin2 = mw[1];

  if (!r1.converged) {
    const bool near_boundary = std::min(mw[0], mw[1]) < 100.0 * J.floor();
    if (near_boundary || (r1.status == "line search stalled" && obj.floor_hit())) {
      fail("boundary approach", v);
      out.margin1 = mw[0];
      out.margin2 = mw[1];
      out.iterations = iterations;
      return out;
    }
    if (r1.status == "max iterations") {
      fail("max iterations", v);
      out.iterations = iterations;
      return out;
    }
  }

  FunctionalObjective full(f);
  opt.tol = problem.tol;
  opt.max_iter = std::max(1, problem.max_iter - iterations);
  const auto r2 = newton_krylov(full, v, opt);
  iterations += r2.iterations;

  fill_result(out, f, v);
  const auto m = solution_margins(out, f.background(), p, problem.vortices);
  out.margin1 = m[0];
  out.margin2 = m[1];
  out.iterations = iterations;
  out.converged = out.el_residual < problem.tol && m[0] > 0.0 && m[1] > 0.0;
  out.status = out.converged ? "converged" : r2.status;
  return out;
}

std::array<double, 2> solution_margins(const SolveResult &r,
                                       const BackgroundPair &bg,
                                       const CouplingParams &params,
                                       const VortexSet &vortices) {
  const Grid &g = r.v1.grid();
  auto w = mean_free(g, r.packed());
  const std::size_t n = g.size();
  return constraint_margin(
      constraint_state(std::span<const double>(w).subspan(0, n),
                       std::span<const double>(w).subspan(n, n), bg, params,
                       vortices),
      params);
}

bool DiagnosticReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const Check &c) { return c.pass; });
}

const Check *DiagnosticReport::find(const std::string &name) const {
  for (const auto &c : checks)
    if (c.name == name)
      return &c;
  return nullptr;
}

std::array<double, 2> integral_identity_residuals(const SolveResult &result,
                                                  const CouplingParams &p,
                                                  const VortexSet &vortices) {
  const Grid &g = result.u1.grid();
  const double N = p.N, k = p.kappa, lam = p.lambda;
  if (g.geometry() == Geometry::periodic) {
    ConstraintState s;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double a = std::exp(result.u1[i]), b = std::exp(result.u2[i]);
      s.E1 += a;
      s.E2 += b;
      s.Q1 += a * a;
      s.Q2 += b * b;
      s.X += a * b;
    }
    const double dA = g.hx() * g.hy();
    s.E1 *= dA;
    s.E2 *= dA;
    s.Q1 *= dA;
    s.Q2 *= dA;
    s.X *= dA;
    const auto b = periodic_b(p, vortices.n1(), vortices.n2());
    const double t1[4] = {(N - 1.0 + k) * s.Q1, -N * s.E1, -(k - 1.0) * s.X,
                          b[0] / lam};
    const double t2[4] = {(1.0 / (N - 1.0) + k) * s.Q2, -N / (N - 1.0) * s.E2,
                          -(k - 1.0) * s.X, b[1] / lam};
    std::array<double, 2> out{};
    for (int c = 0; c < 2; ++c) {
      const double *t = c == 0 ? t1 : t2;
      double sum = 0.0, mag = 0.0;
      for (int j = 0; j < 4; ++j) {
        sum += t[j];
        mag += std::abs(t[j]);
      }
      out[c] = mag > 0.0 ? std::abs(sum) / mag : 0.0;
    }
    return out;
  }
  SmoothRhs S(p);
  double T[2] = {0, 0}, M[2] = {0, 0};
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j) {
      const auto s = S(std::exp(result.u1(i, j)), std::exp(result.u2(i, j)));
      for (int c = 0; c < 2; ++c) {
        T[c] += g.weight(i, j) * s[c];
        M[c] += g.weight(i, j) * std::abs(s[c]);
      }
    }
  const double n[2] = {double(vortices.n1()), double(vortices.n2())};
  std::array<double, 2> out{};
  for (int c = 0; c < 2; ++c) {
    const double ref = std::max(4.0 * std::numbers::pi * n[c], M[c]);
    out[c] = ref > 0.0 ? std::abs(T[c] + 4.0 * std::numbers::pi * n[c]) / ref
                       : 0.0;
  }
  return out;
}

DiagnosticReport verify_solution(const SolveResult &result,
                                 const CouplingParams &params,
                                 const VortexSet &vortices, double mu,
                                 double el_tol) {
  DiagnosticReport rep;
  const Grid &g = result.u1.grid();
  const bool torus = g.geometry() == Geometry::periodic;

  // Sign of u away from vortex nodes (and box edges, where u = 0 is imposed).
  for (int c = 0; c < 2; ++c) {
    const auto &u = c == 0 ? result.u1 : result.u2;
    const auto mask = vortex_node_mask(g, vortices, c);
    double umax = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.M1(); ++i)
      for (int j = 0; j < g.M2(); ++j) {
        const std::size_t k = g.index(i, j);
        if (!mask[k] && !g.is_boundary(i, j))
          umax = std::max(umax, u[k]);
      }
    Check ch{"u" + std::to_string(c + 1) + "_negative", false, umax, -1e-10};
    if (vortices.empty()) {
      ch.value = 0.0;
      ch.pass = true;
    } else {
      ch.pass = umax < -1e-10;
    }
    if (torus || vortices.empty())
      rep.checks.push_back(ch);
  }

  const auto ii = integral_identity_residuals(result, params, vortices);
  const double ii_tol = torus ? 1e-6 : 1e-3;
  rep.checks.push_back({"integral_identity_1", ii[0] < ii_tol, ii[0], ii_tol});
  rep.checks.push_back({"integral_identity_2", ii[1] < ii_tol, ii[1], ii_tol});

  const BackgroundPair bg = torus ? periodic_background(vortices, g)
                                  : planar_background(vortices, mu, g);
  VortexFunctional f(params, bg);
  double el = std::numeric_limits<double>::infinity();
  try {
    el = f.residual_sup(result.packed());
  } catch (const std::domain_error &) {
  }
  rep.checks.push_back({"el_residual", el < el_tol, el, el_tol});

  if (torus) {
    std::array<double, 2> m{-1.0, -1.0};
    try {
      m = solution_margins(result, bg, params, vortices);
    } catch (const std::domain_error &) {
    }
    rep.checks.push_back({"margin_1", m[0] >= 0.0, m[0], 0.0});
    rep.checks.push_back({"margin_2", m[1] >= 0.0, m[1], 0.0});
    const double c1 = integrate(result.v1) / g.area();
    const double c2 = integrate(result.v2) / g.area();
    rep.checks.push_back({"mean_bound_1", c1 <= 1e-12, c1, 0.0});
    rep.checks.push_back({"mean_bound_2", c2 <= 1e-12, c2, 0.0});
  }
  return rep;
}

} // namespace nacs
