#include "nacs/planar.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nacs {

double PlanarProblem::min_half_width(const CouplingParams &params,
                                     const VortexSet &vortices) {
  double rmax = 0.0;
  for (int c = 0; c < 2; ++c)
    for (const auto &p : vortices.points(c))
      rmax = std::max({rmax, std::abs(p.x), std::abs(p.y)});
  return rmax + 5.0 / (params.sigma0() * std::sqrt(2.0 * params.lambda));
}

void PlanarProblem::validate() const {
  params.validate();
  vortices.validate();
  GridSpec{M1, M2, Geometry::planar}.validate();
  if (!(mu > 0.0))
    throw std::invalid_argument("mu must be positive");
  const double rmin = min_half_width(params, vortices);
  if (!(R >= rmin))
    throw std::invalid_argument("box half width " + std::to_string(R) +
                                " is below the decay-length rule " +
                                std::to_string(rmin));
}

Grid PlanarProblem::make_grid() const { return Grid::box({R, R}, M1, M2); }

double planar_energy(const ScalarField &v1, const ScalarField &v2,
                     const PlanarProblem &problem) {
  const Grid g = problem.make_grid();
  if (!(v1.grid() == g) || !(v2.grid() == g))
    throw std::invalid_argument("planar_energy: grid mismatch");
  VortexFunctional f(problem.params,
                     planar_background(problem.vortices, problem.mu, g));
  std::vector<double> v(v1.values());
  v.insert(v.end(), v2.values().begin(), v2.values().end());
  return f.value(v);
}

SolveResult solve_planar(const PlanarProblem &problem,
                         const SolveResult *warm) {
  problem.validate();
  const Grid g = problem.make_grid();
  VortexFunctional f(problem.params,
                     planar_background(problem.vortices, problem.mu, g));
  std::vector<double> x;
  if (warm && warm->v1.grid() == g) {
    x = warm->packed();
    f.apply_boundary(x);
  } else {
    x = f.initial_guess();
  }

  FunctionalObjective obj(f);
  OptimOptions opt;
  opt.max_iter = problem.max_iter;
  opt.tol = std::max(problem.tol, 1e-3);
  auto r1 = ncg_minimize(obj, x, opt);
  int iterations = r1.iterations;
  OptimResult r2 = r1;
  if (r1.residual >= problem.tol) {
    opt.tol = problem.tol;
    opt.max_iter = std::max(1, problem.max_iter - iterations);
    r2 = newton_krylov(obj, x, opt);
    iterations += r2.iterations;
  }

  SolveResult out(g);
  fill_result(out, f, x);
  out.iterations = iterations;
  out.converged = out.el_residual < problem.tol;
  out.status = out.converged ? "converged" : r2.status;
  return out;
}

DecayFit fit_decay_rate(const SolveResult &result,
                        const CouplingParams &params) {
  const Grid &g = result.u1.grid();
  if (g.geometry() != Geometry::planar)
    throw std::invalid_argument("fit_decay_rate requires a planar result");
  const double R = std::min(g.extent1(), g.extent2()) / 2.0;
  const double N = params.N;
  auto w_at = [&](int i, int j, double &a, double &b) {
    const double u1 = result.u1(i, j), u2 = result.u2(i, j);
    a = (N - 1.0) * u1 + u2;
    b = u1 - u2;
  };

  struct Acc {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    void add(double x, double y) {
      n += 1;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double slope() const { return (n * sxy - sx * sy) / (n * sxx - sx * sx); }
  } fw, fg;

  constexpr double floor = 1e-280;
  for (int i = 1; i + 1 < g.M1(); ++i)
    for (int j = 1; j + 1 < g.M2(); ++j) {
      const double r = std::hypot(g.x(i), g.y(j));
      if (!(r > 0.5 * R && r < 0.9 * R))
        continue;
      double a, b;
      w_at(i, j, a, b);
      const double w2 = a * a + b * b;
      if (w2 > floor)
        fw.add(r, std::log(w2));
      double ap, bp, am, bm, cp, dp, cm, dm;
      w_at(i + 1, j, ap, bp);
      w_at(i - 1, j, am, bm);
      w_at(i, j + 1, cp, dp);
      w_at(i, j - 1, cm, dm);
      const double ax = (ap - am) / (2 * g.hx()), bx = (bp - bm) / (2 * g.hx());
      const double ay = (cp - cm) / (2 * g.hy()), by = (dp - dm) / (2 * g.hy());
      const double gr2 = ax * ax + bx * bx + ay * ay + by * by;
      if (gr2 > floor)
        fg.add(r, std::log(gr2));
    }

  DecayFit out;
  out.samples = static_cast<int>(fw.n);
  out.signal = fw.n >= 8 && fg.n >= 8;
  if (out.signal) {
    out.rate_w = -fw.slope();
    out.rate_grad = -fg.slope();
  }
  return out;
}

} // namespace nacs
