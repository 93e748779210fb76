#include "nacs/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace nacs {

double quantized_flux_u1(int N, int n1, int n2) {
  return 4.0 * std::numbers::pi * ((N - 1.0) * n1 + n2) / std::sqrt(2.0 * N);
}

double quantized_flux_sun(int N, int n1, int n2) {
  return 4.0 * std::numbers::pi * std::sqrt((N - 1.0) / (2.0 * N)) *
         (n1 - n2);
}

FluxReport compute_fluxes(const SolveResult &result,
                          const CouplingParams &params,
                          const VortexSet &vortices) {
  params.validate();
  const Grid &g = result.u1.grid();
  SmoothRhs S(params);
  double T1 = 0.0, T2 = 0.0;
  for (int i = 0; i < g.M1(); ++i)
    for (int j = 0; j < g.M2(); ++j) {
      const double w = g.weight(i, j);
      const auto s = S(std::exp(result.u1(i, j)), std::exp(result.u2(i, j)));
      T1 += w * s[0];
      T2 += w * s[1];
    }
  const double N = params.N;
  FluxReport r;
  r.n1 = vortices.n1();
  r.n2 = vortices.n2();
  r.flux_u1 = -((N - 1.0) * T1 + T2) / std::sqrt(2.0 * N);
  r.flux_sun = -std::sqrt((N - 1.0) / (2.0 * N)) * (T1 - T2);
  r.charge_u1 = params.kappa1() * r.flux_u1;
  r.charge_sun = params.kappa2() * r.flux_sun;
  r.energy = std::sqrt(2.0 * N) * r.flux_u1;
  r.expected_flux_u1 = quantized_flux_u1(params.N, r.n1, r.n2);
  r.expected_flux_sun = quantized_flux_sun(params.N, r.n1, r.n2);
  r.expected_energy = 4.0 * std::numbers::pi * ((N - 1.0) * r.n1 + r.n2);
  r.trusted = result.converged;
  return r;
}

double flux_relative_error(const FluxReport &r) {
  auto rel = [](double got, double want, double scale) {
    return want != 0.0 ? std::abs(got - want) / std::abs(want)
                       : std::abs(got) / std::max(scale, 1.0);
  };
  const double s = std::abs(r.expected_flux_u1);
  return std::max({rel(r.flux_u1, r.expected_flux_u1, s),
                   rel(r.flux_sun, r.expected_flux_sun, s),
                   rel(r.energy, r.expected_energy, s)});
}

std::array<double, 2> vacuum_distance(const SolveResult &r) {
  const Grid &g = r.u1.grid();
  std::vector<double> a(g.size()), b(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d1 = std::expm1(r.u1[k]), d2 = std::expm1(r.u2[k]);
    a[k] = d1 * d1;
    b[k] = d2 * d2;
  }
  return {std::sqrt(integrate(g, a)), std::sqrt(integrate(g, b))};
}

namespace {

template <class Problem, class Solve>
SweepReport sweep(const Problem &problem, const std::vector<double> &lambdas,
                  double bradlow, Solve solve) {
  if (lambdas.empty())
    throw std::invalid_argument("lambda sweep needs at least one value");
  for (std::size_t i = 1; i < lambdas.size(); ++i)
    if (!(lambdas[i] > lambdas[i - 1]))
      throw std::invalid_argument("lambda sweep values must be ascending");
  SweepReport rep;
  rep.bradlow = bradlow;
  std::optional<SolveResult> warm;
  for (double lam : lambdas) {
    Problem p = problem;
    p.params.lambda = lam;
    SweepEntry e;
    e.lambda = lam;
    try {
      SolveResult r = solve(p, warm ? &*warm : nullptr);
      e.converged = r.converged;
      e.status = r.status;
      e.infeasible = r.status.rfind("infeasible", 0) == 0 ||
                     r.status == "boundary approach";
      const auto d = vacuum_distance(r);
      e.norm1 = d[0];
      e.norm2 = d[1];
      e.el_residual = r.el_residual;
      e.energy_value = r.energy_value;
      e.c1 = r.c1;
      e.c2 = r.c2;
      e.iterations = r.iterations;
      if (r.converged)
        warm = std::move(r);
    } catch (const std::exception &ex) {
      e.status = std::string("error: ") + ex.what();
    }
    rep.entries.push_back(e);
  }
  rep.all_converged = std::all_of(rep.entries.begin(), rep.entries.end(),
                                  [](const SweepEntry &e) { return e.converged; });
  std::vector<const SweepEntry *> ok;
  for (const auto &e : rep.entries)
    if (e.converged)
      ok.push_back(&e);
  rep.decreasing1 = rep.decreasing2 = !ok.empty();
  for (std::size_t i = 1; i < ok.size(); ++i) {
    rep.decreasing1 = rep.decreasing1 && ok[i]->norm1 < ok[i - 1]->norm1;
    rep.decreasing2 = rep.decreasing2 && ok[i]->norm2 < ok[i - 1]->norm2;
  }
  return rep;
}

} // namespace

SweepReport lambda_sweep(const PeriodicProblem &problem,
                         const std::vector<double> &lambdas) {
  const double area = problem.domain.area();
  return sweep(problem, lambdas,
               bradlow_lambda_min(problem.params, problem.vortices.n1(),
                                  problem.vortices.n2(), area),
               [](const PeriodicProblem &p, const SolveResult *w) {
                 return minimize_constrained(p, w);
               });
}

SweepReport lambda_sweep(const PlanarProblem &problem,
                         const std::vector<double> &lambdas) {
  return sweep(problem, lambdas, 0.0,
               [](const PlanarProblem &p, const SolveResult *w) {
                 return solve_planar(p, w);
               });
}

} // namespace nacs
