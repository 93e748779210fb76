#include "nacs/second.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace nacs {

std::size_t PassPath::argmax() const {
  return static_cast<std::size_t>(
      std::max_element(energies.begin(), energies.end()) - energies.begin());
}

double PassPath::max_energy() const { return energies.at(argmax()); }

namespace {

void check_minimizer(const SolveResult &m, const PeriodicProblem &problem) {
  problem.validate();
  if (m.geometry != Geometry::periodic || !(m.v1.grid() == problem.make_grid()))
    throw std::invalid_argument("minimizer does not belong to this problem");
  if (!m.converged)
    throw std::invalid_argument("mountain pass needs a converged minimizer");
}

double safe_value(const VortexFunctional &f, std::span<const double> v) {
  try {
    return f.value(v);
  } catch (const std::domain_error &) {
    return std::numeric_limits<double>::infinity();
  }
}

double l2_distance(const VortexFunctional &f, std::span<const double> a,
                   std::span<const double> b) {
  std::vector<double> d(a.size());
  for (std::size_t k = 0; k < a.size(); ++k)
    d[k] = a[k] - b[k];
  return std::sqrt(f.dot(d, d));
}

// Redistribute interior samples at equal arc length (linear interpolation).
void respace(const VortexFunctional &f, std::vector<std::vector<double>> &s) {
  const std::size_t K = s.size();
  std::vector<double> arc(K, 0.0);
  for (std::size_t i = 1; i < K; ++i)
    arc[i] = arc[i - 1] + l2_distance(f, s[i], s[i - 1]);
  if (!(arc.back() > 0.0))
    return;
  std::vector<std::vector<double>> out(K);
  out.front() = s.front();
  out.back() = s.back();
  std::size_t seg = 1;
  for (std::size_t i = 1; i + 1 < K; ++i) {
    const double target = arc.back() * static_cast<double>(i) / (K - 1);
    while (seg + 1 < K && arc[seg] < target)
      ++seg;
    const double len = arc[seg] - arc[seg - 1];
    const double t = len > 0.0 ? (target - arc[seg - 1]) / len : 0.0;
    out[i].resize(s[0].size());
    for (std::size_t k = 0; k < out[i].size(); ++k)
      out[i][k] = (1.0 - t) * s[seg - 1][k] + t * s[seg][k];
  }
  s = std::move(out);
}

// Golden-section maximization of I on the polyline through samples
// i-1, i, i+1; returns the best point found.
std::vector<double> refine_max(const VortexFunctional &f, const PassPath &p,
                               std::size_t i) {
  const std::size_t K = p.samples.size();
  if (i == 0 || i + 1 >= K)
    return p.samples[i];
  const auto &a = p.samples[i - 1], &m = p.samples[i], &b = p.samples[i + 1];
  auto at = [&](double t) {
    std::vector<double> x(m.size());
    if (t < 0.0)
      for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = m[k] + t * (m[k] - a[k]);
    else
      for (std::size_t k = 0; k < x.size(); ++k)
        x[k] = m[k] + t * (b[k] - m[k]);
    return x;
  };
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = -1.0, hi = 1.0;
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = safe_value(f, at(x1)), f2 = safe_value(f, at(x2));
  for (int it = 0; it < 40; ++it) {
    if (f1 > f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = safe_value(f, at(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = safe_value(f, at(x2));
    }
  }
  const double t = 0.5 * (lo + hi);
  auto x = at(t);
  return safe_value(f, x) > p.energies[i] ? x : m;
}

} // namespace

Endpoint make_endpoint(const SolveResult &local_min,
                       const PeriodicProblem &problem, double xi0) {
  if (!(xi0 > 1.0))
    throw std::invalid_argument("endpoint shift must exceed 1");
  check_minimizer(local_min, problem);
  const Grid g = problem.make_grid();
  VortexFunctional f(problem.params, periodic_background(problem.vortices, g));
  const auto v = local_min.packed();
  const double base = f.value(v);
  for (double xi = xi0; xi <= 100.0; xi *= 2.0) {
    auto w = v;
    for (auto &x : w)
      x -= xi;
    const double e = safe_value(f, w);
    if (e < base - 1.0) {
      Endpoint out{ScalarField(g), ScalarField(g), xi, e, base};
      std::copy(w.begin(), w.begin() + g.size(), out.v1.values().begin());
      std::copy(w.begin() + g.size(), w.end(), out.v2.values().begin());
      return out;
    }
  }
  throw std::runtime_error(
      "endpoint shift exceeded 100 without an energy gap; lambda may be "
      "close to infeasibility");
}

MountainPassResult mountain_pass(const SolveResult &local_min,
                                 const PeriodicProblem &problem,
                                 const MountainPassOptions &opt) {
  if (opt.nodes < 3)
    throw std::invalid_argument("mountain pass needs at least 3 path nodes");
  const Endpoint end = make_endpoint(local_min, problem, opt.xi0);
  const Grid g = problem.make_grid();
  VortexFunctional f(problem.params, periodic_background(problem.vortices, g));
  MountainPassResult res(g);
  res.minimizer_energy = end.base_energy;
  res.distinct_floor = opt.distinct_factor * std::sqrt(g.area());

  const auto v0 = local_min.packed();
  const std::size_t n = g.size(), dim = 2 * n;
  std::vector<double> v1(dim);
  std::copy(end.v1.values().begin(), end.v1.values().end(), v1.begin());
  std::copy(end.v2.values().begin(), end.v2.values().end(), v1.begin() + n);

  PassPath &path = res.path;
  const std::size_t K = static_cast<std::size_t>(opt.nodes);
  path.samples.resize(K);
  for (std::size_t i = 0; i < K; ++i) {
    const double t = static_cast<double>(i) / (K - 1);
    path.samples[i].resize(dim);
    for (std::size_t k = 0; k < dim; ++k)
      path.samples[i][k] = (1.0 - t) * v0[k] + t * v1[k];
  }
  auto evaluate = [&](PassPath &p) {
    p.energies.resize(p.samples.size());
    for (std::size_t i = 0; i < p.samples.size(); ++i)
      p.energies[i] = safe_value(f, p.samples[i]);
  };
  evaluate(path);
  res.max_history.push_back(path.max_energy());

  // Deformation: preconditioned descent orthogonal to the path, then equal
  // arc-length respacing. A sweep is kept only if the path maximum does not
  // rise; otherwise the step is halved.
  double dt = opt.step;
  std::vector<double> gr(dim), z(dim), tau(dim);
  for (int sweep = 0; sweep < opt.max_sweeps && dt > 1e-6; ++sweep) {
    PassPath trial = path;
    for (std::size_t i = 1; i + 1 < K; ++i) {
      f.gradient(path.samples[i], gr);
      f.precondition(gr, z);
      for (std::size_t k = 0; k < dim; ++k)
        tau[k] = path.samples[i + 1][k] - path.samples[i - 1][k];
      const double tn = std::sqrt(f.dot(tau, tau));
      if (tn > 0.0) {
        const double c = f.dot(z, tau) / (tn * tn);
        for (std::size_t k = 0; k < dim; ++k)
          z[k] -= c * tau[k];
      }
      for (std::size_t k = 0; k < dim; ++k)
        trial.samples[i][k] -= dt * z[k];
    }
    respace(f, trial.samples);
    evaluate(trial);
    const double before = path.max_energy(), after = trial.max_energy();
    if (!(after <= before)) {
      dt *= 0.5;
      continue;
    }
    path = std::move(trial);
    res.max_history.push_back(after);
    res.sweeps = sweep + 1;
    if (before - after <= opt.stall * std::max(1.0, std::abs(before)))
      break;
  }

  const std::size_t top = path.argmax();
  res.theta0 = path.max_energy();
  auto x = refine_max(f, path, top);

  FunctionalObjective obj(f);
  OptimOptions o;
  o.tol = problem.tol;
  o.max_iter = std::max(1, problem.max_iter);
  const auto nk = newton_krylov(obj, x, o);

  SolveResult &s = res.solution;
  s.geometry = Geometry::periodic;
  fill_result(s, f, x);
  try {
    const auto m = solution_margins(s, f.background(), problem.params,
                                   problem.vortices);
    s.margin1 = m[0];
    s.margin2 = m[1];
  } catch (const std::domain_error &) {
    s.margin1 = s.margin2 = -1.0;
  }
  s.iterations = res.sweeps + nk.iterations;
  res.distance = l2_distance(f, x, v0);
  res.distinct = res.distance > res.distinct_floor;
  s.converged = s.el_residual < problem.tol;

  const bool flat =
      res.theta0 <= res.minimizer_energy +
                        opt.degenerate_eps * std::max(1.0, std::abs(res.minimizer_energy));
  if (flat || (s.converged && !res.distinct)) {
    res.diagnostic = "strict-minimum violated: degenerate minimum";
    s.converged = false;
    s.status = res.diagnostic;
  } else if (!s.converged) {
    res.diagnostic = nk.status;
    s.status = nk.status;
  } else {
    s.status = "converged";
  }
  return res;
}

} // namespace nacs
