#include "nacs/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nacs/diagnostics.hpp"
#include "nacs/field_io.hpp"
#include "nacs/second.hpp"

namespace nacs {

namespace {

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

class Report {
public:
  void put(const std::string &k, const std::string &v) {
    out_ << k << " = " << v << '\n';
  }
  void put(const std::string &k, double v) { put(k, fmt(v)); }
  void put(const std::string &k, int v) { put(k, std::to_string(v)); }
  void put(const std::string &k, bool v) { put(k, std::string(v ? "true" : "false")); }
  void blank() { out_ << '\n'; }
  void save(const std::filesystem::path &p) const {
    std::ofstream f(p);
    f << out_.str();
    if (!f)
      throw std::runtime_error("cannot write " + p.string());
  }

private:
  std::ostringstream out_;
};

void header(Report &rep, const RunConfig &c) {
  rep.put("mode", std::string(to_string(c.mode)));
  rep.put("geometry", std::string(to_string(c.geometry)));
  rep.put("N", c.params.N);
  rep.put("kappa", c.params.kappa);
  rep.put("lambda", c.params.lambda);
  rep.put("n1", c.vortices.n1());
  rep.put("n2", c.vortices.n2());
  rep.put("grid", std::to_string(c.M1) + "x" + std::to_string(c.M2));
  if (c.geometry == Geometry::periodic) {
    rep.put("L1", c.domain.L1);
    rep.put("L2", c.domain.L2);
    rep.put("bradlow_bound", bradlow_lambda_min(c.params, c.vortices.n1(),
                                                c.vortices.n2(), c.domain.area()));
    rep.put("admissible_threshold",
            admissible_lambda_min(c.params, c.vortices.n1(), c.vortices.n2(),
                                  c.domain.area()));
  } else {
    rep.put("R", c.R);
    rep.put("mu", c.mu);
  }
  if (c.seed)
    rep.put("seed", std::to_string(*c.seed));
  rep.blank();
}

void describe(Report &rep, const std::string &p, const SolveResult &r,
              const RunConfig &c) {
  rep.put(p + "status", r.status);
  rep.put(p + "converged", r.converged);
  if (!r.converged)
    rep.put(p + "unconverged", true);
  rep.put(p + "iterations", r.iterations);
  rep.put(p + "el_residual", r.el_residual);
  rep.put(p + "energy_value", r.energy_value);
  if (r.geometry == Geometry::periodic) {
    rep.put(p + "c1", r.c1);
    rep.put(p + "c2", r.c2);
    rep.put(p + "margin1", r.margin1);
    rep.put(p + "margin2", r.margin2);
  }
  const auto f = compute_fluxes(r, c.params, c.vortices);
  rep.put(p + "flux_u1", f.flux_u1);
  rep.put(p + "flux_u1_expected", f.expected_flux_u1);
  rep.put(p + "flux_sun", f.flux_sun);
  rep.put(p + "flux_sun_expected", f.expected_flux_sun);
  rep.put(p + "charge_u1", f.charge_u1);
  rep.put(p + "charge_sun", f.charge_sun);
  rep.put(p + "energy", f.energy);
  rep.put(p + "energy_expected", f.expected_energy);
  rep.put(p + "flux_relative_error", flux_relative_error(f));
  rep.put(p + "flux_trusted", f.trusted);
  if (r.geometry == Geometry::planar) {
    const auto d = fit_decay_rate(r, c.params);
    rep.put(p + "decay_signal", d.signal);
    if (d.signal) {
      rep.put(p + "decay_rate_w", d.rate_w);
      rep.put(p + "decay_rate_grad", d.rate_grad);
      rep.put(p + "decay_rate_expected",
              c.params.sigma0() * std::sqrt(2.0 * c.params.lambda));
    }
  }
  const auto v = verify_solution(r, c.params, c.vortices, c.mu, c.verify_tol);
  for (const auto &ch : v.checks)
    rep.put(p + "check." + ch.name,
            std::string(ch.pass ? "pass " : "fail ") + fmt(ch.value));
}

void dump(const std::filesystem::path &dir, const std::string &stem,
          const SolveResult &r) {
  write_field_csv(dir / (stem + ".csv"), r);
  write_field_binary(dir / (stem + ".bin"), r);
}

SolveResult solve_one(const RunConfig &c) {
  if (c.geometry == Geometry::periodic)
    return minimize_constrained(
        {c.params, c.vortices, c.domain, c.M1, c.M2, c.tol, c.max_iter});
  return solve_planar({c.params, c.vortices, c.R, c.M1, c.M2, c.mu, c.tol,
                       c.max_iter});
}

int run_solve(const RunConfig &c, std::ostream &log) {
  const auto r = solve_one(c);
  dump(c.output, "fields", r);
  Report rep;
  header(rep, c);
  describe(rep, "", r, c);
  rep.save(c.output / "summary.txt");
  log << "solve: " << r.status << " (residual " << fmt(r.el_residual)
      << ")\n";
  return r.converged ? kExitOk : kExitFailed;
}

int run_second(const RunConfig &c, std::ostream &log) {
  const PeriodicProblem p{c.params, c.vortices, c.domain, c.M1, c.M2, c.tol,
                          c.max_iter};
  const auto first = minimize_constrained(p);
  dump(c.output, "fields", first);
  Report rep;
  header(rep, c);
  describe(rep, "first.", first, c);
  if (!first.converged) {
    rep.save(c.output / "summary.txt");
    log << "second: minimizer failed: " << first.status << '\n';
    return kExitFailed;
  }
  MountainPassOptions o;
  o.nodes = c.path_nodes;
  o.xi0 = c.xi0;
  const auto mp = mountain_pass(first, p, o);
  dump(c.output, "fields_second", mp.solution);
  rep.blank();
  describe(rep, "second.", mp.solution, c);
  rep.put("second.distance", mp.distance);
  rep.put("second.distinct_floor", mp.distinct_floor);
  rep.put("second.distinct", mp.distinct);
  rep.put("second.theta0", mp.theta0);
  rep.put("second.minimizer_energy", mp.minimizer_energy);
  rep.put("second.sweeps", mp.sweeps);
  if (!mp.diagnostic.empty())
    rep.put("second.diagnostic", mp.diagnostic);
  rep.save(c.output / "summary.txt");
  log << "second: " << mp.solution.status << " (distance "
      << fmt(mp.distance) << ")\n";
  return mp.solution.converged && mp.distinct ? kExitOk : kExitFailed;
}

int run_sweep(const RunConfig &c, std::ostream &log) {
  const auto ls = c.sweep_lambdas();
  const SweepReport s =
      c.geometry == Geometry::periodic
          ? lambda_sweep(PeriodicProblem{c.params, c.vortices, c.domain, c.M1,
                                         c.M2, c.tol, c.max_iter},
                         ls)
          : lambda_sweep(PlanarProblem{c.params, c.vortices, c.R, c.M1, c.M2,
                                       c.mu, c.tol, c.max_iter},
                         ls);
  std::ofstream t(c.output / "sweep.csv");
  t << "lambda,converged,infeasible,norm1,norm2,el_residual,energy_value,c1,"
       "c2,iterations,status\n";
  for (const auto &e : s.entries) {
    std::string st = e.status;
    for (auto &ch : st)
      if (ch == ',' || ch == '\n')
        ch = ';';
    t << fmt(e.lambda) << ',' << int(e.converged) << ',' << int(e.infeasible)
      << ',' << fmt(e.norm1) << ',' << fmt(e.norm2) << ','
      << fmt(e.el_residual) << ',' << fmt(e.energy_value) << ',' << fmt(e.c1)
      << ',' << fmt(e.c2) << ',' << e.iterations << ',' << st << '\n';
  }
  if (!t)
    throw std::runtime_error("cannot write sweep.csv");
  Report rep;
  header(rep, c);
  rep.put("members", static_cast<int>(s.entries.size()));
  rep.put("all_converged", s.all_converged);
  if (!s.all_converged)
    rep.put("unconverged", true);
  rep.put("decreasing1", s.decreasing1);
  rep.put("decreasing2", s.decreasing2);
  rep.save(c.output / "summary.txt");
  log << "sweep: " << s.entries.size() << " members, "
      << (s.all_converged ? "all converged" : "some unconverged") << '\n';
  return s.all_converged ? kExitOk : kExitFailed;
}

int run_verify(const RunConfig &c, std::ostream &log) {
  const auto path = c.input.value_or(c.output / "fields.bin");
  const auto r = read_field_binary(path);
  if (r.geometry != c.geometry)
    throw ConfigError(c.source, 0, "dump geometry differs from the config");
  const auto v = verify_solution(r, c.params, c.vortices, c.mu, c.verify_tol);
  Report rep;
  header(rep, c);
  rep.put("input", path.string());
  for (const auto &ch : v.checks)
    rep.put("check." + ch.name,
            std::string(ch.pass ? "pass " : "fail ") + fmt(ch.value));
  rep.put("all_pass", v.all_pass());
  rep.save(c.output / "verify.txt");
  log << "verify: " << (v.all_pass() ? "all checks pass" : "checks failed")
      << '\n';
  return v.all_pass() ? kExitOk : kExitFailed;
}

} // namespace

int run(const RunConfig &cfg, std::ostream &log) {
  try {
    cfg.validate();
  } catch (const ConfigError &e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  try {
    std::filesystem::create_directories(cfg.output);
    switch (cfg.mode) {
    case RunMode::solve: return run_solve(cfg, log);
    case RunMode::second: return run_second(cfg, log);
    case RunMode::sweep: return run_sweep(cfg, log);
    case RunMode::verify: return run_verify(cfg, log);
    }
  } catch (const ConfigError &e) {
    log << "error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception &e) {
    log << "error: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitFailed;
}

} // namespace nacs
