#include "nacs/config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "nacs/periodic.hpp"
#include "nacs/planar.hpp"

namespace nacs {

const char *to_string(RunMode m) {
  switch (m) {
  case RunMode::solve: return "solve";
  case RunMode::second: return "second";
  case RunMode::sweep: return "sweep";
  case RunMode::verify: return "verify";
  }
  return "?";
}

RunMode run_mode_from_string(const std::string &s) {
  if (s == "solve") return RunMode::solve;
  if (s == "second") return RunMode::second;
  if (s == "sweep") return RunMode::sweep;
  if (s == "verify") return RunMode::verify;
  throw std::invalid_argument("unknown mode '" + s + "'");
}

ConfigError::ConfigError(const std::string &source, int line,
                         const std::string &msg)
    : std::runtime_error(line > 0 ? source + ":" + std::to_string(line) +
                                        ": " + msg
                                  : source + ": " + msg),
      line_(line) {}

namespace {

std::string trim(const std::string &s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos)
    return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> words(const std::string &s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;)
    out.push_back(w);
  return out;
}

double to_double(const std::string &s) {
  double v = 0.0;
  const auto *end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw std::invalid_argument("expected a number, got '" + s + "'");
  return v;
}

long long to_int(const std::string &s) {
  long long v = 0;
  const auto *end = s.data() + s.size();
  const auto r = std::from_chars(s.data(), end, v);
  if (r.ec != std::errc() || r.ptr != end)
    throw std::invalid_argument("expected an integer, got '" + s + "'");
  return v;
}

int to_small_int(const std::string &s) {
  const long long v = to_int(s);
  if (v < -1000000000LL || v > 1000000000LL)
    throw std::invalid_argument("integer out of range: " + s);
  return static_cast<int>(v);
}

} // namespace

RunConfig parse_config(const std::string &text, const std::string &source) {
  RunConfig c;
  c.source = source;
  std::istringstream in(text);
  std::string section;
  std::set<std::string> seen;
  const std::set<std::string> sections{"run", "geometry", "params", "vortices",
                                       "solver", "sweep"};
  int lineno = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++lineno;
    std::string line = raw;
    if (const auto h = line.find('#'); h != std::string::npos)
      line.erase(h);
    line = trim(line);
    if (line.empty())
      continue;
    try {
      if (line.front() == '[') {
        if (line.back() != ']')
          throw std::invalid_argument("malformed section header");
        section = trim(line.substr(1, line.size() - 2));
        if (!sections.count(section))
          throw std::invalid_argument("unknown section [" + section + "]");
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("expected 'key = value'");
      const std::string key = trim(line.substr(0, eq));
      const std::string val = trim(line.substr(eq + 1));
      if (key.empty() || val.empty())
        throw std::invalid_argument("empty key or value");
      if (section.empty())
        throw std::invalid_argument("entry outside any section");
      const std::string full = section + "." + key;
      const bool repeatable = section == "vortices";
      if (!repeatable && !seen.insert(full).second)
        throw std::invalid_argument("duplicate key '" + key + "'");

      if (section == "run") {
        if (key == "mode") c.mode = run_mode_from_string(val);
        else if (key == "output") c.output = val;
        else if (key == "input") c.input = val;
        else if (key == "seed") c.seed = static_cast<unsigned long long>(to_int(val));
        else throw std::invalid_argument("unknown key '" + key + "'");
      } else if (section == "geometry") {
        if (key == "type") c.geometry = geometry_from_string(val);
        else if (key == "L1") c.domain.L1 = to_double(val);
        else if (key == "L2") c.domain.L2 = to_double(val);
        else if (key == "R") c.R = to_double(val);
        else if (key == "M1") c.M1 = to_small_int(val);
        else if (key == "M2") c.M2 = to_small_int(val);
        else if (key == "mu") c.mu = to_double(val);
        else throw std::invalid_argument("unknown key '" + key + "'");
      } else if (section == "params") {
        if (key == "N") c.params.N = to_small_int(val);
        else if (key == "kappa") c.params.kappa = to_double(val);
        else if (key == "lambda") c.params.lambda = to_double(val);
        else throw std::invalid_argument("unknown key '" + key + "'");
      } else if (section == "vortices") {
        if (key != "vortex1" && key != "vortex2")
          throw std::invalid_argument("vortex entries are 'vortex1' or 'vortex2'");
        const auto w = words(val);
        if (w.size() != 3)
          throw std::invalid_argument("vortex entry needs 'x y multiplicity'");
        const Vortex v{to_double(w[0]), to_double(w[1]), to_small_int(w[2])};
        if (v.multiplicity < 1)
          throw std::invalid_argument("multiplicity must be >= 1");
        (key == "vortex1" ? c.vortices.points1 : c.vortices.points2).push_back(v);
      } else if (section == "solver") {
        if (key == "tol") c.tol = to_double(val);
        else if (key == "max_iter") c.max_iter = to_small_int(val);
        else if (key == "verify_tol") c.verify_tol = to_double(val);
        else if (key == "path_nodes") c.path_nodes = to_small_int(val);
        else if (key == "xi0") c.xi0 = to_double(val);
        else throw std::invalid_argument("unknown key '" + key + "'");
      } else if (section == "sweep") {
        std::vector<double> xs;
        for (const auto &w : words(val))
          xs.push_back(to_double(w));
        if (key == "lambdas") c.lambdas = xs;
        else if (key == "bradlow_factors") c.bradlow_factors = xs;
        else throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const ConfigError &) {
      throw;
    } catch (const std::exception &e) {
      throw ConfigError(source, lineno, e.what());
    }
  }
  return c;
}

RunConfig load_config(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(path.string(), 0, "cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

void RunConfig::validate() const {
  try {
    if (!(tol > 0.0) || max_iter < 1 || !(verify_tol > 0.0))
      throw std::invalid_argument("solver tolerances must be positive");
    if (geometry == Geometry::periodic) {
      PeriodicProblem p{params, vortices, domain, M1, M2, tol, max_iter};
      p.validate();
    } else {
      if (mode == RunMode::second)
        throw std::invalid_argument("mode 'second' requires periodic geometry");
      PlanarProblem p{params, vortices, R, M1, M2, mu, tol, max_iter};
      if (mode != RunMode::sweep)
        p.validate();
      else {
        params.validate();
        GridSpec{M1, M2, Geometry::planar}.validate();
        vortices.validate();
      }
    }
    if (mode == RunMode::second && (path_nodes < 3 || !(xi0 > 1.0)))
      throw std::invalid_argument("path_nodes >= 3 and xi0 > 1 required");
    if (mode == RunMode::sweep) {
      if (lambdas.empty() == bradlow_factors.empty())
        throw std::invalid_argument(
            "sweep needs exactly one of 'lambdas' or 'bradlow_factors'");
      if (!bradlow_factors.empty() && geometry != Geometry::periodic)
        throw std::invalid_argument("bradlow_factors need periodic geometry");
      const auto ls = sweep_lambdas();
      for (std::size_t i = 0; i < ls.size(); ++i)
        if (!(ls[i] > 0.0) || (i > 0 && !(ls[i] > ls[i - 1])))
          throw std::invalid_argument("sweep lambdas must be positive and ascending");
    }
  } catch (const std::invalid_argument &e) {
    throw ConfigError(source, 0, e.what());
  }
}

std::vector<double> RunConfig::sweep_lambdas() const {
  if (!lambdas.empty())
    return lambdas;
  const double B = bradlow_lambda_min(params, vortices.n1(), vortices.n2(),
                                      domain.area());
  std::vector<double> out;
  for (double f : bradlow_factors)
    out.push_back(f * B);
  return out;
}

} // namespace nacs
