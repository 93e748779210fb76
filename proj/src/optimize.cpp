#include "nacs/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nacs {

void Objective::hessian_apply(std::span<const double>, std::span<const double>,
                              std::span<double>) {
  throw std::logic_error("objective has no Hessian");
}

namespace {

void axpy(std::span<double> y, double a, std::span<const double> x) {
  for (std::size_t i = 0; i < y.size(); ++i)
    y[i] += a * x[i];
}

} // namespace

OptimResult ncg_minimize(Objective &f, std::vector<double> &x,
                         const OptimOptions &opt) {
  const std::size_t n = f.size();
  OptimResult res;
  std::vector<double> g(n), z(n), d(n), gn(n), zn(n), xt(n), xe(n);

  double fx = f.value(x);
  if (!std::isfinite(fx)) {
    res.status = "infeasible start";
    return res;
  }
  res.history.push_back(fx);
  double rsup = f.gradient(x, g);
  f.precondition(g, z);
  for (std::size_t i = 0; i < n; ++i)
    d[i] = -z[i];
  double gz = f.dot(g, z);
  double alpha_prev = 1.0, slope_prev = 0.0;
  bool steepest = true;
  int since_restart = 0;

  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    res.residual = rsup;
    res.value = fx;
    if (rsup < opt.tol) {
      res.converged = true;
      res.status = "converged";
      return res;
    }
    double slope = f.dot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i)
        d[i] = -z[i];
      slope = -gz;
      steepest = true;
    }
    double alpha = 1.0;
    if (it > 0 && slope_prev < 0.0)
      alpha = std::clamp(alpha_prev * slope_prev / slope, 1e-8, 4.0);

    bool accepted = false;
    double ft = 0.0;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i)
        xt[i] = x[i] + alpha * d[i];
      ft = f.value(xt);
      if (std::isfinite(ft) && ft <= fx + opt.armijo * alpha * slope) {
        accepted = true;
        if (bt == 0) {
          // Accepted on the first trial: expand while the value keeps dropping.
          for (int ex = 0; ex < 6 && alpha < 16.0; ++ex) {
            const double a2 = 2.0 * alpha;
            for (std::size_t i = 0; i < n; ++i)
              xe[i] = x[i] + a2 * d[i];
            const double fe = f.value(xe);
            if (!(std::isfinite(fe) && fe < ft &&
                  fe <= fx + opt.armijo * a2 * slope))
              break;
            alpha = a2;
            ft = fe;
            xt.swap(xe);
          }
        }
        break;
      }
      double next = 0.5 * alpha;
      if (std::isfinite(ft)) {
        // Minimizer of the quadratic through f(0), f'(0), f(alpha).
        const double denom = 2.0 * (ft - fx - slope * alpha);
        if (denom > 0.0)
          next = std::clamp(-slope * alpha * alpha / denom, 0.1 * alpha,
                            0.5 * alpha);
      }
      alpha = next;
    }
    if (!accepted) {
      if (!steepest) {
        for (std::size_t i = 0; i < n; ++i)
          d[i] = -z[i];
        steepest = true;
        slope_prev = 0.0;
        continue;
      }
      res.status = "line search stalled";
      return res;
    }

    x.swap(xt);
    fx = ft;
    res.history.push_back(fx);
    rsup = f.gradient(x, gn);
    f.precondition(gn, zn);
    const double gzn = f.dot(gn, zn);
    double beta = 0.0;
    ++since_restart;
    if (since_restart < opt.restart) {
      // Polak-Ribiere+ in the preconditioned metric.
      beta = std::max(0.0, (gzn - f.dot(gn, z)) / gz);
    } else {
      since_restart = 0;
    }
    for (std::size_t i = 0; i < n; ++i)
      d[i] = -zn[i] + beta * d[i];
    steepest = beta == 0.0;
    alpha_prev = alpha;
    slope_prev = slope;
    g.swap(gn);
    z.swap(zn);
    gz = gzn;
  }
  res.iterations = opt.max_iter;
  res.residual = rsup;
  res.value = fx;
  res.converged = rsup < opt.tol;
  res.status = res.converged ? "converged" : "max iterations";
  return res;
}

KrylovResult minres(const LinearOp &A, const LinearOp &M_inv,
                    const InnerProduct &dot, std::span<const double> b,
                    std::span<double> x, double rtol, int max_iter) {
  const std::size_t n = b.size();
  std::fill(x.begin(), x.end(), 0.0);
  std::vector<double> r1(b.begin(), b.end()), r2(r1), y(n), v(n), w(n, 0.0),
      w1(n), w2(n, 0.0);
  M_inv(r1, y);
  const double b1sq = dot(r1, y);
  KrylovResult out;
  if (!(b1sq > 0.0))
    return out;
  const double beta1 = std::sqrt(b1sq);
  double beta = beta1, oldb = 0.0, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  for (int itn = 1; itn <= max_iter; ++itn) {
    const double s = 1.0 / beta;
    for (std::size_t i = 0; i < n; ++i)
      v[i] = s * y[i];
    A(v, y);
    if (itn >= 2)
      axpy(y, -beta / oldb, r1);
    const double alfa = dot(v, y);
    axpy(y, -alfa / beta, r2);
    r1.swap(r2);
    std::copy(y.begin(), y.end(), r2.begin());
    M_inv(r2, y);
    oldb = beta;
    const double bsq = dot(r2, y);
    beta = std::sqrt(std::max(bsq, 0.0));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), 1e-300);
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1.swap(w2);
    w2.swap(w);
    for (std::size_t i = 0; i < n; ++i)
      w[i] = (v[i] - oldeps * w1[i] - delta * w2[i]) / gamma;
    axpy(x, phi, w);
    out.iterations = itn;
    out.relative_residual = phibar / beta1;
    if (out.relative_residual < rtol || beta == 0.0)
      break;
  }
  return out;
}

OptimResult newton_krylov(Objective &f, std::vector<double> &x,
                          const OptimOptions &opt) {
  if (!f.has_hessian())
    throw std::logic_error("newton_krylov needs a Hessian");
  const std::size_t n = f.size();
  OptimResult res;
  std::vector<double> g(n), pg(n), step(n), rhs(n), xt(n), gt(n), pgt(n);

  double rsup = f.gradient(x, g);
  f.precondition(g, pg);
  double merit = 0.5 * f.dot(g, pg);
  res.value = f.value(x);
  res.history.push_back(res.value);

  const LinearOp H = [&](std::span<const double> d, std::span<double> o) {
    f.hessian_apply(x, d, o);
  };
  const LinearOp P = [&](std::span<const double> r, std::span<double> z) {
    f.precondition(r, z);
  };
  const InnerProduct ip = [&](std::span<const double> a,
                              std::span<const double> b) {
    return f.dot(a, b);
  };

  for (int it = 0; it < opt.max_iter; ++it) {
    res.iterations = it;
    res.residual = rsup;
    if (rsup < opt.tol) {
      res.converged = true;
      res.status = "converged";
      return res;
    }
    for (std::size_t i = 0; i < n; ++i)
      rhs[i] = -g[i];
    const double eta = std::clamp(std::sqrt(rsup), 1e-6, 1e-2);
    minres(H, P, ip, rhs, step, eta, opt.krylov_max);

    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i)
        xt[i] = x[i] + alpha * step[i];
      try {
        const double rt = f.gradient(xt, gt);
        f.precondition(gt, pgt);
        const double mt = 0.5 * f.dot(gt, pgt);
        if (std::isfinite(mt) && mt <= (1.0 - 1e-4 * alpha) * merit) {
          accepted = true;
          x.swap(xt);
          g.swap(gt);
          pg.swap(pgt);
          merit = mt;
          rsup = rt;
          break;
        }
      } catch (const std::domain_error &) {
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.status = "newton stalled";
      res.value = f.value(x);
      return res;
    }
    res.value = f.value(x);
    res.history.push_back(res.value);
  }
  res.iterations = opt.max_iter;
  res.residual = rsup;
  res.converged = rsup < opt.tol;
  res.status = res.converged ? "converged" : "max iterations";
  return res;
}

} // namespace nacs
