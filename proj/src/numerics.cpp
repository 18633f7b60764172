#include "brp/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace brp {

namespace {

// Dormand-Prince coefficients.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

struct Dopri {
  const OdeRhs& f;
  OdeOptions opts;
  double t;
  Vec y;
  Vec k1;
  bool have_k1 = false;

  double error_norm(const Vec& err, const Vec& ya, const Vec& yb) const {
    double s = 0;
    for (int i = 0; i < err.size(); ++i) {
      double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(ya[i]), std::abs(yb[i]));
      s += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(s / err.size());
  }

  // One accepted step toward t_end; h is adapted in place.
  void step(double t_end, double& h) {
    const double dir = t_end > t ? 1.0 : -1.0;
    for (int attempt = 0; attempt < 60; ++attempt) {
      double hs = dir * std::min(std::abs(h), std::abs(t_end - t));
      if (!have_k1) {
        k1 = f(t, y);
        have_k1 = true;
      }
      Vec k2 = f(t + c2 * hs, y + hs * (a21 * k1));
      Vec k3 = f(t + c3 * hs, y + hs * (a31 * k1 + a32 * k2));
      Vec k4 = f(t + c4 * hs, y + hs * (a41 * k1 + a42 * k2 + a43 * k3));
      Vec k5 = f(t + c5 * hs, y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
      Vec k6 = f(t + hs, y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      Vec ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      Vec k7 = f(t + hs, ynew);
      Vec err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      double en = error_norm(err, y, ynew);
      if (en <= 1.0 || std::abs(hs) <= 1e-15 * std::max(1.0, std::abs(t))) {
        t += hs;
        y = std::move(ynew);
        k1 = std::move(k7);  // FSAL
        double fac = en > 0 ? 0.9 * std::pow(en, -0.2) : 5.0;
        h = std::abs(hs) * std::clamp(fac, 0.2, 5.0);
        return;
      }
      h = std::abs(hs) * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
    }
    throw std::runtime_error("integrate_ode: step size control failed");
  }
};

}  // namespace

Vec integrate_ode(const OdeRhs& f, double t0, double t1, const Vec& y0, const OdeOptions& opts) {
  if (t0 == t1) return y0;
  Dopri solver{f, opts, t0, y0, Vec(), false};
  double h = opts.initial_step > 0 ? opts.initial_step : std::abs(t1 - t0) / 100.0;
  int steps = 0;
  while ((t1 > t0 && solver.t < t1) || (t1 < t0 && solver.t > t1)) {
    solver.step(t1, h);
    if (++steps > opts.max_steps) throw std::runtime_error("integrate_ode: too many steps");
  }
  return solver.y;
}

Mat integrate_ode_sampled(const OdeRhs& f, const std::vector<double>& times, const Vec& y0,
                          const OdeOptions& opts) {
  Mat out(y0.size(), times.size());
  Vec y = y0;
  out.col(0) = y;
  for (std::size_t i = 1; i < times.size(); ++i) {
    y = integrate_ode(f, times[i - 1], times[i], y, opts);
    out.col(i) = y;
  }
  return out;
}

namespace {

Vec damped_update(const std::function<Vec(const Vec&)>& F, const Vec& x, const Vec& dx,
                  double r0, const NewtonOptions& opts, Vec* res_out) {
  double damping = 1.0;
  while (true) {
    Vec xn = x + damping * dx;
    Vec rn = F(xn);
    if (rn.norm() < r0 || damping <= opts.min_damping) {
      *res_out = rn;
      return xn;
    }
    damping *= 0.5;
  }
}

}  // namespace

Vec newton_solve(const std::function<Vec(const Vec&)>& F, Vec x, const NewtonOptions& opts) {
  Vec r = F(x);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r.norm() <= opts.tol) return x;
    const int n = x.size(), m = r.size();
    Mat J(m, n);
    for (int j = 0; j < n; ++j) {
      double step = 1e-7 * std::max(1.0, std::abs(x[j]));
      Vec xp = x;
      xp[j] += step;
      J.col(j) = (F(xp) - r) / step;
    }
    Vec dx = J.colPivHouseholderQr().solve(-r);
    x = damped_update(F, x, dx, r.norm(), opts, &r);
  }
  if (r.norm() <= opts.tol) return x;
  throw NewtonError("newton_solve: no convergence, residual " + std::to_string(r.norm()));
}

Vec newton_solve_frozen(const std::function<Vec(const Vec&)>& F, Vec x, const Mat& jacobian,
                        const NewtonOptions& opts) {
  const auto lu = jacobian.partialPivLu();
  Vec r = F(x);
  for (int it = 0; it < opts.max_iter; ++it) {
    if (r.norm() <= opts.tol) return x;
    Vec dx = lu.solve(-r);
    x = damped_update(F, x, dx, r.norm(), opts, &r);
  }
  if (r.norm() <= opts.tol) return x;
  throw NewtonError("newton_solve_frozen: no convergence, residual " + std::to_string(r.norm()));
}

double fit_monomial(const std::vector<double>& x, const std::vector<double>& y, double power) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double b = std::pow(x[i], power);
    num += b * y[i];
    den += b * b;
  }
  return num / den;
}

Vec cumulative_trapezoid(const Vec& grid, const Vec& values) {
  Vec out = Vec::Zero(grid.size());
  for (int i = 1; i < grid.size(); ++i)
    out[i] = out[i - 1] + 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  return out;
}

double fd_derivative(const std::function<double(double)>& f, double x, double step) {
  return (f(x + step) - f(x - step)) / (2 * step);
}

Mat null_space(const Mat& M, double rel_cutoff) {
  Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = rel_cutoff * (sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return svd.matrixV().rightCols(M.cols() - rank);
}

double fit_decay_rate(const Vec& grid, const Mat& states, const Vec& asymptotic) {
  // linear fit of log|deviation| over the window where it is resolvable
  std::vector<double> ts, ls;
  const double d0 = (states.col(0) - asymptotic).norm();
  for (int i = 0; i < grid.size(); ++i) {
    double d = (states.col(i) - asymptotic).norm();
    if (d > 1e-13 && d > 1e-8 * d0) {
      ts.push_back(grid[i]);
      ls.push_back(std::log(d));
    }
  }
  if (ts.size() < 3) return 0.0;
  double mt = 0, ml = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    ml += ls[i];
  }
  mt /= ts.size();
  ml /= ts.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    num += (ts[i] - mt) * (ls[i] - ml);
    den += (ts[i] - mt) * (ts[i] - mt);
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace brp
