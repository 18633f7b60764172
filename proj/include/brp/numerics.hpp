#pragma once

#include <functional>
#include <vector>

#include "brp/types.hpp"

namespace brp {

using OdeRhs = std::function<Vec(double, const Vec&)>;

struct OdeOptions {
  double rel_tol = 1e-12;
  double abs_tol = 1e-13;
  double initial_step = 0.0;  // 0 -> automatic
  int max_steps = 200000;
};

/// Integrate y' = f(t, y) from t0 to t1 (either direction) with the
/// Dormand-Prince 5(4) pair and return y(t1).
Vec integrate_ode(const OdeRhs& f, double t0, double t1, const Vec& y0,
                  const OdeOptions& opts = {});

/// Integrate and record the solution at the given monotone sample times
/// (first sample must equal t0).  Returns one column per sample.
Mat integrate_ode_sampled(const OdeRhs& f, const std::vector<double>& times, const Vec& y0,
                          const OdeOptions& opts = {});

struct NewtonOptions {
  double tol = 1e-11;
  int max_iter = 40;
  double min_damping = 1.0 / 64.0;
};

/// Damped Newton for F(x) = 0 with a finite-difference Jacobian.
/// Throws NewtonError on failure.
Vec newton_solve(const std::function<Vec(const Vec&)>& F, Vec x,
                 const NewtonOptions& opts = {});

/// Damped quasi-Newton iteration with a caller-supplied frozen Jacobian.
Vec newton_solve_frozen(const std::function<Vec(const Vec&)>& F, Vec x, const Mat& jacobian,
                        const NewtonOptions& opts = {});

/// Least-squares fit of y ~ c * x.^power; returns c.
double fit_monomial(const std::vector<double>& x, const std::vector<double>& y, double power);

/// Cumulative trapezoid integral of samples on a (possibly nonuniform) grid;
/// result[0] = 0.
Vec cumulative_trapezoid(const Vec& grid, const Vec& values);

/// Centered finite-difference derivative of a scalar function.
double fd_derivative(const std::function<double(double)>& f, double x, double step);

/// Orthonormal basis (columns) of the null space of M, via SVD with the given
/// relative rank cutoff.
Mat null_space(const Mat& M, double rel_cutoff = 1e-9);

/// Exponential decay rate fitted to |y - y_inf| over the tail of a profile.
double fit_decay_rate(const Vec& grid, const Mat& states, const Vec& asymptotic);

}  // namespace brp
