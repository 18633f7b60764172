#pragma once

#include <functional>
#include <vector>

#include "brp/model.hpp"
#include "brp/types.hpp"

namespace brp {

/// Finite-volume run configuration for the viscous system
/// w_t + f(w)_x = eps (D(w) w_x)_x on [0, X].
struct PdeRun {
  double domain_length = 1.0;
  int cells = 1024;
  double eps = 1e-3;
  double t_end = 0.5;
  double cfl = 0.45;
  std::vector<double> out_times;  // snapshot times; t_end is always added
  long max_steps = 100000000;
};

struct Snapshot {
  double t = 0.0;
  Mat u;  // N x cells, primitive states
};

struct EvolveResult {
  Vec x;  // cell centers
  std::vector<Snapshot> snapshots;
  double conservation_error = 0.0;  // total change minus boundary flux integral
  long steps = 0;
};

/// Upwind (Rusanov) advective fluxes with backward-Euler diffusion; the
/// boundary condition at x = 0 follows beta(., u_b): Dirichlet on all
/// components when alpha(u_b) > 0, Dirichlet on the parabolic block and
/// extrapolation on the hyperbolic one otherwise.
EvolveResult evolve(const Model& model, const std::function<Vec(double)>& u_init, const Vec& u_b,
                    const PdeRun& run);

struct SteadyOracleResult {
  bool converged = false;
  Vec x;
  Mat u;  // N x cells
  long steps = 0;
  double residual = 0.0;  // max |dw/dt| at the end
};

/// Time-march the eps = 1 system with frozen boundary data until steady;
/// the independent oracle for compute_layer profiles.
SteadyOracleResult steady_layer_oracle(const Model& model, const Vec& u_under,
                                       const Vec& boundary_value, double L, int cells,
                                       long max_steps = 3000000, double tol = 1e-10);

}  // namespace brp
