#include "brp/viscous_ref.hpp"

#include <algorithm>
#include <cmath>

namespace brp {

namespace {

// Cell data with two ghost layers on each side: columns 0,1 and M+2,M+3.
struct Grid {
  int M;
  double dx;
  Mat w;  // conserved, N x (M+4)
  Mat u;  // primitive, N x (M+4)
};

struct BcState {
  bool full_dirichlet;
  Vec u_b;
};

void apply_ghosts(const Model& model, Grid& g, const BcState& bc) {
  const int n = model.dim(), h = model.kernel_dim(), M = g.M;
  for (int layer = 0; layer < 2; ++layer) {
    // left: mirror the assigned components around u_b, extrapolate the rest
    Vec ghost = 2.0 * bc.u_b - g.u.col(2 + layer);
    if (!bc.full_dirichlet)
      ghost.head(h) = g.u.col(2).head(h);  // zero-gradient on the hyperbolic block
    // keep ghosts physical
    if (ghost[0] <= 0) ghost[0] = 0.5 * g.u.col(2)[0];
    if (ghost[n - 1] <= 0) ghost[n - 1] = 0.5 * g.u.col(2)[n - 1];
    g.u.col(1 - layer) = ghost;
    g.w.col(1 - layer) = model.conservative_state(ghost);
    // right: zero gradient
    g.u.col(M + 2 + layer) = g.u.col(M + 1);
    g.w.col(M + 2 + layer) = g.w.col(M + 1);
  }
}

void primitives_from_conserved(const Model& model, Grid& g) {
  for (int i = 2; i < g.M + 2; ++i) {
    Vec u = model.primitive_state(g.w.col(i));
    if (!u.allFinite() || !model.admissible(u))
      throw StabilityError("viscous_ref: inadmissible state in cell " + std::to_string(i - 2));
    g.u.col(i) = u;
  }
}

// Rusanov flux over all faces; returns fluxes F (N x (M+1)), face f between
// cells (f+1, f+2) in ghosted indexing.
void advective_fluxes(const Model& model, const Grid& g, Mat& F) {
  const int M = g.M;
  for (int f = 0; f <= M; ++f) {
    const Vec& ul = g.u.col(f + 1);
    const Vec& ur = g.u.col(f + 2);
    const double a = std::max(model.max_wave_speed(ul), model.max_wave_speed(ur));
    F.col(f) = 0.5 * (model.flux(ul) + model.flux(ur)) -
               0.5 * a * (g.w.col(f + 2) - g.w.col(f + 1));
  }
}

// Backward-Euler diffusion step in flux form.  The parabolic increment is
// solved for the primitive block u2 via a block-tridiagonal system, then the
// conserved variables are updated with the (linear-in-gradient) viscous
// fluxes so the update telescopes exactly.
struct DiffusionWork {
  std::vector<Mat> sub, diag, sup;
  std::vector<Vec> rhs, sol;
  Mat Vface;  // viscous flux at faces for the conservative update
};

void implicit_diffusion(const Model& model, Grid& g, const BcState& bc, double dt_eps,
                        DiffusionWork& wk) {
  const int n = model.dim(), h = model.kernel_dim(), M = g.M, p = n - h;
  const double dx = g.dx;
  if (static_cast<int>(wk.diag.size()) != M) {
    wk.sub.assign(M, Mat::Zero(p, p));
    wk.diag.assign(M, Mat::Zero(p, p));
    wk.sup.assign(M, Mat::Zero(p, p));
    wk.rhs.assign(M, Vec::Zero(p));
    wk.sol.assign(M, Vec::Zero(p));
    wk.Vface.resize(n, M + 1);
  }

  // face coupling blocks L_f (parabolic rows of the viscous flux per unit
  // gradient of u2) and the explicit gradient flux
  std::vector<Mat> L(M + 1, Mat::Zero(p, p));
  Mat Vexp = Mat::Zero(n, M + 1);
  Vec lift = Vec::Zero(n);
  for (int f = 0; f <= M; ++f) {
    Vec uf, grad;
    if (f == 0) {
      uf = bc.u_b;
      grad = (g.u.col(2) - bc.u_b) / (0.5 * dx);
    } else if (f == M) {
      continue;  // zero-gradient far field: no viscous flux
    } else {
      uf = 0.5 * (g.u.col(f + 1) + g.u.col(f + 2));
      grad = (g.u.col(f + 2) - g.u.col(f + 1)) / dx;
    }
    grad.head(h).setZero();  // the hyperbolic block does not diffuse
    Vexp.col(f) = model.viscous_flux(uf, grad);
    for (int j = 0; j < p; ++j) {
      lift.setZero();
      lift[h + j] = 1.0;
      L[f] = L[f];  // keep shape
      const Vec col = model.viscous_flux(uf, lift);
      for (int r = 0; r < p; ++r) L[f](r, j) = col[h + r];
    }
  }

  // mass matrices d(w_parabolic)/d(u2) by finite differences
  const double c0 = dt_eps / dx;
  for (int i = 0; i < M; ++i) {
    const Vec& ui = g.u.col(i + 2);
    Mat Mw(p, p);
    const Vec w0 = g.w.col(i + 2);
    for (int j = 0; j < p; ++j) {
      const double step = 1e-7 * std::max(1.0, std::abs(ui[h + j]));
      Vec up = ui;
      up[h + j] += step;
      Mw.col(j) = (model.conservative_state(up) - w0).tail(p) / step;
    }
    // explicit residual: flux-form divergence of the current gradients
    wk.rhs[i] = c0 * (Vexp.col(i + 1) - Vexp.col(i)).tail(p);
    const double cl = (i == 0) ? 2.0 * c0 / dx : c0 / dx;  // half-cell at the wall
    const Mat Ll = L[i] * cl;
    const Mat Lr = L[i + 1] * (c0 / dx);
    wk.diag[i] = Mw + Ll + Lr;
    wk.sub[i] = (i == 0) ? Mat::Zero(p, p) : -Ll;
    wk.sup[i] = -Lr;
  }

  // block Thomas solve
  std::vector<Mat> cp(M);
  std::vector<Vec> dp(M);
  Mat denom = wk.diag[0];
  cp[0] = denom.partialPivLu().solve(wk.sup[0]);
  dp[0] = denom.partialPivLu().solve(wk.rhs[0]);
  for (int i = 1; i < M; ++i) {
    denom = wk.diag[i] - wk.sub[i] * cp[i - 1];
    auto lu = denom.partialPivLu();
    cp[i] = lu.solve(wk.sup[i]);
    dp[i] = lu.solve(wk.rhs[i] - wk.sub[i] * dp[i - 1]);
  }
  wk.sol[M - 1] = dp[M - 1];
  for (int i = M - 2; i >= 0; --i) wk.sol[i] = dp[i] - cp[i] * wk.sol[i + 1];

  // conservative update with the implicit fluxes
  for (int f = 0; f <= M; ++f) {
    wk.Vface.col(f) = Vexp.col(f);
    if (f == 0) {
      wk.Vface.col(f).tail(p) += L[f] * (wk.sol[0] * (2.0 / dx));
    } else if (f < M) {
      wk.Vface.col(f).tail(p) += L[f] * ((wk.sol[f] - wk.sol[f - 1]) / dx);
    }
  }
  for (int i = 0; i < M; ++i)
    g.w.col(i + 2) += (dt_eps / dx) * (wk.Vface.col(i + 1) - wk.Vface.col(i));
}

}  // namespace

EvolveResult evolve(const Model& model, const std::function<Vec(double)>& u_init, const Vec& u_b,
                    const PdeRun& run) {
  model.require_admissible(u_b);
  const int n = model.dim(), M = run.cells;
  Grid g{M, run.domain_length / M, Mat::Zero(n, M + 4), Mat::Zero(n, M + 4)};

  EvolveResult out;
  out.x.resize(M);
  for (int i = 0; i < M; ++i) {
    out.x[i] = (i + 0.5) * g.dx;
    Vec u0 = u_init(out.x[i]);
    model.require_admissible(u0);
    g.u.col(i + 2) = u0;
    g.w.col(i + 2) = model.conservative_state(u0);
  }
  const BcState bc{zeta_indicator(model, u_b) == 1, u_b};

  std::vector<double> stops = run.out_times;
  stops.push_back(run.t_end);
  std::sort(stops.begin(), stops.end());
  stops.erase(std::unique(stops.begin(), stops.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-14; }),
              stops.end());

  const Vec total0 = g.w.middleCols(2, M).rowwise().sum() * g.dx;
  Vec flux_integral = Vec::Zero(n);
  Mat F(n, M + 1);
  DiffusionWork wk;

  double t = 0.0;
  std::size_t next_stop = 0;
  while (next_stop < stops.size()) {
    if (t >= stops[next_stop] - 1e-14) {
      out.snapshots.push_back({t, g.u.middleCols(2, M)});
      ++next_stop;
      continue;
    }
    double amax = 0.0;
    for (int i = 0; i < M; ++i) amax = std::max(amax, model.max_wave_speed(g.u.col(i + 2)));
    double dt = run.cfl * g.dx / std::max(amax, 1e-12);
    dt = std::min(dt, stops[next_stop] - t);

    apply_ghosts(model, g, bc);
    advective_fluxes(model, g, F);
    for (int i = 0; i < M; ++i) g.w.col(i + 2) -= (dt / g.dx) * (F.col(i + 1) - F.col(i));
    primitives_from_conserved(model, g);

    implicit_diffusion(model, g, bc, dt * run.eps, wk);
    primitives_from_conserved(model, g);

    flux_integral += dt * (F.col(0) - F.col(M)) +
                     dt * run.eps * (wk.Vface.col(0) - wk.Vface.col(M));
    t += dt;
    if (++out.steps > run.max_steps) throw StabilityError("evolve: exceeded max_steps");
  }

  const Vec total1 = g.w.middleCols(2, M).rowwise().sum() * g.dx;
  out.conservation_error = (total1 - total0 - flux_integral).cwiseAbs().maxCoeff();
  return out;
}

SteadyOracleResult steady_layer_oracle(const Model& model, const Vec& u_under,
                                       const Vec& boundary_value, double L, int cells,
                                       long max_steps, double tol) {
  model.require_admissible(u_under);
  model.require_admissible(boundary_value);
  const int n = model.dim(), M = cells;
  Grid g{M, L / M, Mat::Zero(n, M + 4), Mat::Zero(n, M + 4)};
  SteadyOracleResult out;
  out.x.resize(M);
  for (int i = 0; i < M; ++i) {
    out.x[i] = (i + 0.5) * g.dx;
    // smooth initial blend toward the interior state
    const double wgt = std::exp(-3.0 * out.x[i]);
    Vec u0 = u_under + wgt * (boundary_value - u_under);
    g.u.col(i + 2) = u0;
    g.w.col(i + 2) = model.conservative_state(u0);
  }
  const BcState bc{zeta_indicator(model, boundary_value) == 1, boundary_value};

  Mat F(n, M + 1);
  DiffusionWork wk;
  const double wscale = std::max(1.0, g.w.middleCols(2, M).cwiseAbs().maxCoeff());
  Mat w_prev = g.w.middleCols(2, M);
  double dt = 0.0;
  for (long step = 0; step < max_steps; ++step) {
    double amax = 0.0;
    for (int i = 0; i < M; ++i) amax = std::max(amax, model.max_wave_speed(g.u.col(i + 2)));
    dt = 0.45 * g.dx / std::max(amax, 1e-12);

    apply_ghosts(model, g, bc);
    advective_fluxes(model, g, F);
    for (int i = 0; i < M; ++i) g.w.col(i + 2) -= (dt / g.dx) * (F.col(i + 1) - F.col(i));
    primitives_from_conserved(model, g);
    implicit_diffusion(model, g, bc, dt, wk);
    primitives_from_conserved(model, g);
    out.steps = step + 1;

    if (step % 200 == 199) {
      out.residual = (g.w.middleCols(2, M) - w_prev).cwiseAbs().maxCoeff() / (200 * dt * wscale);
      if (out.residual < tol) {
        out.converged = true;
        break;
      }
      w_prev = g.w.middleCols(2, M);
    }
  }
  out.u = g.u.middleCols(2, M);
  return out;
}

}  // namespace brp
