#include "brp/boundary_layer.hpp"

#include <algorithm>
#include <cmath>

#include "brp/numerics.hpp"

namespace brp {

const char* alpha_sign_name(AlphaSign s) {
  switch (s) {
    case AlphaSign::POSITIVE: return "positive";
    case AlphaSign::NEGATIVE: return "negative";
    case AlphaSign::ZERO: return "zero";
    case AlphaSign::SIGN_CHANGE: return "sign_change";
  }
  return "?";
}

Vec fast_rhs(const Model& model, const Vec& v) {
  const int n = model.dim(), h = model.kernel_dim();
  const Vec u = v.head(n);
  const Vec z2 = v.segment(n, n - h);
  const double sigma = v[2 * n - h];
  const double a = model.alpha(u) - sigma;

  const Mat A21 = model.A21(u);
  const auto E11 = model.E11(u).ldlt();
  const Vec coupling = E11.solve(A21.transpose() * z2);

  // fast-scale derivative of u; G is linear in u_x, so evaluating it here
  // absorbs the (alpha - sigma) prefactor of the G2 term
  Vec udot(n);
  udot.head(h) = -coupling;
  udot.tail(n - h) = a * z2;

  Vec ux_reg = Vec::Zero(n);  // u1-derivative part of G1 must vanish
  ux_reg.tail(n - h) = z2;

  const Mat G = model.G(u, udot);
  const Mat G1 = model.G(u, ux_reg).bottomLeftCorner(n - h, h);
  const Vec rhs2 = a * ((model.A22(u) - sigma * model.E22(u)) * z2) -
                   G.bottomRightCorner(n - h, n - h) * z2 - A21 * coupling + G1 * coupling;

  Vec out(v.size());
  out.head(h) = udot.head(h);
  out.segment(h, n - h) = udot.tail(n - h);
  out.segment(n, n - h) = model.B22(u).ldlt().solve(rhs2);
  out[2 * n - h] = 0.0;
  return out;
}

namespace {

Vec pack(const Vec& u, const Vec& z2) {
  Vec v(u.size() + z2.size() + 1);
  v << u, z2, 0.0;
  return v;
}

LayerProfile constant_profile(const Model& model, const Vec& u_under, const LayerOptions& opts) {
  const int n = model.dim(), h = model.kernel_dim();
  LayerProfile p;
  const double L = opts.L > 0 ? opts.L : 1.0;
  p.grid_y = Vec::LinSpaced(opts.n, 0.0, L);
  p.v = pack(u_under, Vec::Zero(n - h)).head(2 * n - h).replicate(1, opts.n);
  p.end_state = u_under;
  p.boundary_value = u_under;
  return p;
}

// Backward-shooting solve of the fast two-point problem: trajectories are
// seeded on the linearized stable directions at y = L and matched to the
// requested strength coordinates at y = 0.  When the anchor carries slow
// content, its drift is frozen over the fast window by subtracting the
// anchor field, so zero fast strength reproduces the anchor exactly.
struct FastShoot {
  const Model& model;
  Vec u_target, z2_target;
  Vec h_anchor;          // fast_rhs at the anchor (zero for true equilibria)
  Mat modes_u, modes_z;  // stable eigenvectors (h columns)
  Vec rates;             // negative eigenvalues
  double L;
  OdeOptions ode;

  Vec seed(const Vec& d) const {
    Vec u = u_target, z2 = z2_target;
    for (int j = 0; j < d.size(); ++j) {
      const double amp = d[j] * std::exp(rates[j] * L);
      u += amp * modes_u.col(j);
      z2 += amp * modes_z.col(j);
    }
    return pack(u, z2);
  }

  Vec rhs(const Vec& v) const { return fast_rhs(model, v) - h_anchor; }

  // state at y = 0 for seed amplitudes d (the e^{rate*L} factor is folded in)
  std::pair<Vec, Vec> at_zero(const Vec& d) const {
    const int n = model.dim(), h = model.kernel_dim();
    auto f = [&](double, const Vec& v) { return rhs(v); };
    Vec v = integrate_ode(f, L, 0.0, seed(d), ode);
    return {v.head(n), v.segment(n, n - h)};
  }
};

}  // namespace

LayerProfile compute_layer(const Model& model, const Vec& u_under, const Vec& strengths,
                           const LayerOptions& opts) {
  model.require_admissible(u_under);
  const int n = model.dim(), h = model.kernel_dim(), k = model.char_family();
  if (strengths.size() != k - 1)
    throw std::invalid_argument("compute_layer: expected k-1 = " + std::to_string(k - 1) +
                                " strengths (h fast, k-h-1 slow)");
  if (strengths.cwiseAbs().maxCoeff() < 1e-13) return constant_profile(model, u_under, opts);

  const Mat basis = strength_basis(model, u_under);
  const Mat duals = basis.inverse();
  const Vec s_fast = strengths.head(h);
  const Vec s_slow = strengths.tail(k - h - 1);

  LayerProfile out;
  out.end_state = u_under;

  // ---- slow stage: reduced system u' = V(u) z0, z0' = W(u) z0 in the slow
  // variable, shot backward from the truncated far end.
  Vec u_anchor = u_under;
  Vec z2_anchor = Vec::Zero(n - h);
  if (s_slow.size() > 0 && s_slow.cwiseAbs().maxCoeff() > 1e-13) {
    const LayerDirections dirs = reduced_directions(model, u_under, 0.0);
    const int ns = static_cast<int>(dirs.negative.size());
    if (ns != k - h - 1) throw HypothesisError("compute_layer: slow direction count mismatch");
    Vec rates(ns);
    Mat pneg(n - 2 * h, ns);
    for (int j = 0; j < ns; ++j) {
      rates[j] = dirs.roots[dirs.negative[j]];
      pneg.col(j) = dirs.p_vecs.col(dirs.negative[j]);
    }
    const double X = opts.decay_window / rates.cwiseAbs().minCoeff();

    auto slow_rhs = [&](double, const Vec& y) -> Vec {
      const Vec u = y.head(n);
      const Vec z0 = y.tail(n - 2 * h);
      const LayerDirections d = reduced_directions(model, u, 0.0);
      const Vec c = d.p_vecs.colPivHouseholderQr().solve(z0);
      Vec dy(y.size());
      dy.head(n) = d.null_vecs * c;
      dy.tail(n - 2 * h) = d.roots.asDiagonal() * c;  // W(u) z0 in eigencoords
      return dy;
    };
    OdeOptions ode;
    ode.rel_tol = opts.ode_tol;
    ode.abs_tol = opts.ode_tol * 1e-2;

    auto at_zero = [&](const Vec& d) -> Vec {
      Vec y(n + n - 2 * h);
      y.head(n) = u_under;
      y.tail(n - 2 * h).setZero();
      for (int j = 0; j < ns; ++j)
        y.tail(n - 2 * h) += d[j] * std::exp(rates[j] * X) * pneg.col(j);
      return integrate_ode(slow_rhs, X, 0.0, y, ode);
    };
    auto G = [&](const Vec& d) -> Vec {
      const Vec y0 = at_zero(d);
      const Vec coords = duals * (y0.head(n) - u_under);
      return coords.segment(h, ns) - s_slow;
    };
    NewtonOptions nopts;
    nopts.tol = opts.newton_tol;
    nopts.max_iter = opts.max_iter;
    Vec d0(ns);
    for (int j = 0; j < ns; ++j) d0[j] = s_slow[j] * rates[j];
    const Vec d = newton_solve(G, d0, nopts);

    // sample the converged slow orbit
    const int ms = std::max(opts.n / 2, 64);
    std::vector<double> xs(ms);
    for (int i = 0; i < ms; ++i) xs[i] = X * (1.0 - double(i) / (ms - 1));
    Vec y(n + n - 2 * h);
    y.head(n) = u_under;
    y.tail(n - 2 * h).setZero();
    for (int j = 0; j < ns; ++j)
      y.tail(n - 2 * h) += d[j] * std::exp(rates[j] * X) * pneg.col(j);
    Mat samples = integrate_ode_sampled(slow_rhs, xs, y, ode);
    out.slow_grid.resize(ms);
    out.slow_states.resize(n + n - 2 * h, ms);
    for (int i = 0; i < ms; ++i) {
      out.slow_grid[i] = xs[ms - 1 - i];
      out.slow_states.col(i) = samples.col(ms - 1 - i);
    }
    u_anchor = out.slow_states.col(0).head(n);
    const Vec z0_anchor = out.slow_states.col(0).tail(n - 2 * h);
    z2_anchor = build_R0(model, u_anchor) * z0_anchor;
  }

  // ---- fast stage around the slow anchor
  FastShoot shoot{model, u_anchor, z2_anchor, Vec(), Mat(), Mat(), Vec(), 0.0, OdeOptions()};
  {
    shoot.h_anchor = fast_rhs(model, pack(u_anchor, z2_anchor));
    const LayerDirections dirs = reduced_directions(model, u_anchor, 0.0);
    shoot.rates = dirs.t_eigs;
    shoot.modes_u.resize(n, h);
    shoot.modes_z.resize(n - h, h);
    const double a = model.alpha(u_anchor);
    const Mat A21 = model.A21(u_anchor);
    const auto E11 = model.E11(u_anchor).ldlt();
    for (int j = 0; j < h; ++j) {
      const Vec t = dirs.t_vecs.col(j);
      Vec du(n);
      du.head(h) = -E11.solve(A21.transpose() * t);
      du.tail(n - h) = a * t;
      shoot.modes_u.col(j) = du / dirs.t_eigs[j];
      shoot.modes_z.col(j) = t;
    }
    shoot.L = opts.L > 0 ? opts.L : opts.decay_window / shoot.rates.cwiseAbs().minCoeff();
    shoot.ode.rel_tol = opts.ode_tol;
    shoot.ode.abs_tol = opts.ode_tol * 1e-2;
  }

  Vec d = Vec::Zero(h);
  if (s_fast.cwiseAbs().maxCoeff() > 1e-13) {
    auto G = [&](const Vec& dd) -> Vec {
      const auto [u0, z20] = shoot.at_zero(dd);
      (void)z20;
      const Vec coords = duals * (u0 - u_under);
      return coords.head(h) - s_fast;
    };
    NewtonOptions nopts;
    nopts.tol = opts.newton_tol;
    nopts.max_iter = opts.max_iter;
    Vec d0(h);
    for (int j = 0; j < h; ++j) {
      const double denom = (duals.row(j) * shoot.modes_u.col(j))(0);
      d0[j] = std::abs(denom) > 1e-8 ? s_fast[j] / denom : s_fast[j];
    }
    d = newton_solve(G, d0, nopts);
  }

  // sample the converged fast orbit from the far end to the boundary
  const int nf = opts.n;
  std::vector<double> ys(nf);
  for (int i = 0; i < nf; ++i) ys[i] = shoot.L * (1.0 - double(i) / (nf - 1));
  auto rhs = [&](double, const Vec& v) { return shoot.rhs(v); };
  Mat samples = integrate_ode_sampled(rhs, ys, shoot.seed(d), shoot.ode);
  out.grid_y.resize(nf);
  out.v.resize(2 * n - h, nf);
  for (int i = 0; i < nf; ++i) {
    out.grid_y[i] = ys[nf - 1 - i];
    out.v.col(i) = samples.col(nf - 1 - i).head(2 * n - h);
  }
  out.boundary_value = out.v.col(0).head(n);

  const double tail = (out.v.col(nf - 1).head(n) - u_anchor).norm();
  const double amp0 = (out.boundary_value - u_under).norm();
  if (amp0 > 0 && tail > 1e-6 * amp0)
    throw TruncationError("compute_layer: profile not settled at y = L; increase L");

  Mat ustates(n, nf);
  for (int i = 0; i < nf; ++i) ustates.col(i) = out.v.col(i).head(n);
  out.decay_rate = fit_decay_rate(out.grid_y, ustates, u_anchor);
  return out;
}

LayerProfile slow_to_physical(const Model& model, LayerProfile profile, double min_horizon) {
  const int n = model.dim();
  const int m = profile.grid_y.size();
  Vec alpha(m);
  for (int i = 0; i < m; ++i) alpha[i] = model.alpha(profile.u_at(i));
  if (alpha[0] <= 0)
    throw NonPositiveAlphaError("slow_to_physical: alpha(u(0)) = " + std::to_string(alpha[0]));
  const Vec x = cumulative_trapezoid(profile.grid_y, alpha);
  if (min_horizon > 0 && x[m - 1] < min_horizon)
    throw TruncationError("slow_to_physical: physical horizon " + std::to_string(x[m - 1]) +
                          " below the requested " + std::to_string(min_horizon));
  // resample u on a uniform x-grid (monotone x by positivity of alpha)
  profile.grid_x = Vec::LinSpaced(m, 0.0, x[m - 1]);
  profile.states_x.resize(n, m);
  int j = 0;
  for (int i = 0; i < m; ++i) {
    const double xi = profile.grid_x[i];
    while (j + 1 < m - 1 && x[j + 1] < xi) ++j;
    const double t = (xi - x[j]) / std::max(x[j + 1] - x[j], 1e-300);
    profile.states_x.col(i) =
        (1 - t) * profile.u_at(j) + std::clamp(t, 0.0, 1.0) * profile.u_at(j + 1);
  }
  return profile;
}

AlphaSign alpha_sign_diagnostic(const Model& model, const LayerProfile& profile, double tol) {
  bool pos = false, neg = false, zero = false;
  auto account = [&](double a) {
    if (a > tol)
      pos = true;
    else if (a < -tol)
      neg = true;
    else
      zero = true;
  };
  for (int i = 0; i < profile.grid_y.size(); ++i) account(model.alpha(profile.u_at(i)));
  for (int i = 0; i < profile.slow_grid.size(); ++i)
    account(model.alpha(profile.slow_states.col(i).head(model.dim())));
  if (pos && neg) return AlphaSign::SIGN_CHANGE;
  if (pos) return AlphaSign::POSITIVE;
  if (neg) return AlphaSign::NEGATIVE;
  return AlphaSign::ZERO;
}

double fast_residual(const Model& model, const LayerProfile& profile) {
  const int m = profile.grid_y.size();
  double worst = 0.0;
  for (int i = 1; i + 1 < m; ++i) {
    const double dy = profile.grid_y[i + 1] - profile.grid_y[i - 1];
    Vec vmid(profile.v.rows() + 1);
    vmid << profile.v.col(i), 0.0;
    const Vec rhs = fast_rhs(model, vmid).head(profile.v.rows());
    const Vec fd = (profile.v.col(i + 1) - profile.v.col(i - 1)) / dy;
    worst = std::max(worst, (fd - rhs).cwiseAbs().maxCoeff());
  }
  return worst;
}

}  // namespace brp
