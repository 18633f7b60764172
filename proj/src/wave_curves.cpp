#include "brp/wave_curves.hpp"

#include <algorithm>
#include <cmath>

#include "brp/numerics.hpp"

namespace brp {

const char* wave_kind_name(WaveKind k) {
  switch (k) {
    case WaveKind::Rarefaction: return "rarefaction";
    case WaveKind::Shock: return "shock";
    case WaveKind::Contact: return "contact";
    case WaveKind::BoundaryLayer: return "boundary_layer";
  }
  return "?";
}

namespace {

void check_amplitude(double s, const CurveOptions& opts, const char* who) {
  if (std::abs(s) > opts.amplitude_bound)
    throw AmplitudeError(std::string(who) + ": strength " + std::to_string(s) +
                         " exceeds the amplitude bound " + std::to_string(opts.amplitude_bound));
}

WaveCurveResult trivial_curve(const Model& model, int family, const Vec& u_tilde, int n) {
  WaveCurveResult r;
  r.family = family;
  r.s = 0.0;
  r.grid = Vec::Zero(n);
  r.states = u_tilde.replicate(1, n);
  r.sigma = Vec::Zero(n);
  r.z00 = Vec::Zero(n);
  r.contact.assign(n, true);
  r.end_state = r.trace_state = r.underline_state = u_tilde;
  (void)model;
  return r;
}

// Near-zero root and null vector of the shifted pencil det(A - sigma E - sB),
// with the sign of the vector matched to a reference direction.
struct CharPencil {
  const Model& model;
  double scale = 1.0;  // rescaling anchored at the base point
  Vec ref;             // sign/continuity reference

  std::pair<double, Vec> operator()(const Vec& u, double sigma) {
    LayerDirections d = pencil_directions(model, u, sigma);
    Vec v = d.char_root_vec() * scale;
    if (ref.size() && ref.dot(v) < 0) v = -v;
    return {d.char_root(), v};
  }
};

struct PatternScratch {
  const Vec* grid = nullptr;
  const Mat* states = nullptr;
  const Vec* sigma = nullptr;
  const Vec* fvals = nullptr;  // reduced flux samples (mirrored grid)
  const std::vector<bool>* contact = nullptr;
  int i_bar = 0, i_under = 0;
};

// Fan samples between grid indices a <= b, reordered so fan_sigma ascends.
void fill_fan(const Mat& st, const Vec& sig, int a, int b, WavePiece& p) {
  const int m = b - a + 1;
  p.fan_states.resize(st.rows(), m);
  p.fan_sigma.resize(m);
  for (int i = 0; i < m; ++i) {
    p.fan_states.col(i) = st.col(b - i);
    p.fan_sigma[i] = sig[b - i] ;
  }
  for (int i = 0; i + 1 < m; ++i) p.fan_sigma[i + 1] = std::max(p.fan_sigma[i + 1], p.fan_sigma[i]);
}

// Pieces on [0, tau_bar], the zero-speed discontinuity on [tau_bar,
// tau_under] and the boundary-layer tail beyond, ordered by increasing speed.
void extract_pattern(const Model& model, int family, const PatternScratch& ps,
                     const CurveOptions& opts, WaveCurveResult& out) {
  const Vec& sig = *ps.sigma;
  const Mat& st = *ps.states;
  const std::vector<bool>& ct = *ps.contact;
  const int n = sig.size();
  const double state_scale = std::max(1.0, st.col(0).cwiseAbs().maxCoeff());
  const double speed_tol = 1e-9 * std::max(1.0, sig.cwiseAbs().maxCoeff());
  auto jump = [&](int a, int b) { return (st.col(b) - st.col(a)).norm(); };

  std::vector<WavePiece> waves;  // collected outward (tau ascending), reversed at the end
  int i = 0;
  while (i < ps.i_bar) {
    const bool attached = ct[i] && ct[i + 1];
    int j = i;
    while (j < ps.i_bar && (ct[j] && ct[j + 1]) == attached) ++j;
    WavePiece p;
    p.family = family;
    p.left = st.col(j);
    p.right = st.col(i);
    if (attached) {
      p.speed_right = sig[std::min(i + 1, n - 1)];
      p.speed_left = sig[j];
      if (p.speed_right - p.speed_left > speed_tol) {
        p.kind = WaveKind::Rarefaction;
        fill_fan(st, sig, i, j, p);
      } else {
        p.kind = WaveKind::Contact;
        p.speed_left = p.speed_right = 0.5 * (p.speed_left + p.speed_right);
      }
    } else {
      p.kind = WaveKind::Shock;
      p.speed_left = p.speed_right = sig[std::min(i + 1, n - 1)];
      if (ps.fvals) {
        // Liu via the contact-chord characterization: chords of the reduced
        // flux from the left endpoint stay above the shock speed
        const Vec& f = *ps.fvals;
        const Vec& tg = *ps.grid;
        double margin = std::numeric_limits<double>::infinity();
        for (int mIdx = i; mIdx < j; ++mIdx) {
          const double chord =
              (f[j] - f[mIdx]) / std::max(std::abs(tg[j] - tg[mIdx]), 1e-300);
          margin = std::min(margin, chord - p.speed_left);
        }
        p.liu_margin = margin;
        p.liu_ok = margin > -1e-8 * std::max(1.0, std::abs(p.speed_left));
      }
    }
    if (jump(i, j) > opts.jump_tol * state_scale || p.kind == WaveKind::Rarefaction)
      waves.push_back(std::move(p));
    i = j;
  }
  std::reverse(waves.begin(), waves.end());

  // boundary-layer tail sits innermost
  if (ps.i_under < n - 1 && jump(ps.i_under, n - 1) > opts.jump_tol * state_scale) {
    WavePiece p;
    p.family = family;
    p.kind = WaveKind::BoundaryLayer;
    p.left = st.col(n - 1);
    p.right = st.col(ps.i_under);
    p.speed_left = p.speed_right = 0.0;
    out.pattern.push_back(std::move(p));
    out.has_boundary_layer = true;
  }
  // zero-speed discontinuity between the underline state and the trace
  if (ps.i_bar < ps.i_under && jump(ps.i_bar, ps.i_under) > opts.jump_tol * state_scale) {
    bool all_attached = true;
    for (int m = ps.i_bar; m <= ps.i_under; ++m) all_attached = all_attached && ct[m];
    WavePiece p;
    p.family = family;
    p.kind = all_attached ? WaveKind::Contact : WaveKind::Shock;
    p.left = st.col(ps.i_under);
    p.right = st.col(ps.i_bar);
    p.speed_left = p.speed_right = 0.0;
    out.pattern.push_back(std::move(p));
  }
  for (auto& w : waves) out.pattern.push_back(std::move(w));
}

// Fixed point of the envelope construction for the curve of `family`
// through u_tilde.  Works on the mirrored grid t in [0, |s|].
WaveCurveResult envelope_curve(const Model& model, int family, const Vec& u_tilde, double s,
                               const CurveOptions& opts, bool anchor_to_family_direction) {
  const int n = opts.n;
  WaveCurveResult out;
  out.family = family;
  out.s = s;
  if (std::abs(s) < 1e-14) return trivial_curve(model, family, u_tilde, n);
  check_amplitude(s, opts, "envelope_curve");

  const double mirror = s < 0 ? -1.0 : 1.0;
  const double send = std::abs(s);
  const SpectralData sd = eig_EA(model, u_tilde);
  const double lam = sd.lambdas[family - 1];

  CharPencil pencil{model, 1.0, Vec()};
  {
    auto [root0, v0] = pencil(u_tilde, lam);
    (void)root0;
    if (anchor_to_family_direction) {
      const Vec fd = family_direction(model, family, u_tilde, opts.ld_tol);
      pencil.scale = fd.norm() / v0.norm();
      pencil.ref = fd;
    } else {
      // characteristic family: keep the |p| = 1 pencil normalization, sign
      // aligned with the reduced-route tangent
      pencil.ref = zeta_k_direction(model, u_tilde);
    }
  }

  // c_tilde at (u_tilde, lambda): slope of the near-zero root in sigma
  const double fd_step = 1e-6 * std::max(1.0, std::abs(lam));
  const double ct = -(pencil(u_tilde, lam + fd_step).first - pencil(u_tilde, lam - fd_step).first) /
                    (2 * fd_step);
  if (ct <= 0)
    throw HypothesisError("envelope_curve: c_tilde not positive (d theta00/d sigma >= 0)");
  out.c_tilde = ct;

  const Vec tgrid = Vec::LinSpaced(n, 0.0, send);
  const double dt = tgrid[1] - tgrid[0];
  Vec sig = Vec::Constant(n, std::max(lam, 0.0));
  Mat st = u_tilde.replicate(1, n);
  Vec fvals = Vec::Zero(n);
  EnvelopeResult env;

  double prev_err = std::numeric_limits<double>::infinity();
  double relax = 1.0;
  int it = 0;
  for (; it < opts.max_iter; ++it) {
    // march states with the current speed profile (sigma is the slope on
    // each cell, carried by the right node)
    Vec ref_save = pencil.ref;
    for (int i = 0; i + 1 < n; ++i) {
      const double sseg = sig[i + 1];
      auto rhs = [&](double, const Vec& u) { return mirror * pencil(u, sseg).second; };
      Vec u = st.col(i);
      // two RK4 substeps per cell
      for (int sub = 0; sub < 2; ++sub) {
        const double hh = dt / 2;
        Vec k1 = rhs(0, u);
        Vec k2 = rhs(0, u + 0.5 * hh * k1);
        Vec k3 = rhs(0, u + 0.5 * hh * k2);
        Vec k4 = rhs(0, u + hh * k3);
        u += (hh / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
      }
      pencil.ref = pencil(u, sseg).second;
      st.col(i + 1) = u;
    }
    pencil.ref = ref_save;

    // reduced flux and its monotone envelope
    Vec integrand(n);
    for (int i = 0; i < n; ++i)
      integrand[i] = pencil(st.col(i), sig[i]).first / ct + sig[i];
    fvals = cumulative_trapezoid(tgrid, integrand);
    env = monotone_concave_envelope(fvals, send, opts.contact_tol);

    double err = (env.sigma - sig).cwiseAbs().maxCoeff();
    if (err > prev_err) relax = 0.5;  // damp an oscillating iteration
    sig += relax * (env.sigma - sig);
    if (err < opts.fp_tol) break;
    prev_err = err;
  }
  if (it >= opts.max_iter)
    throw FixedPointError("envelope_curve: no convergence in " + std::to_string(opts.max_iter) +
                          " iterations");
  out.fp_iterations = it + 1;

  out.grid = mirror * tgrid;
  out.states = st;
  out.sigma = sig;
  out.z00 = mirror * ct * (fvals - env.env);
  out.contact = env.contact;
  out.tau_bar = mirror * env.tau_bar;
  out.tau_under = mirror * env.tau_under;

  const double tiny = 1e-14;
  int i_bar = static_cast<int>(std::round(env.tau_bar / dt + tiny));
  int i_under = static_cast<int>(std::round(env.tau_under / dt + tiny));
  out.end_state = st.col(n - 1);
  out.trace_state = st.col(i_bar);
  out.underline_state = st.col(i_under);

  PatternScratch ps{&tgrid, &st, &sig, &fvals, &out.contact, i_bar, i_under};
  extract_pattern(model, family, ps, opts, out);
  return out;
}

// Integral curve of a direction field sampled on the curve grid.
Mat march_integral_curve(const std::function<Vec(const Vec&)>& dir, const Vec& u0, int n,
                         double s) {
  Mat st(u0.size(), n);
  st.col(0) = u0;
  const double dt = s / (n - 1);
  for (int i = 0; i + 1 < n; ++i) {
    Vec u = st.col(i);
    for (int sub = 0; sub < 2; ++sub) {
      const double hh = dt / 2;
      Vec k1 = dir(u);
      Vec k2 = dir(u + 0.5 * hh * k1);
      Vec k3 = dir(u + 0.5 * hh * k2);
      Vec k4 = dir(u + hh * k3);
      u += (hh / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    st.col(i + 1) = u;
  }
  return st;
}

// Exact contact curve for a linearly degenerate family.
WaveCurveResult contact_curve(const Model& model, int family, const Vec& u_tilde, double s,
                              const CurveOptions& opts, const Vec& direction_at_base,
                              bool per_state_shift) {
  const int n = opts.n;
  WaveCurveResult out;
  out.family = family;
  out.s = s;

  CharPencil pencil{model, 1.0, direction_at_base};
  auto dir = [&](const Vec& u) -> Vec {
    const double shift = per_state_shift ? eig_EA(model, u).lambdas[family - 1]
                                         : eig_EA(model, u_tilde).lambdas[family - 1];
    Vec v = pencil(u, shift).second;
    pencil.ref = v;
    return v;
  };
  out.grid = Vec::LinSpaced(n, 0.0, s);
  out.states = march_integral_curve(dir, u_tilde, n, s);
  out.sigma.resize(n);
  for (int i = 0; i < n; ++i) out.sigma[i] = eig_EA(model, out.states.col(i)).lambdas[family - 1];
  out.z00 = Vec::Zero(n);
  out.contact.assign(n, true);
  out.tau_bar = out.tau_under = s;
  out.end_state = out.trace_state = out.underline_state = out.states.col(n - 1);

  WavePiece p;
  p.kind = WaveKind::Contact;
  p.family = family;
  p.left = out.end_state;
  p.right = u_tilde;
  p.speed_left = p.speed_right = out.sigma[0];
  if ((p.left - p.right).norm() > opts.jump_tol) out.pattern.push_back(std::move(p));
  return out;
}

// Rankine-Hugoniot shock branch for a genuinely nonlinear family,
// parameterized by the dual coordinate along r_family.
WaveCurveResult hugoniot_curve(const Model& model, int family, const Vec& u_tilde, double s,
                               const CurveOptions& opts) {
  const int n = opts.n;
  const int N = model.dim();
  const SpectralData sd = eig_EA(model, u_tilde);
  const Vec rdir = family_direction(model, family, u_tilde, opts.ld_tol);
  // dual row: ell . rdir = 1, ell . r_j = 0 otherwise
  const Mat Rinv = sd.rvecs.inverse();
  const Vec ell = Rinv.row(family - 1).transpose() / (Rinv.row(family - 1) * rdir)(0);

  const Vec w_r = model.conservative_state(u_tilde);
  const Vec f_r = model.flux(u_tilde);

  WaveCurveResult out;
  out.family = family;
  out.s = s;
  out.grid = Vec::LinSpaced(n, 0.0, s);
  out.states.resize(N, n);
  out.sigma.resize(n);
  out.states.col(0) = u_tilde;
  out.sigma[0] = sd.lambdas[family - 1];

  Vec x(N + 1);  // (u_left, sigma)
  x.head(N) = u_tilde;
  x[N] = sd.lambdas[family - 1];
  for (int i = 1; i < n; ++i) {
    const double tau = out.grid[i];
    auto F = [&](const Vec& y) -> Vec {
      Vec r(N + 1);
      const Vec u = y.head(N);
      r.head(N) = model.flux(u) - f_r - y[N] * (model.conservative_state(u) - w_r);
      r[N] = ell.dot(u - u_tilde) - tau;
      return r;
    };
    // predictor along the eigenvector, corrector by Newton
    x.head(N) += (out.grid[i] - out.grid[i - 1]) * rdir;
    x[N] = sd.lambdas[family - 1] + 0.5 * tau;
    NewtonOptions nopts;
    nopts.tol = 1e-12 * std::max(1.0, w_r.norm());
    x = newton_solve(F, x, nopts);
    out.states.col(i) = x.head(N);
    out.sigma[i] = x[N];
  }

  // chord diagnostics relative to the reduced flux
  Vec lam(n);
  for (int i = 0; i < n; ++i) lam[i] = eig_EA(model, out.states.col(i)).lambdas[family - 1];
  const Vec f = cumulative_trapezoid(out.grid, lam);
  out.z00.resize(n);
  for (int i = 0; i < n; ++i) {
    const double chord = f[n - 1] * (out.grid[i] / s);
    out.z00[i] = f[i] - chord;
  }
  out.contact.assign(n, false);
  out.contact[0] = out.contact[n - 1] = true;

  out.tau_bar = out.tau_under = s;
  out.end_state = out.trace_state = out.underline_state = out.states.col(n - 1);
  WavePiece p;
  p.kind = WaveKind::Shock;
  p.family = family;
  p.left = out.end_state;
  p.right = u_tilde;
  p.speed_left = p.speed_right = out.sigma[n - 1];
  // Liu along the Hugoniot branch: intermediate speeds dominate the final one
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) margin = std::min(margin, out.sigma[i] - out.sigma[n - 1]);
  p.liu_margin = margin;
  p.liu_ok = margin > -1e-8 * std::max(1.0, std::abs(p.speed_left));
  out.pattern.push_back(std::move(p));
  return out;
}

// Rarefaction branch: integral curve with the grad(lambda) . r = 1
// normalization, so lambda is linear in the parameter.
WaveCurveResult rarefaction_curve(const Model& model, int family, const Vec& u_tilde, double s,
                                  const CurveOptions& opts) {
  const int n = opts.n;
  WaveCurveResult out;
  out.family = family;
  out.s = s;
  out.grid = Vec::LinSpaced(n, 0.0, s);

  Vec ref = family_direction(model, family, u_tilde, opts.ld_tol);
  auto dir = [&](const Vec& u) -> Vec {
    Vec v = family_direction(model, family, u, opts.ld_tol);
    if (ref.dot(v) < 0) v = -v;
    ref = v;
    return v;
  };
  out.states = march_integral_curve(dir, u_tilde, n, s);
  out.sigma.resize(n);
  for (int i = 0; i < n; ++i) out.sigma[i] = eig_EA(model, out.states.col(i)).lambdas[family - 1];
  out.z00 = Vec::Zero(n);
  out.contact.assign(n, true);
  out.tau_bar = out.tau_under = s;
  out.end_state = out.trace_state = out.underline_state = out.states.col(n - 1);

  WavePiece p;
  p.kind = WaveKind::Rarefaction;
  p.family = family;
  p.left = out.end_state;
  p.right = u_tilde;
  p.speed_left = out.sigma[n - 1];
  p.speed_right = out.sigma[0];
  fill_fan(out.states, out.sigma, 0, n - 1, p);
  out.pattern.push_back(std::move(p));
  return out;
}

}  // namespace

WaveCurveResult lax_curve(const Model& model, int family, const Vec& u_tilde, double s,
                          const CurveOptions& opts) {
  model.require_admissible(u_tilde);
  if (family <= model.char_family() || family > model.dim())
    throw std::invalid_argument("lax_curve: family must lie in (k, N]");
  check_amplitude(s, opts, "lax_curve");
  if (std::abs(s) < 1e-14) return trivial_curve(model, family, u_tilde, opts.n);

  const double g = genuine_nonlinearity(model, family, u_tilde);
  const SpectralData sd = eig_EA(model, u_tilde);
  const double scale = std::max(1.0, sd.lambdas.cwiseAbs().maxCoeff());
  if (std::abs(g) <= opts.ld_tol * scale) {
    const Vec base_dir = family_direction(model, family, u_tilde, opts.ld_tol);
    return contact_curve(model, family, u_tilde, s, opts, base_dir, true);
  }
  if (std::abs(g) > 1e-3 * scale) {
    // genuinely nonlinear: exact branches (rarefactions for s < 0, Liu =
    // Lax shocks for s > 0 under the grad(lambda).r = 1 normalization)
    if (s < 0) return rarefaction_curve(model, family, u_tilde, s, opts);
    if (model.conservative()) return hugoniot_curve(model, family, u_tilde, s, opts);
  }
  // neither clearly degenerate nor genuinely nonlinear: envelope fallback
  return envelope_curve(model, family, u_tilde, s, opts, true);
}

WaveCurveResult zeta_k_lindeg(const Model& model, const Vec& u_tilde, double s_k,
                              const CurveOptions& opts) {
  model.require_admissible(u_tilde);
  check_amplitude(s_k, opts, "zeta_k_lindeg");
  const int k = model.char_family();
  const double g = genuine_nonlinearity(model, k, u_tilde);
  const SpectralData sd = eig_EA(model, u_tilde);
  const double scale = std::max(1.0, sd.lambdas.cwiseAbs().maxCoeff());
  if (std::abs(g) > opts.ld_tol * scale)
    throw NotLinearlyDegenerateError("zeta_k_lindeg: grad(lambda_k) . r_k = " + std::to_string(g));
  if (std::abs(s_k) < 1e-14) return trivial_curve(model, k, u_tilde, opts.n);

  const double lk = sd.lambdas[sd.k];
  const Vec base_dir = zeta_k_direction(model, u_tilde);
  const int n = opts.n;

  if (lk >= 0) {
    WaveCurveResult out = contact_curve(model, k, u_tilde, s_k, opts, base_dir, true);
    if (lk <= 1e-12 * scale) {
      // zero-speed contact: the trace stays at u_tilde
      out.tau_bar = 0.0;
      out.trace_state = u_tilde;
      out.tau_under = s_k;
      out.underline_state = out.end_state;
    }
    return out;
  }

  // lambda_k < 0: boundary layer along the sigma = 0 characteristic direction
  WaveCurveResult out;
  out.family = k;
  out.s = s_k;
  out.grid = Vec::LinSpaced(n, 0.0, s_k);
  CharPencil pencil{model, 1.0, base_dir};
  auto dir = [&](const Vec& u) -> Vec {
    Vec v = pencil(u, 0.0).second;
    pencil.ref = v;
    return v;
  };
  out.states = march_integral_curve(dir, u_tilde, n, s_k);
  out.sigma = Vec::Zero(n);
  out.z00.resize(n);
  Vec theta00(n);
  for (int i = 0; i < n; ++i)
    theta00[i] = pencil_directions(model, out.states.col(i), 0.0).char_root();
  out.z00 = cumulative_trapezoid(out.grid, theta00);
  out.contact.assign(n, false);
  out.contact[0] = true;
  out.tau_bar = out.tau_under = 0.0;
  out.end_state = out.states.col(n - 1);
  out.trace_state = out.underline_state = u_tilde;
  out.has_boundary_layer = true;

  WavePiece p;
  p.kind = WaveKind::BoundaryLayer;
  p.family = k;
  p.left = out.end_state;
  p.right = u_tilde;
  out.pattern.push_back(std::move(p));
  return out;
}

WaveCurveResult zeta_k_general(const Model& model, const Vec& u_tilde, double s_k,
                               const CurveOptions& opts) {
  model.require_admissible(u_tilde);
  return envelope_curve(model, model.char_family(), u_tilde, s_k, opts, false);
}

WaveCurveResult zeta_k(const Model& model, const Vec& u_tilde, double s_k,
                       const CurveOptions& opts) {
  try {
    return zeta_k_lindeg(model, u_tilde, s_k, opts);
  } catch (const NotLinearlyDegenerateError&) {
    return zeta_k_general(model, u_tilde, s_k, opts);
  }
}

LimitCheck limit_behavior_check(const Model& model, const Vec& u_tilde,
                                const std::vector<double>& s_seq, const CurveOptions& opts) {
  LimitCheck lc;
  const SpectralData sd = eig_EA(model, u_tilde);
  const double lk = sd.lambdas[sd.k];
  lc.sigma_limit_expected = lk >= 0 ? lk : 0.0;
  for (double s : s_seq) {
    WaveCurveResult r = zeta_k_general(model, u_tilde, s, opts);
    lc.s_values.push_back(s);
    lc.sigma0.push_back(r.sigma[0]);
    lc.z00_at_0.push_back(r.z00[0]);
  }
  return lc;
}

}  // namespace brp
