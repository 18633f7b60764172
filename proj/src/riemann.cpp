#include "brp/riemann.hpp"

#include <cmath>
#include <sstream>

#include "brp/numerics.hpp"

namespace brp {

namespace {

struct ChainResult {
  Vec boundary_value;
  WaveCurveResult zeta;
  std::vector<WaveCurveResult> outgoing;  // families k+1..N, in that order
  LayerProfile layer;
};

// Composition (e:1) psi_b( phi_{k+1} o ... o phi_N (u_i), s_1..s_k ):
// family N is applied to u_i first, then downward; the characteristic curve
// and the layer strengths close the chain at the boundary.
ChainResult evaluate_chain(const Model& model, const Vec& u_i, const Vec& s, bool with_fast,
                           const RiemannOptions& opts) {
  const int n = model.dim(), h = model.kernel_dim(), k = model.char_family();
  ChainResult out;
  Vec u = u_i;
  out.outgoing.resize(n - k);
  for (int family = n; family > k; --family) {
    WaveCurveResult c = lax_curve(model, family, u, s[family - 1], opts.curve);
    u = c.end_state;
    out.outgoing[family - k - 1] = std::move(c);
  }
  out.zeta = zeta_k(model, u, s[k - 1], opts.curve);

  Vec layer_strengths = Vec::Zero(k - 1);
  layer_strengths.tail(k - h - 1) = s.segment(h, k - h - 1);
  if (with_fast) layer_strengths.head(h) = s.head(h);
  out.layer = compute_layer(model, out.zeta.end_state, layer_strengths, opts.layer);
  out.boundary_value = out.layer.boundary_value;
  return out;
}

Vec full_strengths_from_partial(const Model& model, const Vec& s_partial) {
  const int h = model.kernel_dim();
  Vec s = Vec::Zero(model.dim());
  s.tail(model.dim() - h) = s_partial;
  return s;
}

}  // namespace

Vec zeta_tot(const Model& model, const Vec& u_i, const Vec& s, const RiemannOptions& opts) {
  if (s.size() != model.dim()) throw std::invalid_argument("zeta_tot: need N strengths");
  return evaluate_chain(model, u_i, s, true, opts).boundary_value;
}

Vec zeta_par(const Model& model, const Vec& u_i, const Vec& s, const RiemannOptions& opts) {
  const int h = model.kernel_dim();
  if (s.size() != model.dim() - h)
    throw std::invalid_argument("zeta_par: need N-h strengths (s_{h+1}..s_N)");
  const ChainResult chain =
      evaluate_chain(model, u_i, full_strengths_from_partial(model, s), false, opts);
  return chain.boundary_value.tail(model.dim() - h);
}

Mat zeta_tot_jacobian0(const Model& model, const Vec& u_i) {
  return strength_basis(model, u_i);
}

Mat zeta_par_jacobian0(const Model& model, const Vec& u_i) {
  const int n = model.dim(), h = model.kernel_dim();
  return strength_basis(model, u_i).bottomRightCorner(n - h, n - h);
}

Vec SelfSimilarSolution::sample(double t, double x) const {
  if (t <= 0) throw std::invalid_argument("sample: need t > 0");
  const double xi = x / t;
  if (xi <= 0) return trace;
  Vec state = trace;
  for (const auto& p : pieces) {
    if (p.kind == WaveKind::BoundaryLayer) continue;
    if (xi <= p.speed_left) return state;
    if (p.kind == WaveKind::Rarefaction && xi < p.speed_right && p.fan_sigma.size() > 1) {
      // interpolate across the fan at sigma = xi
      int j = 0;
      while (j + 2 < p.fan_sigma.size() && p.fan_sigma[j + 1] < xi) ++j;
      const double d = p.fan_sigma[j + 1] - p.fan_sigma[j];
      const double w = d > 0 ? (xi - p.fan_sigma[j]) / d : 0.0;
      return (1 - w) * p.fan_states.col(j) + w * p.fan_states.col(j + 1);
    }
    if (xi < p.speed_right) return p.left;  // inside a degenerate fan
    state = p.right;
  }
  return state;
}

double SelfSimilarSolution::total_variation() const {
  double tv = 0.0;
  Vec state = trace;
  for (const auto& p : pieces) {
    if (p.kind == WaveKind::BoundaryLayer) continue;
    tv += (p.left - state).lpNorm<1>();
    tv += (p.right - p.left).lpNorm<1>();
    state = p.right;
  }
  return tv;
}

namespace {

// Assemble the ordered piece list of a converged chain.
void assemble(const Model& model, const ChainResult& chain, SelfSimilarSolution& sol) {
  sol.trace = chain.zeta.trace_state;
  sol.underline = chain.zeta.underline_state;
  sol.layer = chain.layer;
  sol.zeta_curve = chain.zeta;
  sol.outgoing_curves = chain.outgoing;
  sol.pieces.clear();

  // unified boundary-layer record: boundary value down to the underline state
  const double scale = std::max(1.0, sol.underline.cwiseAbs().maxCoeff());
  if ((chain.boundary_value - sol.underline).norm() > 1e-11 * scale) {
    WavePiece bl;
    bl.kind = WaveKind::BoundaryLayer;
    bl.family = model.char_family();
    bl.left = chain.boundary_value;
    bl.right = sol.underline;
    sol.pieces.push_back(std::move(bl));
  }
  for (const auto& p : chain.zeta.pattern)
    if (p.kind != WaveKind::BoundaryLayer) sol.pieces.push_back(p);
  // outgoing families were stored N..k+1; emit ascending speed
  for (auto it = chain.outgoing.rbegin(); it != chain.outgoing.rend(); ++it)
    for (const auto& p : it->pattern) sol.pieces.push_back(p);
}

SelfSimilarSolution solve_common(const Model& model, const Vec& u_i, const Vec& u_b,
                                 const RiemannOptions& opts) {
  model.require_admissible(u_i);
  model.require_admissible(u_b);
  const int n = model.dim(), h = model.kernel_dim();
  const Vec gap = beta_map(model, u_i, u_b);
  if (gap.norm() >= opts.delta)
    throw AmplitudeError("solve_boundary_riemann: |beta(u_i, u_b)| = " +
                         std::to_string(gap.norm()) + " exceeds delta = " +
                         std::to_string(opts.delta));

  SelfSimilarSolution sol;
  sol.model = &model;
  sol.u_interior = u_i;
  sol.u_boundary = u_b;
  sol.flag = zeta_flag(model, u_b);

  NewtonOptions nopts;
  nopts.tol = opts.newton_tol;
  nopts.max_iter = opts.newton_max_iter;

  int iterations = 0;
  Vec s_full;
  if (sol.flag == ZetaFlag::FULL) {
    const Mat J0 = zeta_tot_jacobian0(model, u_i);
    auto F = [&](const Vec& s) -> Vec {
      ++iterations;
      return zeta_tot(model, u_i, s, opts) - u_b;
    };
    Vec s0 = J0.partialPivLu().solve(u_b - u_i);
    s_full = newton_solve_frozen(F, s0, J0, nopts);
    sol.strengths = s_full;
    sol.residual = (zeta_tot(model, u_i, s_full, opts) - u_b).norm();
  } else {
    const Mat J0 = zeta_par_jacobian0(model, u_i);
    const Vec target = u_b.tail(n - h);
    auto F = [&](const Vec& s) -> Vec {
      ++iterations;
      return zeta_par(model, u_i, s, opts) - target;
    };
    Vec s0 = J0.partialPivLu().solve(target - u_i.tail(n - h));
    const Vec s_par = newton_solve_frozen(F, s0, J0, nopts);
    sol.strengths = s_par;
    s_full = full_strengths_from_partial(model, s_par);
    sol.residual = (zeta_par(model, u_i, s_par, opts) - target).norm();
  }
  sol.newton_iterations = iterations;

  const ChainResult chain =
      evaluate_chain(model, u_i, s_full, sol.flag == ZetaFlag::FULL, opts);
  assemble(model, chain, sol);
  return sol;
}

}  // namespace

SelfSimilarSolution solve_boundary_riemann(const Model& model, const Vec& u_i, const Vec& u_b,
                                           const RiemannOptions& opts) {
  return solve_common(model, u_i, u_b, opts);
}

bool AdmissibilityReport::passed(double rh_tol) const {
  return max_rh_residual <= rh_tol && liu_all_ok && trace_sign_ok && speeds_ordered &&
         (!has_zero_speed_jump || zero_speed_flux_residual <= rh_tol);
}

std::string AdmissibilityReport::summary() const {
  std::ostringstream os;
  os << "discontinuities: " << discontinuities.size()
     << ", max RH residual: " << max_rh_residual << ", Liu: " << (liu_all_ok ? "ok" : "FAIL")
     << ", trace sign: " << (trace_sign_ok ? "ok" : "FAIL")
     << ", speeds ordered: " << (speeds_ordered ? "ok" : "FAIL");
  if (has_zero_speed_jump) os << ", f(trace)-f(underline): " << zero_speed_flux_residual;
  os << ", boundary residual: " << boundary_residual;
  return os.str();
}

AdmissibilityReport admissibility_report(const SelfSimilarSolution& sol, double rh_tol) {
  const Model& model = *sol.model;
  AdmissibilityReport rep;

  double prev_speed = 0.0;
  bool first = true;
  for (std::size_t i = 0; i < sol.pieces.size(); ++i) {
    const WavePiece& p = sol.pieces[i];
    if (p.kind == WaveKind::BoundaryLayer) continue;
    if (!first && p.speed_left < prev_speed - 1e-9) rep.speeds_ordered = false;
    prev_speed = p.speed_right;
    first = false;
    if (p.kind == WaveKind::Rarefaction) continue;

    DiscontinuityCheck c;
    c.piece_index = static_cast<int>(i);
    c.kind = p.kind;
    c.speed = p.speed_left;
    c.liu_ok = p.liu_ok;
    c.liu_margin = p.liu_margin;
    if (model.conservative()) {
      const Vec rh = model.flux(p.left) - model.flux(p.right) -
                     c.speed * (model.conservative_state(p.left) - model.conservative_state(p.right));
      c.rh_residual = rh.cwiseAbs().maxCoeff();
    }
    rep.max_rh_residual = std::max(rep.max_rh_residual, c.rh_residual);
    rep.liu_all_ok = rep.liu_all_ok && c.liu_ok;
    rep.discontinuities.push_back(c);
  }

  const double scale = std::max(1.0, sol.trace.cwiseAbs().maxCoeff());
  rep.has_zero_speed_jump = (sol.trace - sol.underline).norm() > 1e-10 * scale;
  if (rep.has_zero_speed_jump && model.conservative())
    rep.zero_speed_flux_residual =
        (model.flux(sol.trace) - model.flux(sol.underline)).cwiseAbs().maxCoeff();

  rep.alpha_boundary = model.alpha(sol.u_boundary);
  rep.alpha_trace = model.alpha(sol.trace);
  const double sign_tol = 1e-9;
  if (rep.alpha_boundary > 0)
    rep.trace_sign_ok = rep.alpha_trace >= -sign_tol;
  else if (rep.alpha_boundary < 0)
    rep.trace_sign_ok = rep.alpha_trace <= sign_tol;

  rep.boundary_residual = beta_map(model, sol.layer.boundary_value, sol.u_boundary).norm();
  (void)rh_tol;
  return rep;
}

}  // namespace brp
