#pragma once

#include <optional>
#include <vector>

#include "brp/boundary_layer.hpp"
#include "brp/model.hpp"
#include "brp/wave_curves.hpp"

namespace brp {

struct RiemannOptions {
  double delta = 0.1;  // amplitude gate on |beta(u_i, u_b)|
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  CurveOptions curve;
  LayerOptions layer;
};

/// Check results for one discontinuity of an assembled solution.
struct DiscontinuityCheck {
  int piece_index = -1;
  WaveKind kind = WaveKind::Shock;
  double speed = 0.0;
  double rh_residual = 0.0;
  bool liu_ok = true;
  double liu_margin = 0.0;
};

struct AdmissibilityReport {
  std::vector<DiscontinuityCheck> discontinuities;
  double max_rh_residual = 0.0;
  bool liu_all_ok = true;
  bool has_zero_speed_jump = false;
  double zero_speed_flux_residual = 0.0;  // |f(trace) - f(underline)|
  bool trace_sign_ok = true;
  double alpha_boundary = 0.0, alpha_trace = 0.0;
  double boundary_residual = 0.0;  // |beta(psi(0), u_b)|
  bool speeds_ordered = true;
  bool passed(double rh_tol = 1e-8) const;
  std::string summary() const;
};

/// Assembled self-similar solution of the boundary Riemann problem.
/// Holds a non-owning reference to the model it was solved with.
struct SelfSimilarSolution {
  const Model* model = nullptr;
  Vec u_interior, u_boundary;
  ZetaFlag flag = ZetaFlag::FULL;
  Vec strengths;  // N (FULL) or N-h (PARTIAL: s_{h+1}..s_N)
  Vec trace;      // u-bar
  Vec underline;  // u-underbar
  std::vector<WavePiece> pieces;  // ascending speed; boundary layer first
  LayerProfile layer;
  WaveCurveResult zeta_curve;
  std::vector<WaveCurveResult> outgoing_curves;  // families k+1..N
  int newton_iterations = 0;
  double residual = 0.0;

  /// Inviscid self-similar sampler; the boundary layer collapses to its
  /// trace.  Requires t > 0 and x >= 0.
  Vec sample(double t, double x) const;

  /// Total variation of sample(t, .) over x in (0, inf).
  double total_variation() const;
};

/// Full boundary-value map: strengths s (size N, ordered s_1..s_N) ->
/// boundary value of the composed wave/layer chain based at u_i.
Vec zeta_tot(const Model& model, const Vec& u_i, const Vec& s,
             const RiemannOptions& opts = {});

/// Parabolic-component map for the alpha <= 0 regime: strengths
/// (s_{h+1}..s_N) -> u2 components of the slow boundary value.
Vec zeta_par(const Model& model, const Vec& u_i, const Vec& s,
             const RiemannOptions& opts = {});

/// Frozen Jacobians at zero strength (columns of Lemma-style direction sets).
Mat zeta_tot_jacobian0(const Model& model, const Vec& u_i);
Mat zeta_par_jacobian0(const Model& model, const Vec& u_i);

/// Solve beta(psi(0), u_b) = 0 by a damped frozen-Jacobian Newton iteration
/// and assemble the self-similar pattern.
SelfSimilarSolution solve_boundary_riemann(const Model& model, const Vec& u_i, const Vec& u_b,
                                           const RiemannOptions& opts = {});

AdmissibilityReport admissibility_report(const SelfSimilarSolution& sol, double rh_tol = 1e-8);

}  // namespace brp
