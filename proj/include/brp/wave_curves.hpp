#pragma once

#include <vector>

#include "brp/envelope.hpp"
#include "brp/model.hpp"
#include "brp/spectral.hpp"

namespace brp {

enum class WaveKind { Rarefaction, Shock, Contact, BoundaryLayer };

const char* wave_kind_name(WaveKind k);

/// One element of a self-similar wave pattern.  `left` is the state on the
/// slower (boundary) side.  For rarefactions the speeds span the fan; for
/// discontinuities they coincide.  BoundaryLayer pieces carry the boundary
/// value in `left` and the asymptotic interior state in `right`.
struct WavePiece {
  WaveKind kind = WaveKind::Contact;
  int family = 0;
  Vec left, right;
  double speed_left = 0.0, speed_right = 0.0;
  Mat fan_states;  // rarefactions: states across the fan (left to right)
  Vec fan_sigma;   // matching speeds, increasing
  bool liu_ok = true;
  double liu_margin = 0.0;  // min over the interval of (chord speed - speed)
};

struct CurveOptions {
  int n = 129;                   // curve grid points
  double fp_tol = 1e-11;
  int max_iter = 80;
  double contact_tol = 1e-10;    // envelope contact detection
  double amplitude_bound = 0.1;  // delta
  double ld_tol = 1e-7;          // linear-degeneracy threshold
  double jump_tol = 1e-11;       // discard pattern pieces below this jump
};

/// Parameterized wave-fan curve.  grid runs from 0 (at u_tilde) to s; the
/// pattern is ordered by increasing speed (boundary side first).
struct WaveCurveResult {
  int family = 0;
  double s = 0.0;
  Vec grid;
  Mat states;  // N x n, column i is u(grid[i])
  Vec sigma;
  Vec z00;
  std::vector<bool> contact;
  double tau_bar = 0.0, tau_under = 0.0;
  double c_tilde = 0.0;
  int fp_iterations = 0;
  Vec end_state;        // u(s)
  Vec trace_state;      // u(tau_bar)
  Vec underline_state;  // u(tau_under)
  std::vector<WavePiece> pattern;
  bool has_boundary_layer = false;
};

/// Admissible wave-fan curve of family i > k.  Linearly degenerate fields
/// give a contact curve, genuinely nonlinear ones an integral-curve /
/// Rankine-Hugoniot pair, and general fields fall back to the envelope
/// fixed point.
WaveCurveResult lax_curve(const Model& model, int family, const Vec& u_tilde, double s,
                          const CurveOptions& opts = {});

/// Characteristic curve, linearly degenerate branch: a contact when
/// lambda_k(u_tilde) >= 0, a pure boundary layer otherwise.  Throws
/// NotLinearlyDegenerateError when the field fails the degeneracy test.
WaveCurveResult zeta_k_lindeg(const Model& model, const Vec& u_tilde, double s_k,
                              const CurveOptions& opts = {});

/// Characteristic curve through the monotone-envelope fixed point.
WaveCurveResult zeta_k_general(const Model& model, const Vec& u_tilde, double s_k,
                               const CurveOptions& opts = {});

/// Dispatch: linearly degenerate branch when applicable, else general.
WaveCurveResult zeta_k(const Model& model, const Vec& u_tilde, double s_k,
                       const CurveOptions& opts = {});

/// Behavior of (sigma(0), z00(0)) along a sequence of strengths -> 0+.
struct LimitCheck {
  std::vector<double> s_values;
  std::vector<double> sigma0;
  std::vector<double> z00_at_0;
  double sigma_limit_expected = 0.0;  // lambda_k(u)+ when >= 0, else 0
};

LimitCheck limit_behavior_check(const Model& model, const Vec& u_tilde,
                                const std::vector<double>& s_seq,
                                const CurveOptions& opts = {});

}  // namespace brp
