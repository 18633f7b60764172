#pragma once

#include "brp/model.hpp"
#include "brp/spectral.hpp"
#include "brp/types.hpp"

namespace brp {

/// alpha <= 0 at the boundary value: the physical-variable reparametrization
/// x(y) does not exist.
class NonPositiveAlphaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Truncated domain too short: the profile has not reached its asymptotic
/// state at y = L.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Steady boundary-layer profile in the fast variable, plus the slow tail
/// when slow strengths are engaged.
struct LayerProfile {
  Vec grid_y;          // [0, L]
  Mat v;               // (2N - h) x n rows (u, z2); sigma == 0 throughout
  Vec grid_x;          // physical resample (filled by slow_to_physical)
  Mat states_x;        // u on grid_x
  Vec end_state;       // asymptotic interior state
  Vec boundary_value;  // u at y = 0
  double decay_rate = 0.0;
  Vec slow_grid;       // x samples of the slow stage (may be empty)
  Mat slow_states;     // (u, z0) on slow_grid

  int dim() const { return end_state.size(); }
  Vec u_at(int i) const { return v.col(i).head(dim()); }
  Vec z2_at(int i) const { return v.col(i).tail(v.rows() - dim()); }
};

struct LayerOptions {
  double L = 0.0;       // fast-domain length; <= 0 selects 28 / |fastest rate|
  int n = 400;          // output nodes
  double newton_tol = 1e-11;
  int max_iter = 40;
  double ode_tol = 1e-12;
  double decay_window = 28.0;  // e-foldings resolved by the truncated domain
};

/// Right-hand side of the fast traveling-wave system; v = (u, z2, sigma).
/// Regular across alpha = sigma.
Vec fast_rhs(const Model& model, const Vec& v);

/// Steady layer with the given strength coordinates
/// (s_1..s_h fast, s_{h+1}..s_{k-1} slow) decaying to u_under.
/// Strengths are the coordinates of the boundary displacement along the
/// strength_basis directions.
LayerProfile compute_layer(const Model& model, const Vec& u_under, const Vec& strengths,
                           const LayerOptions& opts = {});

/// Reparametrize the fast profile by x(y) = int_0^y alpha(u); requires
/// alpha > 0 at the boundary value.  min_horizon > 0 additionally enforces
/// x(L) >= min_horizon.
LayerProfile slow_to_physical(const Model& model, LayerProfile profile,
                              double min_horizon = 0.0);

enum class AlphaSign { POSITIVE, NEGATIVE, ZERO, SIGN_CHANGE };

const char* alpha_sign_name(AlphaSign s);

/// Sign classification of alpha along the profile; SIGN_CHANGE flags a
/// violation of the invariance property.
AlphaSign alpha_sign_diagnostic(const Model& model, const LayerProfile& profile,
                                double tol = 1e-10);

/// Max norm of the steady fast-system residual (v' - h(v)) over interior
/// nodes, via centered differences on the sampled profile.
double fast_residual(const Model& model, const LayerProfile& profile);

}  // namespace brp
