#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "brp/types.hpp"

namespace brp {

/// Scalar material coefficient as a function of density, with derivative.
struct CoefficientFn {
  std::function<double(double)> value;
  std::function<double(double)> deriv;

  static CoefficientFn constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }};
  }
};

/// Internal energy law e(theta) with derivative e_theta > 0.
struct GasLaw {
  std::function<double(double)> e;
  std::function<double(double)> e_theta;

  static GasLaw polytropic(double cv) {
    return {[cv](double th) { return cv * th; }, [cv](double) { return cv; }};
  }
};

/// Mixed hyperbolic-parabolic model in symmetrized normal form:
///
///   E(u) u_t + A(u) u_x = B(u) u_xx + G(u, u_x) u_x
///
/// with A symmetric, E symmetric positive definite and block diagonal,
/// B = diag(0_{h x h}, B22) with B22 symmetric positive definite, and
/// G(u, 0) = 0 with entries linear in u_x.  The first h components of u are
/// the hyperbolic part u1, the rest the parabolic part u2.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  int dim() const { return n_; }             // N
  int kernel_dim() const { return h_; }      // h = dim ker B
  int char_family() const { return k_; }     // 1-based index of the near-zero eigenvalue

  virtual Mat E(const Vec& u) const = 0;
  virtual Mat A(const Vec& u) const = 0;
  virtual Mat B(const Vec& u) const = 0;
  virtual Mat G(const Vec& u, const Vec& ux) const = 0;
  /// Scalar alpha with A11 = alpha * E11; its sign sets the number of
  /// boundary conditions.
  virtual double alpha(const Vec& u) const = 0;

  virtual bool admissible(const Vec& u) const = 0;
  void require_admissible(const Vec& u) const;

  /// Symmetrizer S(u) turning the quasilinear conservative form into the
  /// normal form above (left multiplication).
  virtual Mat symmetrizer(const Vec& u) const = 0;

  /// Conservative structure.  Both shipped models are conservative; the
  /// flux and viscous flux are expressed in conserved variables w.
  virtual bool conservative() const { return true; }
  virtual Vec conservative_state(const Vec& u) const = 0;  // w(u)
  virtual Vec primitive_state(const Vec& w) const = 0;     // u(w)
  virtual Vec flux(const Vec& u) const = 0;                // f(w(u))
  /// Viscous flux D(w) w_x written in terms of the primitive state and its
  /// spatial derivative.
  virtual Vec viscous_flux(const Vec& u, const Vec& ux) const = 0;
  /// Bound on |lambda_i| used for CFL control.
  virtual double max_wave_speed(const Vec& u) const = 0;
  /// Bound on the diffusion scale (entries of E^{-1} B) used for CFL control.
  virtual double max_diffusion(const Vec& u) const = 0;

  // Block accessors relative to the (h, N-h) partition.
  Mat E11(const Vec& u) const { return E(u).topLeftCorner(h_, h_); }
  Mat E22(const Vec& u) const { return E(u).bottomRightCorner(n_ - h_, n_ - h_); }
  Mat A11(const Vec& u) const { return A(u).topLeftCorner(h_, h_); }
  Mat A21(const Vec& u) const { return A(u).bottomLeftCorner(n_ - h_, h_); }
  Mat A22(const Vec& u) const { return A(u).bottomRightCorner(n_ - h_, n_ - h_); }
  Mat B22(const Vec& u) const { return B(u).bottomRightCorner(n_ - h_, n_ - h_); }
  /// h = 1 convenience: the coupling column a21.
  Vec a21(const Vec& u) const { return A21(u).col(0); }
  Mat G1(const Vec& u, const Vec& ux) const { return G(u, ux).bottomLeftCorner(n_ - h_, h_); }
  Mat G2(const Vec& u, const Vec& ux) const { return G(u, ux).bottomRightCorner(n_ - h_, n_ - h_); }

  Eigen::VectorBlock<const Vec> u1(const Vec& u) const { return u.head(h_); }
  Eigen::VectorBlock<const Vec> u2(const Vec& u) const { return u.tail(n_ - h_); }

 protected:
  Model(int n, int h, int k) : n_(n), h_(h), k_(k) {}
  int n_, h_, k_;
};

using ModelPtr = std::shared_ptr<const Model>;

/// Compressible Navier-Stokes in Eulerian coordinates, u = (rho, u, theta),
/// N = 3, h = 1, alpha = u, k = 2.
ModelPtr make_navier_stokes(double R, GasLaw law, CoefficientFn nu, CoefficientFn kappa);
ModelPtr make_navier_stokes(double R = 1.0, double cv = 1.5, double nu = 1.0,
                            double kappa = 1.0);

/// Plane-wave MHD, u = (rho, b1, b2, u, w1, w2, theta), N = 7, k = 4,
/// alpha = u; h = 1 when the conductivity eta > 0 and h = 3 when eta = 0.
ModelPtr make_mhd(double beta, double eta, double R, GasLaw law, CoefficientFn nu,
                  CoefficientFn kappa);
ModelPtr make_mhd(double beta = 1.0, double eta = 1.0, double R = 1.0, double cv = 1.5,
                  double nu = 1.0, double kappa = 1.0);

enum class ZetaFlag { FULL, PARTIAL };

/// 1 if alpha > 0 at the boundary state (full set of boundary conditions),
/// 0 otherwise.  Depends only on the parabolic components of u_b.
int zeta_indicator(const Model& model, const Vec& u_b);
ZetaFlag zeta_flag(const Model& model, const Vec& u_b);

/// Boundary-condition map beta(u, u_b) = ((u1 - u1b) * zeta(u2b), u2 - u2b).
Vec beta_map(const Model& model, const Vec& u, const Vec& u_b);

/// Numerical verification of the structural hypotheses at a state.
struct HypothesesReport {
  bool A_symmetric = false;
  bool E_spd_block_diagonal = false;
  bool B_block_form = false;
  bool sing1d = false;              // A11 = alpha * E11
  bool kawashima_shizuta = false;   // no eigenvector of E^{-1}A in ker B
  bool strictly_hyperbolic = false;
  bool gradient_structure = false;  // grad alpha = (0_h, xi) with xi in range(A21)
  bool gradient_checked = false;    // only checked where |alpha| < tol
  double max_asymmetry = 0.0;
  double min_E_eigenvalue = 0.0;
  double sing1d_residual = 0.0;
  double ks_margin = 0.0;           // min over eigenvectors of |B r| / |r|
  double min_eigen_gap = 0.0;
  double gradient_residual = 0.0;
  bool all_passed() const;
  std::string summary() const;
};

HypothesesReport check_hypotheses(const Model& model, const Vec& u, double tol = 1e-8);

}  // namespace brp
