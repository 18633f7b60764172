#include "brp/model.hpp"

#include <cmath>
#include <sstream>

#include "brp/spectral.hpp"

namespace brp {

void Model::require_admissible(const Vec& u) const {
  if (u.size() != n_) throw std::domain_error(name() + ": state has wrong dimension");
  if (!admissible(u)) {
    std::ostringstream os;
    os << name() << ": state outside admissible range: [" << u.transpose() << "]";
    throw std::domain_error(os.str());
  }
}

namespace {

// Invert e(theta) = target for a monotone internal-energy law.
double theta_from_energy(const GasLaw& law, double target, double guess) {
  double th = guess > 0 ? guess : 1.0;
  for (int it = 0; it < 60; ++it) {
    double r = law.e(th) - target;
    double d = law.e_theta(th);
    double step = r / d;
    th -= step;
    if (th <= 0) th = 0.5 * (th + step);  // keep positive
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(th))) break;
  }
  return th;
}

class NavierStokesModel final : public Model {
 public:
  NavierStokesModel(double R, GasLaw law, CoefficientFn nu, CoefficientFn kappa)
      : Model(3, 1, 2), R_(R), law_(std::move(law)), nu_(std::move(nu)), kappa_(std::move(kappa)) {}

  std::string name() const override { return "navier_stokes"; }

  bool admissible(const Vec& u) const override {
    return u.size() == 3 && u[0] > 0 && u[2] > 0;
  }

  Mat E(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], th = u[2];
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = R_ * th / (rho * rho);
    m(1, 1) = 1.0;
    m(2, 2) = law_.e_theta(th) / th;
    return m;
  }

  Mat A(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], v = u[1], th = u[2];
    Mat m = Mat::Zero(3, 3);
    m(0, 0) = R_ * th * v / (rho * rho);
    m(0, 1) = m(1, 0) = R_ * th / rho;
    m(1, 1) = v;
    m(1, 2) = m(2, 1) = R_;
    m(2, 2) = law_.e_theta(th) * v / th;
    return m;
  }

  Mat B(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], th = u[2];
    Mat m = Mat::Zero(3, 3);
    m(1, 1) = nu_.value(rho) / rho;
    m(2, 2) = kappa_.value(rho) / (rho * th);
    return m;
  }

  Mat G(const Vec& u, const Vec& ux) const override {
    require_admissible(u);
    const double rho = u[0], th = u[2];
    const double rhox = ux[0], vx = ux[1];
    Mat m = Mat::Zero(3, 3);
    m(1, 1) = nu_.deriv(rho) * rhox / rho;
    m(2, 1) = nu_.value(rho) * vx / (rho * th);
    m(2, 2) = kappa_.deriv(rho) * rhox / (rho * th);
    return m;
  }

  double alpha(const Vec& u) const override { return u[1]; }

  Mat symmetrizer(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], v = u[1], th = u[2];
    const double psi = law_.e(th) + 0.5 * v * v;
    Mat s = Mat::Zero(3, 3);
    s(0, 0) = R_ * th / (rho * rho);
    s(1, 0) = -v / rho;
    s(1, 1) = 1.0 / rho;
    s(2, 0) = (v * v - psi) / (rho * th);
    s(2, 1) = -v / (rho * th);
    s(2, 2) = 1.0 / (rho * th);
    return s;
  }

  Vec conservative_state(const Vec& u) const override {
    const double rho = u[0], v = u[1], th = u[2];
    Vec w(3);
    w << rho, rho * v, rho * (law_.e(th) + 0.5 * v * v);
    return w;
  }

  Vec primitive_state(const Vec& w) const override {
    const double rho = w[0];
    const double v = w[1] / rho;
    const double e = w[2] / rho - 0.5 * v * v;
    Vec u(3);
    u << rho, v, theta_from_energy(law_, e, e / law_.e_theta(1.0));
    return u;
  }

  Vec flux(const Vec& u) const override {
    const double rho = u[0], v = u[1], th = u[2];
    const double p = R_ * rho * th;
    const double Etot = rho * (law_.e(th) + 0.5 * v * v);
    Vec f(3);
    f << rho * v, rho * v * v + p, v * (Etot + p);
    return f;
  }

  Vec viscous_flux(const Vec& u, const Vec& ux) const override {
    const double rho = u[0], v = u[1];
    const double vx = ux[1], thx = ux[2];
    Vec d(3);
    d << 0.0, nu_.value(rho) * vx, kappa_.value(rho) * thx + nu_.value(rho) * v * vx;
    return d;
  }

  double max_wave_speed(const Vec& u) const override {
    const double th = u[2];
    const double c = std::sqrt(th * R_ + th * R_ * R_ / law_.e_theta(th));
    return std::abs(u[1]) + c;
  }

  double max_diffusion(const Vec& u) const override {
    const double rho = u[0], th = u[2];
    return std::max(nu_.value(rho) / rho, kappa_.value(rho) / (rho * law_.e_theta(th)));
  }

 private:
  double R_;
  GasLaw law_;
  CoefficientFn nu_, kappa_;
};

class MhdModel final : public Model {
 public:
  MhdModel(double beta, double eta, double R, GasLaw law, CoefficientFn nu, CoefficientFn kappa)
      : Model(7, eta > 0 ? 1 : 3, 4),
        beta_(beta),
        eta_(eta),
        R_(R),
        law_(std::move(law)),
        nu_(std::move(nu)),
        kappa_(std::move(kappa)) {
    if (beta_ == 0.0) throw std::domain_error("mhd: longitudinal field beta must be nonzero");
    if (eta_ < 0.0) throw std::domain_error("mhd: conductivity eta must be nonnegative");
  }

  std::string name() const override { return "mhd"; }

  bool admissible(const Vec& u) const override {
    return u.size() == 7 && u[0] > 0 && u[6] > 0 && (u[1] * u[1] + u[2] * u[2]) > 0;
  }

  Mat E(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], th = u[6];
    Vec d(7);
    d << R_ * th / (rho * rho), 1.0 / rho, 1.0 / rho, 1.0, 1.0, 1.0, law_.e_theta(th) / th;
    return d.asDiagonal();
  }

  Mat A(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], b1 = u[1], b2 = u[2], v = u[3], th = u[6];
    Mat m = Mat::Zero(7, 7);
    m(0, 0) = R_ * th * v / (rho * rho);
    m(0, 3) = m(3, 0) = R_ * th / rho;
    m(1, 1) = m(2, 2) = v / rho;
    m(1, 3) = m(3, 1) = b1 / rho;
    m(2, 3) = m(3, 2) = b2 / rho;
    m(1, 4) = m(4, 1) = -beta_;
    m(2, 5) = m(5, 2) = -beta_;
    m(3, 3) = v;
    m(3, 6) = m(6, 3) = R_;
    m(4, 4) = m(5, 5) = v;
    m(6, 6) = v * law_.e_theta(th) / th;
    return m;
  }

  Mat B(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], th = u[6];
    const double nu = nu_.value(rho), kap = kappa_.value(rho);
    Vec d(7);
    d << 0.0, eta_ / rho, eta_ / rho, nu / rho, nu / rho, nu / rho, kap / (rho * th);
    return d.asDiagonal();
  }

  Mat G(const Vec& u, const Vec& ux) const override {
    require_admissible(u);
    const double rho = u[0], th = u[6];
    const double rhox = ux[0], b1x = ux[1], b2x = ux[2], vx = ux[3], w1x = ux[4], w2x = ux[5];
    const double nu = nu_.value(rho), nup = nu_.deriv(rho), kapp = kappa_.deriv(rho);
    Mat m = Mat::Zero(7, 7);
    m(3, 3) = nup * rhox / rho;
    m(4, 4) = m(5, 5) = nup * rhox / rho;
    m(6, 1) = eta_ * b1x / (rho * th);
    m(6, 2) = eta_ * b2x / (rho * th);
    m(6, 3) = nu * vx / (rho * th);
    m(6, 4) = nu * w1x / (rho * th);
    m(6, 5) = nu * w2x / (rho * th);
    m(6, 6) = kapp * rhox / (rho * th);
    return m;
  }

  double alpha(const Vec& u) const override { return u[3]; }

  Mat symmetrizer(const Vec& u) const override {
    require_admissible(u);
    const double rho = u[0], b1 = u[1], b2 = u[2], v = u[3], w1 = u[4], w2 = u[5], th = u[6];
    const double wsq = w1 * w1 + w2 * w2;
    const double psi = law_.e(th) + 0.5 * (v * v + wsq);
    Mat s = Mat::Zero(7, 7);
    s(0, 0) = R_ * th / (rho * rho);
    s(1, 1) = s(2, 2) = 1.0 / rho;
    s(3, 0) = -v / rho;
    s(3, 3) = 1.0 / rho;
    s(4, 0) = -w1 / rho;
    s(5, 0) = -w2 / rho;
    s(4, 4) = s(5, 5) = 1.0 / rho;
    s(6, 0) = (v * v + wsq - psi) / (rho * th);
    s(6, 1) = -b1 / (rho * th);
    s(6, 2) = -b2 / (rho * th);
    s(6, 3) = -v / (rho * th);
    s(6, 4) = -w1 / (rho * th);
    s(6, 5) = -w2 / (rho * th);
    s(6, 6) = 1.0 / (rho * th);
    return s;
  }

  Vec conservative_state(const Vec& u) const override {
    const double rho = u[0], b1 = u[1], b2 = u[2], v = u[3], w1 = u[4], w2 = u[5], th = u[6];
    const double bsq = b1 * b1 + b2 * b2, wsq = w1 * w1 + w2 * w2;
    Vec w(7);
    w << rho, b1, b2, rho * v, rho * w1, rho * w2,
        rho * (0.5 * v * v + 0.5 * wsq + law_.e(th)) + 0.5 * bsq;
    return w;
  }

  Vec primitive_state(const Vec& w) const override {
    const double rho = w[0], b1 = w[1], b2 = w[2];
    const double v = w[3] / rho, w1 = w[4] / rho, w2 = w[5] / rho;
    const double bsq = b1 * b1 + b2 * b2;
    const double e = (w[6] - 0.5 * rho * (v * v + w1 * w1 + w2 * w2) - 0.5 * bsq) / rho;
    Vec u(7);
    u << rho, b1, b2, v, w1, w2, theta_from_energy(law_, e, e / law_.e_theta(1.0));
    return u;
  }

  Vec flux(const Vec& u) const override {
    const double rho = u[0], b1 = u[1], b2 = u[2], v = u[3], w1 = u[4], w2 = u[5], th = u[6];
    const double bsq = b1 * b1 + b2 * b2, wsq = w1 * w1 + w2 * w2;
    const double p = R_ * rho * th;
    Vec f(7);
    f << rho * v, v * b1 - beta_ * w1, v * b2 - beta_ * w2, rho * v * v + p + 0.5 * bsq,
        rho * v * w1 - beta_ * b1, rho * v * w2 - beta_ * b2,
        rho * v * (0.5 * v * v + 0.5 * wsq + law_.e(th)) + v * (p + bsq) -
            beta_ * (b1 * w1 + b2 * w2);
    return f;
  }

  Vec viscous_flux(const Vec& u, const Vec& ux) const override {
    const double rho = u[0], b1 = u[1], b2 = u[2], v = u[3], w1 = u[4], w2 = u[5];
    const double b1x = ux[1], b2x = ux[2], vx = ux[3], w1x = ux[4], w2x = ux[5], thx = ux[6];
    const double nu = nu_.value(rho), kap = kappa_.value(rho);
    Vec d(7);
    d << 0.0, eta_ * b1x, eta_ * b2x, nu * vx, nu * w1x, nu * w2x,
        nu * (v * vx + w1 * w1x + w2 * w2x) + kap * thx + eta_ * (b1 * b1x + b2 * b2x);
    return d;
  }

  double max_wave_speed(const Vec& u) const override {
    const double rho = u[0], th = u[6];
    const double bsq = u[1] * u[1] + u[2] * u[2];
    const double a2 = th * R_ + th * R_ * R_ / law_.e_theta(th);
    return std::abs(u[3]) + std::sqrt(a2 + (beta_ * beta_ + bsq) / rho);
  }

  double max_diffusion(const Vec& u) const override {
    const double rho = u[0], th = u[6];
    return std::max({eta_, nu_.value(rho) / rho, kappa_.value(rho) / (rho * law_.e_theta(th))});
  }

 private:
  double beta_, eta_, R_;
  GasLaw law_;
  CoefficientFn nu_, kappa_;
};

}  // namespace

ModelPtr make_navier_stokes(double R, GasLaw law, CoefficientFn nu, CoefficientFn kappa) {
  return std::make_shared<NavierStokesModel>(R, std::move(law), std::move(nu), std::move(kappa));
}

ModelPtr make_navier_stokes(double R, double cv, double nu, double kappa) {
  return make_navier_stokes(R, GasLaw::polytropic(cv), CoefficientFn::constant(nu),
                            CoefficientFn::constant(kappa));
}

ModelPtr make_mhd(double beta, double eta, double R, GasLaw law, CoefficientFn nu,
                  CoefficientFn kappa) {
  return std::make_shared<MhdModel>(beta, eta, R, std::move(law), std::move(nu),
                                    std::move(kappa));
}

ModelPtr make_mhd(double beta, double eta, double R, double cv, double nu, double kappa) {
  return make_mhd(beta, eta, R, GasLaw::polytropic(cv), CoefficientFn::constant(nu),
                  CoefficientFn::constant(kappa));
}

int zeta_indicator(const Model& model, const Vec& u_b) {
  return model.alpha(u_b) > 0 ? 1 : 0;
}

ZetaFlag zeta_flag(const Model& model, const Vec& u_b) {
  return zeta_indicator(model, u_b) ? ZetaFlag::FULL : ZetaFlag::PARTIAL;
}

Vec beta_map(const Model& model, const Vec& u, const Vec& u_b) {
  model.require_admissible(u);
  model.require_admissible(u_b);
  const int h = model.kernel_dim();
  Vec r(model.dim());
  r.head(h) = (u.head(h) - u_b.head(h)) * double(zeta_indicator(model, u_b));
  r.tail(model.dim() - h) = u.tail(model.dim() - h) - u_b.tail(model.dim() - h);
  return r;
}

bool HypothesesReport::all_passed() const {
  return A_symmetric && E_spd_block_diagonal && B_block_form && sing1d && kawashima_shizuta &&
         strictly_hyperbolic && (!gradient_checked || gradient_structure);
}

std::string HypothesesReport::summary() const {
  std::ostringstream os;
  auto line = [&os](const char* what, bool ok) { os << what << ": " << (ok ? "pass" : "FAIL") << "\n"; };
  line("A symmetric", A_symmetric);
  line("E spd block diagonal", E_spd_block_diagonal);
  line("B block form", B_block_form);
  line("A11 = alpha E11", sing1d);
  line("Kawashima-Shizuta", kawashima_shizuta);
  line("strict hyperbolicity", strictly_hyperbolic);
  if (gradient_checked) line("grad alpha structure", gradient_structure);
  return os.str();
}

HypothesesReport check_hypotheses(const Model& model, const Vec& u, double tol) {
  model.require_admissible(u);
  const int n = model.dim(), h = model.kernel_dim();
  HypothesesReport rep;

  const Mat A = model.A(u), E = model.E(u), B = model.B(u);
  rep.max_asymmetry = (A - A.transpose()).cwiseAbs().maxCoeff();
  rep.A_symmetric = rep.max_asymmetry <= 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());

  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (E + E.transpose()));
  rep.min_E_eigenvalue = es.eigenvalues().minCoeff();
  const bool e_offdiag =
      E.topRightCorner(h, n - h).cwiseAbs().maxCoeff() <= 1e-12 &&
      E.bottomLeftCorner(n - h, h).cwiseAbs().maxCoeff() <= 1e-12;
  rep.E_spd_block_diagonal = rep.min_E_eigenvalue >= 1e-10 && e_offdiag;

  const double b_scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  const bool b_zero_block = B.topLeftCorner(h, h).cwiseAbs().maxCoeff() <= 1e-14 * b_scale &&
                            B.topRightCorner(h, n - h).cwiseAbs().maxCoeff() <= 1e-14 * b_scale &&
                            B.bottomLeftCorner(n - h, h).cwiseAbs().maxCoeff() <= 1e-14 * b_scale;
  Eigen::SelfAdjointEigenSolver<Mat> eb(model.B22(u));
  rep.B_block_form = b_zero_block && eb.eigenvalues().minCoeff() > 0;

  rep.sing1d_residual =
      (model.A11(u) - model.alpha(u) * model.E11(u)).cwiseAbs().maxCoeff();
  rep.sing1d = rep.sing1d_residual <= 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff());

  // Kawashima-Shizuta and strict hyperbolicity from the eigensystem.
  try {
    SpectralData sd = eig_EA(model, u, tol);
    double margin = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
      const Vec r = sd.rvecs.col(i);
      margin = std::min(margin, (B * r).norm() / (b_scale * r.norm()));
    }
    rep.ks_margin = margin;
    rep.kawashima_shizuta = margin > tol;
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i) gap = std::min(gap, sd.lambdas[i + 1] - sd.lambdas[i]);
    rep.min_eigen_gap = gap;
    const double rad = sd.lambdas.cwiseAbs().maxCoeff();
    rep.strictly_hyperbolic = gap > tol * std::max(1.0, rad);
  } catch (const NonHyperbolicError&) {
    rep.strictly_hyperbolic = false;
    rep.kawashima_shizuta = false;
  }

  // Gradient structure of alpha, checked only near the characteristic set.
  if (std::abs(model.alpha(u)) < tol) {
    rep.gradient_checked = true;
    Vec grad(n);
    const double step = 1e-6;
    for (int i = 0; i < n; ++i) {
      Vec up = u, um = u;
      up[i] += step;
      um[i] -= step;
      grad[i] = (model.alpha(up) - model.alpha(um)) / (2 * step);
    }
    const Vec g1 = grad.head(h);
    const Vec xi = grad.tail(n - h);
    const Mat A21 = model.A21(u);
    const Vec coeff = A21.colPivHouseholderQr().solve(xi);
    rep.gradient_residual = std::max(g1.cwiseAbs().maxCoeff(), (A21 * coeff - xi).norm());
    rep.gradient_structure = grad.norm() > tol && rep.gradient_residual <= 1e-6 * grad.norm();
  }
  return rep;
}

}  // namespace brp
