#include "brp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

#include "brp/numerics.hpp"

namespace brp {

SpectralData eig_EA(const Model& model, const Vec& u, double tol) {
  model.require_admissible(u);
  const Mat A = model.A(u);
  const Mat E = model.E(u);
  Eigen::LLT<Mat> llt(E);
  if (llt.info() != Eigen::Success)
    throw NonHyperbolicError("eig_EA: E is not positive definite");
  const Mat L = llt.matrixL();
  // (lambda, r) of E^{-1}A  <->  (lambda, L^t r) of L^{-1} A L^{-t}
  Mat S = L.triangularView<Eigen::Lower>().solve(A);
  S = L.triangularView<Eigen::Lower>().solve(S.transpose()).transpose();
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()));

  SpectralData sd;
  sd.lambdas = es.eigenvalues();
  const int n = model.dim();
  sd.rvecs.resize(n, n);
  for (int i = 0; i < n; ++i) {
    Vec r = L.transpose().triangularView<Eigen::Upper>().solve(es.eigenvectors().col(i));
    r /= r.norm();
    int imax;
    r.cwiseAbs().maxCoeff(&imax);
    if (r[imax] < 0) r = -r;
    sd.rvecs.col(i) = r;
  }
  const double rad = std::max(1.0, sd.lambdas.cwiseAbs().maxCoeff());
  for (int i = 0; i + 1 < n; ++i)
    if (sd.lambdas[i + 1] - sd.lambdas[i] <= tol * rad)
      throw NonHyperbolicError("eig_EA: eigenvalues " + std::to_string(i) + "," +
                               std::to_string(i + 1) + " closer than tolerance");
  sd.lambdas.cwiseAbs().minCoeff(&sd.k);
  return sd;
}

Signature signature(const Mat& S, double zero_tol) {
  const double asym = (S - S.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * std::max(1.0, S.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("signature: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (S + S.transpose()),
                                        Eigen::EigenvaluesOnly);
  return root_signature(es.eigenvalues(), zero_tol);
}

Signature root_signature(const Vec& roots, double zero_tol) {
  Signature sig;
  for (int i = 0; i < roots.size(); ++i) {
    if (std::abs(roots[i]) <= zero_tol)
      ++sig.n_zero;
    else if (roots[i] < 0)
      ++sig.n_minus;
    else
      ++sig.n_plus;
  }
  return sig;
}

Mat build_R0(const Model& model, const Vec& u) {
  model.require_admissible(u);
  const int n = model.dim(), h = model.kernel_dim();
  const Mat A21 = model.A21(u);
  const Mat B22 = model.B22(u);

  Eigen::JacobiSVD<Mat> svd(A21);
  if (svd.singularValues().minCoeff() <=
      1e-10 * std::max(1.0, svd.singularValues().maxCoeff()))
    throw RankDeficientError("build_R0: columns of A21 lost rank");

  // Euclidean projector onto the complement of range(A21), then Gram-Schmidt
  // in the B22 inner product.  Seeding with standard basis vectors keeps the
  // basis aligned with the state components.
  const Mat proj = Mat::Identity(n - h, n - h) -
                   A21 * (A21.transpose() * A21).ldlt().solve(A21.transpose());
  Mat R0(n - h, n - 2 * h);
  int cols = 0;
  for (int c = 0; c < n - h && cols < n - 2 * h; ++c) {
    Vec z = proj.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < cols; ++j) z -= R0.col(j) * (R0.col(j).transpose() * B22 * z)(0);
    const double nrm2 = z.transpose() * B22 * z;
    if (nrm2 > 1e-16) {
      R0.col(cols++) = z / std::sqrt(nrm2);
    }
  }
  if (cols != n - 2 * h) throw RankDeficientError("build_R0: complement basis incomplete");
  return R0;
}

Vec reduced_pencil_roots(const Model& model, const Vec& u, double sigma) {
  const Mat R0 = build_R0(model, u);
  const Mat W = R0.transpose() * (model.A22(u) - sigma * model.E22(u)) * R0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (W + W.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

namespace {

// Generalized eigenvalues of (P, B) via RealQZ, finite ones only.
std::vector<double> qz_finite_roots(const Mat& P, const Mat& B, double real_tol) {
  const int n = P.rows();
  Eigen::RealQZ<Mat> qz(P, B);
  if (qz.info() != Eigen::Success) throw std::runtime_error("pencil: QZ failed");
  const Mat& S = qz.matrixS();
  const Mat& T = qz.matrixT();
  const double t_scale = std::max(1.0, T.cwiseAbs().maxCoeff());
  const double scale = std::max(1.0, S.cwiseAbs().maxCoeff());

  std::vector<double> roots;
  int i = 0;
  while (i < n) {
    const bool block2 = (i + 1 < n) && std::abs(S(i + 1, i)) > 1e-13 * scale;
    if (!block2) {
      const double t = T(i, i);
      if (std::abs(t) > 1e-13 * t_scale) roots.push_back(S(i, i) / t);
      i += 1;
    } else {
      // 2x2 block: det(S2 - s T2) = a s^2 - b s + c
      const double a = T(i, i) * T(i + 1, i + 1) - T(i, i + 1) * T(i + 1, i);
      const double b = S(i, i) * T(i + 1, i + 1) + S(i + 1, i + 1) * T(i, i) -
                       S(i, i + 1) * T(i + 1, i) - S(i + 1, i) * T(i, i + 1);
      const double c = S(i, i) * S(i + 1, i + 1) - S(i, i + 1) * S(i + 1, i);
      if (std::abs(a) > 1e-13 * t_scale * t_scale) {
        const std::complex<double> disc = std::sqrt(std::complex<double>(b * b - 4 * a * c));
        const std::complex<double> r1 = (b + disc) / (2 * a);
        const std::complex<double> r2 = (b - disc) / (2 * a);
        for (const auto& r : {r1, r2}) {
          if (std::abs(r.imag()) > real_tol * std::max(1.0, std::abs(r)))
            throw ComplexRootError("pencil: complex root " + std::to_string(r.real()) + " + " +
                                   std::to_string(r.imag()) + "i");
          roots.push_back(r.real());
        }
      } else if (std::abs(b) > 1e-13 * t_scale * scale) {
        roots.push_back(c / b);
      }
      i += 2;
    }
  }
  return roots;
}

}  // namespace

namespace {

// Shared post-processing: zero-root classification and fast directions.
void classify_and_fast(const Model& model, const Vec& u, const PencilOptions& opts,
                       LayerDirections& out) {
  const int n = model.dim(), h = model.kernel_dim();
  const int m = n - 2 * h;
  const double root_scale = std::max(out.roots.cwiseAbs().maxCoeff(), 1e-12);
  out.roots.cwiseAbs().minCoeff(&out.zero_index);
  const double ztol = std::max(opts.zero_tol_rel * root_scale, 1e-12);
  for (int i = 0; i < m; ++i) {
    if (i == out.zero_index) continue;
    if (out.roots[i] < -ztol)
      out.negative.push_back(i);
    else if (out.roots[i] > ztol)
      out.positive.push_back(i);
  }

  const Mat A21 = model.A21(u);
  const Mat E11 = model.E11(u);
  const Mat B22 = model.B22(u);
  const Mat K = -A21 * E11.ldlt().solve(A21.transpose());
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> ges(0.5 * (K + K.transpose()), B22);
  out.t_eigs = ges.eigenvalues().head(h);
  out.t_vecs = ges.eigenvectors().leftCols(h);
  if (out.t_eigs.maxCoeff() >= 0)
    throw HypothesisError("pencil: expected h strictly negative fast eigenvalues");
  out.fast_dirs = Mat::Zero(n, h);
  for (int j = 0; j < h; ++j) {
    Vec s = Vec::Zero(n);
    s.head(h) = -E11.ldlt().solve(A21.transpose() * out.t_vecs.col(j));
    s /= s.norm();
    int imax;
    s.cwiseAbs().maxCoeff(&imax);
    if (s[imax] < 0) s = -s;
    out.fast_dirs.col(j) = s;
  }
}

}  // namespace

LayerDirections pencil_directions(const Model& model, const Vec& u, double sigma,
                                  const PencilOptions& opts) {
  model.require_admissible(u);
  const int n = model.dim(), h = model.kernel_dim();
  const int m = n - 2 * h;
  const Mat A = model.A(u), E = model.E(u), B = model.B(u);
  const Mat P = A - sigma * E;

  LayerDirections out;
  out.sigma = sigma;
  out.R0 = build_R0(model, u);

  std::vector<double> finite = qz_finite_roots(P, B, opts.real_tol);
  if (static_cast<int>(finite.size()) < m)
    throw std::runtime_error("pencil: fewer bounded roots than expected");
  // keep the m smallest in magnitude (spurious roots blow up like
  // 1/(alpha - sigma) as the pencil degenerates)
  std::sort(finite.begin(), finite.end(),
            [](double a, double b) { return std::abs(a) < std::abs(b); });
  finite.resize(m);
  std::sort(finite.begin(), finite.end());
  out.roots = Eigen::Map<Vec>(finite.data(), m);

  // group near-coincident roots, then extract null vectors per group
  const double root_scale = std::max(out.roots.cwiseAbs().maxCoeff(), 1e-12);
  const Mat B22 = model.B22(u);
  out.null_vecs.resize(n, m);
  out.p_vecs.resize(m, m);
  int g0 = 0;
  while (g0 < m) {
    int g1 = g0 + 1;
    while (g1 < m && out.roots[g1] - out.roots[g1 - 1] <= opts.multiplet_tol * root_scale) ++g1;
    const int gs = g1 - g0;
    const double mean =
        std::accumulate(finite.begin() + g0, finite.begin() + g1, 0.0) / gs;
    Eigen::JacobiSVD<Mat> svd(P - mean * B, Eigen::ComputeFullV);
    Mat X = svd.matrixV().rightCols(gs);
    // reduced coordinates p = R0^t B22 x2; orthonormalize within the group
    Mat Praw = out.R0.transpose() * B22 * X.bottomRows(n - h);
    Eigen::HouseholderQR<Mat> qr(Praw);
    Mat Pn = qr.householderQ() * Mat::Identity(m, gs);
    Mat Rn = Mat(qr.matrixQR().triangularView<Eigen::Upper>()).topRows(gs);
    X = X * Rn.inverse();
    for (int j = 0; j < gs; ++j) {
      Vec p = Pn.col(j);
      Vec x = X.col(j);
      int imax;
      p.cwiseAbs().maxCoeff(&imax);
      if (p[imax] < 0) {
        p = -p;
        x = -x;
      }
      out.p_vecs.col(g0 + j) = p;
      out.null_vecs.col(g0 + j) = x;
    }
    g0 = g1;
  }

  classify_and_fast(model, u, opts, out);
  return out;
}

LayerDirections reduced_directions(const Model& model, const Vec& u, double sigma,
                                   const PencilOptions& opts) {
  model.require_admissible(u);
  const int n = model.dim(), h = model.kernel_dim();
  const int m = n - 2 * h;

  LayerDirections out;
  out.sigma = sigma;
  out.R0 = build_R0(model, u);
  const Mat A21 = model.A21(u);
  const Mat M22 = model.A22(u) - sigma * model.E22(u);
  const Mat B22 = model.B22(u);
  const Mat W = out.R0.transpose() * M22 * out.R0;
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (W + W.transpose()));
  out.roots = es.eigenvalues();

  // lift each reduced eigenvector: [A22 - sigma E22 - s B22] R0 p = A21 c
  out.p_vecs.resize(m, m);
  out.null_vecs.resize(n, m);
  const auto a21_lsq = (A21.transpose() * A21).ldlt();
  for (int i = 0; i < m; ++i) {
    Vec p = es.eigenvectors().col(i);
    int imax;
    p.cwiseAbs().maxCoeff(&imax);
    if (p[imax] < 0) p = -p;
    const Vec r0p = out.R0 * p;
    const Vec w = (M22 - out.roots[i] * B22) * r0p;
    const Vec c = a21_lsq.solve(A21.transpose() * w);
    Vec x(n);
    x.head(h) = -c;
    x.tail(n - h) = r0p;
    out.p_vecs.col(i) = p;
    out.null_vecs.col(i) = x;
  }
  classify_and_fast(model, u, opts, out);
  return out;
}

std::vector<Vec> slow_stable_directions(const LayerDirections& dirs) {
  std::vector<Vec> q;
  q.reserve(dirs.negative.size());
  for (int i : dirs.negative) q.push_back(dirs.null_vecs.col(i));
  return q;
}

std::vector<Vec> slow_stable_directions(const Model& model, const Vec& u) {
  return slow_stable_directions(reduced_directions(model, u, 0.0));
}

std::vector<Vec> fast_stable_directions(const Model& model, const Vec& u) {
  const LayerDirections dirs = reduced_directions(model, u, 0.0);
  std::vector<Vec> s;
  s.reserve(dirs.fast_dirs.cols());
  for (int j = 0; j < dirs.fast_dirs.cols(); ++j) s.push_back(dirs.fast_dirs.col(j));
  return s;
}

Vec zeta_k_direction(const Model& model, const Vec& u) {
  const SpectralData sd = eig_EA(model, u);
  const double lk = sd.lambdas[sd.k];
  return reduced_directions(model, u, lk >= 0 ? lk : 0.0).char_root_vec();
}

double c_tilde(const Model& model, const Vec& u) {
  const SpectralData sd = eig_EA(model, u);
  const double lk = sd.lambdas[sd.k];
  const double step = 1e-6 * std::max(1.0, std::abs(lk));
  auto root0 = [&](double sig) { return reduced_directions(model, u, sig).char_root(); };
  const double ct = -(root0(lk + step) - root0(lk - step)) / (2 * step);
  if (ct <= 0)
    throw HypothesisError("c_tilde: d(char root)/d(sigma) is not negative at the base state");
  return ct;
}

double genuine_nonlinearity(const Model& model, int family, const Vec& u) {
  const SpectralData sd = eig_EA(model, u);
  const Vec r = sd.rvecs.col(family - 1);
  const double step = 1e-6;
  auto lam = [&](const Vec& v) { return eig_EA(model, v).lambdas[family - 1]; };
  return (lam(u + step * r) - lam(u - step * r)) / (2 * step);
}

Vec family_direction(const Model& model, int family, const Vec& u, double ld_tol) {
  const SpectralData sd = eig_EA(model, u);
  const Vec r = sd.rvecs.col(family - 1);
  const double g = genuine_nonlinearity(model, family, u);
  const double scale = std::max(1.0, sd.lambdas.cwiseAbs().maxCoeff());
  if (std::abs(g) <= ld_tol * scale) return r;  // linearly degenerate
  return r / g;
}

Mat strength_basis(const Model& model, const Vec& u) {
  const int n = model.dim(), h = model.kernel_dim(), k = model.char_family();
  const LayerDirections dirs = reduced_directions(model, u, 0.0);
  Mat basis(n, n);
  int col = 0;
  for (int j = 0; j < h; ++j) basis.col(col++) = dirs.fast_dirs.col(j);
  const auto q = slow_stable_directions(dirs);
  if (static_cast<int>(q.size()) != k - h - 1)
    throw HypothesisError("strength_basis: unexpected number of slow directions");
  for (const Vec& qi : q) basis.col(col++) = qi;
  basis.col(col++) = zeta_k_direction(model, u);
  for (int j = k + 1; j <= n; ++j) basis.col(col++) = family_direction(model, j, u);
  return basis;
}

double eigenvalue_expansion_check(const Model& model, const Vec& u,
                                  const std::vector<double>& zetas) {
  if (model.kernel_dim() != 1)
    throw std::invalid_argument("eigenvalue_expansion_check requires h = 1");
  const Mat A = model.A(u), B = model.B(u);
  std::vector<double> w(zetas.size());
  for (std::size_t i = 0; i < zetas.size(); ++i) {
    Eigen::SelfAdjointEigenSolver<Mat> es(zetas[i] * A - B, Eigen::EigenvaluesOnly);
    // all other eigenvalues hug the strictly negative spectrum of -B22
    w[i] = es.eigenvalues().maxCoeff();
  }
  return fit_monomial(zetas, w, 2.0);
}

}  // namespace brp
