#pragma once

#include <vector>

#include "brp/model.hpp"
#include "brp/types.hpp"

namespace brp {

/// Eigenstructure of E^{-1} A at a state.
struct SpectralData {
  Vec lambdas;  // ascending
  Mat rvecs;    // columns; E-orthogonal, unit 2-norm, sign-fixed
  int k;        // 0-based index of the eigenvalue nearest 0
};

/// Real eigenvalues/eigenvectors of E^{-1}A via the symmetric reduction
/// E = L L^t.  Throws NonHyperbolicError when the spectrum is degenerate
/// within tol (relative to the spectral radius).
SpectralData eig_EA(const Model& model, const Vec& u, double tol = 1e-8);

struct Signature {
  int n_minus = 0, n_zero = 0, n_plus = 0;
};

/// Eigenvalue sign counts of a symmetric matrix, |lambda| <= zero_tol
/// counting as zero.
Signature signature(const Mat& S, double zero_tol);

/// Sign counts of a set of real roots with the given zero tolerance.
Signature root_signature(const Vec& roots, double zero_tol);

/// B22-orthonormal basis of the orthogonal complement of the columns of
/// A21(u); columns satisfy A21^t R0 = 0 and R0^t B22 R0 = I.
Mat build_R0(const Model& model, const Vec& u);

/// Base-point directions: roots and null vectors of the shifted pencil
/// det(A - sigma E - s B) = 0 plus the fast stable directions.
struct LayerDirections {
  double sigma = 0.0;
  Mat R0;           // (N-h) x (N-2h)
  Vec roots;        // the N-2h bounded pencil roots, ascending
  Mat null_vecs;    // N x (N-2h); u2-block equals R0 * p with |p| = 1
  Mat p_vecs;       // (N-2h) x (N-2h) reduced coordinates
  int zero_index = -1;              // root nearest 0 (the characteristic one)
  std::vector<int> negative;        // strictly negative roots, zero_index excluded
  std::vector<int> positive;
  Vec t_eigs;       // h negative eigenvalues of -B22^{-1} A21 E11^{-1} A21^t
  Mat t_vecs;       // (N-h) x h
  Mat fast_dirs;    // N x h, unit columns s_j = (-E11^{-1} A21^t t_j, 0)

  Vec char_root_vec() const { return null_vecs.col(zero_index); }
  double char_root() const { return roots[zero_index]; }
};

struct PencilOptions {
  double real_tol = 1e-7;       // relative bound on |Im s| before ComplexRoot
  double zero_tol_rel = 1e-7;   // relative zero-classification tolerance
  double multiplet_tol = 1e-6;  // relative root-grouping tolerance
  double rank_cutoff = 1e-9;    // SVD null-space cutoff
};

/// Roots/vectors of det(A - sigma E - s B) = 0 via the QZ decomposition of
/// the full N x N pencil, keeping the N-2h bounded roots.  Fast directions
/// are included.
LayerDirections pencil_directions(const Model& model, const Vec& u, double sigma = 0.0,
                                  const PencilOptions& opts = {});

/// Same directions through the restriction to the complement of ker B:
/// roots are the eigenvalues of the symmetric matrix R0^t (A22 - sigma E22) R0
/// and the first block of each vector is recovered from the coupling column.
/// This is the route used inside the curve and layer computations; the QZ
/// route above cross-checks it.
LayerDirections reduced_directions(const Model& model, const Vec& u, double sigma = 0.0,
                                   const PencilOptions& opts = {});

/// Tangent of the characteristic curve at zero strength: the characteristic
/// pencil vector at shift lambda_k(u) when lambda_k(u) >= 0, at shift 0
/// otherwise.
Vec zeta_k_direction(const Model& model, const Vec& u);

/// d(lambda_family)/ds along the unit eigenvector (genuine-nonlinearity
/// indicator); family is 1-based.
double genuine_nonlinearity(const Model& model, int family, const Vec& u);

/// Eigenvector of family i with the wave-curve normalization:
/// grad(lambda_i) . r_i = 1 for genuinely nonlinear families, |r_i| = 1 for
/// linearly degenerate ones.
Vec family_direction(const Model& model, int family, const Vec& u, double ld_tol = 1e-7);

/// -d(char root)/d(sigma) at sigma = lambda_k(u); positive under the
/// structural hypotheses.
double c_tilde(const Model& model, const Vec& u);

/// N x N matrix of strength directions [s_1..s_h | q_{h+1}..q_{k-1} |
/// zeta_k tangent | r_{k+1}..r_N]; invertible near a characteristic base
/// point.
Mat strength_basis(const Model& model, const Vec& u);

/// q_i for each strictly negative pencil root (the Jacobian columns of the
/// slow strength map); k - h - 1 vectors at a characteristic base point.
std::vector<Vec> slow_stable_directions(const Model& model, const Vec& u);
std::vector<Vec> slow_stable_directions(const LayerDirections& dirs);

/// s_j = (-E11^{-1} A21^t t_j, 0), h unit vectors.
std::vector<Vec> fast_stable_directions(const Model& model, const Vec& u);

/// Fits the near-zero eigenvalue of the symmetric pencil zeta*A - B to
/// c * zeta^2 and returns c; the expansion coefficient is a21^t B22^{-1} a21.
/// Requires h = 1.
double eigenvalue_expansion_check(const Model& model, const Vec& u,
                                  const std::vector<double>& zetas);

/// Reduced symmetric route for the pencil roots: eigenvalues of
/// R0^t (A22 - sigma*E22) R0.  Used as the independent cross-check of
/// pencil_directions and as the scalar rate surrogate by the curve engine.
Vec reduced_pencil_roots(const Model& model, const Vec& u, double sigma = 0.0);

}  // namespace brp
