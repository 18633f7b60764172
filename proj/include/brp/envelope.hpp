#pragma once

#include <vector>

#include "brp/types.hpp"

namespace brp {

/// Discrete monotone envelope of a sampled function on [0, s_k] (concave,
/// s_k > 0) or [s_k, 0] (convex, s_k < 0).  The grid is uniform and stored
/// ascending; sigma is the piecewise-constant left derivative of the
/// envelope (sigma[0] repeats the first segment slope).
struct EnvelopeResult {
  Vec grid;
  Vec f;
  Vec env;
  Vec sigma;
  std::vector<bool> contact;  // env == f within tolerance
  double tau_under = 0.0;     // largest maximizer of f (concave case)
  double tau_bar = 0.0;       // first zero of sigma, else the endpoint
  double m = 0.0;             // extremal value of f
};

/// Smallest concave nondecreasing majorant of the piecewise-linear
/// interpolant of f_vals on [0, s_k].
EnvelopeResult monotone_concave_envelope(const Vec& f_vals, double s_k, double tol = 1e-12);

/// Largest convex nondecreasing minorant on [s_k, 0] (s_k < 0); the mirror
/// image (tau, f) -> (-tau, -f) of the concave case.  f_vals are ordered
/// along the ascending grid from s_k to 0.
EnvelopeResult monotone_convex_envelope(const Vec& f_vals, double s_k, double tol = 1e-12);

/// (tau_bar, tau_under): the trace split point and the largest maximizer.
std::pair<double, double> split_points(const EnvelopeResult& env);

}  // namespace brp
