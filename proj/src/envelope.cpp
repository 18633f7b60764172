#include "brp/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace brp {

namespace {

// Upper concave hull values of uniformly spaced samples (monotone chain).
Vec upper_hull(const Vec& x, const Vec& y) {
  const int n = x.size();
  std::vector<int> st;
  auto slope = [&](int a, int b) { return (y[b] - y[a]) / (x[b] - x[a]); };
  for (int i = 0; i < n; ++i) {
    while (st.size() >= 2 && slope(st[st.size() - 2], st.back()) <= slope(st.back(), i))
      st.pop_back();
    st.push_back(i);
  }
  Vec hull(n);
  for (std::size_t seg = 0; seg + 1 < st.size(); ++seg) {
    const int a = st[seg], b = st[seg + 1];
    const double s = slope(a, b);
    for (int i = a; i <= b; ++i) hull[i] = y[a] + s * (x[i] - x[a]);
  }
  if (st.size() == 1) hull[st[0]] = y[st[0]];
  return hull;
}

}  // namespace

EnvelopeResult monotone_concave_envelope(const Vec& f_vals, double s_k, double tol) {
  const int n = f_vals.size();
  if (n < 3 || s_k <= 0)
    throw std::invalid_argument("monotone_concave_envelope: need s_k > 0 and >= 3 samples");
  EnvelopeResult r;
  r.grid = Vec::LinSpaced(n, 0.0, s_k);
  r.f = f_vals;

  r.m = f_vals.maxCoeff();
  const double scale = std::max(1.0, f_vals.cwiseAbs().maxCoeff());
  int i_under = 0;
  for (int i = 0; i < n; ++i)
    if (f_vals[i] >= r.m - tol * scale) i_under = i;
  r.tau_under = r.grid[i_under];

  Vec hull = upper_hull(r.grid, f_vals);
  r.env = hull;
  for (int i = i_under; i < n; ++i) r.env[i] = r.m;

  const double dtau = r.grid[1] - r.grid[0];
  r.sigma.resize(n);
  for (int i = 1; i < n; ++i) r.sigma[i] = std::max((r.env[i] - r.env[i - 1]) / dtau, 0.0);
  r.sigma[0] = n > 1 ? r.sigma[1] : 0.0;

  r.contact.resize(n);
  for (int i = 0; i < n; ++i) r.contact[i] = (r.env[i] - r.f[i]) <= tol * scale;

  // first grid point from which the envelope is flat
  const double sig_tol = tol * std::max(1.0, r.sigma.cwiseAbs().maxCoeff());
  int i_bar = n - 1;
  if (r.sigma[n - 1] <= sig_tol) {
    int i = n - 1;
    while (i >= 1 && r.sigma[i] <= sig_tol) --i;
    i_bar = i;
  }
  r.tau_bar = r.grid[i_bar];
  return r;
}

EnvelopeResult monotone_convex_envelope(const Vec& f_vals, double s_k, double tol) {
  const int n = f_vals.size();
  if (n < 3 || s_k >= 0)
    throw std::invalid_argument("monotone_convex_envelope: need s_k < 0 and >= 3 samples");
  Vec mirrored(n);
  for (int i = 0; i < n; ++i) mirrored[i] = -f_vals[n - 1 - i];
  EnvelopeResult cc = monotone_concave_envelope(mirrored, -s_k, tol);

  EnvelopeResult r;
  r.grid = Vec::LinSpaced(n, s_k, 0.0);
  r.f = f_vals;
  r.env.resize(n);
  r.sigma.resize(n);
  r.contact.resize(n);
  for (int i = 0; i < n; ++i) {
    r.env[i] = -cc.env[n - 1 - i];
    r.sigma[i] = cc.sigma[n - 1 - i];
    r.contact[i] = cc.contact[n - 1 - i];
  }
  r.m = -cc.m;
  r.tau_under = -cc.tau_under;
  r.tau_bar = -cc.tau_bar;
  return r;
}

std::pair<double, double> split_points(const EnvelopeResult& env) {
  return {env.tau_bar, env.tau_under};
}

}  // namespace brp
