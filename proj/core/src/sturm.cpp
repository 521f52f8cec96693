#include <cmath>
#include <vector>

#include "ringtheta/spectral.hpp"

namespace ringtheta {

namespace {

#if defined(__SIZEOF_FLOAT128__) && !defined(__clang__)
using real_t = __float128;
const real_t kPiQ = 3.14159265358979323846264338327950288Q;
#else
using real_t = long double;
const real_t kPiQ = 3.14159265358979323846264338327950288L;
#endif

struct Tridiag {
  std::vector<real_t> d;   // diagonal
  std::vector<real_t> b2;  // squared off-diagonal of the symmetrized matrix
};

// Number of eigenvalues strictly below x.
int sturm_count(const Tridiag& t, real_t x) {
  const real_t tiny = 1e-300;
  int c = 0;
  real_t q = t.d[0] - x;
  for (std::size_t k = 0;; ++k) {
    if (q == 0) q = -tiny;
    if (q < 0) ++c;
    if (k + 1 == t.d.size()) break;
    q = t.d[k + 1] - x - t.b2[k] / q;
  }
  return c;
}

real_t lowest_eigenvalue(const Tridiag& t) {
  real_t dmin = t.d[0], bmax = 0;
  for (auto v : t.d) dmin = v < dmin ? v : dmin;
  for (auto v : t.b2) bmax = v > bmax ? v : bmax;
  real_t lo = dmin - 2 * std::sqrt(double(bmax)) * 1.01 - 1, hi = dmin;
  for (int it = 0; it < 400; ++it) {
    real_t mid = (lo + hi) / 2;
    if (mid <= lo || mid >= hi) break;
    if (sturm_count(t, mid) >= 1)
      hi = mid;
    else
      lo = mid;
  }
  return (lo + hi) / 2;
}

// Reflection-even sector of the m-site cell ring with twist s (psi_{j+m} = s psi_j).
Tridiag even_sector(const std::vector<double>& v, real_t shift, real_t h, int s) {
  const int m = int(v.size());
  int top = m / 2;
  if (m % 2 == 0 && s < 0) top -= 1;  // psi_{m/2} = 0
  const int R = top;
  std::vector<real_t> diag(R + 1), up(R, -h), low(R, -h);
  for (int r = 0; r <= R; ++r) diag[r] = shift + real_t(v[r]);
  if (R >= 1) up[0] = -2 * h;  // psi_{-1} = psi_1
  if (m % 2 == 0 && s > 0 && R >= 1) low[R - 1] = -2 * h;  // psi_{m/2+1} = psi_{m/2-1}
  if (m % 2 == 1) diag[R] -= s * h;  // psi_{K+1} = s psi_K
  if (m == 2 && s > 0) {
    up[0] = -2 * h;
    low[0] = -2 * h;
  }
  Tridiag t;
  t.d = diag;
  for (int r = 0; r < R; ++r) t.b2.push_back(up[r] * low[r]);
  return t;
}

}  // namespace

Doublet two_well_doublet(const ModelParams& p) {
  p.validate();
  if (p.n != 2) throw ConfigError("two_well_doublet: requires n = 2");
  if (reduce_angle(p.theta) != 0.0) throw ConfigError("two_well_doublet: requires theta = 0 mod 2pi");
  const int m = p.n_sites / 2;
  if (m < 2) throw ConfigError("two_well_doublet: n_sites too small");
  auto vfull = ring_potential(p);
  std::vector<double> v(vfull.begin(), vfull.begin() + m);
  const real_t a = 2 * kPiQ / p.n_sites;
  const real_t h = 1 / (2 * a * a);
  const real_t shift = p.include_constant_shift ? 1 / (a * a) : real_t(0);
  real_t e0 = lowest_eigenvalue(even_sector(v, shift, h, +1));
  real_t e1 = lowest_eigenvalue(even_sector(v, shift, h, -1));
  return {double(e0), double(e1), double(e1 - e0)};
}

}  // namespace ringtheta
