#include "mtorus/perron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace mtorus {

namespace {

std::vector<char> reach(const IntMatrix& m, int start, bool transpose) {
  const int n = static_cast<int>(m.size());
  std::vector<char> seen(n, 0);
  std::vector<int> stack{start};
  seen[start] = 1;
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    for (int j = 0; j < n; ++j) {
      long x = transpose ? m[j][i] : m[i][j];
      if (x > 0 && !seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
    }
  }
  return seen;
}

using Vec = std::vector<double>;

Vec multiply(const IntMatrix& m, const Vec& v, bool transpose) {
  const std::size_t n = m.size();
  Vec out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i] += (transpose ? m[j][i] : m[i][j]) * v[j];
  return out;
}

void normalize(Vec& v) {
  double s = 0;
  for (double x : v) s += std::abs(x);
  if (s == 0) return;
  for (double& x : v) x = std::abs(x) / s;
}

// Solves a x = b by Gaussian elimination with partial pivoting.
Vec solve(std::vector<Vec> a, Vec b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    std::swap(a[c], a[p]);
    std::swap(b[c], b[p]);
    if (a[c][c] == 0) a[c][c] = 1e-300;
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

Vec eigenvector(const IntMatrix& m, double lambda, Vec v, bool transpose) {
  const std::size_t n = m.size();
  for (int it = 0; it < 3; ++it) {
    std::vector<Vec> a(n, Vec(n));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        a[i][j] = (transpose ? m[j][i] : m[i][j]) - (i == j ? lambda * (1 + 1e-13) : 0.0);
    v = solve(a, v);
    normalize(v);
  }
  return v;
}

double residual(const IntMatrix& m, const Vec& v, double lambda, bool transpose) {
  Vec w = multiply(m, v, transpose);
  double r = 0;
  for (std::size_t i = 0; i < v.size(); ++i) r = std::max(r, std::abs(w[i] - lambda * v[i]));
  return r;
}

long double eval(const std::vector<long long>& c, long double x, long double& bound) {
  long double v = 0, a = 0;
  for (std::size_t k = c.size(); k-- > 0;) {
    v = v * x + static_cast<long double>(c[k]);
    a = a * std::abs(x) + std::abs(static_cast<long double>(c[k]));
  }
  bound = a * static_cast<long double>(c.size() + 1) * 4 *
          std::numeric_limits<long double>::epsilon();
  return v;
}

bool certify(const std::vector<long long>& c, double lambda) {
  const long double delta = 1e-12L;
  long double lo = lambda - delta, hi = lambda + delta, blo, bhi;
  long double plo = eval(c, lo, blo), phi = eval(c, hi, bhi);
  if (std::abs(plo) <= blo || std::abs(phi) <= bhi) return false;
  if ((plo > 0) == (phi > 0)) return false;
  // Taylor shift to hi: all coefficients positive means no root beyond hi.
  std::vector<long double> s(c.begin(), c.end());
  const std::size_t n = s.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t k = n - 1; k-- > i;) s[k] += hi * s[k + 1];
  long double scale = 0;
  for (long long x : c) scale = std::max(scale, std::abs(static_cast<long double>(x)));
  for (long double x : s)
    if (x <= 1e-15L * scale) return false;
  return true;
}

double spectral_radius_scc(const IntMatrix& m, const std::vector<int>& idx) {
  const std::size_t n = idx.size();
  IntMatrix sub(n, std::vector<long>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sub[i][j] = m[idx[i]][idx[j]];
  return perron_frobenius(sub).lambda;
}

}  // namespace

bool is_irreducible(const IntMatrix& m) {
  if (m.empty()) return false;
  auto f = reach(m, 0, false), b = reach(m, 0, true);
  return std::all_of(f.begin(), f.end(), [](char x) { return x; }) &&
         std::all_of(b.begin(), b.end(), [](char x) { return x; });
}

std::vector<long long> characteristic_polynomial(const IntMatrix& m) {
  const std::size_t n = m.size();
  std::vector<long long> c(n + 1, 0);
  c[n] = 1;
  std::vector<std::vector<__int128>> mk(n, std::vector<__int128>(n, 0));
  for (std::size_t k = 1; k <= n; ++k) {
    // mk <- m * mk + c[n-k+1] I
    std::vector<std::vector<__int128>> next(n, std::vector<__int128>(n, 0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        __int128 s = 0;
        for (std::size_t l = 0; l < n; ++l) s += static_cast<__int128>(m[i][l]) * mk[l][j];
        next[i][j] = s + (i == j ? c[n - k + 1] : 0);
      }
    mk = std::move(next);
    __int128 tr = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t l = 0; l < n; ++l) tr += static_cast<__int128>(m[i][l]) * mk[l][i];
    c[n - k] = static_cast<long long>(-tr / static_cast<__int128>(k));
  }
  return c;
}

PerronData perron_frobenius(const IntMatrix& m) {
  PerronData out;
  const std::size_t n = m.size();
  if (n == 0) return out;
  out.irreducible = is_irreducible(m);
  if (!out.irreducible) {
    // Spectral radius is the maximum over strongly connected components.
    std::vector<char> done(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      auto f = reach(m, static_cast<int>(i), false), b = reach(m, static_cast<int>(i), true);
      std::vector<int> comp;
      for (std::size_t j = 0; j < n; ++j)
        if (f[j] && b[j]) {
          comp.push_back(static_cast<int>(j));
          done[j] = 1;
        }
      if (comp.size() == 1 && m[i][i] == 0) continue;
      out.lambda = std::max(out.lambda, spectral_radius_scc(m, comp));
    }
    return out;
  }
  // Power iteration on m + I, which is primitive.
  Vec v(n, 1.0 / static_cast<double>(n));
  double lambda = 0;
  for (int it = 0; it < 4000; ++it) {
    Vec w = multiply(m, v, false);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      w[i] += v[i];
      s += w[i];
    }
    for (double& x : w) x /= s;
    lambda = s - 1;  // v has unit sum
    v = std::move(w);
  }
  auto c = characteristic_polynomial(m);
  // Newton refinement on the characteristic polynomial.
  for (int it = 0; it < 50; ++it) {
    long double p = 0, dp = 0;
    for (std::size_t k = c.size(); k-- > 0;) {
      dp = dp * lambda + p;
      p = p * lambda + static_cast<long double>(c[k]);
    }
    if (dp == 0) break;
    long double step = p / dp;
    lambda = static_cast<double>(lambda - step);
    if (std::abs(step) < 1e-17L) break;
  }
  out.lambda = lambda;
  out.right = eigenvector(m, lambda, v, false);
  out.left = eigenvector(m, lambda, Vec(n, 1.0 / static_cast<double>(n)), true);
  out.residual = std::max(residual(m, out.right, lambda, false), residual(m, out.left, lambda, true));
  if (n <= 6) out.certified = certify(c, lambda);
  return out;
}

}  // namespace mtorus
