#pragma once

#include <complex>
#include <vector>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <algorithm>
#include <numeric>

namespace shearstab {

using Real = double;
using Cplx = std::complex<double>;
using RVec = std::vector<Real>;
using CVec = std::vector<Cplx>;

inline constexpr Real pi = 3.14159265358979323846;
inline constexpr Cplx I{0.0, 1.0};

inline RVec linspace(Real a, Real b, int n) {
  RVec v(n);
  for (int i = 0; i < n; ++i) v[i] = a + (b - a) * i / (n - 1);
  return v;
}

inline RVec logspace(Real a, Real b, int n) {
  RVec v = linspace(std::log10(a), std::log10(b), n);
  for (auto& x : v) x = std::pow(10.0, x);
  return v;
}

// Least-squares slope of log|y| against log x. Returns {slope, intercept, r2}.
struct SlopeFit {
  Real slope = 0, intercept = 0, r2 = 0;
};

inline SlopeFit fit_loglog(const RVec& x, const RVec& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog: need >=2 matching samples");
  const int n = static_cast<int>(x.size());
  RVec lx(n), ly(n);
  for (int i = 0; i < n; ++i) {
    lx[i] = std::log(x[i]);
    ly[i] = std::log(std::abs(y[i]));
  }
  Real mx = std::accumulate(lx.begin(), lx.end(), 0.0) / n;
  Real my = std::accumulate(ly.begin(), ly.end(), 0.0) / n;
  Real sxx = 0, sxy = 0, syy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  SlopeFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

inline Real sup_abs(const CVec& v) {
  Real m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

inline Real sup_abs(const RVec& v) {
  Real m = 0;
  for (const auto& z : v) m = std::max(m, std::abs(z));
  return m;
}

// Scaled complementary error function on the real line, erfcx(x) = e^{x^2} erfc(x).
// Direct formula below x=4, Laplace continued fraction above.
inline Real erfcx(Real x) {
  if (x < 0) return 2.0 * std::exp(x * x) - erfcx(-x);
  if (x < 4.0) return std::exp(x * x) * std::erfc(x);
  Real cf = 0.0;
  for (int k = 30; k >= 1; --k) cf = 0.5 * k / (x + cf);
  return 1.0 / (std::sqrt(pi) * (x + cf));
}

}  // namespace shearstab
