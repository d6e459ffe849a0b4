#pragma once

#include <functional>
#include <limits>
#include <map>

#include "shearstab/types.hpp"

namespace shearstab {

// A shear flow U0(y) on the half line with analytic derivative evaluation.
// compat_order: highest k for which U0^(k)(0) = 0 holds exactly
// (INT_MAX when all orders vanish).
struct ShearProfile {
  std::string name;
  std::function<Real(int, Real)> eval_fn;
  Real eta_inf = 1.0;
  Real fact_const = 2.0;
  int compat_order = 0;
  int k_max = 12;
};

inline constexpr int kCompatAll = std::numeric_limits<int>::max();

inline Real eval_derivative(const ShearProfile& p, int k, Real y) {
  if (k < 0 || k > p.k_max)
    throw std::invalid_argument("eval_derivative: order " + std::to_string(k) +
                                " exceeds K_max=" + std::to_string(p.k_max));
  if (y < 0) throw std::domain_error("eval_derivative: y must be >= 0");
  return p.eval_fn(k, y);
}

// Odd extension to y < 0: U(-y) = -U(y), so U^(k)(-y) = (-1)^(k+1) U^(k)(y).
inline Real eval_extended(const ShearProfile& p, int k, Real y) {
  if (y >= 0) return eval_derivative(p, k, y);
  Real v = eval_derivative(p, k, -y);
  return (k % 2 == 0) ? -v : v;
}

namespace detail {

inline Real binom(int n, int j) {
  Real r = 1;
  for (int i = 1; i <= j; ++i) r = r * (n - j + i) / i;
  return r;
}

inline Real factorial(int n) {
  Real r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// d^k/dy^k e^{-1/y} = k! e^{-1/y} sum_{j=0}^{k-1} (-1)^j/(k-j)! C(k-1,j) y^{j-2k}.
// Evaluated in log form so the y^{-2k} blowup and the e^{-1/y} decay cancel
// without intermediate overflow.
inline Real exp_inv_deriv(int k, Real y) {
  if (y <= 0) return 0.0;
  if (k == 0) return std::exp(-1.0 / y);
  Real s = 0;
  for (int j = 0; j < k; ++j) {
    s += ((j % 2 == 0) ? 1.0 : -1.0) / factorial(k - j) * binom(k - 1, j) *
         std::pow(y, j);
  }
  if (s == 0.0) return 0.0;
  Real lg = -1.0 / y - 2.0 * k * std::log(y) + std::log(factorial(k)) +
            std::log(std::abs(s));
  if (lg < -700.0) return 0.0;
  return (s > 0 ? 1.0 : -1.0) * std::exp(lg);
}

// Polynomial coefficient table for d^k (y e^{-y^2}) = p_k(y) e^{-y^2},
// p_{k+1} = p_k' - 2 y p_k.
inline const std::vector<RVec>& y_gauss_polys() {
  static const std::vector<RVec> polys = [] {
    std::vector<RVec> ps;
    ps.push_back({0.0, 1.0});
    for (int k = 0; k < 16; ++k) {
      const RVec& p = ps.back();
      RVec q(p.size() + 1, 0.0);
      for (size_t m = 1; m < p.size(); ++m) q[m - 1] += m * p[m];
      for (size_t m = 0; m < p.size(); ++m) q[m + 1] -= 2.0 * p[m];
      ps.push_back(q);
    }
    return ps;
  }();
  return polys;
}

inline Real y_gauss_deriv(int k, Real y) {
  const RVec& p = y_gauss_polys()[k];
  Real v = 0;
  for (size_t m = p.size(); m-- > 0;) v = v * y + p[m];
  return v * std::exp(-y * y);
}

}  // namespace detail

inline ShearProfile make_exp_inv() {
  ShearProfile p;
  p.name = "exp-inv";
  p.eval_fn = [](int k, Real y) { return detail::exp_inv_deriv(k, y); };
  p.eta_inf = 1.0;
  p.fact_const = 2.0;
  p.compat_order = kCompatAll;
  return p;
}

inline ShearProfile make_y_gauss() {
  ShearProfile p;
  p.name = "y-gauss";
  p.eval_fn = [](int k, Real y) { return detail::y_gauss_deriv(k, y); };
  p.eta_inf = 1.0;
  p.fact_const = 2.0;
  p.compat_order = 0;  // U0'(0) = 1
  return p;
}

inline ShearProfile make_zero() {
  ShearProfile p;
  p.name = "zero";
  p.eval_fn = [](int, Real) { return 0.0; };
  p.eta_inf = 1.0;
  p.fact_const = 1.0;
  p.compat_order = kCompatAll;
  return p;
}

inline ShearProfile profile_by_name(const std::string& key) {
  if (key == "exp-inv") return make_exp_inv();
  if (key == "y-gauss") return make_y_gauss();
  if (key == "zero") return make_zero();
  throw std::invalid_argument("unknown profile '" + key + "'");
}

// ---- assumption checks (report-only) ----

struct DecayRow {
  int k;
  Real c_k;          // smallest C_k with |U^(k)| <= C_k e^{-eta y} on the grid
  bool tail_growth;  // weighted modulus grows monotonically over last decade
};

struct DecayReport {
  std::vector<DecayRow> rows;
  bool all_pass() const {
    for (const auto& r : rows)
      if (r.tail_growth) return false;
    return true;
  }
};

// Smallest grid constants for |U^(k)(y)| <= C_k e^{-eta_inf y}. The paper's
// bound is stated for k >= 1; k = 0 rows are reported for information only.
inline DecayReport check_decay(const ShearProfile& p, int k_max, const RVec& y_grid) {
  DecayReport rep;
  for (int k = 0; k <= k_max; ++k) {
    DecayRow row{k, 0.0, false};
    RVec weighted(y_grid.size());
    for (size_t i = 0; i < y_grid.size(); ++i) {
      weighted[i] = std::abs(eval_derivative(p, k, y_grid[i])) *
                    std::exp(p.eta_inf * y_grid[i]);
      row.c_k = std::max(row.c_k, weighted[i]);
    }
    // monotone growth over the last decade of y flags a failing tail
    Real y_end = y_grid.back();
    size_t i0 = 0;
    while (i0 < y_grid.size() && y_grid[i0] < y_end / 10.0) ++i0;
    row.tail_growth = i0 + 1 < y_grid.size();
    for (size_t i = i0 + 1; i < y_grid.size(); ++i)
      if (weighted[i] <= weighted[i - 1] * (1 + 1e-12) + 1e-300) {
        row.tail_growth = false;
        break;
      }
    rep.rows.push_back(row);
  }
  return rep;
}

struct FactorialRow {
  int k;
  Real s_k;     // sup over grid of (y/(1+y))^k |U^(k)(y)|
  Real bound;   // C^{k+1} k!
  bool pass;
};

inline std::vector<FactorialRow> check_factorial_bound(const ShearProfile& p,
                                                       int k_max) {
  // log-dense grid reaching far enough that y/(1+y) saturates: the suprema
  // of weighted derivatives sit anywhere between y ~ 1/k and y -> infinity
  RVec grid = logspace(1e-4, 1e4, 6000);
  std::vector<FactorialRow> rows;
  for (int k = 0; k <= k_max; ++k) {
    FactorialRow r{k, 0.0, 0.0, false};
    for (Real y : grid) {
      Real w = std::pow(y / (1 + y), k) * std::abs(eval_derivative(p, k, y));
      r.s_k = std::max(r.s_k, w);
    }
    r.bound = std::pow(p.fact_const, k + 1) * detail::factorial(k);
    r.pass = r.s_k <= r.bound;
    rows.push_back(r);
  }
  return rows;
}

// Orders k <= k_max with |U^(k)(0)| > tol; empty result means full
// compatibility to order k_max.
inline std::vector<int> check_compatibility(const ShearProfile& p, int k_max,
                                            Real tol = 1e-12) {
  std::vector<int> bad;
  for (int k = 0; k <= k_max; ++k)
    if (std::abs(eval_derivative(p, k, 0.0)) > tol) bad.push_back(k);
  return bad;
}

}  // namespace shearstab
