#pragma once

#include <memory>

#include <Eigen/Dense>

#include "shearstab/types.hpp"

namespace shearstab {

enum class GridKind { ChebyshevMapped, Quadratic, Uniform };

inline GridKind grid_kind_from_string(const std::string& s) {
  if (s == "chebyshev-mapped" || s == "chebyshev") return GridKind::ChebyshevMapped;
  if (s == "quadratic") return GridKind::Quadratic;
  if (s == "uniform") return GridKind::Uniform;
  throw std::invalid_argument("invalid grid kind '" + s + "'");
}

struct Grid {
  GridKind kind = GridKind::Uniform;
  int n = 0;
  Real length = 0;
  RVec nodes;
};

inline Grid build_grid(GridKind kind, int n, Real length) {
  if (n < 3) throw std::invalid_argument("build_grid: N too small");
  if (length <= 0) throw std::invalid_argument("build_grid: L must be > 0");
  Grid g{kind, n, length, RVec(n)};
  switch (kind) {
    case GridKind::Uniform:
      for (int i = 0; i < n; ++i) g.nodes[i] = length * i / Real(n - 1);
      break;
    case GridKind::Quadratic:
      for (int i = 0; i < n; ++i) {
        Real t = Real(i) / Real(n - 1);
        g.nodes[i] = length * t * t;
      }
      break;
    case GridKind::ChebyshevMapped:
      for (int i = 0; i < n; ++i)
        g.nodes[i] = length * 0.5 * (1.0 - std::cos(pi * i / (n - 1)));
      break;
  }
  g.nodes.front() = 0.0;
  g.nodes.back() = length;
  return g;
}

inline Grid build_grid(const std::string& kind, int n, Real length) {
  return build_grid(grid_kind_from_string(kind), n, length);
}

using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using EVec = Eigen::VectorXd;
using CEVec = Eigen::VectorXcd;

// First-derivative collocation matrix via barycentric weights. Spectrally
// accurate on Chebyshev-mapped nodes; on uniform/quadratic grids use the
// banded variant below instead.
inline Mat diff_matrix(const Grid& g) {
  const int n = g.n;
  RVec w(n, 1.0);
  if (g.kind == GridKind::ChebyshevMapped) {
    for (int i = 0; i < n; ++i) w[i] = (i % 2 == 0) ? 1.0 : -1.0;
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
  } else {
    // generic barycentric weights; global polynomial differentiation is only
    // well conditioned on clustered nodes, so keep non-Chebyshev grids small
    if (n > 40)
      throw std::invalid_argument(
          "diff_matrix: use a chebyshev-mapped grid for N > 40");
    RVec lw(n, 0.0);
    std::vector<int> sgn(n, 1);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Real d = g.nodes[i] - g.nodes[j];
        lw[i] += std::log(std::abs(d));
        if (d < 0) sgn[i] = -sgn[i];
      }
    Real lmin = *std::min_element(lw.begin(), lw.end());
    for (int i = 0; i < n; ++i) w[i] = sgn[i] * std::exp(-(lw[i] - lmin));
  }
  Mat D(n, n);
  for (int i = 0; i < n; ++i) {
    Real rowsum = 0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      D(i, j) = (w[j] / w[i]) / (g.nodes[i] - g.nodes[j]);
      rowsum += D(i, j);
    }
    D(i, i) = -rowsum;
  }
  return D;
}

// Differentiation operator of a given order, cached as a dense matrix.
struct DiffOp {
  int order;
  Mat matrix;
};

inline DiffOp make_diff_op(const Grid& g, int order) {
  if (order < 1 || order > 4) throw std::invalid_argument("DiffOp: order 1..4");
  Mat D = diff_matrix(g);
  Mat A = D;
  for (int k = 1; k < order; ++k) A = D * A;
  return DiffOp{order, std::move(A)};
}

// Quadrature weights: Clenshaw-Curtis on Chebyshev-mapped grids, trapezoid
// otherwise.
inline RVec quadrature_weights(const Grid& g) {
  const int n = g.n;
  RVec w(n, 0.0);
  if (g.kind == GridKind::ChebyshevMapped) {
    const int m = n - 1;
    for (int i = 0; i <= m; ++i) {
      Real s = 1.0;
      for (int k = 1; k <= m / 2; ++k) {
        Real bk = (2 * k == m) ? 1.0 : 2.0;
        s -= bk * std::cos(2.0 * k * pi * i / m) / (4.0 * k * k - 1.0);
      }
      Real ci = (i == 0 || i == m) ? 1.0 : 2.0;
      w[i] = ci * s / m * (g.length / 2.0);
    }
  } else {
    for (int i = 0; i + 1 < n; ++i) {
      Real h = g.nodes[i + 1] - g.nodes[i];
      w[i] += h / 2;
      w[i + 1] += h / 2;
    }
  }
  return w;
}

template <typename T>
inline T quadrature(const Grid& g, const std::vector<T>& f) {
  if (static_cast<int>(f.size()) != g.n)
    throw std::invalid_argument("quadrature: size mismatch");
  RVec w = quadrature_weights(g);
  T s{};
  for (int i = 0; i < g.n; ++i) s += w[i] * f[i];
  return s;
}

// Cumulative integral from 0 to each node (trapezoid).
template <typename T>
inline std::vector<T> cumulative_integral(const Grid& g, const std::vector<T>& f) {
  std::vector<T> F(g.n);
  F[0] = T{};
  for (int i = 1; i < g.n; ++i)
    F[i] = F[i - 1] + (f[i - 1] + f[i]) * ((g.nodes[i] - g.nodes[i - 1]) / 2.0);
  return F;
}

inline Real l2_norm(const Grid& g, const CVec& f) {
  RVec a(f.size());
  for (size_t i = 0; i < f.size(); ++i) a[i] = std::norm(f[i]);
  return std::sqrt(quadrature(g, a));
}

inline Real l2_norm(const Grid& g, const RVec& f) {
  RVec a(f.size());
  for (size_t i = 0; i < f.size(); ++i) a[i] = f[i] * f[i];
  return std::sqrt(quadrature(g, a));
}

// A complex-valued grid function with an optional peeled exponential factor:
// the represented function is values * exp(log_scale). Boundary trace holds
// (phi, phi', phi'') at y = 0.
struct ModeFunction {
  std::shared_ptr<const Grid> grid;
  CVec values;
  Real log_scale = 0.0;
  std::array<Cplx, 3> boundary{Cplx(0), Cplx(0), Cplx(0)};
};

inline ModeFunction make_mode(std::shared_ptr<const Grid> g) {
  ModeFunction m;
  m.grid = std::move(g);
  m.values.assign(m.grid->n, Cplx(0));
  return m;
}

template <typename F>
inline CVec sample(const Grid& g, F&& fn) {
  CVec v(g.n);
  for (int i = 0; i < g.n; ++i) v[i] = fn(g.nodes[i]);
  return v;
}

// Delta_alpha f = f'' - alpha^2 f on the grid.
inline CVec apply_delta_alpha(const Grid& g, const CVec& f, int alpha) {
  Mat d2 = make_diff_op(g, 2).matrix;
  CVec out(g.n, Cplx(0));
  for (int i = 0; i < g.n; ++i) {
    Cplx s(0);
    for (int j = 0; j < g.n; ++j) s += d2(i, j) * f[j];
    out[i] = s - Real(alpha) * Real(alpha) * f[i];
  }
  return out;
}

inline ModeFunction apply_delta_alpha(const ModeFunction& f, int alpha) {
  ModeFunction out = f;
  out.values = apply_delta_alpha(*f.grid, f.values, alpha);
  return out;
}

}  // namespace shearstab
