#pragma once

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

#include "shearstab/grid.hpp"
#include "shearstab/odeint.hpp"
#include "shearstab/profiles.hpp"
#include "shearstab/rootfind.hpp"

namespace shearstab {

// Rayleigh coefficient W(y) = alpha^2 + U''/(U - c), so phi'' = W phi.
inline Cplx rayleigh_w(const ShearProfile& p, int alpha, Cplx c, Real y) {
  return Real(alpha) * Real(alpha) +
         eval_derivative(p, 2, y) / (eval_derivative(p, 0, y) - c);
}

struct RayleighOptions {
  Real length = 40.0;     // truncation of the half line
  Real tail_cut = 400.0;  // far-field tail integral extent
  Real rtol = 1e-11;
  int grid_n = 513;       // output sampling grid (chebyshev-mapped)
  int mode_grid_n = 1537; // finer grid for emitted eigenmodes (critical layer)
};

// Decaying fundamental solution phi_c^- by backward integration from y = L,
// with a first-order far-field correction for slowly decaying U''. The
// returned mode is L2-normalized; log scales are folded into the values.
inline ModeFunction rayleigh_decaying_solution(const ShearProfile& p, int alpha,
                                               Cplx c,
                                               const RayleighOptions& opt = {}) {
  if (alpha == 0) throw std::invalid_argument("rayleigh: alpha must be nonzero");
  const Real a = std::abs(Real(alpha));
  const Real L = opt.length;
  if (std::abs(c.imag()) < 1e-12) {
    // real c: the coefficient blows up wherever U0 = c (critical layer)
    Real lo = 1e300, hi = -1e300;
    for (Real y : linspace(0.0, L, 400)) {
      Real u = eval_derivative(p, 0, y);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    if (c.real() >= lo - 1e-10 && c.real() <= hi + 1e-10)
      throw std::domain_error("rayleigh: singular coefficient, Im c = 0");
  }
  auto grid = std::make_shared<const Grid>(
      build_grid(GridKind::ChebyshevMapped, opt.grid_n, L));

  // far-field correction: phi = e^{-a y}(1 + g1), g1(y) ~ int_y^inf W~/(2a)
  Cplx iw(0);
  {
    RVec tail = logspace(L, opt.tail_cut, 200);
    for (size_t i = 0; i + 1 < tail.size(); ++i) {
      auto wt = [&](Real y) {
        return eval_derivative(p, 2, y) / (eval_derivative(p, 0, y) - c);
      };
      iw += 0.5 * (wt(tail[i]) + wt(tail[i + 1])) * (tail[i + 1] - tail[i]);
    }
  }
  Cplx wtl = eval_derivative(p, 2, L) / (eval_derivative(p, 0, L) - c);
  Cplx g1 = iw / (2 * a), dg1 = -wtl / (2 * a);
  CVec state{Cplx(1) + g1, -a * (Cplx(1) + g1) + dg1};

  auto rhs = [&](Real y, const CVec& u, CVec& du) {
    du.resize(2);
    du[0] = u[1];
    du[1] = rayleigh_w(p, alpha, c, y) * u[0];
  };

  const int n = grid->n;
  CVec vals(n);
  RVec logs(n, 0.0);
  Real acc = 0.0;
  vals[n - 1] = state[0];
  for (int i = n - 1; i > 0; --i) {
    ScaledState s = integrate_scaled(rhs, grid->nodes[i], grid->nodes[i - 1],
                                     state, true, opt.rtol);
    acc += s.log_scale;
    state = s.state;
    vals[i - 1] = state[0];
    logs[i - 1] = acc;
  }
  // rescale all samples to the scale at y = 0, then L2-normalize
  Real l0 = logs[0];
  for (int i = 0; i < n; ++i) vals[i] *= std::exp(logs[i] - l0);
  Real nrm = l2_norm(*grid, vals);
  for (auto& v : vals) v /= nrm;

  ModeFunction m;
  m.grid = grid;
  m.values = vals;
  m.log_scale = 0.0;
  Cplx phi0 = state[0] / nrm, dphi0 = state[1] / nrm;
  m.boundary = {phi0, dphi0, rayleigh_w(p, alpha, c, 0.0) * phi0};
  return m;
}

// phi(0) of the L2-normalized decaying solution; zero exactly at Rayleigh
// eigenvalues.
inline Cplx rayleigh_dispersion(const ShearProfile& p, int alpha, Cplx c,
                                const RayleighOptions& opt = {}) {
  return rayleigh_decaying_solution(p, alpha, c, opt).boundary[0];
}

struct RayleighEigenvalue {
  int alpha = 0;
  Cplx c0{0, 0};
  ModeFunction mode;
  Real residual = 0;
  bool simple_flag = false;
  bool found = false;
};

// Interior residual ||(U0-c) Delta_a phi - U0'' phi||_inf / ||phi||_inf on the
// mode's own grid.
inline Real rayleigh_residual(const ShearProfile& p, int alpha, Cplx c,
                              const ModeFunction& m) {
  const Grid& g = *m.grid;
  CVec d = apply_delta_alpha(g, m.values, alpha);
  Real worst = 0;
  for (int i = 2; i < g.n - 2; ++i) {
    Cplx r = (eval_derivative(p, 0, g.nodes[i]) - c) * d[i] -
             eval_derivative(p, 2, g.nodes[i]) * m.values[i];
    worst = std::max(worst, std::abs(r));
  }
  return worst / std::max(sup_abs(m.values), 1e-300);
}

struct SearchBox {
  Real re0 = 0.0, re1 = 1.0, im0 = 0.01, im1 = 1.0;
};

inline RayleighEigenvalue find_rayleigh_eigenvalue(const ShearProfile& p,
                                                   int alpha,
                                                   const SearchBox& box = {},
                                                   const RayleighOptions& opt = {}) {
  RayleighEigenvalue out;
  out.alpha = alpha;
  auto disp = [&](Cplx c) { return rayleigh_dispersion(p, alpha, c, opt); };
  auto roots = find_zeros_in_box(disp, box.re0, box.re1, box.im0, box.im1, 1e-10, 7);
  // keep the most unstable zero inside the box
  for (const auto& r : roots) {
    if (r.root.imag() <= box.im0) continue;
    if (!out.found || r.root.imag() > out.c0.imag()) {
      out.c0 = r.root;
      out.found = true;
    }
  }
  if (!out.found) return out;
  RayleighOptions fine = opt;
  fine.grid_n = opt.mode_grid_n;
  out.mode = rayleigh_decaying_solution(p, alpha, out.c0, fine);
  out.residual = rayleigh_residual(p, alpha, out.c0, out.mode);
  Real h = 1e-6;
  Cplx dd = (disp(out.c0 + h) - disp(out.c0 - h)) / (2 * h);
  out.simple_flag = std::abs(dd) > 1e-6;
  return out;
}

// Dense generalized-eigenproblem oracle: fourth-order central differences for
// (U0 Delta_a - U0'') phi = c Delta_a phi on a uniform grid with Dirichlet
// ends. Returns eigenvalues with Im c above the floor, filtered for
// self-convergence against the N/2 discretization.
struct RayleighOracleOptions {
  Real length = 25.0;
  Real im_floor = 1e-4;
  Real drift_tol = 1e-5;
};

namespace detail {

// Oracle discretization: exponentially mapped coordinate y = L(e^{a xi}-1)/
// (e^a - 1), xi uniform in [0,1], so critical layers near the wall are
// resolved at fixed stencil order. Fourth-order central stencils inside,
// skewed fourth-order rows at the ends (Dirichlet values drop out).
inline std::vector<Cplx> oracle_raw(const ShearProfile& p, int alpha, int n,
                                    Real L, Real a = 5.0) {
  const int m = n - 1;  // interior nodes
  const Real h = 1.0 / n;
  const Real ea = std::expm1(a);
  auto ymap = [&](Real xi) { return L * std::expm1(a * xi) / ea; };
  auto dy = [&](Real xi) { return L * a * std::exp(a * xi) / ea; };
  auto ddy = [&](Real xi) { return L * a * a * std::exp(a * xi) / ea; };

  Mat d1 = Mat::Zero(m, m), d2 = Mat::Zero(m, m);
  const Real s2[6] = {5. / 6, -5. / 4, -1. / 3, 7. / 6, -1. / 2, 1. / 12};
  const Real s1[5] = {-1. / 4, -5. / 6, 3. / 2, -1. / 2, 1. / 12};
  for (int i = 0; i < m; ++i) {
    if (i == 0) {
      for (int j = 1; j < 6; ++j) d2(0, j - 1) = s2[j] / (h * h);
      for (int j = 1; j < 5; ++j) d1(0, j - 1) = s1[j] / h;
    } else if (i == m - 1) {
      for (int j = 1; j < 6; ++j) d2(m - 1, m - j) = s2[j] / (h * h);
      for (int j = 1; j < 5; ++j) d1(m - 1, m - j) = -s1[j] / h;
    } else {
      d2(i, i) = -30.0 / (12 * h * h);
      d2(i, i - 1) = 16.0 / (12 * h * h);
      d2(i, i + 1) = 16.0 / (12 * h * h);
      if (i >= 2) d2(i, i - 2) = -1.0 / (12 * h * h);
      if (i + 2 < m) d2(i, i + 2) = -1.0 / (12 * h * h);
      d1(i, i - 1) = -8.0 / (12 * h);
      d1(i, i + 1) = 8.0 / (12 * h);
      if (i >= 2) d1(i, i - 2) = 1.0 / (12 * h);
      if (i + 2 < m) d1(i, i + 2) = -1.0 / (12 * h);
    }
  }
  // Laplacian in the mapped coordinate: phi_yy = phi_xx / y'^2 - phi_x y''/y'^3
  Mat B = -Real(alpha) * Real(alpha) * Mat::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    Real xi = (i + 1) * h;
    Real yp = dy(xi), ypp = ddy(xi);
    for (int j = 0; j < m; ++j)
      B(i, j) += d2(i, j) / (yp * yp) - d1(i, j) * ypp / (yp * yp * yp);
  }
  Mat A = Mat::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    Real y = ymap((i + 1) * h);
    Real u0 = eval_derivative(p, 0, y), u2 = eval_derivative(p, 2, y);
    for (int j = 0; j < m; ++j) A(i, j) = u0 * B(i, j);
    A(i, i) -= u2;
  }
  // C = B^{-1} A, then standard complex eigenproblem
  Eigen::PartialPivLU<Mat> lu(B);
  Mat C = lu.solve(A);
  CMat Cc = C.cast<Cplx>();
  std::vector<Cplx> w(m);
  CMat vl, vr;
  int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', m,
                           reinterpret_cast<lapack_complex_double*>(Cc.data()),
                           m, reinterpret_cast<lapack_complex_double*>(w.data()),
                           nullptr, 1, nullptr, 1);
  if (info != 0) throw std::runtime_error("rayleigh_oracle: zgeev failed");
  return w;
}

}  // namespace detail

inline std::vector<Cplx> rayleigh_oracle(const ShearProfile& p, int alpha, int n,
                                         const RayleighOracleOptions& opt = {}) {
  if (n > 4096) throw std::invalid_argument("rayleigh_oracle: N exceeds capacity");
  std::vector<Cplx> fine = detail::oracle_raw(p, alpha, n, opt.length);
  std::vector<Cplx> coarse = detail::oracle_raw(p, alpha, n / 2, opt.length);
  std::vector<Cplx> out;
  // acceptance threshold follows the h^4 convergence of the stencil
  Real thresh = std::max(opt.drift_tol, 30.0 * std::pow(opt.length / (n / 2), 4.0));
  for (Cplx z : fine) {
    if (!(z.imag() > opt.im_floor)) continue;
    Real best = 1e300;
    for (Cplx w : coarse) best = std::min(best, std::abs(w - z));
    if (best < thresh) out.push_back(z);
  }
  std::sort(out.begin(), out.end(),
            [](Cplx a, Cplx b) { return a.imag() > b.imag(); });
  return out;
}

struct MaxUnstable {
  int alpha0 = 0;
  Cplx c0{0, 0};
  bool found = false;
};

inline MaxUnstable max_unstable_scan(const ShearProfile& p,
                                     const std::vector<int>& alpha_range,
                                     const SearchBox& box = {},
                                     const RayleighOptions& opt = {}) {
  MaxUnstable best;
  for (int a : alpha_range) {
    if (a == 0) continue;
    RayleighEigenvalue e = find_rayleigh_eigenvalue(p, a, box, opt);
    if (!e.found) continue;
    if (!best.found || a * e.c0.imag() > best.alpha0 * best.c0.imag()) {
      best.alpha0 = a;
      best.c0 = e.c0;
      best.found = true;
    }
  }
  return best;
}

}  // namespace shearstab
