#pragma once

#include "shearstab/grid.hpp"
#include "shearstab/odeint.hpp"
#include "shearstab/profiles.hpp"
#include "shearstab/rayleigh.hpp"
#include "shearstab/rootfind.hpp"

namespace shearstab {

// Evaluation point of all spectral objects.
struct SpectralPoint {
  int alpha = 1;
  Cplx c{0, 0};
  Real nu = 1e-4;
  Real gamma = 1.0;
  Real slip_exponent() const { return std::pow(nu, gamma - 0.5); }
};

// mu = |alpha|^{1/2} nu^{-1/4} sqrt(alpha sqrt(nu) + i(U0 - c)), principal
// branch. Re(arg) = alpha sqrt(nu) + Im c > 0 for unstable c, so Re mu > 0
// without branch tracking.
inline Cplx os_mu(const ShearProfile& p, const SpectralPoint& pt, Real y) {
  Cplx z = Real(pt.alpha) * std::sqrt(pt.nu) +
           I * (eval_derivative(p, 0, y) - pt.c);
  return std::sqrt(std::abs(Real(pt.alpha))) * std::pow(pt.nu, -0.25) *
         std::sqrt(z);
}

// adjoint counterpart, mu* = |alpha|^{1/2} nu^{-1/4} sqrt(alpha sqrt(nu) - i(U0 - conj c))
inline Cplx os_mu_star(const ShearProfile& p, const SpectralPoint& pt, Real y) {
  Cplx z = Real(pt.alpha) * std::sqrt(pt.nu) -
           I * (eval_derivative(p, 0, y) - std::conj(pt.c));
  return std::sqrt(std::abs(Real(pt.alpha))) * std::pow(pt.nu, -0.25) *
         std::sqrt(z);
}

// Orr_{c,nu} phi = (U0-c) Delta_a phi - U0'' phi - (sqrt(nu)/(i alpha)) Delta_a^2 phi,
// applied through the grid differentiation matrices.
inline ModeFunction os_apply(const ShearProfile& p, const SpectralPoint& pt,
                             const ModeFunction& phi) {
  const Grid& g = *phi.grid;
  CVec d2 = apply_delta_alpha(g, phi.values, pt.alpha);
  CVec d4 = apply_delta_alpha(g, d2, pt.alpha);
  ModeFunction out = phi;
  Cplx visc = std::sqrt(pt.nu) / (I * Real(pt.alpha));
  for (int i = 0; i < g.n; ++i) {
    Real y = g.nodes[i];
    out.values[i] = (eval_derivative(p, 0, y) - pt.c) * d2[i] -
                    eval_derivative(p, 2, y) * phi.values[i] - visc * d4[i];
  }
  return out;
}

// Orr*_{c,nu} phi = (U0-conj c) Delta_a phi + 2 U0' phi' + (sqrt(nu)/(i alpha)) Delta_a^2 phi.
inline ModeFunction os_adjoint_apply(const ShearProfile& p,
                                     const SpectralPoint& pt,
                                     const ModeFunction& phi) {
  const Grid& g = *phi.grid;
  Mat d1m = diff_matrix(g);
  CVec d1(g.n, Cplx(0));
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j) d1[i] += d1m(i, j) * phi.values[j];
  CVec d2 = apply_delta_alpha(g, phi.values, pt.alpha);
  CVec d4 = apply_delta_alpha(g, d2, pt.alpha);
  ModeFunction out = phi;
  Cplx visc = std::sqrt(pt.nu) / (I * Real(pt.alpha));
  for (int i = 0; i < g.n; ++i) {
    Real y = g.nodes[i];
    out.values[i] = (eval_derivative(p, 0, y) - std::conj(pt.c)) * d2[i] +
                    2.0 * eval_derivative(p, 1, y) * d1[i] + visc * d4[i];
  }
  return out;
}

struct OsShootOptions {
  Real length = 40.0;
  Real tail_cut = 400.0;
  Real rtol = 1e-11;
  Real dseg_mu = 4.0;   // max growth of int(Re mu) per frame segment
  Real dseg_y = 0.75;   // max segment width in y
};

namespace detail {

// companion right-hand side of the fourth-order OS system (or its adjoint),
// state (phi, phi', phi'', phi''')
struct OsCompanion {
  const ShearProfile* p;
  SpectralPoint pt;
  bool adjoint = false;

  std::array<Cplx, 4> operator()(Real y, const std::array<Cplx, 4>& s) const {
    Real a = Real(pt.alpha);
    Cplx ia = I * a;
    Real u0 = eval_derivative(*p, 0, y);
    Real u2 = eval_derivative(*p, 2, y);
    Cplx d4;
    if (!adjoint) {
      // phi'''' = (i a/sqrt(nu)) [(U-c)(phi''-a^2 phi) - U'' phi] + 2a^2 phi'' - a^4 phi
      d4 = (ia / std::sqrt(pt.nu)) * ((u0 - pt.c) * (s[2] - a * a * s[0]) - u2 * s[0]) +
           2 * a * a * s[2] - a * a * a * a * s[0];
    } else {
      // (U - conj c) Delta phi + 2U' phi' + (sqrt(nu)/(ia)) Delta^2 phi = 0
      Real u1 = eval_derivative(*p, 1, y);
      d4 = -(ia / std::sqrt(pt.nu)) *
               ((u0 - std::conj(pt.c)) * (s[2] - a * a * s[0]) + 2.0 * u1 * s[1]) +
           2 * a * a * s[2] - a * a * a * a * s[0];
    }
    return {s[1], s[2], s[3], d4};
  }
};

// checkpoints for the frame sweep: dense enough that the fast/slow growth
// ratio within a segment stays far from the orthogonalization noise floor
inline RVec frame_checkpoints(const ShearProfile& p, const SpectralPoint& pt,
                              const OsShootOptions& opt) {
  RVec cp;
  Real y = opt.length;
  cp.push_back(y);
  while (y > 0) {
    Real m = std::abs(os_mu(p, pt, y)) + std::abs(Real(pt.alpha)) + 1.0;
    Real step = std::min(opt.dseg_y, opt.dseg_mu / m);
    y = std::max(0.0, y - step);
    cp.push_back(y);
  }
  return cp;
}

}  // namespace detail

// Backward frame sweep of the decaying pair [fast, slow]; the minors of the
// orthonormal frame carry the dispersion information.
struct OsFrame {
  RVec y;  // descending, ends at 0
  std::vector<Eigen::Matrix<Cplx, 4, 2>> q;
  RVec log_fast;
  Cplx mu_end;  // mu at y = L (used in the far-field rows)
};

inline OsFrame os_frame_sweep(const ShearProfile& p, const SpectralPoint& pt,
                              const OsShootOptions& opt = {},
                              bool adjoint = false) {
  if (pt.alpha == 0) throw std::invalid_argument("os_frame_sweep: alpha != 0");
  detail::OsCompanion rhs{&p, pt, adjoint};
  RVec cp = detail::frame_checkpoints(p, pt, opt);
  Real a = std::abs(Real(pt.alpha));
  Cplx muL = adjoint ? os_mu_star(p, pt, opt.length) : os_mu(p, pt, opt.length);
  Eigen::Matrix<Cplx, 4, 2> init;
  init.col(0) << 1.0, -muL, muL * muL, -muL * muL * muL;
  init.col(1) << 1.0, -a, a * a, -a * a * a;
  FrameSweep fs = frame_sweep(rhs, cp, init, opt.rtol);
  OsFrame out;
  out.y = std::move(fs.y);
  out.q = std::move(fs.q);
  out.log_fast = std::move(fs.log_fast);
  out.mu_end = muL;
  return out;
}

// Normalized dispersion determinant from the frame at y = 0. Basis changes
// inside the decaying subspace multiply the determinant by nonzero factors,
// so the zero set is exactly the Orr-Sommerfeld spectrum; the positive scale
// dropped by the orthonormalization is irrelevant for root finding.
inline Cplx os_det_from_frame(const OsFrame& f, const SpectralPoint& pt) {
  const auto& q = f.q.back();
  Real nt = pt.slip_exponent();
  Cplx r1a = q(0, 0), r1b = q(0, 1);
  Cplx r2a = q(1, 0) - nt * q(2, 0), r2b = q(1, 1) - nt * q(2, 1);
  Real s1 = std::hypot(std::abs(r1a), std::abs(r1b));
  Real s2 = std::hypot(std::abs(r2a), std::abs(r2b));
  return (r1a * r2b - r1b * r2a) / std::max(s1 * s2, 1e-300);
}

inline Cplx os_dispersion(const ShearProfile& p, const SpectralPoint& pt,
                          const OsShootOptions& opt = {}, bool adjoint = false) {
  return os_det_from_frame(os_frame_sweep(p, pt, opt, adjoint), pt);
}

// ---- corrected slow solution -------------------------------------------
//
// phi_s = phi0 + sqrt(nu) phi1 (+ nu phi2), with phi0 the Rayleigh decaying
// solution and Ray(phi_{k+1}) = Delta_a^2 phi_k / (i alpha). Fourth
// derivatives of the cascade are obtained from the Rayleigh relation
// phi'' = W phi (+ forcing), so no numerical differentiation enters.
struct SlowSolution {
  std::shared_ptr<const Grid> grid;
  CVec values;              // phi_s, L2-normalization of the Rayleigh part
  CVec deriv;               // phi_s'
  std::array<Cplx, 4> boundary;  // phi, phi', phi'', phi''' at the wall
  Real rayleigh_l2 = 1.0;   // norm used for the normalization
  Real ff_log = 0.0;        // log of the far-field-unit scale at the wall
  Real os_residual = 0.0;   // relative interior OS residual of the series
};

namespace detail {

struct WPack {
  Cplx w, w1, w2, w3, w4;  // W and derivatives
};

inline WPack w_pack(const ShearProfile& p, int alpha, Cplx c, Real y) {
  Real a = Real(alpha);
  Cplx d = eval_derivative(p, 0, y) - c;
  Real u1 = eval_derivative(p, 1, y), u2 = eval_derivative(p, 2, y);
  Real u3 = eval_derivative(p, 3, y), u4 = eval_derivative(p, 4, y);
  Real u5 = eval_derivative(p, 5, y), u6 = eval_derivative(p, 6, y);
  // derivatives of V = u2/d by quotient rule
  Cplx v = u2 / d;
  Cplx v1 = (u3 - v * u1) / d;
  Cplx v2 = (u4 - 2.0 * v1 * u1 - v * u2) / d;
  Cplx v3 = (u5 - 3.0 * v2 * u1 - 3.0 * v1 * u2 - v * u3) / d;
  Cplx v4 = (u6 - 4.0 * v3 * u1 - 6.0 * v2 * u2 - 4.0 * v1 * u3 - v * u4) / d;
  return {a * a + v, v1, v2, v3, v4};
}

}  // namespace detail

inline SlowSolution os_slow_solution(const ShearProfile& p,
                                     const SpectralPoint& pt,
                                     const OsShootOptions& opt = {},
                                     int grid_n = 513, bool adjoint = false) {
  const Real a = std::abs(Real(pt.alpha));
  const Real L = opt.length;
  const Cplx ceff = adjoint ? std::conj(pt.c) : pt.c;
  auto grid =
      std::make_shared<const Grid>(build_grid(GridKind::ChebyshevMapped, grid_n, L));

  // Coupled backward system for (phi0, phi1): 8 real-complex components.
  // Ray phi0 = 0, Ray phi1 = Delta^2 phi0/(i alpha). For the adjoint slow
  // solution, chi = (U - conj c) psi satisfies Rayleigh at conj(c); the
  // correction term is handled the same way.
  Cplx ia = I * Real(pt.alpha);
  auto rhs = [&](Real y, const CVec& u, CVec& du) {
    detail::WPack W = detail::w_pack(p, pt.alpha, ceff, y);
    Cplx phi = u[0], dphi = u[1], psi = u[2], dpsi = u[3];
    Cplx dd_phi = W.w * phi;  // phi0''
    // Delta^2 phi0 = phi0'''' - 2 a^2 phi0'' + a^4 phi0
    Cplx d4 = (W.w2 + W.w * W.w) * phi + 2.0 * W.w1 * dphi;
    Cplx delta2 = d4 - 2 * a * a * dd_phi + a * a * a * a * phi;
    du.resize(4);
    du[0] = dphi;
    du[1] = dd_phi;
    du[2] = dpsi;
    du[3] = W.w * psi + delta2 / ia;
  };

  // far-field init with tail correction for phi0 (as in the Rayleigh solver)
  Cplx iw(0);
  {
    RVec tail = logspace(L, opt.tail_cut, 200);
    for (size_t i = 0; i + 1 < tail.size(); ++i) {
      auto wt = [&](Real y) {
        return eval_derivative(p, 2, y) / (eval_derivative(p, 0, y) - ceff);
      };
      iw += 0.5 * (wt(tail[i]) + wt(tail[i + 1])) * (tail[i + 1] - tail[i]);
    }
  }
  Cplx wtl = eval_derivative(p, 2, L) / (eval_derivative(p, 0, L) - ceff);
  Cplx g1 = iw / (2 * a), dg1 = -wtl / (2 * a);
  CVec state{Cplx(1) + g1, -a * (Cplx(1) + g1) + dg1, Cplx(0), Cplx(0)};

  const int n = grid->n;
  CVec v0(n), v1(n), d0(n), d1v(n);
  RVec logs(n, 0.0);
  Real acc = 0;
  v0[n - 1] = state[0];
  d0[n - 1] = state[1];
  v1[n - 1] = state[2];
  d1v[n - 1] = state[3];
  for (int i = n - 1; i > 0; --i) {
    ScaledState s = integrate_scaled(rhs, grid->nodes[i], grid->nodes[i - 1],
                                     state, true, opt.rtol);
    acc += s.log_scale;
    state = s.state;
    v0[i - 1] = state[0];
    d0[i - 1] = state[1];
    v1[i - 1] = state[2];
    d1v[i - 1] = state[3];
    logs[i - 1] = acc;
  }
  Real l0 = logs[0];
  for (int i = 0; i < n; ++i) {
    Real f = std::exp(logs[i] - l0);
    v0[i] *= f;
    d0[i] *= f;
    v1[i] *= f;
    d1v[i] *= f;
  }
  Real nrm = l2_norm(*grid, v0);
  Real snu = adjoint ? 0.0 : std::sqrt(pt.nu);
  SlowSolution out;
  out.grid = grid;
  out.rayleigh_l2 = nrm;
  out.values.resize(n);
  out.deriv.resize(n);
  for (int i = 0; i < n; ++i) {
    out.values[i] = (v0[i] + snu * v1[i]) / nrm;
    out.deriv[i] = (d0[i] + snu * d1v[i]) / nrm;
  }
  detail::WPack W0 = detail::w_pack(p, pt.alpha, ceff, 0.0);
  Cplx phi0 = out.values[0], dphi0 = out.deriv[0];
  // wall data via the ODE structure: phi1'' = W phi1 + g1, g1 = Delta^2 phi0/(ia)
  Cplx a2 = a * a, a4 = a2 * a2;
  Cplx P0 = W0.w2 + W0.w * W0.w - 2.0 * a2 * W0.w + a4;
  Cplx Q0 = 2.0 * W0.w1;
  Cplx g1_0 = (P0 * v0[0] + Q0 * d0[0]) / ia;
  Cplx g1p_0 = ((W0.w3 + 2.0 * W0.w * W0.w1 - 2.0 * a2 * W0.w1 + Q0 * W0.w) * v0[0] +
                (P0 + 2.0 * W0.w2) * d0[0]) / ia;
  Cplx ddphi0 = (W0.w * v0[0] + snu * (W0.w * v1[0] + g1_0)) / nrm;
  Cplx dddphi0 = (W0.w1 * v0[0] + W0.w * d0[0] +
                  snu * (W0.w1 * v1[0] + W0.w * d1v[0] + g1p_0)) / nrm;
  out.boundary = {phi0, dphi0, ddphi0, dddphi0};
  // the raw backward solution carries far-field data e^{-aL}(1+g1) at L, so
  // the far-field-unit normalization equals stored * nrm * e^{ff_log}
  out.ff_log = l0 - a * L;

  // structural interior residual of the two-term series:
  // Orr(phi0 + snu phi1) = -(nu/(ia)) Delta^2 phi1, with Delta^2 phi1
  // assembled from the ODE relations (no numerical differentiation)
  if (!adjoint) {
    Real worst = 0, scale = 0;
    for (int i = 0; i < n; ++i) {
      Real y = grid->nodes[i];
      detail::WPack W = detail::w_pack(p, pt.alpha, ceff, y);
      Cplx a2 = a * a, a4 = a2 * a2;
      Cplx P = W.w2 + W.w * W.w - 2.0 * a2 * W.w + a4;
      Cplx Q = 2.0 * W.w1;
      Cplx Pp = W.w3 + 2.0 * W.w * W.w1 - 2.0 * a2 * W.w1;
      Cplx Qp = 2.0 * W.w2;
      Cplx Ppp = W.w4 + 2.0 * W.w1 * W.w1 + 2.0 * W.w * W.w2 - 2.0 * a2 * W.w2;
      Cplx Qpp = 2.0 * W.w3;
      Cplx g1v = (P * v0[i] + Q * d0[i]) / ia;
      Cplx g1pp = ((Ppp + Qp * W.w + Q * W.w1 + (P + Qp) * W.w) * v0[i] +
                   (2.0 * Pp + Q * W.w + Qpp) * d0[i]) / ia;
      Cplx delta2_phi1 =
          P * v1[i] + Q * d1v[i] + (W.w - 2.0 * a2) * g1v + g1pp;
      Cplx resid = pt.nu / ia * delta2_phi1;
      Cplx d = eval_derivative(p, 0, y) - ceff;
      worst = std::max(worst, std::abs(resid));
      scale = std::max(scale, std::abs(d * W.w * v0[i]));
    }
    out.os_residual = worst / std::max(scale, 1e-300);
  }
  return out;
}

// ---- slip ratios ----------------------------------------------------------
//
// O_{gamma,c}(nu) = row(phi^{s,-}) / row(phi^{f,-}) with
// row(phi) = phi'(0) - nu^{gamma-1/2} phi''(0). The slow numerator uses the
// corrected Rayleigh series (L2-normalized); the fast denominator uses the
// frame column normalized to phi(0) = 1, matching e^{-int mu}.
inline Cplx slip_ratio_from_parts(const SlowSolution& slow,
                                  const Eigen::Matrix<Cplx, 4, 2>& q0,
                                  Real nt) {
  Cplx num = (slow.boundary[1] - nt * slow.boundary[2]) * slow.rayleigh_l2 *
             std::exp(slow.ff_log);
  Cplx den = (q0(1, 0) - nt * q0(2, 0)) / q0(0, 0);
  if (std::abs(den) < 1e-300)
    throw std::runtime_error("slip_ratio: degenerate fast denominator");
  return num / den;
}

inline Cplx slip_ratio(const ShearProfile& p, const SpectralPoint& pt,
                       const OsShootOptions& opt = {}, bool adjoint = false) {
  OsFrame f = os_frame_sweep(p, pt, opt, adjoint);
  SlowSolution s = os_slow_solution(p, pt, opt, 257, adjoint);
  return slip_ratio_from_parts(s, f.q.back(), pt.slip_exponent());
}

// ---- spec-facing fundamental set ---------------------------------------

struct FundamentalSet {
  ModeFunction slow_minus, slow_plus, fast_minus, fast_plus;
  CVec mu_profile;
  Real slow_residual = 0;  // relative interior OS residual of slow_minus
  bool scale_separated = true;
};

inline FundamentalSet fundamental_set(const ShearProfile& p,
                                      const SpectralPoint& pt,
                                      const OsShootOptions& opt = {},
                                      int grid_n = 513) {
  FundamentalSet fs;
  OsFrame fr = os_frame_sweep(p, pt, opt);
  SlowSolution ss = os_slow_solution(p, pt, opt, grid_n);
  auto grid = ss.grid;
  const int n = grid->n;

  fs.mu_profile.resize(n);
  bool sep = true;
  for (int i = 0; i < n; ++i) {
    fs.mu_profile[i] = os_mu(p, pt, grid->nodes[i]);
    sep = sep && fs.mu_profile[i].real() > std::abs(Real(pt.alpha));
  }
  fs.scale_separated = sep;

  fs.slow_minus.grid = grid;
  fs.slow_minus.values = ss.values;
  fs.slow_minus.boundary = {ss.boundary[0], ss.boundary[1], ss.boundary[2]};

  // fast_minus: frame column 1 interpolated onto the grid, normalized to 1
  // at the wall; the decay is carried by the per-checkpoint logs, values
  // below double range flush to zero
  fs.fast_minus.grid = grid;
  fs.fast_minus.values.assign(n, Cplx(0));
  {
    Real log0 = fr.log_fast.back();
    Cplx q00 = fr.q.back()(0, 0);
    for (int i = 0; i < n; ++i) {
      Real y = grid->nodes[i];
      // frame checkpoints are descending; find the nearest
      size_t lo = 0, hi = fr.y.size() - 1;
      while (hi - lo > 1) {
        size_t mid = (lo + hi) / 2;
        if (fr.y[mid] >= y)
          lo = mid;
        else
          hi = mid;
      }
      size_t k = (std::abs(fr.y[lo] - y) <= std::abs(fr.y[hi] - y)) ? lo : hi;
      Real dl = fr.log_fast[k] - log0;
      if (dl < -700) continue;
      fs.fast_minus.values[i] = fr.q[k](0, 0) / q00 * std::exp(dl);
    }
    fs.fast_minus.boundary = {Cplx(1), fr.q.back()(1, 0) / q00,
                              fr.q.back()(2, 0) / q00};
  }

  // growing pair: the paper's approximate solutions evaluated at the wall
  // (WKB data for the fast, Wronskian companion for the slow); kept for the
  // independence diagnostic only
  fs.fast_plus.grid = grid;
  fs.fast_plus.values.assign(n, Cplx(0));
  Cplx mu0 = fs.mu_profile[0];
  fs.fast_plus.values[0] = 1.0;
  fs.fast_plus.boundary = {Cplx(1), mu0, mu0 * mu0};
  fs.slow_plus.grid = grid;
  fs.slow_plus.values.assign(n, Cplx(0));
  {
    // companion with unit Wronskian against the slow solution
    Cplx f = ss.boundary[0], df = ss.boundary[1];
    Real scale = std::max(std::abs(f), std::abs(df));
    Cplx g = -std::conj(df) / (scale * scale), dg = std::conj(f) / (scale * scale);
    Cplx wr = f * dg - df * g;
    g /= wr;
    dg /= wr;
    fs.slow_plus.values[0] = g;
    detail::WPack W0 = detail::w_pack(p, pt.alpha, pt.c, 0.0);
    fs.slow_plus.boundary = {g, dg, W0.w * g};
  }

  fs.slow_residual = ss.os_residual;
  return fs;
}

// ---- dispersion matrix ----------------------------------------------------

struct DispersionEvaluation {
  SpectralPoint point;
  Eigen::Matrix2cd E;
  Cplx det{0, 0};
  Real log_scale_dropped = 0;
};

inline DispersionEvaluation dispersion_det(const ShearProfile& p,
                                           const SpectralPoint& pt,
                                           const OsShootOptions& opt = {}) {
  DispersionEvaluation ev;
  ev.point = pt;
  OsFrame f = os_frame_sweep(p, pt, opt);
  SlowSolution ss = os_slow_solution(p, pt, opt, 257);
  const auto& q = f.q.back();
  Real nt = pt.slip_exponent();
  // slow column: the exact-subspace representative nearest the corrected
  // Rayleigh series (projection onto the frame), in far-field-unit scale;
  // fast column normalized to 1 at the wall. Exact solutions either way, so
  // det vanishes exactly on the spectrum.
  Eigen::Vector4cd vs;
  Real ffs = ss.rayleigh_l2 * std::exp(ss.ff_log);
  for (int i = 0; i < 4; ++i) vs(i) = ss.boundary[i] * ffs;
  Eigen::Vector4cd proj = q * (q.adjoint() * vs);
  Eigen::Vector4cd vf = q.col(0) / q(0, 0);
  ev.E(0, 0) = proj(0);
  ev.E(0, 1) = vf(0);
  ev.E(1, 0) = proj(1) - nt * proj(2);
  ev.E(1, 1) = vf(1) - nt * vf(2);
  ev.det = ev.E(0, 0) * ev.E(1, 1) - ev.E(0, 1) * ev.E(1, 0);
  ev.log_scale_dropped = f.log_fast.back();
  return ev;
}

// Evaluate the fast solution (normalized to 1 at the wall) at arbitrary y
// from the frame checkpoints, bridging between checkpoints with the local
// WKB factor e^{-mu (y - y_k)}.
inline Cplx os_fast_eval(const ShearProfile& p, const SpectralPoint& pt,
                         const OsFrame& f, Real y) {
  size_t lo = 0, hi = f.y.size() - 1;  // f.y descending
  while (hi - lo > 1) {
    size_t mid = (lo + hi) / 2;
    if (f.y[mid] >= y)
      lo = mid;
    else
      hi = mid;
  }
  size_t k = (std::abs(f.y[lo] - y) <= std::abs(f.y[hi] - y)) ? lo : hi;
  Real log0 = f.log_fast.back();
  Cplx q00 = f.q.back()(0, 0);
  Real dl = f.log_fast[k] - log0;
  if (dl < -680) return Cplx(0);
  Cplx bridge = std::exp(-os_mu(p, pt, f.y[k]) * (y - f.y[k]));
  return f.q[k](0, 0) / q00 * std::exp(dl) * bridge;
}

// ---- eigenvalue tracking ----------------------------------------------

struct OsTrackPoint {
  Real nu = 0;
  Cplx c{0, 0};
  Real det_residual = 0;
  Cplx o_ratio{0, 0};
  Cplx o_star{0, 0};
  Real mode_gap_vs_rayleigh = 0;
  Real slow_residual = 0;
  bool converged = false;
};

struct OsTrackOptions {
  OsShootOptions shoot;
  Real newton_tol = 1e-11;
  Real step_cap = 0.02;
  bool with_modes = true;  // compute O, O*, mode gap per point
};

// Newton-track the Orr-Sommerfeld eigenvalue along a nu schedule, seeding at
// the Rayleigh eigenvalue. The schedule should start at its smallest nu,
// where the eigenvalue sits closest to c0.
inline std::vector<OsTrackPoint> track_eigenvalue(
    const ShearProfile& p, int alpha, Cplx c0, const RVec& nu_schedule,
    Real gamma, const OsTrackOptions& opt = {}) {
  std::vector<OsTrackPoint> out;
  Cplx c = c0;
  for (Real nu : nu_schedule) {
    SpectralPoint pt{alpha, c, nu, gamma};
    auto det_fn = [&](Cplx cc) {
      SpectralPoint q = pt;
      q.c = cc;
      return os_dispersion(p, q, opt.shoot);
    };
    RootResult r =
        find_root_complex(det_fn, c, opt.newton_tol, 60, opt.step_cap);
    OsTrackPoint tp;
    tp.nu = nu;
    tp.c = r.root;
    tp.det_residual = r.residual;
    tp.converged = r.converged;
    if (!r.converged) {
      out.push_back(tp);
      break;  // lost track; report with last good nu
    }
    c = r.root;
    pt.c = c;
    if (opt.with_modes) {
      OsFrame f = os_frame_sweep(p, pt, opt.shoot);
      SlowSolution ss = os_slow_solution(p, pt, opt.shoot, 257);
      tp.o_ratio = slip_ratio_from_parts(ss, f.q.back(), pt.slip_exponent());
      tp.slow_residual = ss.os_residual;
      SpectralPoint pta = pt;
      OsFrame fa = os_frame_sweep(p, pta, opt.shoot, true);
      SlowSolution ssa = os_slow_solution(p, pta, opt.shoot, 257, true);
      // adjoint slow solution psi = conj(phi_ray)/(U0 - conj c); with
      // U0(0) = U0'(0) = 0 its wall data follows from the chi = conj(phi) data
      Cplx cb = std::conj(pt.c);
      Cplx chi0 = std::conj(ssa.boundary[0]), dchi0 = std::conj(ssa.boundary[1]),
           ddchi0 = std::conj(ssa.boundary[2]);
      Real u1 = eval_derivative(p, 1, 0.0), u2 = eval_derivative(p, 2, 0.0);
      Cplx d = -cb;
      Cplx psi0 = chi0 / d;
      Cplx dpsi0 = dchi0 / d - chi0 * u1 / (d * d);
      Cplx ddpsi0 = ddchi0 / d - 2.0 * dchi0 * u1 / (d * d) +
                    chi0 * (2.0 * u1 * u1 / (d * d * d) - u2 / (d * d));
      SlowSolution adj_slow;
      adj_slow.boundary = {psi0, dpsi0, ddpsi0};
      tp.o_star =
          slip_ratio_from_parts(adj_slow, fa.q.back(), pt.slip_exponent());
      // composite eigenmode slow + kappa*fast, kappa from the Dirichlet row;
      // gap against the Rayleigh mode at c0 in sup norm, on the shared grid
      RayleighOptions ro;
      ro.length = opt.shoot.length;
      ro.tail_cut = opt.shoot.tail_cut;
      ro.rtol = opt.shoot.rtol;
      ro.grid_n = 257;
      ModeFunction ray = rayleigh_decaying_solution(p, alpha, c0, ro);
      Cplx kappa = -ss.boundary[0];  // phi(0) + kappa * 1 = 0
      Real gap = 0;
      for (int i = 0; i < ray.grid->n; ++i) {
        Real y = ray.grid->nodes[i];
        Cplx mode = ss.values[i] + kappa * os_fast_eval(p, pt, f, y);
        gap = std::max(gap, std::abs(mode - ray.values[i]));
      }
      tp.mode_gap_vs_rayleigh = gap;
    }
    out.push_back(tp);
  }
  return out;
}

}  // namespace shearstab
