#pragma once

#include <functional>

#include <Eigen/Dense>

#include "shearstab/types.hpp"

namespace shearstab {

struct ScaledState {
  CVec state;
  Real log_scale = 0.0;
};

namespace detail {

// Cash-Karp embedded 4(5) pair.
template <typename RHS>
inline Real ck_step(RHS&& rhs, Real y, const CVec& u, Real h, CVec& out) {
  static const Real a2 = 1. / 5, a3 = 3. / 10, a4 = 3. / 5, a5 = 1., a6 = 7. / 8;
  static const Real b21 = 1. / 5;
  static const Real b31 = 3. / 40, b32 = 9. / 40;
  static const Real b41 = 3. / 10, b42 = -9. / 10, b43 = 6. / 5;
  static const Real b51 = -11. / 54, b52 = 5. / 2, b53 = -70. / 27, b54 = 35. / 27;
  static const Real b61 = 1631. / 55296, b62 = 175. / 512, b63 = 575. / 13824,
                    b64 = 44275. / 110592, b65 = 253. / 4096;
  static const Real c1 = 37. / 378, c3 = 250. / 621, c4 = 125. / 594,
                    c6 = 512. / 1771;
  static const Real d1 = c1 - 2825. / 27648, d3 = c3 - 18575. / 48384,
                    d4 = c4 - 13525. / 55296, d5 = -277. / 14336,
                    d6 = c6 - 1. / 4;
  const size_t n = u.size();
  CVec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), tmp(n);
  rhs(y, u, k1);
  for (size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * b21 * k1[i];
  rhs(y + a2 * h, tmp, k2);
  for (size_t i = 0; i < n; ++i) tmp[i] = u[i] + h * (b31 * k1[i] + b32 * k2[i]);
  rhs(y + a3 * h, tmp, k3);
  for (size_t i = 0; i < n; ++i)
    tmp[i] = u[i] + h * (b41 * k1[i] + b42 * k2[i] + b43 * k3[i]);
  rhs(y + a4 * h, tmp, k4);
  for (size_t i = 0; i < n; ++i)
    tmp[i] = u[i] + h * (b51 * k1[i] + b52 * k2[i] + b53 * k3[i] + b54 * k4[i]);
  rhs(y + a5 * h, tmp, k5);
  for (size_t i = 0; i < n; ++i)
    tmp[i] = u[i] + h * (b61 * k1[i] + b62 * k2[i] + b63 * k3[i] + b64 * k4[i] +
                         b65 * k5[i]);
  rhs(y + a6 * h, tmp, k6);
  Real err = 0, scale = 0;
  out.resize(n);
  for (size_t i = 0; i < n; ++i) {
    out[i] = u[i] + h * (c1 * k1[i] + c3 * k3[i] + c4 * k4[i] + c6 * k6[i]);
    Cplx e = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i]);
    err = std::max(err, std::abs(e));
    scale = std::max(scale, std::abs(out[i]));
  }
  return err / std::max(scale, 1e-30);
}

}  // namespace detail

// Adaptive integration of u' = rhs(y, u) from y_from to y_to (either
// direction). With renormalize on, the state magnitude is pulled back to 1
// whenever it leaves [1e-2, 1e2]; the true solution is state*exp(log_scale).
// An optional observer sees every accepted step.
template <typename RHS>
inline ScaledState integrate_scaled(
    RHS&& rhs, Real y_from, Real y_to, CVec init, bool renormalize,
    Real rtol = 1e-11,
    const std::function<void(Real, const CVec&, Real)>& observer = nullptr) {
  ScaledState s{std::move(init), 0.0};
  Real y = y_from;
  const Real dir = (y_to >= y_from) ? 1.0 : -1.0;
  const Real span = std::abs(y_to - y_from);
  if (span == 0) return s;
  Real h = dir * span / 100.0;
  if (observer) observer(y, s.state, s.log_scale);
  CVec trial;
  int guard = 0;
  while (dir * (y_to - y) > 1e-14 * span) {
    if (++guard > 20000000)
      throw std::runtime_error("integrate_scaled: step budget exhausted");
    if (dir * (y + h - y_to) > 0) h = y_to - y;
    Real err = detail::ck_step(rhs, y, s.state, h, trial) / rtol;
    if (err <= 1.0) {
      y += h;
      s.state = trial;
      if (renormalize) {
        Real m = sup_abs(s.state);
        if ((m > 1e2 || m < 1e-2) && m > 0) {
          for (auto& z : s.state) z /= m;
          s.log_scale += std::log(m);
        }
      }
      if (observer) observer(y, s.state, s.log_scale);
      h *= std::min(5.0, 0.9 * std::pow(std::max(err, 1e-10), -0.2));
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
    }
    if (std::abs(h) < 1e-15 * span)
      throw std::runtime_error("integrate_scaled: step-size underflow");
  }
  return s;
}

// Backward sweep of a two-column frame for a linear fourth-order system in
// companion form (state per column: phi, phi', phi'', phi'''). Columns are
// kept orthonormal by modified Gram-Schmidt; column 1 is the dominant
// (fast-growing in the sweep direction) solution with its own log scale.
struct FrameSweep {
  RVec y;                                      // checkpoints, in sweep order
  std::vector<Eigen::Matrix<Cplx, 4, 2>> q;    // orthonormal frames
  RVec log_fast;                               // column-1 accumulated log
};

template <typename RHS>
inline FrameSweep frame_sweep(RHS&& rhs, const RVec& checkpoints,
                              Eigen::Matrix<Cplx, 4, 2> init, Real rtol = 1e-11) {
  if (checkpoints.size() < 2)
    throw std::invalid_argument("frame_sweep: need at least 2 checkpoints");
  FrameSweep out;
  out.y = checkpoints;
  auto mgs = [](Eigen::Matrix<Cplx, 4, 2>& w, Real& l1) {
    Real n1 = w.col(0).norm();
    w.col(0) /= n1;
    l1 += std::log(n1);
    Cplx p = w.col(0).dot(w.col(1));  // conjugate-linear in first arg
    w.col(1) -= p * w.col(0);
    w.col(1) /= w.col(1).norm();
  };
  Real l1 = 0.0;
  Eigen::Matrix<Cplx, 4, 2> w = init;
  w.col(0) /= w.col(0).norm();
  w.col(1) /= w.col(1).norm();
  mgs(w, l1);
  l1 = 0.0;  // initial normalization carries no scale
  out.q.push_back(w);
  out.log_fast.push_back(0.0);
  auto flat_rhs = [&rhs](Real y, const CVec& u, CVec& du) {
    du.resize(8);
    for (int c = 0; c < 2; ++c) {
      std::array<Cplx, 4> s{u[4 * c], u[4 * c + 1], u[4 * c + 2], u[4 * c + 3]};
      std::array<Cplx, 4> ds = rhs(y, s);
      for (int i = 0; i < 4; ++i) du[4 * c + i] = ds[i];
    }
  };
  for (size_t k = 0; k + 1 < checkpoints.size(); ++k) {
    CVec u(8);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 4; ++i) u[4 * c + i] = w(i, c);
    ScaledState st = integrate_scaled(flat_rhs, checkpoints[k],
                                      checkpoints[k + 1], u,
                                      /*renormalize=*/false, rtol);
    for (int c = 0; c < 2; ++c)
      for (int i = 0; i < 4; ++i) w(i, c) = st.state[4 * c + i];
    mgs(w, l1);
    out.q.push_back(w);
    out.log_fast.push_back(l1);
  }
  return out;
}

}  // namespace shearstab
