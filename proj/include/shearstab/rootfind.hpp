#pragma once

#include <functional>

#include "shearstab/types.hpp"

namespace shearstab {

struct RootResult {
  Cplx root;
  Real residual = 0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton on a complex scalar map, finite-difference derivative with a
// secant fallback. Steps are halved while they grow the residual.
inline RootResult find_root_complex(const std::function<Cplx(Cplx)>& f,
                                    Cplx c_init, Real tol = 1e-10,
                                    int max_iter = 100, Real step_cap = 0.0) {
  RootResult r;
  Cplx c = c_init;
  Cplx fc = f(c);
  Cplx c_prev = c, f_prev = fc;
  bool have_prev = false;
  for (int it = 0; it < max_iter; ++it) {
    r.iterations = it + 1;
    if (std::abs(fc) <= tol) {
      r.converged = true;
      break;
    }
    Real h = 1e-7 * std::max(std::abs(c), 1e-3);
    Cplx df = (f(c + h) - fc) / h;
    if (std::abs(df) < 1e-300 && have_prev && std::abs(c - c_prev) > 0)
      df = (fc - f_prev) / (c - c_prev);  // secant fallback
    if (std::abs(df) < 1e-300) break;
    Cplx step = -fc / df;
    if (step_cap > 0 && std::abs(step) > step_cap)
      step *= step_cap / std::abs(step);
    Cplx c_new = c + step;
    Cplx f_new = f(c_new);
    int halvings = 0;
    while (std::abs(f_new) > std::abs(fc) && halvings < 8) {
      step *= 0.5;
      c_new = c + step;
      f_new = f(c_new);
      ++halvings;
    }
    have_prev = true;
    c_prev = c;
    f_prev = fc;
    c = c_new;
    fc = f_new;
    if (std::abs(step) < 1e-15 * std::max(std::abs(c), 1.0)) break;
  }
  r.root = c;
  r.residual = std::abs(fc);
  r.converged = r.converged || r.residual <= tol;
  return r;
}

// Winding number of f along the rectangle [re0,re1]x[im0,im1], from the
// accumulated continuous argument over sampled boundary points. Counts zeros
// inside (assuming none on the boundary).
inline int winding_count(const std::function<Cplx(Cplx)>& f, Real re0, Real re1,
                         Real im0, Real im1, int samples_per_side = 64) {
  std::vector<Cplx> pts;
  auto push_side = [&](Cplx a, Cplx b) {
    for (int i = 0; i < samples_per_side; ++i)
      pts.push_back(a + (b - a) * (Real(i) / samples_per_side));
  };
  Cplx A(re0, im0), B(re1, im0), C(re1, im1), D(re0, im1);
  push_side(A, B);
  push_side(B, C);
  push_side(C, D);
  push_side(D, A);
  pts.push_back(A);
  Real total = 0;
  Cplx prev = f(pts[0]);
  for (size_t i = 1; i < pts.size(); ++i) {
    Cplx cur = f(pts[i]);
    total += std::arg(cur / prev);  // branch-safe increment for small steps
    prev = cur;
  }
  return static_cast<int>(std::lround(total / (2 * pi)));
}

// Locate zeros inside a box: recursive bisection on winding counts down to a
// small cell, then Newton-polish each seed.
inline std::vector<RootResult> find_zeros_in_box(
    const std::function<Cplx(Cplx)>& f, Real re0, Real re1, Real im0, Real im1,
    Real tol = 1e-10, int max_depth = 9) {
  std::vector<RootResult> roots;
  std::function<void(Real, Real, Real, Real, int)> recurse =
      [&](Real a, Real b, Real c, Real d, int depth) {
        int w = winding_count(f, a, b, c, d);
        if (w == 0) return;
        if (depth >= max_depth || (b - a < 1e-3 && d - c < 1e-3)) {
          Cplx seed((a + b) / 2, (c + d) / 2);
          RootResult r = find_root_complex(f, seed, tol, 100, (b - a));
          if (r.converged) {
            for (const auto& q : roots)
              if (std::abs(q.root - r.root) < 1e-8) return;
            roots.push_back(r);
          }
          return;
        }
        // asymmetric split keeps zeros off the cut lines
        Real rm = a + (b - a) * 0.51371, im = c + (d - c) * 0.48629;
        recurse(a, rm, c, im, depth + 1);
        recurse(rm, b, c, im, depth + 1);
        recurse(a, rm, im, d, depth + 1);
        recurse(rm, b, im, d, depth + 1);
      };
  recurse(re0, re1, im0, im1, 0);
  return roots;
}

}  // namespace shearstab
