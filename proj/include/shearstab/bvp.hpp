#pragma once

#include <functional>

#include <Eigen/Dense>

#include "shearstab/grid.hpp"

namespace shearstab {

// One boundary row: functional c0*phi + c1*phi' + c2*phi'' + c3*phi''' at a
// node (0 for y=0, n-1 for y=L), equated to `value`.
struct BcRow {
  int node = 0;
  std::array<Cplx, 4> coeff{Cplx(0), Cplx(0), Cplx(0), Cplx(0)};
  Cplx value{0};
};

struct BvpError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense collocation solve of a linear ODE of order 2 or 4,
//   sum_k a_k(y) phi^(k)(y) = f(y),
// with `order` boundary rows replacing collocation rows nearest the
// corresponding boundary. Coefficients are sampled at the nodes.
class CollocationOperator {
 public:
  CollocationOperator(std::shared_ptr<const Grid> grid, int order,
                      const std::vector<std::function<Cplx(Real)>>& coeff_fns,
                      const std::vector<BcRow>& bc_rows)
      : grid_(std::move(grid)), order_(order), bc_(bc_rows) {
    if (order != 2 && order != 4)
      throw std::invalid_argument("CollocationOperator: order must be 2 or 4");
    if (static_cast<int>(bc_rows.size()) != order)
      throw std::invalid_argument("CollocationOperator: need order bc rows");
    const int n = grid_->n;
    d_.resize(5);
    d_[0] = Mat::Identity(n, n);
    d_[1] = diff_matrix(*grid_);
    for (int k = 2; k <= 4; ++k) d_[k] = d_[1] * d_[k - 1];
    a_ = CMat::Zero(n, n);
    for (int k = 0; k <= order; ++k) {
      if (k >= static_cast<int>(coeff_fns.size()) || !coeff_fns[k]) continue;
      for (int i = 0; i < n; ++i) {
        Cplx ak = coeff_fns[k](grid_->nodes[i]);
        for (int j = 0; j < n; ++j) a_(i, j) += ak * d_[k](i, j);
      }
    }
    interior_ = a_;
    // replace rows: for order 2, one row at each end; for order 4, two.
    int lo = order / 2;
    for (int r = 0; r < order; ++r) {
      const BcRow& row = bc_[r];
      int target;
      if (row.node == 0)
        target = lo_count_++;
      else
        target = n - 1 - hi_count_++;
      (void)lo;
      for (int j = 0; j < n; ++j) {
        Cplx v(0);
        for (int k = 0; k < 4; ++k)
          if (row.coeff[k] != Cplx(0)) v += row.coeff[k] * d_[k](row.node, j);
        a_(target, j) = v;
      }
      bc_targets_.push_back(target);
    }
    lu_.compute(a_);
  }

  const Grid& grid() const { return *grid_; }
  const Mat& diff(int k) const { return d_[k]; }
  const CMat& matrix() const { return a_; }
  const CMat& interior_matrix() const { return interior_; }

  // Solve with the given interior right-hand side (sampled at nodes).
  CVec solve(const CVec& f) const {
    const int n = grid_->n;
    CEVec b(n);
    for (int i = 0; i < n; ++i) b(i) = f[i];
    for (size_t r = 0; r < bc_.size(); ++r) b(bc_targets_[r]) = bc_[r].value;
    CEVec x = lu_.solve(b);
    // pivot-ratio test catches (near-)singular operators, e.g. (c,nu) sitting
    // on an eigenvalue; the residual test catches everything else
    Real pmin = 1e300, pmax = 0;
    for (int i = 0; i < n; ++i) {
      Real p = std::abs(lu_.matrixLU()(i, i));
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
    if (pmin < 1e-13 * pmax)
      throw BvpError("solve_linear_bvp: singular system (pivot collapse)");
    Real resid = (a_ * x - b).norm();
    Real scale = b.norm() + a_.norm() * x.norm();
    if (!(resid <= 1e-8 * std::max(scale, 1e-300)))
      throw BvpError("solve_linear_bvp: singular or ill-conditioned system");
    CVec out(n);
    for (int i = 0; i < n; ++i) out[i] = x(i);
    return out;
  }

  // Residual of the interior operator applied to a grid function against f,
  // max over nodes away from replaced rows.
  Real interior_residual(const CVec& phi, const CVec& f) const {
    const int n = grid_->n;
    CEVec x(n);
    for (int i = 0; i < n; ++i) x(i) = phi[i];
    CEVec r = interior_ * x;
    Real m = 0;
    for (int i = 0; i < n; ++i) {
      bool replaced = false;
      for (int t : bc_targets_) replaced |= (i == t);
      if (!replaced) m = std::max(m, std::abs(r(i) - f[i]));
    }
    return m;
  }

 private:
  std::shared_ptr<const Grid> grid_;
  int order_;
  std::vector<BcRow> bc_;
  std::vector<Mat> d_;
  CMat a_, interior_;
  Eigen::PartialPivLU<CMat> lu_;
  std::vector<int> bc_targets_;
  int lo_count_ = 0, hi_count_ = 0;
};

// Convenience wrapper matching the operation-style interface.
inline ModeFunction solve_linear_bvp(
    std::shared_ptr<const Grid> grid, int order,
    const std::vector<std::function<Cplx(Real)>>& coeff_fns,
    const std::vector<BcRow>& bc_rows, const CVec& rhs) {
  CollocationOperator op(grid, order, coeff_fns, bc_rows);
  ModeFunction m;
  m.grid = std::move(grid);
  m.values = op.solve(rhs);
  const Mat& d1 = op.diff(1);
  const Mat& d2 = op.diff(2);
  Cplx b1(0), b2(0);
  for (int j = 0; j < m.grid->n; ++j) {
    b1 += d1(0, j) * m.values[j];
    b2 += d2(0, j) * m.values[j];
  }
  m.boundary = {m.values[0], b1, b2};
  return m;
}

}  // namespace shearstab
