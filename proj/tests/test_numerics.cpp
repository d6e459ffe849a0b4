#include <catch2/catch_amalgamated.hpp>

#include "shearstab/bvp.hpp"
#include "shearstab/grid.hpp"
#include "shearstab/odeint.hpp"
#include "shearstab/rootfind.hpp"

using namespace shearstab;

TEST_CASE("build_grid node layouts", "[grid]") {
  Grid q = build_grid(GridKind::Quadratic, 3, 4.0);
  CHECK(q.nodes == RVec{0.0, 1.0, 4.0});

  Grid u = build_grid(GridKind::Uniform, 5, 1.0);
  CHECK(u.nodes == RVec{0.0, 0.25, 0.5, 0.75, 1.0});

  Grid c = build_grid("chebyshev-mapped", 64, 20.0);
  CHECK(c.nodes.front() == 0.0);
  CHECK(c.nodes.back() == 20.0);
  // clustering at both ends
  CHECK(c.nodes[1] - c.nodes[0] < 20.0 / 63 / 4);
  CHECK(c.nodes[63] - c.nodes[62] < 20.0 / 63 / 4);
  for (int i = 1; i < 64; ++i) CHECK(c.nodes[i] > c.nodes[i - 1]);

  CHECK_THROWS_AS(build_grid("hexagonal", 16, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(build_grid(GridKind::Uniform, 2, 1.0), std::invalid_argument);
}

TEST_CASE("quadratic grid is bit-exact", "[grid]") {
  Grid g = build_grid(GridKind::Quadratic, 101, 5.0);
  for (int i = 0; i < g.n; ++i) {
    Real t = Real(i) / 100.0;
    CHECK(g.nodes[i] == 5.0 * t * t);
  }
}

TEST_CASE("apply_delta_alpha", "[diffops]") {
  Grid g = build_grid(GridKind::ChebyshevMapped, 96, 20.0);
  CVec f = sample(g, [](Real y) { return std::exp(-y); });
  CVec d0 = apply_delta_alpha(g, f, 0);
  CVec d1 = apply_delta_alpha(g, f, 1);
  for (int i = 3; i < g.n - 3; ++i) {
    CHECK(std::abs(d0[i] - f[i]) < 1e-6);
    CHECK(std::abs(d1[i]) < 1e-6);
  }
  CVec lin = sample(g, [](Real y) { return y; });
  CVec d2 = apply_delta_alpha(g, lin, 2);
  for (int i = 3; i < g.n - 3; ++i)
    CHECK(std::abs(d2[i] - (-4.0 * g.nodes[i])) < 1e-6);
}

TEST_CASE("DiffOp invariant: second derivative of y^2", "[diffops]") {
  Grid g = build_grid(GridKind::ChebyshevMapped, 48, 10.0);
  DiffOp d2 = make_diff_op(g, 2);
  for (int i = 1; i < g.n - 1; ++i) {
    Real v = 0;
    for (int j = 0; j < g.n; ++j) v += d2.matrix(i, j) * g.nodes[j] * g.nodes[j];
    CHECK(std::abs(v - 2.0) < 1e-8);
  }
}

TEST_CASE("differentiation accuracy improves under refinement", "[diffops]") {
  auto max_err = [](int n) {
    Grid g = build_grid(GridKind::ChebyshevMapped, n, 10.0);
    Mat d = diff_matrix(g);
    Real m = 0;
    for (int i = 0; i < n; ++i) {
      Real v = 0;
      for (int j = 0; j < n; ++j) v += d(i, j) * std::exp(-g.nodes[j]);
      m = std::max(m, std::abs(v + std::exp(-g.nodes[i])));
    }
    return m;
  };
  Real e16 = max_err(16), e32 = max_err(32);
  CHECK(e32 < e16 / 10.0);  // spectral: far better than any fixed order
  CHECK(e32 < 1e-9);
}

TEST_CASE("quadrature", "[quadrature]") {
  Grid g = build_grid(GridKind::ChebyshevMapped, 128, 20.0);
  CVec f = sample(g, [](Real y) { return std::exp(-y); });
  Cplx v = quadrature(g, f);
  CHECK(std::abs(v - (1.0 - std::exp(-20.0))) < 1e-10);

  Grid u = build_grid(GridKind::Uniform, 5, 1.0);
  RVec lin(u.n);
  for (int i = 0; i < u.n; ++i) lin[i] = u.nodes[i];
  CHECK(quadrature(u, lin) == 0.5);  // trapezoid exact on linears
}

TEST_CASE("integrate_scaled", "[odeint]") {
  SECTION("scalar decay reconstructs e^{-10}") {
    auto rhs = [](Real, const CVec& u, CVec& du) {
      du.resize(1);
      du[0] = -u[0];
    };
    ScaledState s = integrate_scaled(rhs, 0.0, 10.0, {Cplx(1)}, true);
    Real v = std::abs(s.state[0]) * std::exp(s.log_scale);
    CHECK(v == Catch::Approx(std::exp(-10.0)).epsilon(1e-8));
    CHECK(sup_abs(s.state) <= 1e2);
    CHECK(sup_abs(s.state) >= 1e-2);
  }

  SECTION("zero system leaves state and scale unchanged") {
    auto rhs = [](Real, const CVec& u, CVec& du) { du.assign(u.size(), Cplx(0)); };
    ScaledState s = integrate_scaled(rhs, 0.0, 5.0, {Cplx(0.7), Cplx(-0.2)}, true);
    CHECK(s.log_scale == 0.0);
    CHECK(s.state[0] == Cplx(0.7));
    CHECK(s.state[1] == Cplx(-0.2));
  }

  SECTION("fourth-order constant system, decaying init: log-scale slope -sqrt(2)") {
    // phi'''' = 3 phi'' - 2 phi has rates {+-1, +-sqrt(2)}
    auto rhs = [](Real, const CVec& u, CVec& du) {
      du.resize(4);
      du[0] = u[1];
      du[1] = u[2];
      du[2] = u[3];
      du[3] = 3.0 * u[2] - 2.0 * u[0];
    };
    Real r = std::sqrt(2.0);
    CVec init{Cplx(1), Cplx(-r), Cplx(2), Cplx(-2 * r)};
    Real T = 6.0;
    ScaledState s = integrate_scaled(rhs, 0.0, T, init, true);
    Real slope = (s.log_scale + std::log(std::abs(s.state[0]))) / T;
    CHECK(slope == Catch::Approx(-r).epsilon(1e-6));
  }
}

TEST_CASE("find_root_complex", "[rootfind]") {
  auto f1 = [](Cplx c) { return c * c + Cplx(1); };
  RootResult r1 = find_root_complex(f1, Cplx(0.1, 0.8));
  CHECK(r1.converged);
  CHECK(std::abs(r1.root - I) < 1e-10);

  auto f2 = [](Cplx c) { return std::exp(c) - Cplx(2); };
  RootResult r2 = find_root_complex(f2, Cplx(0.5, 0.0));
  CHECK(r2.converged);
  CHECK(std::abs(r2.root - std::log(2.0)) < 1e-10);

  auto f3 = [](Cplx c) { return c * c + Cplx(1); };
  CHECK(winding_count(f3, -2, 2, 0.2, 2.0) == 1);
  CHECK(winding_count(f3, -2, 2, 1.5, 3.0) == 0);
  auto roots = find_zeros_in_box(f3, -2, 2, 0.1, 2.5);
  REQUIRE(roots.size() == 1);
  CHECK(std::abs(roots[0].root - I) < 1e-9);
}

TEST_CASE("solve_linear_bvp", "[bvp]") {
  auto grid =
      std::make_shared<const Grid>(build_grid(GridKind::ChebyshevMapped, 64, 8.0));

  SECTION("order 2: phi'' - phi = 0 with Dirichlet data gives e^{-y}") {
    std::vector<std::function<Cplx(Real)>> coeffs(3);
    coeffs[0] = [](Real) { return Cplx(-1); };
    coeffs[2] = [](Real) { return Cplx(1); };
    std::vector<BcRow> bc(2);
    bc[0].node = 0;
    bc[0].coeff = {Cplx(1), Cplx(0), Cplx(0), Cplx(0)};
    bc[0].value = Cplx(1);
    bc[1].node = grid->n - 1;
    bc[1].coeff = {Cplx(1), Cplx(0), Cplx(0), Cplx(0)};
    bc[1].value = Cplx(std::exp(-8.0));
    ModeFunction m = solve_linear_bvp(grid, 2, coeffs, bc, CVec(grid->n, Cplx(0)));
    for (int i = 0; i < grid->n; ++i)
      CHECK(std::abs(m.values[i] - std::exp(-grid->nodes[i])) < 1e-9);
    CHECK(std::abs(m.boundary[1] + 1.0) < 1e-8);  // phi'(0) = -1
  }

  SECTION("order 4: phi'''' = 0 with mixed rows gives y") {
    std::vector<std::function<Cplx(Real)>> coeffs(5);
    coeffs[4] = [](Real) { return Cplx(1); };
    std::vector<BcRow> bc(4);
    bc[0] = {0, {Cplx(1), Cplx(0), Cplx(0), Cplx(0)}, Cplx(0)};
    bc[1] = {0, {Cplx(0), Cplx(1), Cplx(0), Cplx(0)}, Cplx(1)};
    bc[2] = {grid->n - 1, {Cplx(1), Cplx(0), Cplx(0), Cplx(0)}, Cplx(8.0)};
    bc[3] = {grid->n - 1, {Cplx(0), Cplx(1), Cplx(0), Cplx(0)}, Cplx(1)};
    ModeFunction m = solve_linear_bvp(grid, 4, coeffs, bc, CVec(grid->n, Cplx(0)));
    for (int i = 0; i < grid->n; ++i)
      // D^4 assembly roundoff dominates here; the discrete residual contract holds
      CHECK(std::abs(m.values[i] - grid->nodes[i]) < 1e-6);
  }

  SECTION("singular system is reported") {
    // phi'' = 0 with two Neumann rows: one-dimensional kernel
    std::vector<std::function<Cplx(Real)>> coeffs(3);
    coeffs[2] = [](Real) { return Cplx(1); };
    std::vector<BcRow> bc(2);
    bc[0] = {0, {Cplx(0), Cplx(1), Cplx(0), Cplx(0)}, Cplx(0)};
    bc[1] = {grid->n - 1, {Cplx(0), Cplx(1), Cplx(0), Cplx(0)}, Cplx(0)};
    CVec f(grid->n, Cplx(1));
    CHECK_THROWS_AS(solve_linear_bvp(grid, 2, coeffs, bc, f), BvpError);
  }
}

TEST_CASE("cumulative integral", "[quadrature]") {
  Grid g = build_grid(GridKind::ChebyshevMapped, 400, 6.0);
  CVec f = sample(g, [](Real y) { return std::exp(-y); });
  CVec F = cumulative_integral(g, f);
  for (int i = 0; i < g.n; ++i)
    CHECK(std::abs(F[i] - (1.0 - std::exp(-g.nodes[i]))) < 5e-5);
}
