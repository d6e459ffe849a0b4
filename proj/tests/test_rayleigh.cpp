#include <catch2/catch_amalgamated.hpp>

#include "shearstab/rayleigh.hpp"

using namespace shearstab;

TEST_CASE("decaying solution for the zero profile", "[rayleigh]") {
  ShearProfile z = make_zero();

  SECTION("alpha=1, c=i gives normalized e^{-y}") {
    ModeFunction m = rayleigh_decaying_solution(z, 1, I);
    // ||e^{-y}||_{L2(0,40)} = sqrt(1/2), so phi(0) = sqrt(2)
    CHECK(std::abs(m.boundary[0]) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-8));
    for (int i = 0; i < m.grid->n; i += 16) {
      Cplx expect = std::sqrt(2.0) * std::exp(-m.grid->nodes[i]);
      CHECK(std::abs(m.values[i] - expect) < 1e-8);
    }
    CHECK(std::abs(m.boundary[1] + std::sqrt(2.0)) < 1e-7);  // phi'(0) = -sqrt2
  }

  SECTION("alpha=2, c=1+i gives normalized e^{-2y}") {
    ModeFunction m = rayleigh_decaying_solution(z, 2, Cplx(1, 1));
    Real nrm = std::sqrt(0.25);  // ||e^{-2y}||^2 = 1/4
    for (int i = 0; i < m.grid->n; i += 16) {
      Cplx expect = std::exp(-2 * m.grid->nodes[i]) / nrm;
      CHECK(std::abs(m.values[i] - expect) < 1e-7);
    }
  }

  SECTION("dispersion never vanishes") {
    Cplx d = rayleigh_dispersion(z, 1, I);
    CHECK(std::abs(d) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-8));
  }
}

TEST_CASE("exp-inv decaying solution has small residual", "[rayleigh]") {
  ShearProfile p = make_exp_inv();
  ModeFunction m = rayleigh_decaying_solution(p, 1, Cplx(0.2, 0.2));
  CHECK(rayleigh_residual(p, 1, Cplx(0.2, 0.2), m) < 1e-8);
}

TEST_CASE("conjugation symmetry of the dispersion", "[rayleigh]") {
  ShearProfile p = make_exp_inv();
  for (Cplx c : {Cplx(0.2, 0.1), Cplx(0.4, 0.3), Cplx(0.15, 0.05)}) {
    Cplx d = rayleigh_dispersion(p, 1, c);
    Cplx dbar = rayleigh_dispersion(p, 1, std::conj(c));
    CHECK(std::abs(dbar - std::conj(d)) < 1e-8 * std::abs(d));
  }
}

TEST_CASE("singular coefficient with real c is refused", "[rayleigh]") {
  ShearProfile p = make_exp_inv();
  // U0 ranges over (0, ~0.97) on the grid; c = 0.5 hits a critical layer
  CHECK_THROWS_AS(rayleigh_decaying_solution(p, 1, Cplx(0.5, 0.0)),
                  std::domain_error);
}

TEST_CASE("eigenvalue search", "[rayleigh][slow]") {
  ShearProfile z = make_zero();
  SECTION("zero profile: none found") {
    RayleighEigenvalue e = find_rayleigh_eigenvalue(z, 1, {0.0, 1.0, 0.01, 0.5});
    CHECK_FALSE(e.found);
  }

  SECTION("exp-inv at alpha=1: unstable eigenvalue, validated by the oracle") {
    ShearProfile p = make_exp_inv();
    RayleighEigenvalue e = find_rayleigh_eigenvalue(p, 1, {0.02, 0.9, 0.005, 0.4});
    REQUIRE(e.found);
    CHECK(e.c0.imag() > 0.01);
    CHECK(e.residual < 1e-6);
    CHECK(e.simple_flag);
    CHECK(std::abs(e.mode.boundary[0]) < 1e-6 * sup_abs(e.mode.values));

    // frozen from the dense-oracle/shooting cross-validation of this build
    CHECK(e.c0.real() == Catch::Approx(0.1484778154).margin(2e-6));
    CHECK(e.c0.imag() == Catch::Approx(0.0287940829).margin(2e-6));

    auto ev = rayleigh_oracle(p, 1, 512);
    REQUIRE(ev.size() >= 1);
    CHECK(std::abs(ev[0] - e.c0) < 1e-6);
  }
}

TEST_CASE("oracle basics", "[rayleigh]") {
  SECTION("zero profile: empty unstable list") {
    CHECK(rayleigh_oracle(make_zero(), 1, 256).empty());
  }

  SECTION("capacity guard") {
    CHECK_THROWS_AS(rayleigh_oracle(make_zero(), 1, 8192), std::invalid_argument);
  }

  SECTION("sign flip maps eigenvalues to negated conjugates") {
    ShearProfile p = make_exp_inv();
    ShearProfile q = p;
    q.eval_fn = [base = p.eval_fn](int k, Real y) { return -base(k, y); };
    auto ep = rayleigh_oracle(p, 1, 512);
    auto eq = rayleigh_oracle(q, 1, 512);
    REQUIRE(ep.size() == 1);
    REQUIRE(eq.size() == 1);
    CHECK(std::abs(eq[0] - (-std::conj(ep[0]))) < 1e-8);
  }
}

TEST_CASE("max unstable scan", "[rayleigh][slow]") {
  ShearProfile p = make_exp_inv();
  MaxUnstable m = max_unstable_scan(p, {1, 2}, {0.02, 0.9, 0.005, 0.4});
  REQUIRE(m.found);
  CHECK(m.alpha0 == 1);

  MaxUnstable none = max_unstable_scan(make_zero(), {1, 2}, {0.0, 1.0, 0.01, 0.5});
  CHECK_FALSE(none.found);
}
