#include <catch2/catch_amalgamated.hpp>

#include "shearstab/profiles.hpp"

using namespace shearstab;

TEST_CASE("exp-inv derivative formula", "[profiles]") {
  ShearProfile p = make_exp_inv();
  CHECK(eval_derivative(p, 0, 1.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
  // U0'(y) = e^{-1/y}/y^2
  CHECK(eval_derivative(p, 1, 1.0) == Catch::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(eval_derivative(p, 1, 2.0) ==
        Catch::Approx(std::exp(-0.5) / 4.0).epsilon(1e-12));
  // U0''(y) = e^{-1/y} (y^-4 - 2 y^-3)
  CHECK(eval_derivative(p, 2, 0.7) ==
        Catch::Approx(std::exp(-1 / 0.7) *
                      (std::pow(0.7, -4.0) - 2 * std::pow(0.7, -3.0)))
            .epsilon(1e-11));
  // all derivatives vanish at the origin
  for (int k = 0; k <= 12; ++k) CHECK(eval_derivative(p, k, 0.0) == 0.0);
  CHECK(eval_derivative(p, 3, 1e-4) == 0.0);  // analytic limit under underflow
}

TEST_CASE("derivative evaluation errors", "[profiles]") {
  ShearProfile p = make_exp_inv();
  CHECK_THROWS_AS(eval_derivative(p, 13, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(eval_derivative(p, 0, -0.5), std::domain_error);
}

TEST_CASE("finite-difference cross-check of analytic derivatives", "[profiles]") {
  for (const auto& p : {make_exp_inv(), make_y_gauss()}) {
    for (int k = 0; k <= 6; ++k) {
      for (Real y : {0.4, 0.8, 1.5, 3.0}) {
        Real h = 1e-5;
        Real fd = (eval_derivative(p, k, y + h) - eval_derivative(p, k, y - h)) /
                  (2 * h);
        Real ex = eval_derivative(p, k + 1, y);
        Real scale = std::max({std::abs(ex), std::abs(eval_derivative(p, k, y)),
                               1e-3});
        CHECK(std::abs(fd - ex) <= 1e-4 * scale);
      }
    }
  }
}

TEST_CASE("odd extension symmetry", "[profiles]") {
  ShearProfile p = make_y_gauss();
  for (Real y : {0.3, 1.0, 2.5}) {
    CHECK(eval_extended(p, 0, -y) == Catch::Approx(-eval_derivative(p, 0, y)));
    CHECK(eval_extended(p, 1, -y) == Catch::Approx(eval_derivative(p, 1, y)));
    CHECK(eval_extended(p, 2, -y) == Catch::Approx(-eval_derivative(p, 2, y)));
  }
}

TEST_CASE("check_decay report", "[profiles]") {
  RVec grid = logspace(1e-3, 20.0, 1500);

  SECTION("zero profile passes with C_k = 0") {
    auto rep = check_decay(make_zero(), 4, grid);
    for (const auto& r : rep.rows) {
      CHECK(r.c_k == 0.0);
      CHECK_FALSE(r.tail_growth);
    }
  }

  SECTION("y-gauss passes for all k") {
    auto rep = check_decay(make_y_gauss(), 4, grid);
    // oracle: dense maximization of y e^{-y^2+y}; the sup is e^0 = 1 at y = 1
    CHECK(rep.rows[0].c_k == Catch::Approx(1.0).epsilon(1e-4));
    for (const auto& r : rep.rows) CHECK_FALSE(r.tail_growth);
  }

  SECTION("exp-inv: derivatives decay only polynomially, tail flagged") {
    auto rep = check_decay(make_exp_inv(), 2, grid);
    // |U0'(y)| e^{y} = e^{y - 1/y}/y^2 grows along the tail
    CHECK(rep.rows[1].tail_growth);
  }
}

TEST_CASE("factorial-growth bound for exp-inv", "[profiles]") {
  auto rows = check_factorial_bound(make_exp_inv(), 12);
  // k = 0: sup e^{-1/y} = 1 against bound C = 2
  CHECK(rows[0].s_k == Catch::Approx(1.0).epsilon(2e-4));
  CHECK(rows[0].bound == Catch::Approx(2.0));
  CHECK(rows[0].pass);
  // k = 1: analytic max of e^{-1/y}/(y + y^2) at y = 1/sqrt(2)
  Real y = 1.0 / std::sqrt(2.0);
  Real s1 = std::exp(-1.0 / y) / (y + y * y);
  CHECK(rows[1].s_k == Catch::Approx(s1).epsilon(1e-5));
  CHECK(rows[1].s_k == Catch::Approx(0.201405).epsilon(1e-4));
  CHECK(rows[1].bound == Catch::Approx(4.0));
  // the paper's constant C = 2 works through k = 12
  for (const auto& r : rows) CHECK(r.pass);
}

TEST_CASE("compatibility orders", "[profiles]") {
  CHECK(check_compatibility(make_exp_inv(), 10).empty());
  CHECK(check_compatibility(make_zero(), 12).empty());
  auto bad = check_compatibility(make_y_gauss(), 4);
  REQUIRE(bad.size() == 2);
  CHECK(bad[0] == 1);  // U0'(0) = 1
  CHECK(bad[1] == 3);  // U0'''(0) = -6
  ShearProfile yg = make_y_gauss();
  CHECK(eval_derivative(yg, 1, 0.0) == Catch::Approx(1.0));
  CHECK(eval_derivative(yg, 3, 0.0) == Catch::Approx(-6.0));
}

TEST_CASE("profile registry", "[profiles]") {
  CHECK(profile_by_name("exp-inv").name == "exp-inv");
  CHECK(profile_by_name("y-gauss").compat_order == 0);
  CHECK(profile_by_name("zero").name == "zero");
  CHECK_THROWS_AS(profile_by_name("nope"), std::invalid_argument);
}
