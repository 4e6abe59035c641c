#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clwr/flux.hpp"

using clwr::FluxModel;
using Catch::Approx;

// Closed-form reference values below were computed independently with mpmath
// at 30 digits and frozen.

TEST_CASE("quadratic preset", "[flux]") {
  const FluxModel f = FluxModel::quadratic();

  REQUIRE(f.r_max() == 1.0);
  REQUIRE(f.rho_crit() == Approx(0.5).margin(1e-11));
  REQUIRE(f.f_max() == Approx(0.25).margin(1e-12));
  REQUIRE(f.eval(0.8) == Approx(0.16).margin(1e-15));
  REQUIRE(f.eval(0.8015) == Approx(0.15909775).margin(1e-15));
  REQUIRE(f.eval(0.7984) == Approx(0.16095744).margin(1e-15));
  REQUIRE(f.prime(0.8) == Approx(-0.6).margin(1e-12));
  REQUIRE(f.lipschitz() == Approx(1.0).margin(1e-2));
}

TEST_CASE("quadratic inverse branches", "[flux]") {
  const FluxModel f = FluxModel::quadratic();

  SECTION("frozen points") {
    REQUIRE(f.rho_hat(0.1875) == Approx(0.75).margin(1e-11));
    REQUIRE(f.rho_check(0.1875) == Approx(0.25).margin(1e-11));
    REQUIRE(f.rho_hat(0.05) == Approx(0.9472135954999579).margin(1e-11));
    REQUIRE(f.rho_check(0.05) == Approx(0.0527864045000421).margin(1e-11));
  }

  SECTION("round trip and branch ordering") {
    for (int i = 1; i <= 40; ++i) {
      const double q = f.f_max() * i / 40.0;
      const double hat = f.rho_hat(q);
      const double check = f.rho_check(q);
      REQUIRE(std::abs(f.eval(hat) - q) <= 1e-10);
      REQUIRE(std::abs(f.eval(check) - q) <= 1e-10);
      REQUIRE(check <= f.rho_crit());
      REQUIRE(hat >= f.rho_crit());
    }
  }

  SECTION("monotone in the level") {
    double prev_hat = f.rho_hat(0.01);
    double prev_check = f.rho_check(0.01);
    for (int i = 2; i <= 24; ++i) {
      const double q = 0.01 * i;
      REQUIRE(f.rho_hat(q) < prev_hat);
      REQUIRE(f.rho_check(q) > prev_check);
      prev_hat = f.rho_hat(q);
      prev_check = f.rho_check(q);
    }
  }

  SECTION("out of range level throws") {
    REQUIRE_THROWS_AS(f.rho_hat(0.26), std::domain_error);
    REQUIRE_THROWS_AS(f.rho_check(-0.01), std::domain_error);
  }
}

TEST_CASE("shock speed", "[flux]") {
  const FluxModel f = FluxModel::quadratic();
  REQUIRE(f.shock_speed(0.25, 0.5) == Approx(0.25).margin(1e-15));
  REQUIRE(f.shock_speed(0.25, 0.75) == Approx(0.0).margin(1e-15));
  // speed of the shock 0.8 -> rho_hat(0.05), frozen
  REQUIRE(f.shock_speed(0.8, f.rho_hat(0.05)) == Approx(-0.7472135954999579).margin(1e-9));
  REQUIRE_THROWS_AS(f.shock_speed(0.4, 0.4), std::invalid_argument);
}

TEST_CASE("characteristic speed inverse", "[flux]") {
  const FluxModel f = FluxModel::quadratic();
  REQUIRE(f.char_speed_inverse(0.5) == Approx(0.25).margin(1e-10));
  REQUIRE(f.char_speed_inverse(0.0) == Approx(0.5).margin(1e-10));
  REQUIRE(f.char_speed_inverse(-0.7472135954999579) ==
          Approx(0.8736067977499790).margin(1e-10));
  // endpoints of the speed range resolve to the domain endpoints
  REQUIRE(f.char_speed_inverse(f.prime(0.0)) == Approx(0.0).margin(1e-8));
  REQUIRE(f.char_speed_inverse(f.prime(1.0)) == Approx(1.0).margin(1e-8));
}

TEST_CASE("domain checks", "[flux]") {
  const FluxModel f = FluxModel::quadratic();
  REQUIRE_THROWS_AS(f.eval(-0.1), std::domain_error);
  REQUIRE_THROWS_AS(f.eval(1.1), std::domain_error);
  REQUIRE(f.eval(1.0 + 1e-13) == Approx(0.0).margin(1e-12));  // clamped
  REQUIRE(f.eval(-1e-13) == Approx(0.0).margin(1e-12));
}

TEST_CASE("custom flux", "[flux]") {
  SECTION("with analytic derivative, r_max = 2") {
    const FluxModel f = FluxModel::custom(
        [](double r) { return 0.5 * r * (2.0 - r); }, [](double r) { return 1.0 - r; }, 2.0);
    REQUIRE(f.rho_crit() == Approx(1.0).margin(1e-10));
    REQUIRE(f.f_max() == Approx(0.5).margin(1e-12));
    REQUIRE(f.rho_hat(0.25) == Approx(1.0 + std::sqrt(0.5)).margin(1e-10));
  }

  SECTION("finite difference fallback") {
    const FluxModel f = FluxModel::custom([](double r) { return r * (1.0 - r); }, nullptr, 1.0);
    REQUIRE(f.prime(0.3) == Approx(0.4).margin(1e-6));
    REQUIRE(f.rho_crit() == Approx(0.5).margin(1e-10));
  }

  SECTION("invalid shapes are rejected") {
    // f(0) != 0
    REQUIRE_THROWS_AS(
        FluxModel::custom([](double r) { return 0.1 + r * (1.0 - r); }, nullptr, 1.0),
        std::invalid_argument);
    // not concave
    REQUIRE_THROWS_AS(
        FluxModel::custom([](double r) { return r * (1.0 - r) * (0.5 - r); }, nullptr, 1.0),
        std::invalid_argument);
    // negative interior
    REQUIRE_THROWS_AS(FluxModel::custom([](double r) { return r * (r - 1.0); }, nullptr, 1.0),
                      std::invalid_argument);
  }
}

TEST_CASE("tabulated flux", "[flux]") {
  SECTION("concave samples interpolate cleanly") {
    std::vector<double> rho, flow;
    for (int i = 0; i <= 10; ++i) {
      const double r = i / 10.0;
      rho.push_back(r);
      flow.push_back(r * (1.0 - r));
    }
    const FluxModel f = FluxModel::tabulated(rho, flow);
    REQUIRE(f.r_max() == 1.0);
    REQUIRE(f.f_max() == Approx(0.25).margin(1e-3));
    REQUIRE(f.eval(0.75) == Approx(0.1875).margin(1e-3));
    REQUIRE(std::abs(f.eval(f.rho_hat(0.1))) - 0.1 <= 1e-10);
  }

  SECTION("non-concave samples are rejected") {
    REQUIRE_THROWS_AS(FluxModel::tabulated({0.0, 0.25, 0.5, 0.75, 1.0},
                                           {0.0, 0.05, 0.25, 0.05, 0.0}),
                      std::invalid_argument);
  }

  SECTION("too few samples are rejected") {
    REQUIRE_THROWS_AS(FluxModel::tabulated({0.0, 0.5, 1.0}, {0.0, 0.25, 0.0}),
                      std::invalid_argument);
  }
}
