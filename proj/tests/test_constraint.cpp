#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "clwr/constraint.hpp"
#include "clwr/flux.hpp"

using namespace clwr;
using Catch::Approx;

TEST_CASE("piecewise constraint levels", "[constraint]") {
  const FluxModel f = FluxModel::quadratic();
  const PiecewiseConstraint p({0.5}, {0.1875, 0.05}, f);

  REQUIRE(p.n_jumps() == 1);
  REQUIRE(p.level_minus(0.3) == 0.1875);
  REQUIRE(p.level_plus(0.3) == 0.1875);
  REQUIRE(p.level_minus(0.5) == 0.1875);
  REQUIRE(p.level_plus(0.5) == 0.05);
  REQUIRE(p.level_minus(0.7) == 0.05);
  REQUIRE(p.level_plus(0.7) == 0.05);
  // one-sided limits extend to the domain ends
  REQUIRE(p.level_minus(0.0) == 0.1875);
  REQUIRE(p.level_plus(1.0) == 0.05);

  REQUIRE(p.distance_to_jump(0.3) == Approx(0.2).margin(1e-15));
  REQUIRE(p.jump_near(0.5, 0.0) == 0);
  REQUIRE(p.jump_near(0.5 + 1e-13, 0.0) == PiecewiseConstraint::npos);
  REQUIRE(p.jump_near(0.5 + 1e-13, 1e-12) == 0);
}

TEST_CASE("constraint validation", "[constraint]") {
  const FluxModel f = FluxModel::quadratic();

  REQUIRE_NOTHROW(PiecewiseConstraint({0.3, 0.6}, {0.2, 0.1, 0.05}, f));
  REQUIRE_NOTHROW(PiecewiseConstraint::constant(0.1, f));
  REQUIRE(PiecewiseConstraint::constant(0.1, f).n_jumps() == 0);

  // jumps must be strictly increasing and interior
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.6, 0.3}, {0.2, 0.1, 0.05}, f),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.0}, {0.2, 0.1}, f), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstraint({1.0}, {0.2, 0.1}, f), std::invalid_argument);
  // levels must be strictly decreasing, positive, and at most f_max
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.5}, {0.1, 0.2}, f), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.5}, {0.2, 0.0}, f), std::invalid_argument);
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.5}, {0.3, 0.1}, f), std::invalid_argument);
  // sizes must agree
  REQUIRE_THROWS_AS(PiecewiseConstraint({0.5}, {0.2}, f), std::invalid_argument);
}

TEST_CASE("affine and uniform kernels", "[constraint]") {
  const WeightKernel wa = WeightKernel::affine(1.0);
  REQUIRE(wa.density(-0.5) == Approx(1.0).margin(1e-15));
  REQUIRE(wa.density(-1.5) == 0.0);
  REQUIRE(wa.density(0.5) == 0.0);
  REQUIRE(wa.cumulative(-0.5) == Approx(0.25).margin(1e-15));
  REQUIRE(wa.cumulative(0.0) == Approx(1.0).margin(1e-15));
  REQUIRE(wa.at_zero() == Approx(2.0).margin(1e-15));

  const WeightKernel wu = WeightKernel::uniform(2.0);
  REQUIRE(wu.density(-1.0) == Approx(0.5).margin(1e-15));
  REQUIRE(wu.cumulative(-1.0) == Approx(0.5).margin(1e-15));
  REQUIRE(wu.at_zero() == Approx(0.5).margin(1e-15));

  REQUIRE_THROWS_AS(WeightKernel::affine(0.0), std::invalid_argument);
}

TEST_CASE("weighted averages", "[constraint]") {
  const WeightKernel w = WeightKernel::affine(1.0);
  // frozen: rho = 0.8 on (-1,-0.5], 0.4 on (-0.5,0] averages to exactly 0.5
  const auto profile = [](double x) { return x <= -0.5 ? 0.8 : 0.4; };
  REQUIRE(w.weighted_average(profile) == Approx(0.5).margin(1e-12));

  SECTION("cell version is exact for grid profiles") {
    const int n = 64;
    const double dx = 2.0 / n;  // grid on [-2, 0], kernel support is [-1, 0]
    std::vector<double> cells(n);
    for (int i = 0; i < n; ++i) {
      const double mid = -2.0 + (i + 0.5) * dx;
      cells[i] = mid <= -0.5 ? 0.8 : 0.4;
    }
    REQUIRE(weighted_cell_average(w, cells, -2.0, dx) == Approx(0.5).margin(1e-14));
  }

  SECTION("smooth profile matches quadrature") {
    const auto smooth = [](double x) { return 0.5 + 0.3 * std::sin(3.0 * x); };
    // integral of 2(x+1) * smooth(x) over [-1,0], mpmath: 0.309408000537324
    REQUIRE(w.weighted_average(smooth) == Approx(0.309408000537324).margin(1e-10));
  }
}

TEST_CASE("tabulated kernel", "[constraint]") {
  SECTION("reproduces the affine kernel") {
    const WeightKernel w =
        WeightKernel::tabulated({-1.0, -0.75, -0.5, -0.25, 0.0}, {0.0, 0.5, 1.0, 1.5, 2.0});
    REQUIRE_FALSE(w.renormalized());
    REQUIRE(w.density(-0.25) == Approx(1.5).margin(1e-12));
    REQUIRE(w.cumulative(-0.5) == Approx(0.25).margin(1e-3));
    const auto profile = [](double x) { return x <= -0.5 ? 0.8 : 0.4; };
    REQUIRE(w.weighted_average(profile) == Approx(0.5).margin(1e-3));
  }

  SECTION("small mass defect renormalizes with a flag") {
    const WeightKernel w = WeightKernel::tabulated({-1.0, 0.0}, {0.0, 2.0 * (1.0 + 4e-7)});
    REQUIRE(w.renormalized());
    REQUIRE(w.cumulative(0.0) == Approx(1.0).margin(1e-12));
  }

  SECTION("bad kernels are rejected") {
    // mass defect above the audit threshold
    REQUIRE_THROWS_AS(WeightKernel::tabulated({-1.0, 0.0}, {0.0, 2.1}), std::invalid_argument);
    // negative density
    REQUIRE_THROWS_AS(WeightKernel::tabulated({-1.0, -0.5, 0.0}, {-0.2, 1.0, 3.0}),
                      std::invalid_argument);
    // decreasing towards the exit
    REQUIRE_THROWS_AS(WeightKernel::tabulated({-1.0, -0.5, 0.0}, {0.0, 4.0, 0.0}),
                      std::invalid_argument);
  }
}

TEST_CASE("xi rate bound", "[constraint]") {
  const FluxModel f = FluxModel::quadratic();
  REQUIRE(xi_rate_bound(f, WeightKernel::affine(1.0)) == Approx(1.0).margin(1e-12));
  REQUIRE(xi_rate_bound(f, WeightKernel::uniform(1.0)) == Approx(0.5).margin(1e-12));
}
