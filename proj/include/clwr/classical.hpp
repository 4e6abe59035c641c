#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clwr/flux.hpp"

namespace clwr {

enum class WaveKind { shock, rarefaction, nonclassical_shock };

/// One wave of a self-similar profile. speed_lo == speed_hi for
/// discontinuities; rarefactions span [f'(left), f'(right)].
struct Wave {
  WaveKind kind;
  double left;
  double right;
  double speed_lo;
  double speed_hi;
};

/// Piecewise description of rho(x/t): constant states separated by waves with
/// disjoint, non-decreasing speed ranges; adjacent waves share the state
/// between them. left_state is the value at xi = -inf.
struct SelfSimilarSolution {
  double left_state = 0.0;
  std::vector<Wave> waves;

  double right_state() const { return waves.empty() ? left_state : waves.back().right; }
};

/// Entropy solution of the unconstrained Riemann problem for concave flux:
/// one shock (rho_l < rho_r), one fan (rho_l > rho_r), or a constant.
inline SelfSimilarSolution solve_classical(const FluxModel& flux, double rho_l, double rho_r) {
  SelfSimilarSolution sol;
  sol.left_state = rho_l;
  if (rho_l < rho_r) {
    const double s = flux.shock_speed(rho_l, rho_r);
    sol.waves.push_back({WaveKind::shock, rho_l, rho_r, s, s});
  } else if (rho_l > rho_r) {
    sol.waves.push_back(
        {WaveKind::rarefaction, rho_l, rho_r, flux.prime(rho_l), flux.prime(rho_r)});
  }
  return sol;
}

namespace detail {

// side < 0 / > 0 selects the one-sided limit at discontinuities; side == 0 is
// the right-continuous pointwise convention.
inline double evaluate_side(const SelfSimilarSolution& sol, const FluxModel& flux, double xi,
                            int side) {
  double cur = sol.left_state;
  for (const Wave& w : sol.waves) {
    if (xi < w.speed_lo || (xi == w.speed_lo && side < 0)) return cur;
    const bool past = xi > w.speed_hi || (xi == w.speed_hi && side > 0);
    if (!past) {
      if (w.kind == WaveKind::rarefaction) return flux.char_speed_inverse(xi);
      return side < 0 ? w.left : w.right;
    }
    cur = w.right;
  }
  return cur;
}

}  // namespace detail

/// Sample the profile at similarity variable xi = x/t. Right-continuous at
/// discontinuities; inside a fan returns the state carried by the xi ray.
inline double evaluate(const SelfSimilarSolution& sol, const FluxModel& flux, double xi) {
  return detail::evaluate_side(sol, flux, xi, 0);
}

/// Measure-theoretic traces (rho(t,0-), rho(t,0+)) of the profile, t > 0.
inline std::pair<double, double> traces_at_zero(const SelfSimilarSolution& sol,
                                                const FluxModel& flux) {
  return {detail::evaluate_side(sol, flux, 0.0, -1), detail::evaluate_side(sol, flux, 0.0, +1)};
}

/// Structural audit used by tests: state chaining, speed ordering, wave-type
/// constraints (Lax direction for shocks, Rankine-Hugoniot at x=0).
inline void validate(const SelfSimilarSolution& sol, const FluxModel& flux) {
  double cur = sol.left_state;
  double prev_hi = -1e300;
  for (const Wave& w : sol.waves) {
    if (w.left != cur) throw std::logic_error("solution: broken state chain");
    if (w.speed_lo > w.speed_hi) throw std::logic_error("solution: inverted speed range");
    if (w.speed_lo < prev_hi) throw std::logic_error("solution: overlapping waves");
    switch (w.kind) {
      case WaveKind::shock:
        if (!(w.left < w.right)) throw std::logic_error("shock: wrong admissibility direction");
        if (w.speed_lo != w.speed_hi) throw std::logic_error("shock: spread speeds");
        break;
      case WaveKind::rarefaction:
        if (!(w.left > w.right)) throw std::logic_error("fan: non-decreasing states");
        break;
      case WaveKind::nonclassical_shock:
        if (w.speed_lo != 0.0 || w.speed_hi != 0.0)
          throw std::logic_error("nonclassical shock: nonzero speed");
        if (std::abs(flux.eval(w.left) - flux.eval(w.right)) > 10 * kInverseTol)
          throw std::logic_error("nonclassical shock: Rankine-Hugoniot violated");
        break;
    }
    prev_hi = w.speed_hi;
    cur = w.right;
  }
}

}  // namespace clwr
