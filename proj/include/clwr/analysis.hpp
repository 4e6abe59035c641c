#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clwr/classical.hpp"
#include "clwr/constrained.hpp"
#include "clwr/flux.hpp"
#include "clwr/fvm.hpp"

namespace clwr {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Piecewise-constant profile: cell averages on a uniform grid.
struct SampledProfile {
  double x_min = 0.0;
  double dx = 0.0;
  std::vector<double> values;

  double x_max() const { return x_min + dx * static_cast<double>(values.size()); }

  double at(double x) const {
    const auto j = static_cast<std::ptrdiff_t>(std::floor((x - x_min) / dx));
    if (j < 0 || j >= static_cast<std::ptrdiff_t>(values.size()))
      throw std::domain_error("profile: sample outside the grid");
    return values[static_cast<std::size_t>(j)];
  }
};

inline SampledProfile make_profile(const Grid& g, const GridState& s) {
  return {g.x_min, g.dx, s.cells};
}

/// L1 distance of two cell profiles over an interval; mismatched grids are
/// resampled midpoint-wise on the finer one.
inline double l1_distance(const SampledProfile& a, const SampledProfile& b, Interval iv) {
  const SampledProfile& fine = a.dx <= b.dx ? a : b;
  const SampledProfile& coarse = a.dx <= b.dx ? b : a;
  iv.lo = std::max({iv.lo, a.x_min, b.x_min});
  iv.hi = std::min({iv.hi, a.x_max(), b.x_max()});
  double acc = 0.0;
  for (std::size_t j = 0; j < fine.values.size(); ++j) {
    const double lo = fine.x_min + fine.dx * static_cast<double>(j);
    const double hi = lo + fine.dx;
    const double a0 = std::max(lo, iv.lo), b0 = std::min(hi, iv.hi);
    if (b0 <= a0) continue;
    acc += std::abs(fine.values[j] - coarse.at(0.5 * (a0 + b0))) * (b0 - a0);
  }
  return acc;
}

/// L1 distance between a cell profile and an exact self-similar solution at
/// time t > 0, sampled at 16 sub-cell midpoints.
inline double l1_distance(const SampledProfile& a, const SelfSimilarSolution& b,
                          const FluxModel& flux, double t, Interval iv) {
  if (!(t > 0.0)) throw std::invalid_argument("l1_distance: need t > 0 to sample x/t");
  iv.lo = std::max(iv.lo, a.x_min);
  iv.hi = std::min(iv.hi, a.x_max());
  constexpr int sub = 16;
  double acc = 0.0;
  for (std::size_t j = 0; j < a.values.size(); ++j) {
    const double lo = a.x_min + a.dx * static_cast<double>(j);
    for (int m = 0; m < sub; ++m) {
      const double a0 = std::max(lo + a.dx * m / sub, iv.lo);
      const double b0 = std::min(lo + a.dx * (m + 1) / sub, iv.hi);
      if (b0 <= a0) continue;
      const double xm = 0.5 * (a0 + b0);
      acc += std::abs(a.values[j] - evaluate(b, flux, xm / t)) * (b0 - a0);
    }
  }
  return acc;
}

namespace detail {

// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half; mirror for
// the negative nodes)
inline constexpr std::array<double, 16> kGauss32X{
    0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745, 0.3318686022821276497,
    0.4213512761306353453, 0.5068999089322293900, 0.5877157572407623290, 0.6630442669302152009,
    0.7321821187402896803, 0.7944837959679424069, 0.8493676137325699701, 0.8963211557660521239,
    0.9349060759377396891, 0.9647622555875064307, 0.9856115115452683354, 0.9972638618494815635};
inline constexpr std::array<double, 16> kGauss32W{
    0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654, 0.0911738786957638847,
    0.0876520930044038111, 0.0833119242269467552, 0.0781938957870703065, 0.0723457941088485062,
    0.0658222227763618468, 0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
    0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706, 0.0070186100094700966};

template <typename F>
double gauss32(F&& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < kGauss32X.size(); ++i)
    acc += kGauss32W[i] * (f(c + h * kGauss32X[i]) + f(c - h * kGauss32X[i]));
  return acc * h;
}

// value of the self-similar profile at similarity coordinate xi, plus whether
// xi lies strictly inside a fan of the solution
struct PieceProbe {
  double value;
  bool in_fan;
};

inline PieceProbe probe(const SelfSimilarSolution& s, const FluxModel& flux, double xi) {
  double cur = s.left_state;
  for (const Wave& w : s.waves) {
    if (xi < w.speed_lo) return {cur, false};
    if (xi < w.speed_hi)
      return {w.kind == WaveKind::rarefaction ? flux.char_speed_inverse(xi) : w.right, true};
    cur = w.right;
  }
  return {cur, false};
}

}  // namespace detail

/// Exact L1 distance between two self-similar profiles (same flux) at time
/// t > 0: breakpoints of both wave fans are merged and each slab integrated
/// in closed form (constants) or by 32-point Gauss quadrature split at the
/// unique sign change (fan vs constant slabs).
inline double l1_distance(const SelfSimilarSolution& a, const SelfSimilarSolution& b,
                          const FluxModel& flux, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("l1_distance: need t > 0");
  if (a.left_state != b.left_state || a.right_state() != b.right_state())
    return std::numeric_limits<double>::infinity();

  std::vector<double> xs;
  for (const Wave& w : a.waves) {
    xs.push_back(w.speed_lo);
    xs.push_back(w.speed_hi);
  }
  for (const Wave& w : b.waves) {
    xs.push_back(w.speed_lo);
    xs.push_back(w.speed_hi);
  }
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  const auto diff = [&](double xi) {
    return detail::probe(a, flux, xi).value - detail::probe(b, flux, xi).value;
  };

  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double lo = xs[i], hi = xs[i + 1];
    if (!(hi > lo)) continue;
    const double mid = 0.5 * (lo + hi);
    const auto pa = detail::probe(a, flux, mid);
    const auto pb = detail::probe(b, flux, mid);
    if (!pa.in_fan && !pb.in_fan) {
      acc += std::abs(pa.value - pb.value) * (hi - lo);
      continue;
    }
    if (pa.in_fan && pb.in_fan) continue;  // same flux: identical fan values
    // fan vs constant: the difference is strictly monotone, at most one root
    double d_lo = diff(lo + (hi - lo) * 1e-12);
    double d_hi = diff(hi - (hi - lo) * 1e-12);
    if (d_lo == 0.0 || d_hi == 0.0 || (d_lo > 0.0) == (d_hi > 0.0)) {
      acc += detail::gauss32([&](double xi) { return std::abs(diff(xi)); }, lo, hi);
      continue;
    }
    double rl = lo, rh = hi;
    for (int it = 0; it < 100 && rh - rl > 1e-15 * std::max(1.0, std::abs(rh)); ++it) {
      const double rm = 0.5 * (rl + rh);
      ((diff(rm) > 0.0) == (d_lo > 0.0) ? rl : rh) = rm;
    }
    const double root = 0.5 * (rl + rh);
    acc += detail::gauss32([&](double xi) { return std::abs(diff(xi)); }, lo, root);
    acc += detail::gauss32([&](double xi) { return std::abs(diff(xi)); }, root, hi);
  }
  return acc * t;
}

struct BoundParams {
  double h = 0.0;  // maximal jump of p across its discontinuities
  double n = 1.0;  // Lipschitz rate of the smooth part
  double t = 0.0;

  bool valid() const { return h >= 0.0 && n > 0.0 && t >= 0.0; }
};

/// Gronwall-type stability bound h/(2N) (exp(2Nt) - 1).
inline double exponential_bound(const BoundParams& bp) {
  if (!bp.valid()) throw std::invalid_argument("exponential_bound: need h >= 0, N > 0, t >= 0");
  if (bp.h == 0.0) return 0.0;  // keeps 0 * expm1(overflow) from going NaN
  return bp.h / (2.0 * bp.n) * (std::expm1(2.0 * bp.n * bp.t));
}

/// Wave-geometry bound on the L1 distance between the flux-minimizing and
/// flux-maximizing solutions with levels p_lo < p_hi, left datum rho_l and
/// right datum rho_crit: sum of the four slab areas swept by the differing
/// waves up to time t. Exact for the configuration it describes; an upper
/// bound 2t(p_hi - p_lo) + o(rho_hat gap) in general.
inline double linear_bound(double p_hi, double p_lo, double rho_l, double t,
                           const FluxModel& flux) {
  if (!(p_lo <= p_hi)) throw std::invalid_argument("linear_bound: need p_lo <= p_hi");
  const double hat_hi = flux.rho_hat(p_hi);    // congested state of the p_hi solution
  const double hat_lo = flux.rho_hat(p_lo);    // lower level: more congested
  const double check_hi = flux.rho_check(p_hi);
  const double check_lo = flux.rho_check(p_lo);
  const double fp_l = flux.prime(rho_l);
  const double lam = rho_l == hat_lo ? fp_l : flux.shock_speed(rho_l, hat_lo);
  const double mu_lo = flux.shock_speed(check_lo, flux.rho_crit());
  const double mu_hi = flux.shock_speed(check_hi, flux.rho_crit());
  const double t1 = (fp_l - lam) * (hat_lo - rho_l) * t;
  const double t2 = std::abs(fp_l) * (hat_lo - hat_hi) * t;
  const double t3 = (check_hi - check_lo) * mu_hi * t;
  const double t4 = (flux.rho_crit() - check_lo) * (mu_lo - mu_hi) * t;
  return t1 + t2 + t3 + t4;
}

/// Least-squares slope of log(distance) against log(gap).
inline double loglog_slope(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) throw std::invalid_argument("loglog_slope: need at least two points");
  double sx = 0.0, sy = 0.0;
  for (const auto& [g, d] : points) {
    if (!(g > 0.0) || !(d > 0.0))
      throw std::domain_error("loglog_slope: gaps and distances must be positive");
    sx += std::log(g);
    sy += std::log(d);
  }
  const double mx = sx / static_cast<double>(points.size());
  const double my = sy / static_cast<double>(points.size());
  double num = 0.0, den = 0.0;
  for (const auto& [g, d] : points) {
    num += (std::log(g) - mx) * (std::log(d) - my);
    den += (std::log(g) - mx) * (std::log(g) - mx);
  }
  if (den == 0.0) throw std::domain_error("loglog_slope: all gaps identical");
  return num / den;
}

/// Fastest and slowest local evacuation rates: exit fluxes of the two extreme
/// solvers. Equal components away from the non-unique cases.
inline std::pair<double, double> evacuation_flux_bounds(double rho_l, double rho_r,
                                                        const PiecewiseConstraint& p,
                                                        const FluxModel& flux) {
  return {exit_flux(solve_q(rho_l, rho_r, p, flux), flux),
          exit_flux(solve_p(rho_l, rho_r, p, flux), flux)};
}

/// Smallest N for which exponential_bound dominates every measured distance;
/// the bound is increasing in N, so the answer is found by bisection. Points
/// with t <= 0 cannot be dominated (the bound vanishes at t=0) and are
/// rejected.
inline double calibrate_rate(const std::vector<std::pair<double, double>>& distances, double h) {
  for (const auto& [t, d] : distances)
    if (t <= 0.0 && d > 0.0)
      throw std::invalid_argument("calibrate_rate: positive distance at t <= 0 is unbounded");
  const auto dominated = [&](double n) {
    for (const auto& [t, d] : distances)
      if (t > 0.0 && d > exponential_bound({h, n, t})) return false;
    return true;
  };
  double lo = 1e-9, hi = 1e-9;
  if (dominated(lo)) return lo;
  while (!dominated(hi)) {
    hi *= 2.0;
    if (hi > 1e12) throw std::domain_error("calibrate_rate: no finite rate dominates the data");
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (dominated(mid) ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace clwr
