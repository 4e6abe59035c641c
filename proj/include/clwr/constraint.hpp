#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

#include "clwr/flux.hpp"

namespace clwr {

inline constexpr double kWeightMassTol = 1e-10;  // required |integral of w - 1|

/// Piecewise-constant non-increasing capacity map p on [0, r_max]: level
/// levels[i] on (jumps[i-1], jumps[i]), strictly decreasing levels in
/// (0, f_max]. At a jump p is two-valued; only the one-sided limits exist.
class PiecewiseConstraint {
 public:
  PiecewiseConstraint(std::vector<double> jumps, std::vector<double> levels,
                      const FluxModel& flux)
      : jumps_(std::move(jumps)), levels_(std::move(levels)) {
    if (levels_.size() != jumps_.size() + 1)
      throw std::invalid_argument("constraint: need one more level than jumps");
    for (std::size_t i = 0; i + 1 < jumps_.size(); ++i)
      if (!(jumps_[i] < jumps_[i + 1]))
        throw std::invalid_argument("constraint: jumps must increase strictly");
    for (double xi : jumps_)
      if (!(xi > 0.0 && xi < flux.r_max()))
        throw std::invalid_argument("constraint: jumps must lie inside (0, r_max)");
    for (std::size_t i = 0; i + 1 < levels_.size(); ++i)
      if (!(levels_[i] > levels_[i + 1]))
        throw std::invalid_argument("constraint: levels must decrease strictly");
    if (!(levels_.back() > 0.0))
      throw std::invalid_argument("constraint: levels must be positive");
    if (levels_.front() > flux.f_max() + kFluxCompareTol)
      throw std::invalid_argument("constraint: levels must not exceed f_max");
  }

  static PiecewiseConstraint constant(double level, const FluxModel& flux) {
    return PiecewiseConstraint({}, {level}, flux);
  }

  /// Left limit p(xi-); p_minus(0) := levels[0].
  double level_minus(double xi) const {
    std::size_t i = 0;
    while (i < jumps_.size() && jumps_[i] < xi) ++i;
    return levels_[i];
  }

  /// Right limit p(xi+); p_plus(r_max) := levels[n].
  double level_plus(double xi) const {
    std::size_t i = 0;
    while (i < jumps_.size() && jumps_[i] <= xi) ++i;
    return levels_[i];
  }

  std::size_t n_jumps() const { return jumps_.size(); }
  double jump(std::size_t i) const { return jumps_[i]; }
  double level(std::size_t i) const { return levels_[i]; }
  const std::vector<double>& jumps() const { return jumps_; }
  const std::vector<double>& levels() const { return levels_; }

  /// Maximal jump size h = max_i (p_{i-1} - p_i); 0 when p is constant.
  double max_jump() const {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < levels_.size(); ++i)
      h = std::max(h, levels_[i] - levels_[i + 1]);
    return h;
  }

  /// Distance from x to the nearest jump (+inf when p has none).
  double distance_to_jump(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (double xi : jumps_) d = std::min(d, std::abs(x - xi));
    return d;
  }

  /// Index of the jump within tol of x, or npos.
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  std::size_t jump_near(double x, double tol) const {
    for (std::size_t i = 0; i < jumps_.size(); ++i)
      if (std::abs(x - jumps_[i]) <= tol) return i;
    return npos;
  }

 private:
  std::vector<double> jumps_;
  std::vector<double> levels_;
};

/// Averaging kernel w: non-negative, non-decreasing on [-i_w, 0], zero to the
/// left of -i_w, unit mass. The cumulative W(x) = integral of w over
/// [-i_w, x] is exact so that cell integrals carry no quadrature error.
class WeightKernel {
 public:
  using Evaluator = std::function<double(double)>;

  /// w(x) = 2 (x + i_w) / i_w^2 on (-i_w, 0].
  static WeightKernel affine(double i_w) {
    require_radius(i_w);
    return WeightKernel(
        i_w, [i_w](double x) { return 2.0 * (x + i_w) / (i_w * i_w); },
        [i_w](double x) { return (x + i_w) * (x + i_w) / (i_w * i_w); }, 2.0 / i_w);
  }

  /// w = 1 / i_w on (-i_w, 0].
  static WeightKernel uniform(double i_w) {
    require_radius(i_w);
    return WeightKernel(
        i_w, [i_w](double) { return 1.0 / i_w; }, [i_w](double x) { return (x + i_w) / i_w; },
        1.0 / i_w);
  }

  /// Piecewise-linear kernel through (position, weight) samples spanning
  /// [-i_w, 0]. The cumulative is the exact integral of the interpolant,
  /// accumulated with per-cell subdivision 8. Mass defects <= 1e-6 are
  /// renormalized (with a flag the caller may surface); larger ones throw.
  static WeightKernel tabulated(std::vector<double> xs, std::vector<double> ws);

  double support_radius() const { return i_w_; }
  double at_zero() const { return w_zero_minus_; }
  bool renormalized() const { return renormalized_; }

  double density(double x) const {
    if (x <= -i_w_ || x > 0.0) return 0.0;
    return w_(x);
  }

  /// W(x) = integral of w over [-i_w, min(x, 0)]; clamps outside the support.
  double cumulative(double x) const {
    if (x <= -i_w_) return 0.0;
    if (x >= 0.0) return 1.0;
    return cum_(x) * mass_scale_;
  }

  /// xi = integral of w * profile over the support, for a callable profile.
  /// Composite 8-point Gauss-Legendre on a subdivision of [-i_w, 0].
  double weighted_average(const std::function<double(double)>& profile,
                          int subdivisions = 256) const {
    static const double node[4] = {0.1834346424956498, 0.5255324099163290,
                                   0.7966664774136267, 0.9602898564975363};
    static const double wq[4] = {0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
                                 0.1012285362903763};
    double acc = 0.0;
    const double h = i_w_ / subdivisions;
    for (int c = 0; c < subdivisions; ++c) {
      const double a = -i_w_ + c * h, b = a + h;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int k = 0; k < 4; ++k) {
        const double xp = mid + half * node[k], xm = mid - half * node[k];
        acc += half * wq[k] * (density(xp) * profile(xp) + density(xm) * profile(xm));
      }
    }
    return acc;
  }

 private:
  WeightKernel(double i_w, Evaluator w, Evaluator cum, double w_zero)
      : i_w_(i_w), w_(std::move(w)), cum_(std::move(cum)), w_zero_minus_(w_zero) {
    validate();
  }

  static void require_radius(double i_w) {
    if (!(i_w > 0.0)) throw std::invalid_argument("weight: support radius must be positive");
  }

  void validate() {
    const double mass = cum_(0.0);
    const double defect = std::abs(mass - 1.0);
    if (defect > 1e-6) throw std::invalid_argument("weight: mass deviates from 1 beyond 1e-6");
    if (defect > kWeightMassTol) {
      mass_scale_ = 1.0 / mass;
      renormalized_ = true;
    }
    // monotone and non-negative on a coarse audit grid
    double prev = -1.0;
    for (int i = 0; i <= 256; ++i) {
      const double x = -i_w_ + i_w_ * i / 256.0;
      const double v = x == 0.0 ? w_zero_minus_ : density(x);
      if (v < -1e-12) throw std::invalid_argument("weight: negative density");
      if (v < prev - 1e-9) throw std::invalid_argument("weight: density must be non-decreasing");
      prev = v;
    }
  }

  double i_w_;
  Evaluator w_;
  Evaluator cum_;
  double w_zero_minus_;
  double mass_scale_ = 1.0;
  bool renormalized_ = false;
};

inline WeightKernel WeightKernel::tabulated(std::vector<double> xs, std::vector<double> ws) {
  if (xs.size() != ws.size() || xs.size() < 2)
    throw std::invalid_argument("weight table needs >= 2 samples");
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (!(xs[i] < xs[i + 1])) throw std::invalid_argument("weight table positions must increase");
  if (std::abs(xs.back()) > 1e-12)
    throw std::invalid_argument("weight table must end at position 0");
  const double i_w = -xs.front();
  require_radius(i_w);
  auto xs_p = std::make_shared<std::vector<double>>(std::move(xs));
  auto ws_p = std::make_shared<std::vector<double>>(std::move(ws));
  Evaluator w = [xs_p, ws_p](double x) {
    const auto& X = *xs_p;
    const auto& W = *ws_p;
    auto it = std::upper_bound(X.begin(), X.end(), x);
    if (it == X.begin()) return W.front();
    if (it == X.end()) return W.back();
    const std::size_t j = static_cast<std::size_t>(it - X.begin());
    const double s = (x - X[j - 1]) / (X[j] - X[j - 1]);
    return (1.0 - s) * W[j - 1] + s * W[j];
  };
  // trapezoid cumulative with per-cell subdivision 8; exact for the linear
  // interpolant, and the subdivision keeps partial-cell queries exact too
  auto cum_nodes = std::make_shared<std::vector<std::pair<double, double>>>();
  {
    const auto& X = *xs_p;
    double acc = 0.0;
    cum_nodes->emplace_back(X.front(), 0.0);
    for (std::size_t j = 0; j + 1 < X.size(); ++j) {
      const double h = (X[j + 1] - X[j]) / 8.0;
      for (int k = 0; k < 8; ++k) {
        const double a = X[j] + k * h;
        acc += 0.5 * (w(a) + w(a + h)) * h;
        cum_nodes->emplace_back(a + h, acc);
      }
    }
  }
  Evaluator cum = [cum_nodes, w](double x) {
    const auto& C = *cum_nodes;
    auto it = std::upper_bound(C.begin(), C.end(), x,
                               [](double v, const auto& n) { return v < n.first; });
    if (it == C.begin()) return 0.0;
    const auto& base = *(it - 1);
    const double v0 = w(base.first), v1 = w(x);
    return base.second + 0.5 * (v0 + v1) * (x - base.first);
  };
  return WeightKernel(i_w, std::move(w), std::move(cum), ws_p->back());
}

/// Exact xi for a piecewise-constant cell profile: cells[j] lives on
/// [x_min + j dx, x_min + (j+1) dx); integrates w over each overlap with the
/// support via the cumulative, so the only error is the profile's own.
inline double weighted_cell_average(const WeightKernel& w, const std::vector<double>& cells,
                                    double x_min, double dx) {
  double acc = 0.0;
  for (std::size_t j = 0; j < cells.size(); ++j) {
    const double a = x_min + j * dx;
    const double b = a + dx;
    if (b <= -w.support_radius()) continue;
    if (a >= 0.0) break;
    acc += cells[j] * (w.cumulative(b) - w.cumulative(a));
  }
  return acc;
}

/// V_max = 2 w(0-) f_max bounds |d xi/dt| along any entropy solution:
/// integrate w d(rho)/dt by parts; the boundary term and the dw integral are
/// each at most w(0-) f_max.
inline double xi_rate_bound(const FluxModel& flux, const WeightKernel& w) {
  return 2.0 * w.at_zero() * flux.f_max();
}

}  // namespace clwr
