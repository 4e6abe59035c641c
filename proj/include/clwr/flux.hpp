#pragma once

// math.h must precede the boost interpolator: cubic_hermite.hpp calls
// unqualified isnan, which g++ 11 only resolves through the C header's global
// declaration.
#include <math.h>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clwr {

inline constexpr double kInverseTol = 1e-12;      // bisection width for branch inverses
inline constexpr double kFluxCompareTol = 1e-10;  // flux comparisons in the case classifier
inline constexpr int kValidationGridSize = 1024;

/// Strictly concave flux on [0, r_max] with f(0) = f(r_max) = 0 and a unique
/// interior maximiser rho_crit. Immutable after construction; all queries are
/// pure, so instances can be shared freely across threads.
class FluxModel {
 public:
  using Evaluator = std::function<double(double)>;

  /// f(rho) = rho (1 - rho) on [0, 1].
  static FluxModel quadratic() {
    return FluxModel([](double r) { return r * (1.0 - r); },
                     [](double r) { return 1.0 - 2.0 * r; }, 1.0, 0.5);
  }

  /// User-supplied flux; pass nullptr for f_prime to fall back on central
  /// finite differences with step h_fd.
  static FluxModel custom(Evaluator f, Evaluator f_prime, double r_max) {
    return FluxModel(std::move(f), std::move(f_prime), r_max, -1.0);
  }

  /// Monotone-cubic interpolant of (density, flow) samples. The samples must
  /// describe a strictly concave bell: first/last flows zero, single interior
  /// maximum. Violations on the validation grid are rejected, not smoothed.
  static FluxModel tabulated(std::vector<double> densities, std::vector<double> flows) {
    if (densities.size() != flows.size() || densities.size() < 4)
      throw std::invalid_argument("flux table needs >= 4 (density, flow) samples");
    if (densities.front() != 0.0)
      throw std::invalid_argument("flux table must start at density 0");
    const double r_max = densities.back();
    // Fritsch-Carlson derivatives: weighted harmonic means in the interior,
    // clamped three-point formulas at the ends. Unlike the library's pchip
    // endpoint rule this keeps the interpolant concave for concave samples.
    std::vector<double> d = monotone_derivatives(densities, flows);
    auto spline =
        std::make_shared<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
            std::move(densities), std::move(flows), std::move(d));
    Evaluator f = [spline](double r) { return (*spline)(r); };
    Evaluator fp = [spline](double r) { return spline->prime(r); };
    return FluxModel(std::move(f), std::move(fp), r_max, -1.0);
  }

  double r_max() const { return r_max_; }
  double rho_crit() const { return rho_crit_; }
  double f_max() const { return f_max_; }
  double lipschitz() const { return lipschitz_; }

  double eval(double rho) const {
    require_density(rho, "eval");
    return f_(clamp_density(rho));
  }

  double prime(double rho) const {
    require_density(rho, "prime");
    rho = clamp_density(rho);
    if (f_prime_) return f_prime_(rho);
    const double h = h_fd_;
    const double lo = std::max(0.0, rho - h);
    const double hi = std::min(r_max_, rho + h);
    return (f_(hi) - f_(lo)) / (hi - lo);
  }

  /// Rankine-Hugoniot speed of the jump between two states.
  double shock_speed(double rho_a, double rho_b) const {
    require_density(rho_a, "shock_speed");
    require_density(rho_b, "shock_speed");
    if (rho_a == rho_b) throw std::invalid_argument("shock_speed: degenerate jump");
    return (eval(rho_a) - eval(rho_b)) / (rho_a - rho_b);
  }

  /// Congested-branch inverse: f(rho_hat(q)) = q with rho_hat >= rho_crit.
  double rho_hat(double q) const {
    require_flow(q, "rho_hat");
    q = std::min(q, f_max_);
    double lo = rho_crit_, hi = r_max_;  // f decreasing on [rho_crit, r_max]
    while (hi - lo > kInverseTol) {
      const double mid = 0.5 * (lo + hi);
      (f_(mid) > q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Free-branch inverse: f(rho_check(q)) = q with rho_check <= rho_crit.
  double rho_check(double q) const {
    require_flow(q, "rho_check");
    q = std::min(q, f_max_);
    double lo = 0.0, hi = rho_crit_;  // f increasing on [0, rho_crit]
    while (hi - lo > kInverseTol) {
      const double mid = 0.5 * (lo + hi);
      (f_(mid) < q ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

  /// Unique rho with f'(rho) = s; needed to sample rarefaction fans.
  double char_speed_inverse(double s) const {
    const double slack = 1e-9;
    if (s > prime(0.0) + slack || s < prime(r_max_) - slack)
      throw std::domain_error("char_speed_inverse: speed outside [f'(R), f'(0)]");
    double lo = 0.0, hi = r_max_;  // f' strictly decreasing
    while (hi - lo > kInverseTol) {
      const double mid = 0.5 * (lo + hi);
      (prime(mid) > s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  FluxModel(Evaluator f, Evaluator fp, double r_max, double rho_crit_hint)
      : f_(std::move(f)), f_prime_(std::move(fp)), r_max_(r_max) {
    if (!(r_max_ > 0.0)) throw std::invalid_argument("flux: r_max must be positive");
    rho_crit_ = rho_crit_hint >= 0.0 ? rho_crit_hint : golden_section_max();
    f_max_ = f_(rho_crit_);
    lipschitz_ = 0.0;
    for (int i = 0; i <= kValidationGridSize; ++i) {
      const double x = r_max_ * i / kValidationGridSize;
      lipschitz_ = std::max(lipschitz_, std::abs(prime_raw(x)));
    }
    validate();
  }

  double prime_raw(double rho) const {
    if (f_prime_) return f_prime_(rho);
    const double h = h_fd_;
    const double lo = std::max(0.0, rho - h);
    const double hi = std::min(r_max_, rho + h);
    return (f_(hi) - f_(lo)) / (hi - lo);
  }

  static std::vector<double> monotone_derivatives(const std::vector<double>& x,
                                                  const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), s(n - 1), d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      if (!(h[i] > 0.0)) throw std::invalid_argument("flux table: densities must increase");
      s[i] = (y[i + 1] - y[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (s[i - 1] * s[i] <= 0.0) {
        d[i] = 0.0;  // local extremum or flat: flatten to stay monotone
      } else {
        const double w1 = 2.0 * h[i] + h[i - 1];
        const double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / s[i - 1] + w2 / s[i]);
      }
    }
    const auto endpoint = [](double h0, double h1, double s0, double s1) {
      double dd = ((2.0 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
      if (dd * s0 <= 0.0) return 0.0;
      if (s0 * s1 <= 0.0 && std::abs(dd) > 3.0 * std::abs(s0)) return 3.0 * s0;
      return dd;
    };
    d.front() = endpoint(h[0], h[1], s[0], s[1]);
    d.back() = endpoint(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    return d;
  }

  double golden_section_max() const {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = r_max_;
    while (b - a > 1e-12) {
      const double c = b - gr * (b - a);
      const double d = a + gr * (b - a);
      if (f_(c) > f_(d))
        b = d;
      else
        a = c;
    }
    return 0.5 * (a + b);
  }

  void validate() const {
    const double eps_f = 1e-9;
    if (std::abs(f_(0.0)) > eps_f || std::abs(f_(r_max_)) > eps_f)
      throw std::invalid_argument("flux: f(0) and f(r_max) must vanish");
    if (!(f_max_ > 0.0)) throw std::invalid_argument("flux: vanishing maximum");
    if (!(rho_crit_ > 0.0 && rho_crit_ < r_max_))
      throw std::invalid_argument("flux: maximiser must be interior");
    const int n = kValidationGridSize;
    const double dx = r_max_ / n;
    for (int i = 1; i < n; ++i) {
      const double x = i * dx;
      // strict concavity: negative second difference everywhere on the grid
      if (f_(x - dx) - 2.0 * f_(x) + f_(x + dx) >= 0.0)
        throw std::invalid_argument("flux: not strictly concave on validation grid");
      // strict unimodality: f' keeps the sign of (rho_crit - x) away from the peak
      if (std::abs(x - rho_crit_) > dx && prime_raw(x) * (rho_crit_ - x) <= 0.0)
        throw std::invalid_argument("flux: not strictly unimodal on validation grid");
    }
  }

  void require_density(double rho, const char* who) const {
    if (rho < -kInverseTol || rho > r_max_ + kInverseTol)
      throw std::domain_error(std::string(who) + ": density outside [0, r_max]");
  }

  void require_flow(double q, const char* who) const {
    if (q < -kInverseTol || q > f_max_ + kInverseTol)
      throw std::domain_error(std::string(who) + ": flow outside [0, f_max]");
  }

  double clamp_density(double rho) const { return std::clamp(rho, 0.0, r_max_); }

  Evaluator f_;
  Evaluator f_prime_;
  double r_max_ = 1.0;
  double rho_crit_ = 0.5;
  double f_max_ = 0.25;
  double lipschitz_ = 1.0;
  double h_fd_ = 1e-6;
};

}  // namespace clwr
