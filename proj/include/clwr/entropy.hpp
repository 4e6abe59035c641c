#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "clwr/flux.hpp"
#include "clwr/fvm.hpp"

namespace clwr {

struct EntropyOptions {
  /// The constraint contributes 2 [1 - q(t)/f_max] f(k) phi(t, 0); switching
  /// it off exposes the entropy deficit of the nonclassical shock.
  bool include_boundary_term = true;
  int x_stride = 8;  // tent half-width in cells; centers are spaced one half-width
  int t_stride = 8;  // same in steps
};

namespace detail {

// integral of the tent max(0, 1 - |s - c|/h) over (-inf, u]
inline double tent_cum(double c, double h, double u) {
  const double v = u - c;
  if (v <= -h) return 0.0;
  if (v <= 0.0) return (v + h) * (v + h) / (2.0 * h);
  if (v <= h) return 0.5 * h + v - v * v / (2.0 * h);
  return h;
}

inline double tent_val(double c, double h, double s) {
  return std::max(0.0, 1.0 - std::abs(s - c) / h);
}

}  // namespace detail

/// Kruzhkov residual of the piecewise-constant space-time reconstruction of a
/// trajectory, tested against a family of tent functions and the given
/// entropy constants; returns the most negative value found. The trajectory
/// must carry a snapshot for every step (snapshot_stride = 1).
inline double check_entropy(const Trajectory& tr, const FluxModel& flux,
                            const std::vector<double>& k_samples,
                            const EntropyOptions& opt = {}) {
  const Grid& g = tr.grid;
  const std::size_t n_steps = tr.series.size();
  if (tr.snapshots.size() != n_steps + 1)
    throw std::invalid_argument("check_entropy: needs a stride-1 trajectory");
  if (n_steps == 0) return 0.0;

  const double f_max = flux.f_max();
  const double t_end = tr.snapshots.back().t;
  const double hx = opt.x_stride * g.dx;
  const double ht = opt.t_stride * g.dt;
  if (2.0 * ht > t_end) throw std::invalid_argument("check_entropy: tent taller than the run");

  // tent centers: multiples of the half-widths, pinned so x=0 is a center
  std::vector<double> x_centers, t_centers;
  for (double xc = std::ceil((g.x_min + hx) / hx) * hx; xc <= g.x_max - hx + 1e-12; xc += hx)
    x_centers.push_back(xc);
  for (double tc = ht; tc <= t_end - ht + 1e-12; tc += ht) t_centers.push_back(tc);

  // time grid is uniform except possibly a short final step
  std::vector<double> t_nodes(n_steps + 1);
  for (std::size_t n = 0; n <= n_steps; ++n) t_nodes[n] = tr.snapshots[n].t;

  double worst = 0.0;
  for (const double k : k_samples) {
    const double fk = flux.eval(k);
    for (const double xc : x_centers) {
      // cells overlapping the tent support
      const int j_lo = std::max(0, static_cast<int>(std::floor((xc - hx - g.x_min) / g.dx)));
      const int j_hi =
          std::min(g.n_cells - 1, static_cast<int>(std::ceil((xc + hx - g.x_min) / g.dx)));
      for (const double tc : t_centers) {
        const std::size_t n_lo =
            static_cast<std::size_t>(std::max(0.0, std::floor((tc - ht) / g.dt)));
        const std::size_t n_hi =
            std::min(n_steps - 1, static_cast<std::size_t>(std::ceil((tc + ht) / g.dt)));

        double res = 0.0;
        for (std::size_t n = n_lo; n <= n_hi; ++n) {
          const double dtri_t = detail::tent_val(tc, ht, t_nodes[n + 1]) -
                                detail::tent_val(tc, ht, t_nodes[n]);
          const double slab_t = detail::tent_cum(tc, ht, t_nodes[n + 1]) -
                                detail::tent_cum(tc, ht, t_nodes[n]);
          const std::vector<double>& cells = tr.snapshots[n].cells;
          for (int j = j_lo; j <= j_hi; ++j) {
            const double rho = cells[j];
            const double cell_x = detail::tent_cum(xc, hx, g.face(j + 1)) -
                                  detail::tent_cum(xc, hx, g.face(j));
            const double dtri_x =
                detail::tent_val(xc, hx, g.face(j + 1)) - detail::tent_val(xc, hx, g.face(j));
            const double sgn = rho > k ? 1.0 : (rho < k ? -1.0 : 0.0);
            res += std::abs(rho - k) * cell_x * dtri_t;
            res += sgn * (flux.eval(rho) - fk) * dtri_x * slab_t;
          }
          if (opt.include_boundary_term) {
            const double phi0 = detail::tent_val(xc, hx, 0.0);
            if (phi0 > 0.0)
              res += 2.0 * std::max(0.0, 1.0 - tr.series[n].q / f_max) * fk * phi0 * slab_t;
          }
        }
        worst = std::min(worst, res);
      }
    }
  }
  return worst;
}

}  // namespace clwr
