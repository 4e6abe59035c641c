#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clwr/constraint.hpp"
#include "clwr/flux.hpp"

namespace clwr {

inline constexpr double kXiSnapTol = 1e-12;       // snap xi onto an exact jump of p
inline constexpr double kMassBalanceTol = 1e-10;  // allowed defect per time step

/// Uniform grid with the constrained interface pinned to a cell face.
struct Grid {
  double x_min = 0.0;
  double x_max = 0.0;
  double dx = 0.0;
  double dt = 0.0;
  int n_cells = 0;
  int constraint_interface = 0;  // face index of x=0 (faces 0..n_cells)

  static Grid make(double x_min, double x_max, double dx, double dt, const FluxModel& flux) {
    if (!(x_min < 0.0 && x_max > 0.0))
      throw std::invalid_argument("grid: domain must contain x=0 in its interior");
    if (!(dx > 0.0) || !(dt > 0.0)) throw std::invalid_argument("grid: dx and dt must be positive");
    const double len = x_max - x_min;
    const int n = static_cast<int>(std::lround(len / dx));
    if (n < 2 || std::abs(n * dx - len) > 1e-9 * len)
      throw std::invalid_argument("grid: dx must divide the domain evenly");
    const int iface = static_cast<int>(std::lround(-x_min / dx));
    if (std::abs(x_min + iface * dx) > 1e-12 * std::max(1.0, std::abs(x_min)))
      throw std::invalid_argument("grid: x=0 must coincide with a cell face");
    if (dt * flux.lipschitz() / dx > 0.5 + 1e-12)
      throw std::invalid_argument("grid: CFL number dt*max|f'|/dx exceeds 1/2");
    Grid g;
    g.x_min = x_min;
    g.x_max = x_max;
    g.dx = dx;
    g.dt = dt;
    g.n_cells = n;
    g.constraint_interface = iface;
    return g;
  }

  double center(int j) const { return x_min + (j + 0.5) * dx; }
  double face(int j) const { return x_min + j * dx; }
};

/// Cell averages plus the constraint bookkeeping of the step that produced
/// them. q_current stays in (0, f_max] on the non-local path; an exogenous
/// q(t) (red traffic light) may drive it to zero.
struct GridState {
  double t = 0.0;
  std::vector<double> cells;
  double q_current = 0.0;
  double xi_current = 0.0;
};

enum class Branch { plus, minus };

/// Externally prescribed constraint level, replacing the non-local feedback.
struct ExogenousQ {
  enum class Kind { none, traffic_light, table };
  Kind kind = Kind::none;
  double green_level = 0.25;  // traffic light: q on [2k, 2k+1) * phase_length
  double phase_length = 1.0;
  std::vector<double> times;   // table: q = levels[i] on [times[i], times[i+1])
  std::vector<double> levels;

  bool active() const { return kind != Kind::none; }

  double level_at(double t) const {
    switch (kind) {
      case Kind::none: break;
      case Kind::traffic_light: {
        const double phase = std::fmod(t, 2.0 * phase_length);
        return phase < phase_length ? green_level : 0.0;
      }
      case Kind::table: {
        if (times.empty() || t < times.front()) return levels.empty() ? 0.0 : levels.front();
        const auto it = std::upper_bound(times.begin(), times.end(), t);
        return levels[static_cast<std::size_t>(it - times.begin()) - 1];
      }
    }
    throw std::logic_error("exogenous q: no schedule");
  }
};

/// Exact-Riemann (Godunov) two-point numerical flux for concave f.
inline double godunov_flux(double rho_l, double rho_r, const FluxModel& flux) {
  if (rho_l <= rho_r) return std::min(flux.eval(rho_l), flux.eval(rho_r));
  if (rho_r <= flux.rho_crit() && flux.rho_crit() <= rho_l) return flux.f_max();
  return std::max(flux.eval(rho_l), flux.eval(rho_r));
}

/// Godunov flux capped by the active constraint level; used only at the x=0
/// face.
inline double constrained_flux(double rho_l, double rho_r, double q, const FluxModel& flux) {
  return std::min(godunov_flux(rho_l, rho_r, flux), q);
}

namespace detail {

struct StepInfo {
  double xi = 0.0;
  double q = 0.0;
  double exit_flux = 0.0;
  double left_flux = 0.0;
  double right_flux = 0.0;
};

inline GridState step_impl(const GridState& s, const Grid& g, double dt, const FluxModel& flux,
                           const PiecewiseConstraint& p, const WeightKernel& w, Branch branch,
                           const ExogenousQ& exo, StepInfo& info) {
  // the constraint is fully explicit: xi and q are frozen from the cells of
  // the previous step before any flux is computed
  double xi = weighted_cell_average(w, s.cells, g.x_min, g.dx);
  const std::size_t near = p.jump_near(xi, kXiSnapTol);
  if (near != PiecewiseConstraint::npos) xi = p.jump(near);
  const double q = exo.active() ? exo.level_at(s.t)
                                : (branch == Branch::plus ? p.level_plus(xi) : p.level_minus(xi));

  const int n = g.n_cells;
  std::vector<double> face_flux(n + 1);
  face_flux[0] = flux.eval(s.cells.front());  // outflow: ghost copies the edge cell
  face_flux[n] = flux.eval(s.cells.back());
  for (int j = 1; j < n; ++j) face_flux[j] = godunov_flux(s.cells[j - 1], s.cells[j], flux);
  face_flux[g.constraint_interface] =
      std::min(face_flux[g.constraint_interface], q);

  GridState out;
  out.t = s.t + dt;
  out.q_current = q;
  out.xi_current = xi;
  out.cells.resize(n);
  const double lam = dt / g.dx;
  for (int j = 0; j < n; ++j) out.cells[j] = s.cells[j] - lam * (face_flux[j + 1] - face_flux[j]);

  info = {xi, q, face_flux[g.constraint_interface], face_flux[0], face_flux[n]};
  return out;
}

}  // namespace detail

/// One conservative update: Godunov fluxes, the x=0 face capped by q computed
/// from the previous step's weighted average (or the exogenous schedule).
inline GridState step(const GridState& s, const Grid& g, const FluxModel& flux,
                      const PiecewiseConstraint& p, const WeightKernel& w,
                      Branch branch = Branch::plus, const ExogenousQ& exo = {}) {
  detail::StepInfo info;
  return detail::step_impl(s, g, g.dt, flux, p, w, branch, exo, info);
}

struct RunParams {
  Grid grid;
  std::function<double(double)> initial;  // sampled at cell centers
  double t_end = 1.0;
  int snapshot_stride = 0;  // 0: keep only initial and final profiles
  Branch branch = Branch::plus;
  ExogenousQ exogenous;
};

struct SeriesPoint {
  double t = 0.0;  // start of the step this point describes
  double xi = 0.0;
  double q = 0.0;
  double exit_flux = 0.0;
};

struct Trajectory {
  Grid grid;
  std::vector<GridState> snapshots;
  std::vector<SeriesPoint> series;  // one entry per time step
  double mass_defect = 0.0;

  const GridState& final_state() const { return snapshots.back(); }
};

/// Advance the scheme to t_end, recording per-step interface data and strided
/// profile snapshots. Enforces the maximum principle, the constraint cap at
/// the interface, and the discrete mass balance; violations identify the step.
inline Trajectory run(const RunParams& rp, const FluxModel& flux, const PiecewiseConstraint& p,
                      const WeightKernel& w) {
  const Grid& g = rp.grid;
  GridState s;
  s.t = 0.0;
  s.cells.resize(g.n_cells);
  for (int j = 0; j < g.n_cells; ++j) {
    s.cells[j] = rp.initial(g.center(j));
    if (!(s.cells[j] >= 0.0 && s.cells[j] <= flux.r_max()))
      throw std::invalid_argument("run: initial datum out of [0, r_max] at cell " +
                                  std::to_string(j));
  }
  s.xi_current = weighted_cell_average(w, s.cells, g.x_min, g.dx);
  s.q_current = rp.exogenous.active()
                    ? rp.exogenous.level_at(0.0)
                    : (rp.branch == Branch::plus ? p.level_plus(s.xi_current)
                                                 : p.level_minus(s.xi_current));

  Trajectory tr;
  tr.grid = g;
  tr.snapshots.push_back(s);
  const auto mass = [&](const GridState& state) {
    double m = 0.0;
    for (double c : state.cells) m += c;
    return m * g.dx;
  };
  const double mass0 = mass(s);
  double boundary_net = 0.0;  // integral of (inflow - outflow) over time

  int step_idx = 0;
  while (s.t < rp.t_end - 1e-12) {
    const double dt = std::min(g.dt, rp.t_end - s.t);
    detail::StepInfo info;
    GridState next = detail::step_impl(s, g, dt, flux, p, w, rp.branch, rp.exogenous, info);
    ++step_idx;

    const double slack = 1e-12;
    for (int j = 0; j < g.n_cells; ++j) {
      const double c = next.cells[j];
      if (!(c >= -slack && c <= flux.r_max() + slack))  // also rejects NaN
        throw std::runtime_error("run: cell " + std::to_string(j) + " left [0, r_max] at step " +
                                 std::to_string(step_idx));
      next.cells[j] = std::clamp(c, 0.0, flux.r_max());
    }
    if (info.exit_flux > info.q + 1e-15)
      throw std::runtime_error("run: interface flux exceeds the constraint at step " +
                               std::to_string(step_idx));

    boundary_net += dt * (info.left_flux - info.right_flux);
    tr.series.push_back({s.t, info.xi, info.q, info.exit_flux});
    s = std::move(next);
    if (rp.snapshot_stride > 0 && step_idx % rp.snapshot_stride == 0) tr.snapshots.push_back(s);
  }
  if (tr.snapshots.back().t != s.t) tr.snapshots.push_back(s);

  tr.mass_defect = std::abs(mass(s) - mass0 - boundary_net);
  if (tr.mass_defect > kMassBalanceTol * std::max(1, step_idx))
    throw std::runtime_error("run: mass balance defect " + std::to_string(tr.mass_defect) +
                             " after " + std::to_string(step_idx) + " steps");
  return tr;
}

}  // namespace clwr
