#pragma once

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "clwr/analysis.hpp"
#include "clwr/config.hpp"
#include "clwr/constrained.hpp"
#include "clwr/csv.hpp"
#include "clwr/entropy.hpp"
#include "clwr/fvm.hpp"

namespace clwr {

inline const char* to_string(WaveKind k) {
  switch (k) {
    case WaveKind::shock: return "shock";
    case WaveKind::rarefaction: return "rarefaction";
    case WaveKind::nonclassical_shock: return "nonclassical";
  }
  return "?";
}

namespace cli {

inline FluxModel make_flux(const Config& cfg) {
  const std::string kind = cfg.str("flux.kind", "quadratic");
  if (kind == "quadratic") return FluxModel::quadratic();
  if (kind == "tabulated")
    return FluxModel::tabulated(cfg.list("flux.densities"), cfg.list("flux.flows"));
  throw ConfigError("flux.kind must be quadratic|tabulated, got: " + kind);
}

inline WeightKernel make_kernel(const Config& cfg) {
  const std::string kind = cfg.str("weight.kind", "affine");
  const double support = cfg.num("weight.support", 1.0);
  if (kind == "affine") return WeightKernel::affine(support);
  if (kind == "uniform") return WeightKernel::uniform(support);
  throw ConfigError("weight.kind must be affine|uniform, got: " + kind);
}

inline PiecewiseConstraint make_constraint(const Config& cfg, const FluxModel& flux) {
  const std::vector<double> jumps =
      cfg.has("constraint.jumps") ? cfg.list("constraint.jumps") : std::vector<double>{};
  return PiecewiseConstraint(jumps, cfg.list("constraint.levels"), flux);
}

inline Grid make_grid(const Config& cfg, const FluxModel& flux) {
  return Grid::make(cfg.num("grid.x_min"), cfg.num("grid.x_max"), cfg.num("grid.dx"),
                    cfg.num("grid.dt"), flux);
}

inline Branch make_branch(const Config& cfg) {
  const std::string b = cfg.str("scheme.branch", "plus");
  if (b == "plus") return Branch::plus;
  if (b == "minus") return Branch::minus;
  throw ConfigError("scheme.branch must be plus|minus, got: " + b);
}

inline ExogenousQ make_exogenous(const Config& cfg) {
  ExogenousQ exo;
  const std::string kind = cfg.str("exogenous_q.kind", "none");
  if (kind == "none") return exo;
  if (kind == "traffic_light") {
    exo.kind = ExogenousQ::Kind::traffic_light;
    exo.green_level = cfg.num("exogenous_q.green_level", 0.25);
    exo.phase_length = cfg.num("exogenous_q.phase_length", 1.0);
    return exo;
  }
  if (kind == "table") {
    exo.kind = ExogenousQ::Kind::table;
    exo.times = cfg.list("exogenous_q.times");
    exo.levels = cfg.list("exogenous_q.levels");
    if (exo.times.size() != exo.levels.size())
      throw ConfigError("exogenous_q.times and exogenous_q.levels must have equal length");
    return exo;
  }
  throw ConfigError("exogenous_q.kind must be none|traffic_light|table, got: " + kind);
}

inline std::function<double(double)> make_initial(const Config& cfg) {
  const std::string kind = cfg.str("init.kind", "riemann");
  if (kind == "riemann") {
    const double rho_l = cfg.num("init.rho_l"), rho_r = cfg.num("init.rho_r");
    return [=](double x) { return x < 0.0 ? rho_l : rho_r; };
  }
  if (kind == "profile") {
    const std::vector<double> xs = cfg.list("init.xs"), vs = cfg.list("init.values");
    if (xs.size() != vs.size() || xs.size() < 2)
      throw ConfigError("init.xs and init.values must have equal length >= 2");
    for (std::size_t i = 0; i + 1 < xs.size(); ++i)
      if (!(xs[i] < xs[i + 1])) throw ConfigError("init.xs must be strictly increasing");
    return [xs, vs](double x) {
      if (x <= xs.front()) return vs.front();
      if (x >= xs.back()) return vs.back();
      const auto it = std::upper_bound(xs.begin(), xs.end(), x);
      const std::size_t i = static_cast<std::size_t>(it - xs.begin());
      const double a = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
      return vs[i - 1] + a * (vs[i] - vs[i - 1]);
    };
  }
  throw ConfigError("init.kind must be riemann|profile, got: " + kind);
}

inline RunParams make_run_params(const Config& cfg, const FluxModel& flux) {
  RunParams rp;
  rp.grid = make_grid(cfg, flux);
  rp.initial = make_initial(cfg);
  rp.t_end = cfg.num("run.t_end", 1.0);
  rp.snapshot_stride = cfg.integer("run.snapshot_stride", 0);
  rp.branch = make_branch(cfg);
  rp.exogenous = make_exogenous(cfg);
  if (!(rp.t_end > 0.0)) throw ConfigError("run.t_end must be positive");
  if (rp.snapshot_stride < 0) throw ConfigError("run.snapshot_stride must be >= 0");
  return rp;
}

/// Output directory: CLWR_OUT env wins over output.dir, default "out".
inline std::filesystem::path out_dir(const Config& cfg) {
  const char* env = std::getenv("CLWR_OUT");
  const std::filesystem::path dir = env != nullptr ? env : cfg.str("output.dir", "out");
  std::filesystem::create_directories(dir);
  return dir;
}

// levels straddled by the datum: the jump nearest to rho_l, or a zero gap on
// a constant constraint
inline std::pair<double, double> straddled_levels(const PiecewiseConstraint& p, double rho_l) {
  if (p.n_jumps() == 0) return {p.level(0), p.level(0)};
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.n_jumps(); ++i)
    if (std::abs(p.jump(i) - rho_l) < std::abs(p.jump(best) - rho_l)) best = i;
  return {p.level(best), p.level(best + 1)};
}

inline void cmd_riemann(const Config& cfg, bool enumerate_all) {
  const FluxModel flux = make_flux(cfg);
  const WeightKernel kernel = make_kernel(cfg);
  const PiecewiseConstraint p = make_constraint(cfg, flux);
  const double rho_l = cfg.num("init.rho_l"), rho_r = cfg.num("init.rho_r");
  const Branch branch = make_branch(cfg);
  if (cfg.str("init.kind", "riemann") != "riemann")
    throw ConfigError("riemann subcommand needs init.kind = riemann");

  const RiemannCase tag = classify(rho_l, rho_r, p, flux);
  const ConstrainedSolution sol = branch == Branch::plus ? solve_p(rho_l, rho_r, p, flux)
                                                         : solve_q(rho_l, rho_r, p, flux);
  const double horizon = validity_horizon(sol, rho_l, p, kernel, flux);

  const std::filesystem::path dir = out_dir(cfg);
  const std::string label = cfg.str("output.label", "riemann");

  CsvFile waves(dir / (label + "_waves.csv"));
  waves.embed_config(cfg);
  waves.comment("tag = " + std::string(to_string(tag)));
  waves.comment("horizon = " + fmt12(horizon));
  waves.header({"kind", "left", "right", "speed_lo", "speed_hi"});
  for (const Wave& w : sol.solution.waves)
    waves.row(to_string(w.kind), w.left, w.right, w.speed_lo, w.speed_hi);

  CsvFile sols(dir / (label + "_solutions.csv"));
  sols.embed_config(cfg);
  sols.comment("tag = " + std::string(to_string(tag)));
  sols.header({"solution", "classical", "p_bar", "exit_flux", "horizon"});
  const std::vector<ConstrainedSolution> all =
      enumerate_all ? enumerate_solutions(rho_l, rho_r, p, flux)
                    : std::vector<ConstrainedSolution>{sol};
  for (std::size_t i = 0; i < all.size(); ++i) {
    const ConstrainedSolution& cs = all[i];
    sols.row(static_cast<int>(i), cs.classical ? "yes" : "no",
             cs.p_bar ? fmt12(*cs.p_bar) : std::string(), exit_flux(cs, flux),
             validity_horizon(cs, rho_l, p, kernel, flux));
  }

  // default sample time: half the horizon, capped at 1; a pathological datum
  // has horizon 0 and then no default profile can be sampled
  const double t_sample = cfg.num("output.sample_time", std::min(1.0, 0.5 * horizon));
  if (cfg.has("output.sample_time")) {
    if (!(t_sample > 0.0)) throw ConfigError("output.sample_time must be positive");
    if (!(t_sample < horizon))
      throw ConfigError("output.sample_time must stay below the validity horizon " +
                        fmt12(horizon));
  } else if (!(t_sample > 0.0)) {
    return;
  }
  const int n = cfg.integer("output.n_samples", 400);
  if (n < 2) throw ConfigError("output.n_samples must be >= 2");
  const double x_min = cfg.num("grid.x_min"), x_max = cfg.num("grid.x_max");
  if (!(x_min < 0.0 && x_max > 0.0)) throw ConfigError("sample window must contain x = 0");

  CsvFile prof(dir / (label + "_profile.csv"));
  prof.embed_config(cfg);
  prof.comment("t = " + fmt12(t_sample));
  prof.header({"x", "rho"});
  const double h = (x_max - x_min) / n;
  for (int j = 0; j < n; ++j) {
    const double x = x_min + (j + 0.5) * h;
    prof.row(x, evaluate(sol.solution, flux, x / t_sample));
  }
}

inline void write_profile(const std::filesystem::path& path, const Config& cfg, const Grid& g,
                          const GridState& s) {
  CsvFile out(path);
  out.embed_config(cfg);
  out.comment("t = " + fmt12(s.t));
  out.comment("xi = " + fmt12(s.xi_current));
  out.comment("q = " + fmt12(s.q_current));
  out.header({"x", "rho"});
  for (int j = 0; j < g.n_cells; ++j) out.row(g.center(j), s.cells[j]);
}

inline void cmd_simulate(const Config& cfg) {
  const FluxModel flux = make_flux(cfg);
  const WeightKernel kernel = make_kernel(cfg);
  const PiecewiseConstraint p = make_constraint(cfg, flux);
  const RunParams rp = make_run_params(cfg, flux);

  const Trajectory tr = run(rp, flux, p, kernel);

  const std::filesystem::path dir = out_dir(cfg);
  const std::string label = cfg.str("output.label", "simulate");

  CsvFile series(dir / (label + "_series.csv"));
  series.embed_config(cfg);
  series.comment("mass_defect = " + fmt12(tr.mass_defect));
  series.header({"t", "xi", "q", "exit_flux"});
  for (const SeriesPoint& pt : tr.series) series.row(pt.t, pt.xi, pt.q, pt.exit_flux);

  write_profile(dir / (label + "_profile.csv"), cfg, tr.grid, tr.snapshots.back());
  if (rp.snapshot_stride > 0) {
    for (std::size_t k = 0; k < tr.snapshots.size(); ++k) {
      char idx[16];
      std::snprintf(idx, sizeof idx, "%05zu", k);
      write_profile(dir / (label + "_snap" + idx + ".csv"), cfg, tr.grid, tr.snapshots[k]);
    }
  }
}

inline void cmd_compare(const Config& cfg) {
  const FluxModel flux = make_flux(cfg);
  const WeightKernel kernel = make_kernel(cfg);
  const PiecewiseConstraint p = make_constraint(cfg, flux);
  const std::string mode = cfg.str("compare.mode", "exact");
  const std::vector<double> times = cfg.list("output.times");
  for (double t : times)
    if (!(t > 0.0)) throw ConfigError("output.times must be positive");

  const std::filesystem::path dir = out_dir(cfg);
  const std::string label = cfg.str("output.label", "compare");
  CsvFile out(dir / (label + "_distances.csv"));
  out.embed_config(cfg);

  std::vector<std::pair<double, double>> measured;
  const double rho_l = cfg.num("init.rho_l");
  const auto [p_hi, p_lo] = straddled_levels(p, rho_l);

  if (mode == "exact") {
    const double rho_r = cfg.num("init.rho_r");
    const ConstrainedSolution lo = solve_q(rho_l, rho_r, p, flux);
    const ConstrainedSolution hi = solve_p(rho_l, rho_r, p, flux);
    for (double t : times) measured.emplace_back(t, l1_distance(lo.solution, hi.solution, flux, t));
  } else if (mode == "fv") {
    RunParams rp = make_run_params(cfg, flux);
    rp.snapshot_stride = 1;
    rp.t_end = *std::max_element(times.begin(), times.end());
    const Trajectory ta = run(rp, flux, p, kernel);
    RunParams rpb = rp;
    const double rho_l_b = cfg.num("compare.rho_l_b");
    const double rho_r = cfg.num("init.rho_r");
    rpb.initial = [=](double x) { return x < 0.0 ? rho_l_b : rho_r; };
    const Trajectory tb = run(rpb, flux, p, kernel);
    const Interval iv{rp.grid.x_min, rp.grid.x_max};
    for (double t : times) {
      std::size_t k = 0;
      for (std::size_t i = 1; i < ta.snapshots.size(); ++i)
        if (std::abs(ta.snapshots[i].t - t) < std::abs(ta.snapshots[k].t - t)) k = i;
      measured.emplace_back(ta.snapshots[k].t,
                            l1_distance(make_profile(ta.grid, ta.snapshots[k]),
                                        make_profile(tb.grid, tb.snapshots[k]), iv));
    }
  } else {
    throw ConfigError("compare.mode must be exact|fv, got: " + mode);
  }

  const double rate = calibrate_rate(measured, p_hi - p_lo);
  out.comment("mode = " + mode);
  out.comment("p_hi = " + fmt12(p_hi));
  out.comment("p_lo = " + fmt12(p_lo));
  out.comment("calibrated_rate = " + fmt12(rate));
  out.header({"t", "distance", "bound_linear", "bound_exponential"});
  for (const auto& [t, d] : measured)
    out.row(t, d, linear_bound(p_hi, p_lo, rho_l, t, flux),
            exponential_bound({p_hi - p_lo, rate, t}));
}

inline void cmd_sweep(const Config& cfg, int jobs) {
  if (jobs < 1) throw ConfigError("--jobs must be >= 1");
  const std::vector<double> p2s = cfg.list("sweep.p2");
  const std::vector<double> base_levels = cfg.list("constraint.levels");
  if (base_levels.size() < 2)
    throw ConfigError("sweep needs a constraint with at least two levels");
  const double rho_l_a = cfg.num("sweep.rho_l_a");
  const double rho_l_b = cfg.num("sweep.rho_l_b");
  const double p1 = base_levels[base_levels.size() - 2];
  for (double p2 : p2s)
    if (!(p2 < p1)) throw ConfigError("sweep.p2 entries must stay below the level above");

  struct Row {
    double p2, gap, dist, lin, expo;
  };
  std::vector<Row> rows(p2s.size());
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  bool config_fault = false;
  std::string error;
  std::mutex error_mtx;

  const auto worker = [&, cfg]() {  // each worker owns a config clone
    for (std::size_t i = next.fetch_add(1); i < p2s.size(); i = next.fetch_add(1)) {
      if (failed.load()) return;
      try {
        Config local = cfg;
        std::vector<double> levels = base_levels;
        levels.back() = p2s[i];
        std::string joined;
        for (double v : levels) joined += (joined.empty() ? "" : " ") + fmt12(v);
        local.set("constraint.levels", joined);
        local.set("init.rho_l", fmt12(rho_l_a));

        const FluxModel flux = make_flux(local);
        const WeightKernel kernel = make_kernel(local);
        const PiecewiseConstraint p = make_constraint(local, flux);
        RunParams rp = make_run_params(local, flux);
        const double rho_r = local.num("init.rho_r");
        rp.initial = [=](double x) { return x < 0.0 ? rho_l_a : rho_r; };
        const Trajectory ta = run(rp, flux, p, kernel);
        rp.initial = [=](double x) { return x < 0.0 ? rho_l_b : rho_r; };
        const Trajectory tb = run(rp, flux, p, kernel);

        const double dist =
            l1_distance(make_profile(ta.grid, ta.snapshots.back()),
                        make_profile(tb.grid, tb.snapshots.back()),
                        {rp.grid.x_min, rp.grid.x_max});
        const double gap = p1 - p2s[i];
        rows[i] = {p2s[i], gap, dist,
                   linear_bound(p1, p2s[i], rho_l_a, rp.t_end, flux),
                   exponential_bound({gap, local.num("sweep.rate", 1.0), rp.t_end})};
      } catch (const std::exception& e) {
        const std::scoped_lock lock(error_mtx);
        failed.store(true);
        if (error.empty()) {
          error = e.what();
          config_fault = dynamic_cast<const ConfigError*>(&e) != nullptr ||
                         dynamic_cast<const std::invalid_argument*>(&e) != nullptr;
        }
      }
    }
  };

  std::vector<std::thread> pool;
  const std::size_t n_workers = std::min<std::size_t>(jobs, p2s.size());
  for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (std::thread& th : pool) th.join();
  if (failed.load()) {
    if (config_fault) throw ConfigError("sweep point failed: " + error);
    throw std::runtime_error("sweep point failed: " + error);
  }

  std::vector<std::pair<double, double>> fit;
  for (const Row& r : rows) fit.emplace_back(r.gap, r.dist);

  const std::filesystem::path dir = out_dir(cfg);
  const std::string label = cfg.str("output.label", "sweep");
  CsvFile out(dir / (label + "_sweep.csv"));
  out.embed_config(cfg);
  out.comment("slope = " + fmt12(loglog_slope(fit)));
  out.header({"p2", "gap", "l1_distance", "bound_linear", "bound_exponential"});
  for (const Row& r : rows) out.row(r.p2, r.gap, r.dist, r.lin, r.expo);
}

}  // namespace cli
}  // namespace clwr
