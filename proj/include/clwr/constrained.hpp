#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "clwr/classical.hpp"
#include "clwr/constraint.hpp"
#include "clwr/flux.hpp"

namespace clwr {

/// Case partition of the data plane [0,R]^2 for a given constraint. C-tags
/// admit only the classical solution, N-tags only a nonclassical one; the
/// remaining tags mark data with several coexisting solutions (possible only
/// when rho_l sits exactly on a jump of p).
enum class RiemannCase {
  C1, C2, C3, C4, C5,
  N1, N2, N3, N4a, N4b, N5a, N5b,
  CN2, CN3, NNN4, CNN5, NNN5,
};

inline const char* to_string(RiemannCase c) {
  switch (c) {
    case RiemannCase::C1: return "C1";
    case RiemannCase::C2: return "C2";
    case RiemannCase::C3: return "C3";
    case RiemannCase::C4: return "C4";
    case RiemannCase::C5: return "C5";
    case RiemannCase::N1: return "N1";
    case RiemannCase::N2: return "N2";
    case RiemannCase::N3: return "N3";
    case RiemannCase::N4a: return "N4a";
    case RiemannCase::N4b: return "N4b";
    case RiemannCase::N5a: return "N5a";
    case RiemannCase::N5b: return "N5b";
    case RiemannCase::CN2: return "CN2";
    case RiemannCase::CN3: return "CN3";
    case RiemannCase::NNN4: return "NNN4";
    case RiemannCase::CNN5: return "CNN5";
    case RiemannCase::NNN5: return "NNN5";
  }
  return "?";
}

inline bool is_pathological(RiemannCase c) {
  return c == RiemannCase::CN2 || c == RiemannCase::CN3 || c == RiemannCase::NNN4 ||
         c == RiemannCase::CNN5 || c == RiemannCase::NNN5;
}

/// Solution of the constrained Riemann problem. Nonclassical solutions carry
/// the constraint level p_bar active at x=0; their wave list is the classical
/// solution towards rho_hat(p_bar) (speeds <= 0), the stationary nonclassical
/// shock, then the classical solution from rho_check(p_bar) (speeds >= 0).
struct ConstrainedSolution {
  SelfSimilarSolution solution;
  std::optional<double> p_bar;
  bool classical = true;
  RiemannCase tag = RiemannCase::C1;
  double horizon = std::numeric_limits<double>::infinity();  // see validity_horizon
};

namespace detail {

// flux-value comparisons carry the classifier tolerance; le/gt and lt/ge are
// complementary pairs so the tagged regions tile the data plane exactly
struct FluxCmp {
  double eps;
  bool le(double a, double b) const { return a <= b + eps; }
  bool gt(double a, double b) const { return !le(a, b); }
  bool lt(double a, double b) const { return a < b - eps; }
  bool ge(double a, double b) const { return !lt(a, b); }
  bool eq(double a, double b) const { return std::abs(a - b) <= eps; }
  bool ne(double a, double b) const { return !eq(a, b); }
};

}  // namespace detail

/// Tag of (rho_l, rho_r) per the case analysis of the constrained problem.
/// Throws logic_error if the predicate set does not fire exactly once (a
/// transcription bug, never silently resolved).
inline RiemannCase classify(double rho_l, double rho_r, const PiecewiseConstraint& p,
                            const FluxModel& flux) {
  const double rb = flux.rho_crit();
  const double fl = flux.eval(rho_l);
  const double fr = flux.eval(rho_r);
  const double fb = flux.f_max();
  const double pm = p.level_minus(rho_l);
  const double pp = p.level_plus(rho_l);
  const detail::FluxCmp c{kFluxCompareTol};

  // density comparisons are exact; the four regions partition [0,R]^2
  const bool ra = rho_l < rho_r;
  const bool r1 = !ra && rho_l <= rb;
  const bool r2 = !ra && rho_l > rb && rho_r <= rb;
  const bool r3 = !ra && rho_l > rb && rho_r > rb;

  const bool cont = pm == pp;  // levels differ by whole jumps, so exact compare
  // the pathological sandwich p(rho_l+) <= f(rho_l) <= p(rho_l-) at a jump
  const bool sandwich = !cont && c.ge(fl, pp) && c.le(fl, pm);
  // boundary f(rho_l) = p(rho_l) with p continuous folds into the *a cases
  const bool below_pp = cont ? c.le(fl, pp) : c.lt(fl, pp);

  struct Entry {
    RiemannCase tag;
    bool hit;
  };
  const std::array<Entry, 17> table{{
      {RiemannCase::C1, ra && c.gt(fl, fr) && c.le(fr, pp)},
      {RiemannCase::N1, ra && c.gt(fl, fr) && c.gt(fr, pp)},
      {RiemannCase::C2, ra && c.le(fl, fr) && c.le(fl, pp)},
      {RiemannCase::CN2, ra && c.le(fl, fr) && c.gt(fl, pp) && c.le(fl, pm)},
      {RiemannCase::N2, ra && c.le(fl, fr) && c.gt(fl, pm)},
      {RiemannCase::C3, r1 && c.le(fl, pp)},
      {RiemannCase::CN3, r1 && c.gt(fl, pp) && c.le(fl, pm)},
      {RiemannCase::N3, r1 && c.gt(fl, pm)},
      {RiemannCase::NNN4, r2 && sandwich},
      {RiemannCase::C4, r2 && c.eq(pm, fb) && !sandwich},
      {RiemannCase::N4a, r2 && c.ne(pm, fb) && below_pp},
      {RiemannCase::N4b, r2 && c.gt(fl, pm)},
      {RiemannCase::N5b, r3 && c.gt(fl, pm)},
      {RiemannCase::NNN5, r3 && c.gt(fr, pm) && sandwich},
      {RiemannCase::N5a, r3 && c.gt(fr, pm) && c.le(fl, pm) && below_pp},
      {RiemannCase::CNN5, r3 && c.le(fr, pm) && !cont && c.ge(fl, pp)},
      {RiemannCase::C5, r3 && c.le(fr, pm) && below_pp},
  }};

  int hits = 0;
  RiemannCase found = RiemannCase::C1;
  for (const Entry& e : table) {
    if (e.hit) {
      ++hits;
      found = e.tag;
    }
  }
  if (hits != 1)
    throw std::logic_error("classify: " + std::to_string(hits) + " tags match at rho_l=" +
                           std::to_string(rho_l) + " rho_r=" + std::to_string(rho_r));
  return found;
}

namespace detail {

inline ConstrainedSolution make_classical(const FluxModel& flux, double rho_l, double rho_r,
                                          RiemannCase tag) {
  ConstrainedSolution cs;
  cs.solution = solve_classical(flux, rho_l, rho_r);
  cs.classical = true;
  cs.tag = tag;
  return cs;
}

inline ConstrainedSolution make_nonclassical(const FluxModel& flux, double rho_l, double rho_r,
                                             double p_bar, RiemannCase tag) {
  ConstrainedSolution cs;
  cs.classical = false;
  cs.p_bar = p_bar;
  cs.tag = tag;

  double hat, check;
  if (p_bar >= flux.f_max() - kInverseTol) {
    hat = check = flux.rho_crit();  // degenerate level: no jump at x=0
  } else {
    hat = flux.rho_hat(p_bar);
    check = flux.rho_check(p_bar);
    // p_bar = f(rho_l) means the left part is the constant rho_l; snap the
    // bisection output so the wave list carries no phantom micro-wave
    if (rho_l >= flux.rho_crit() && std::abs(p_bar - flux.eval(rho_l)) <= kInverseTol)
      hat = rho_l;
  }

  SelfSimilarSolution s;
  s.left_state = rho_l;
  const SelfSimilarSolution left = solve_classical(flux, rho_l, hat);
  s.waves.insert(s.waves.end(), left.waves.begin(), left.waves.end());
  if (hat != check)
    s.waves.push_back({WaveKind::nonclassical_shock, hat, check, 0.0, 0.0});
  const SelfSimilarSolution right = solve_classical(flux, check, rho_r);
  s.waves.insert(s.waves.end(), right.waves.begin(), right.waves.end());
  cs.solution = std::move(s);
  return cs;
}

}  // namespace detail

/// Exit flux f(rho(t, 0+-)) of a constrained solution: the active level for
/// nonclassical solutions, the classical interface flux otherwise.
inline double exit_flux(const ConstrainedSolution& cs, const FluxModel& flux) {
  if (!cs.classical) return *cs.p_bar;
  return flux.eval(traces_at_zero(cs.solution, flux).first);
}

/// Flux-maximizing extreme solver. Unique cases produce the unique solution;
/// in non-unique cases picks the candidate with the largest exit flux
/// (classical where admissible, else the level p(rho_l-)).
inline ConstrainedSolution solve_q(double rho_l, double rho_r, const PiecewiseConstraint& p,
                                   const FluxModel& flux) {
  const RiemannCase tag = classify(rho_l, rho_r, p, flux);
  const double pm = p.level_minus(rho_l);
  const double pp = p.level_plus(rho_l);
  switch (tag) {
    case RiemannCase::C1:
    case RiemannCase::C2:
    case RiemannCase::C3:
    case RiemannCase::C4:
    case RiemannCase::C5:
    case RiemannCase::CN2:
    case RiemannCase::CN3:
    case RiemannCase::CNN5:
      return detail::make_classical(flux, rho_l, rho_r, tag);
    case RiemannCase::N4a:
    case RiemannCase::N5a:
    case RiemannCase::NNN4:
    case RiemannCase::NNN5:
      return detail::make_nonclassical(flux, rho_l, rho_r, pm, tag);
    case RiemannCase::N1:
    case RiemannCase::N2:
    case RiemannCase::N3:
    case RiemannCase::N4b:
    case RiemannCase::N5b:
      return detail::make_nonclassical(flux, rho_l, rho_r, pp, tag);
  }
  throw std::logic_error("solve_q: unreachable");
}

/// Flux-minimizing extreme solver; coincides with solve_q away from the
/// non-unique cases, where it picks the level p(rho_l+).
inline ConstrainedSolution solve_p(double rho_l, double rho_r, const PiecewiseConstraint& p,
                                   const FluxModel& flux) {
  const RiemannCase tag = classify(rho_l, rho_r, p, flux);
  if (!is_pathological(tag)) return solve_q(rho_l, rho_r, p, flux);
  return detail::make_nonclassical(flux, rho_l, rho_r, p.level_plus(rho_l), tag);
}

/// All admissible solutions, one representative per constraint level, ordered
/// by decreasing exit flux (duplicates within the classifier tolerance
/// removed). Singleton away from the non-unique cases.
inline std::vector<ConstrainedSolution> enumerate_solutions(double rho_l, double rho_r,
                                                            const PiecewiseConstraint& p,
                                                            const FluxModel& flux) {
  const RiemannCase tag = classify(rho_l, rho_r, p, flux);
  const double pm = p.level_minus(rho_l);
  const double pp = p.level_plus(rho_l);
  const double fl = flux.eval(rho_l);

  std::vector<ConstrainedSolution> out;
  auto push_unique = [&](ConstrainedSolution cs) {
    const double ef = exit_flux(cs, flux);
    for (const ConstrainedSolution& prev : out)
      if (std::abs(exit_flux(prev, flux) - ef) <= kFluxCompareTol) return;
    out.push_back(std::move(cs));
  };

  switch (tag) {
    case RiemannCase::CN2:
    case RiemannCase::CN3:
      push_unique(detail::make_classical(flux, rho_l, rho_r, tag));
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, pp, tag));
      break;
    case RiemannCase::CNN5:
      push_unique(detail::make_classical(flux, rho_l, rho_r, tag));
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, fl, tag));
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, pp, tag));
      break;
    case RiemannCase::NNN4:
    case RiemannCase::NNN5:
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, pm, tag));
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, fl, tag));
      push_unique(detail::make_nonclassical(flux, rho_l, rho_r, pp, tag));
      break;
    default:
      out.push_back(solve_q(rho_l, rho_r, p, flux));
      break;
  }
  return out;
}

/// Time up to which the self-similar picture is guaranteed: p(xi(t)) stays
/// single-valued and equal to the selected level. Off a jump this is
/// (distance to the nearest jump) / V_max. On a jump: 0 for non-unique data
/// (the branch can be abandoned at once; re-solve adaptively), otherwise the
/// weighted average drifts with the upstream fill state and the horizon
/// extends to the far boundary of the constancy interval it drifts into.
inline double validity_horizon(const ConstrainedSolution& cs, double rho_l,
                               const PiecewiseConstraint& p, const WeightKernel& w,
                               const FluxModel& flux) {
  const double inf = std::numeric_limits<double>::infinity();
  const double vmax = xi_rate_bound(flux, w);
  const std::size_t k = p.jump_near(rho_l, 0.0);
  if (k == PiecewiseConstraint::npos) return p.distance_to_jump(rho_l) / vmax;
  if (is_pathological(cs.tag)) return 0.0;
  const double fill = traces_at_zero(cs.solution, flux).first;
  if (fill == rho_l) return inf;  // upstream constant: xi never moves
  if (fill > rho_l)
    return k + 1 < p.n_jumps() ? (p.jump(k + 1) - rho_l) / vmax : inf;
  return k >= 1 ? (rho_l - p.jump(k - 1)) / vmax : inf;
}

/// Pass/fail audit of the four level-selection rules for a nonclassical
/// solution; rules whose hypotheses do not hold are reported not applicable.
struct NpReport {
  struct Item {
    bool applicable = false;
    bool pass = true;
  };
  Item np1, np2, np3, np4;

  bool all_pass() const {
    return (!np1.applicable || np1.pass) && (!np2.applicable || np2.pass) &&
           (!np3.applicable || np3.pass) && (!np4.applicable || np4.pass);
  }
};

inline NpReport check_np_properties(const ConstrainedSolution& cs, double rho_l,
                                    const PiecewiseConstraint& p, const FluxModel& flux) {
  NpReport rep;
  if (cs.classical) return rep;  // vacuous
  const double pb = *cs.p_bar;
  const double fl = flux.eval(rho_l);
  const double pm = p.level_minus(rho_l);
  const double pp = p.level_plus(rho_l);
  const double eps = kFluxCompareTol;

  double hat = flux.rho_crit();
  for (const Wave& w : cs.solution.waves)
    if (w.kind == WaveKind::nonclassical_shock) hat = w.left;
  const bool constant_left = cs.solution.waves.empty() ||
                             cs.solution.waves.front().speed_lo >= 0.0 ||
                             cs.solution.waves.front().kind == WaveKind::nonclassical_shock;

  rep.np1.applicable = constant_left;
  rep.np1.pass = std::abs(pb - fl) <= eps && pb >= pp - eps && pb <= pm + eps;
  rep.np2.applicable = std::abs(pb - fl) > eps && rho_l < hat;
  rep.np2.pass = std::abs(pb - pp) <= eps;
  rep.np3.applicable = std::abs(pb - fl) > eps && hat < rho_l;
  rep.np3.pass = std::abs(pb - pm) <= eps;
  rep.np4.applicable = pm == pp;
  rep.np4.pass = std::abs(pb - pm) <= eps;
  return rep;
}

}  // namespace clwr
