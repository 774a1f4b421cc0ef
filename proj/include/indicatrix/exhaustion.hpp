#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "indicatrix/errors.hpp"
#include "indicatrix/metric_space.hpp"
#include "indicatrix/multiplicity.hpp"

namespace indicatrix {

// Oscillation budget: within the open ball of `radius` the sampled values
// may spread by at most `bound`.
struct OscillationBound {
  double radius = 0.0;
  double bound = 0.0;
};

// Increasing sets on which the mapping is quantitatively continuous: stage k
// satisfies bounds[k], stages are nested, and the residual is whatever the
// loosest stage could not absorb (including points where f is undefined).
struct ExhaustionSequence {
  std::vector<std::vector<PointId>> stages;  // sorted ids, strictest bound first
  std::vector<OscillationBound> bounds;      // aligned with stages
  std::vector<PointId> residual;
  double residual_measure = 0.0;
};

// max d_Y(f(x), f(z)) over z in members with d_X(x, z) < radius. members is
// a mask over point ids; undefined points never contribute.
inline double oscillation_within(const SampledMapping& f, const std::vector<char>& members,
                                 PointId x, double radius) {
  f.domain->require_point(x);
  if (!f.is_defined(x)) throw Error("oscillation queried at an undefined point");
  double osc = 0.0;
  for (PointId z = 0; z < f.size(); ++z) {
    if (!members[z] || !f.is_defined(z)) continue;
    if (f.domain->distance(x, z) < radius)
      osc = std::max(osc, f.codomain_distance(f.values[x], f.values[z]));
  }
  return osc;
}

inline double oscillation_within(const SampledMapping& f, const std::vector<PointId>& members,
                                 PointId x, double radius) {
  std::vector<char> mask(f.size(), 0);
  for (PointId p : members) {
    f.domain->require_point(p);
    mask[p] = 1;
  }
  return oscillation_within(f, mask, x, radius);
}

namespace detail {

// stage order in which every later stage is guaranteed satisfiable around
// the previous one: radius shrinking while the bound loosens
inline bool strict_to_loose(const std::vector<OscillationBound>& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i].radius < s[i + 1].radius || s[i].bound > s[i + 1].bound) return false;
  return true;
}

inline bool bounds_non_increasing(const std::vector<OscillationBound>& s) {
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    if (s[i].bound < s[i + 1].bound) return false;
  return true;
}

// Orients a schedule so the strictest stage comes first. Chains ordered by
// strictness (radius and bound moving in opposite senses) are accepted in
// either direction; otherwise the bounds themselves must be monotone, as in
// scale-proportional schedules like eps = L * r, and the smallest bound
// leads. Anything else cannot nest.
inline std::vector<OscillationBound> stage_order(std::vector<OscillationBound> s) {
  if (strict_to_loose(s)) return s;
  std::vector<OscillationBound> reversed(s.rbegin(), s.rend());
  if (strict_to_loose(reversed)) return reversed;
  if (bounds_non_increasing(s)) return reversed;
  if (bounds_non_increasing(reversed)) return s;
  throw InvalidSchedule(
      "stages cannot nest: order the schedule by strictness "
      "(shrinking radii with loosening bounds, or monotone bounds)");
}

}  // namespace detail

// Builds the exhaustion by greedy removal: per stage, repeatedly drop the
// point with the largest oscillation (ties to the lowest id) until every
// remaining point meets the stage's bound. The strictest stage is computed
// first; looser stages rerun the greedy with the previous stage's points
// protected from removal, which forces T_1 ⊆ T_2 ⊆ ... while keeping every
// stage's own bound intact. The schedule must be orderable by strictness
// (see detail::stage_order); strictness-chain schedules always succeed,
// while scale-proportional ones can fail at build time when the mapping
// itself cannot nest under them.
inline ExhaustionSequence build_exhaustion(const SampledMapping& f,
                                           const std::vector<OscillationBound>& schedule) {
  if (schedule.empty()) throw InvalidSchedule("schedule must contain at least one stage");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (!(schedule[i].radius > 0.0) || !std::isfinite(schedule[i].radius))
      throw InvalidSchedule("stage " + std::to_string(i) + ": radius must be positive");
    if (!(schedule[i].bound >= 0.0) || !std::isfinite(schedule[i].bound))
      throw InvalidSchedule("stage " + std::to_string(i) + ": bound must be nonnegative");
  }
  const std::vector<OscillationBound> stages_order = detail::stage_order(schedule);

  const PointCloudSpace& space = *f.domain;
  const int n = f.size();

  ExhaustionSequence seq;
  seq.bounds = stages_order;
  std::vector<char> protected_mask(n, 0);
  std::vector<double> osc(n, 0.0);

  for (const OscillationBound& stage : stages_order) {
    std::vector<char> current(n, 0);
    for (PointId p = 0; p < n; ++p) current[p] = f.is_defined(p) ? 1 : 0;

    while (true) {
      for (PointId p = 0; p < n; ++p)
        if (current[p]) osc[p] = oscillation_within(f, current, p, stage.radius);
      PointId worst = -1;
      double worst_osc = stage.bound;
      bool any_violation = false;
      for (PointId p = 0; p < n; ++p) {
        if (!current[p] || osc[p] <= stage.bound) continue;
        any_violation = true;
        if (!protected_mask[p] && osc[p] > worst_osc) {
          worst_osc = osc[p];
          worst = p;
        }
      }
      if (worst == -1) {
        // a violating pair with both ends protected would contradict the
        // previous, stricter stage
        if (any_violation)
          throw Error("exhaustion stage cannot satisfy its bound without "
                      "removing protected points; schedule is inconsistent");
        break;
      }
      current[worst] = 0;
    }

    std::vector<PointId> ids;
    for (PointId p = 0; p < n; ++p)
      if (current[p]) ids.push_back(p);
    seq.stages.push_back(std::move(ids));
    protected_mask = current;
  }

  const std::vector<PointId>& last = seq.stages.back();
  std::vector<char> kept(n, 0);
  for (PointId p : last) kept[p] = 1;
  for (PointId p = 0; p < n; ++p)
    if (!kept[p]) seq.residual.push_back(p);
  seq.residual_measure = measure(space, seq.residual);
  return seq;
}

// New mapping equal to f on `keep` and constantly y0 elsewhere; the
// complement becomes defined everywhere. f itself is untouched.
inline SampledMapping redefine_on_complement(const SampledMapping& f,
                                             const std::vector<PointId>& keep,
                                             const std::vector<double>& y0) {
  for (double v : y0)
    if (!std::isfinite(v)) throw SchemaError("redefinition value is not finite");
  if (y0.empty()) throw SchemaError("redefinition value must have dimension >= 1");
  if (f.value_dim > 0 && static_cast<int>(y0.size()) != f.value_dim)
    throw SchemaError("redefinition value has dimension " + std::to_string(y0.size()) +
                      ", mapping values have dimension " + std::to_string(f.value_dim));
  const std::vector<char> keep_mask = detail::subset_mask(*f.domain, keep);
  std::vector<std::vector<double>> values(f.size());
  std::vector<char> defined(f.size(), 0);
  for (PointId p = 0; p < f.size(); ++p) {
    if (keep_mask[p]) {
      values[p] = f.values[p];
      defined[p] = f.defined[p];
    } else {
      values[p] = y0;
      defined[p] = 1;
    }
  }
  return make_mapping(f.domain, std::move(values), std::move(defined), f.codomain_metric);
}

}  // namespace indicatrix
