#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include "indicatrix/dyadic.hpp"
#include "indicatrix/errors.hpp"
#include "indicatrix/metric_space.hpp"

namespace indicatrix {

enum class CodomainMetric { euclidean, manhattan };

inline const char* codomain_metric_name(CodomainMetric m) {
  return m == CodomainMetric::euclidean ? "euclidean" : "manhattan";
}

// A mapping sampled over a point cloud: one codomain value per point where
// defined. Undefined points never match any query value.
struct SampledMapping {
  std::shared_ptr<const PointCloudSpace> domain;
  std::vector<std::vector<double>> values;  // empty row where undefined
  std::vector<char> defined;
  CodomainMetric codomain_metric = CodomainMetric::euclidean;
  int value_dim = 0;  // 0 when no point is defined

  int size() const { return domain ? domain->size() : 0; }
  bool is_defined(PointId p) const { return defined[static_cast<std::size_t>(p)] != 0; }

  double codomain_distance(const std::vector<double>& a, const std::vector<double>& b) const {
    double acc = 0.0;
    if (codomain_metric == CodomainMetric::euclidean) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
    return acc;
  }
};

inline SampledMapping make_mapping(std::shared_ptr<const PointCloudSpace> space,
                                   std::vector<std::vector<double>> values,
                                   std::vector<char> defined = {},
                                   CodomainMetric metric = CodomainMetric::euclidean) {
  if (!space) throw InvalidParams("null domain space");
  const std::size_t n = static_cast<std::size_t>(space->size());
  if (values.size() != n)
    throw SchemaError("expected " + std::to_string(n) + " values, got " +
                      std::to_string(values.size()));
  if (defined.empty()) {
    defined.resize(n);
    for (std::size_t i = 0; i < n; ++i) defined[i] = values[i].empty() ? 0 : 1;
  } else if (defined.size() != n) {
    throw SchemaError("defined mask length does not match the space");
  }
  SampledMapping f;
  f.domain = std::move(space);
  f.codomain_metric = metric;
  f.value_dim = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (defined[i] && values[i].empty())
      throw SchemaError("point " + std::to_string(i) + " marked defined but has no value");
    if (!defined[i] && !values[i].empty())
      throw SchemaError("point " + std::to_string(i) + " marked undefined but carries a value");
    if (defined[i]) {
      for (double v : values[i])
        if (!std::isfinite(v))
          throw SchemaError("value at point " + std::to_string(i) + " is not finite");
      if (f.value_dim == 0)
        f.value_dim = static_cast<int>(values[i].size());
      else if (static_cast<int>(values[i].size()) != f.value_dim)
        throw SchemaError("value at point " + std::to_string(i) +
                          " has inconsistent dimension");
    }
  }
  f.values = std::move(values);
  f.defined = std::move(defined);
  return f;
}

inline SampledMapping make_scalar_mapping(std::shared_ptr<const PointCloudSpace> space,
                                          const std::vector<double>& values,
                                          CodomainMetric metric = CodomainMetric::euclidean) {
  std::vector<std::vector<double>> rows;
  rows.reserve(values.size());
  for (double v : values) rows.push_back({v});
  return make_mapping(std::move(space), std::move(rows), {}, metric);
}

// Matching rule for codomain queries: a point x matches y when
// d_Y(f(x), y) <= tolerance. tolerance 0 is exact equality.
struct MatchRule {
  double tolerance = 0.0;
};

namespace detail {

inline void check_rule(const MatchRule& rule) {
  if (!(rule.tolerance >= 0.0) || !std::isfinite(rule.tolerance))
    throw InvalidParams("match tolerance must be a finite nonnegative real");
}

inline void check_query(const SampledMapping& f, const std::vector<double>& y) {
  for (double v : y)
    if (!std::isfinite(v)) throw SchemaError("query value is not finite");
  if (f.value_dim > 0 && static_cast<int>(y.size()) != f.value_dim)
    throw SchemaError("query value has dimension " + std::to_string(y.size()) +
                      ", mapping values have dimension " + std::to_string(f.value_dim));
}

// subset mask over point ids; repeated ids collapse
inline std::vector<char> subset_mask(const PointCloudSpace& space,
                                     const std::vector<PointId>& ids) {
  std::vector<char> mask(space.size(), 0);
  for (PointId id : ids) {
    space.require_point(id);
    mask[id] = 1;
  }
  return mask;
}

inline void check_same_space(const SampledMapping& f, const DyadicSystem& sys) {
  if (!sys.space || f.size() != sys.space->size())
    throw InvalidParams("mapping and dyadic system refer to different spaces");
}

}  // namespace detail

inline bool matches(const SampledMapping& f, PointId p, const std::vector<double>& y,
                    const MatchRule& rule) {
  if (!f.is_defined(p)) return false;
  return f.codomain_distance(f.values[p], y) <= rule.tolerance;
}

// N(y, f, A): how many points of A map onto y.
inline int exact_multiplicity(const SampledMapping& f, const std::vector<PointId>& A,
                              const std::vector<double>& y, const MatchRule& rule = {}) {
  detail::check_rule(rule);
  detail::check_query(f, y);
  const std::vector<char> in_a = detail::subset_mask(*f.domain, A);
  int count = 0;
  for (PointId p = 0; p < f.size(); ++p)
    if (in_a[p] && matches(f, p, y, rule)) ++count;
  return count;
}

// 1 when f attains y somewhere on Q^k_alpha ∩ A, else 0.
inline int level_indicator(const SampledMapping& f, const DyadicSystem& system, int k,
                           int alpha, const std::vector<PointId>& A,
                           const std::vector<double>& y, const MatchRule& rule = {}) {
  detail::check_rule(rule);
  detail::check_query(f, y);
  detail::check_same_space(f, system);
  const DyadicCube& cube = system.cube(k, alpha);
  const std::vector<char> in_a = detail::subset_mask(*f.domain, A);
  for (PointId p : cube.members)
    if (in_a[p] && matches(f, p, y, rule)) return 1;
  return 0;
}

// N_k(y): number of generation-k cubes on which f attains y within A.
inline int count_level(const SampledMapping& f, const DyadicSystem& system, int k,
                       const std::vector<PointId>& A, const std::vector<double>& y,
                       const MatchRule& rule = {}) {
  detail::check_rule(rule);
  detail::check_query(f, y);
  detail::check_same_space(f, system);
  const auto& gen = system.generation(k);
  const std::vector<char> in_a = detail::subset_mask(*f.domain, A);
  std::vector<char> hit(gen.size(), 0);
  const auto& cube_of = system.point_to_cube[k - system.params.k_min];
  for (PointId p = 0; p < f.size(); ++p)
    if (in_a[p] && matches(f, p, y, rule)) hit[cube_of[p]] = 1;
  int total = 0;
  for (char h : hit) total += h;
  return total;
}

// Per-generation counts N_k(y) over a query grid, the finest-level limit,
// and the indices where the finest generation could not separate all
// matching preimages (two or more in one cube), i.e. where the limit is a
// strict undercount of the exact multiplicity.
struct MultiplicityProfile {
  std::vector<std::vector<double>> y_grid;
  int k_min = 0;
  std::vector<std::vector<int>> levels;  // levels[k - k_min][y_index]
  std::vector<int> limit;                // levels at the finest generation
  std::vector<int> unresolved;           // y indices with a crowded finest cube
};

inline MultiplicityProfile multiplicity_profile(const SampledMapping& f,
                                                const DyadicSystem& system,
                                                const std::vector<PointId>& A,
                                                const std::vector<std::vector<double>>& y_grid,
                                                const MatchRule& rule = {}, int threads = 1) {
  detail::check_rule(rule);
  detail::check_same_space(f, system);
  for (const auto& y : y_grid) detail::check_query(f, y);
  if (threads < 1) throw InvalidParams("threads must be >= 1");
  const std::vector<char> in_a = detail::subset_mask(*f.domain, A);

  const int gens = system.generation_count();
  const std::size_t m = y_grid.size();
  MultiplicityProfile prof;
  prof.y_grid = y_grid;
  prof.k_min = system.params.k_min;
  prof.levels.assign(gens, std::vector<int>(m, 0));
  prof.limit.assign(m, 0);
  std::vector<char> crowded(m, 0);

  auto eval_range = [&](std::size_t lo, std::size_t hi) {
    const int n = f.size();
    std::vector<char> matched(n, 0);
    std::vector<int> per_cube;
    for (std::size_t i = lo; i < hi; ++i) {
      for (PointId p = 0; p < n; ++p)
        matched[p] = (in_a[p] && matches(f, p, y_grid[i], rule)) ? 1 : 0;
      for (int g = 0; g < gens; ++g) {
        const auto& cube_of = system.point_to_cube[g];
        per_cube.assign(system.generations[g].size(), 0);
        for (PointId p = 0; p < n; ++p)
          if (matched[p]) ++per_cube[cube_of[p]];
        int hits = 0;
        int max_in_cube = 0;
        for (int c : per_cube) {
          if (c > 0) ++hits;
          max_in_cube = std::max(max_in_cube, c);
        }
        prof.levels[g][i] = hits;
        if (g == gens - 1 && max_in_cube >= 2) crowded[i] = 1;
      }
      prof.limit[i] = prof.levels[gens - 1][i];
    }
  };

  if (threads == 1 || m < 2) {
    eval_range(0, m);
  } else {
    // disjoint output slots, so the result cannot depend on the thread count
    const std::size_t nt = std::min<std::size_t>(threads, m);
    const std::size_t chunk = (m + nt - 1) / nt;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < nt; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(m, lo + chunk);
      if (lo < hi) pool.emplace_back(eval_range, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  for (int g = 0; g + 1 < gens; ++g)
    for (std::size_t i = 0; i < m; ++i)
      if (prof.levels[g][i] > prof.levels[g + 1][i])
        throw MonotonicityViolation(
            "N_k decreased between generations " + std::to_string(prof.k_min + g) + " and " +
            std::to_string(prof.k_min + g + 1) + " at y index " + std::to_string(i) +
            "; the cube system is corrupt");
  for (std::size_t i = 0; i < m; ++i)
    if (crowded[i]) prof.unresolved.push_back(static_cast<int>(i));
  return prof;
}

// The finest-generation count, the finite stand-in for the k -> infinity
// limit. Equals the exact multiplicity whenever the finest generation
// separates all matching preimages.
inline int limit_multiplicity(const MultiplicityProfile& profile, int y_index) {
  if (y_index < 0 || y_index >= static_cast<int>(profile.limit.size()))
    throw IndexOutOfRange("y index " + std::to_string(y_index) + " not in [0, " +
                          std::to_string(profile.limit.size()) + ")");
  return profile.limit[y_index];
}

}  // namespace indicatrix
