#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "indicatrix/errors.hpp"
#include "indicatrix/metric_space.hpp"

namespace indicatrix {

// Scale ladder for a cube system: generation k works at radius scale * delta^k.
struct DyadicParams {
  double delta = 0.5;
  int k_min = 0;
  int k_max = 0;
  double scale = 1.0;
};

inline double generation_radius(const DyadicParams& p, int k) {
  return p.scale * std::pow(p.delta, k);
}

inline void validate_params(const PointCloudSpace& space, const DyadicParams& p) {
  if (!(p.delta > 0.0) || !(p.delta < 1.0))
    throw InvalidParams("delta must lie in (0,1), got " + std::to_string(p.delta));
  if (p.k_min > p.k_max)
    throw InvalidParams("k_min (" + std::to_string(p.k_min) + ") must be <= k_max (" +
                        std::to_string(p.k_max) + ")");
  if (!(p.scale > 0.0) || !std::isfinite(p.scale))
    throw InvalidParams("scale must be positive and finite");
  // the coarsest radius has to reach across the whole space so generation
  // k_min collapses to a single cube
  if (generation_radius(p, p.k_min) < space.diameter * (1.0 - 1e-12))
    throw InvalidParams("scale*delta^k_min = " +
                        std::to_string(generation_radius(p, p.k_min)) +
                        " is below the space diameter " + std::to_string(space.diameter));
}

// Scale chosen with a little headroom over the diameter; if k_max is not
// given, the ladder descends until the radius drops to the minimum pairwise
// distance, which makes the finest cubes singletons.
inline DyadicParams default_params(const PointCloudSpace& space, double delta = 0.5,
                                   int k_min = 0, std::optional<int> k_max = std::nullopt) {
  DyadicParams p;
  p.delta = delta;
  p.k_min = k_min;
  if (!(delta > 0.0) || !(delta < 1.0))
    throw InvalidParams("delta must lie in (0,1), got " + std::to_string(delta));
  const double diam = space.diameter > 0.0 ? space.diameter : 1.0;
  p.scale = diam * (1.0 + 1e-9) / std::pow(delta, k_min);
  if (k_max) {
    p.k_max = *k_max;
  } else {
    const double dmin = space.min_pairwise_distance();
    int k = k_min;
    while (generation_radius(p, k) > dmin && k < k_min + 60) ++k;
    p.k_max = k;
  }
  validate_params(space, p);
  return p;
}

// Nested nets: one maximal separated subset per generation, each extending
// the previous one. Candidates are scanned in ascending id order and added
// when they sit at distance >= scale*delta^k from every net point chosen so
// far, which keeps builds reproducible and cube addressing stable.
inline std::vector<std::vector<PointId>> build_nested_nets(const PointCloudSpace& space,
                                                           const DyadicParams& params) {
  if (space.size() == 0) throw EmptySpace("cannot build nets on an empty space");
  validate_params(space, params);
  const int n = space.size();
  const int gens = params.k_max - params.k_min + 1;
  std::vector<std::vector<PointId>> nets(gens);
  std::vector<char> in_net(n, 0);
  std::vector<PointId> net;
  for (int g = 0; g < gens; ++g) {
    const double r = generation_radius(params, params.k_min + g);
    for (PointId p = 0; p < n; ++p) {
      if (in_net[p]) continue;
      double dmin = std::numeric_limits<double>::infinity();
      for (PointId q : net) dmin = std::min(dmin, space.distance(p, q));
      if (dmin >= r) {
        net.push_back(p);
        in_net[p] = 1;
      }
    }
    nets[g] = net;
    std::sort(nets[g].begin(), nets[g].end());
  }
  return nets;
}

// Maps each generation-k net point to its nearest generation-(k-1) net
// point, ties to the lowest id. A point present in both generations is its
// own parent. parents[0] is empty; parents[g][i] pairs with nets[g][i].
inline std::vector<std::vector<PointId>> assign_parents(
    const std::vector<std::vector<PointId>>& nets, const PointCloudSpace& space,
    const DyadicParams& params) {
  validate_params(space, params);
  for (std::size_t g = 1; g < nets.size(); ++g)
    for (PointId q : nets[g - 1])
      if (!std::binary_search(nets[g].begin(), nets[g].end(), q))
        throw InvalidParams("nets are not nested: center " + std::to_string(q) +
                            " vanishes at generation " +
                            std::to_string(params.k_min + static_cast<int>(g)));
  std::vector<std::vector<PointId>> parents(nets.size());
  for (std::size_t g = 1; g < nets.size(); ++g) {
    parents[g].reserve(nets[g].size());
    for (PointId c : nets[g]) {
      PointId best = -1;
      double best_d = std::numeric_limits<double>::infinity();
      for (PointId q : nets[g - 1]) {
        const double d = space.distance(c, q);
        if (d < best_d) {
          best_d = d;
          best = q;
        }
      }
      parents[g].push_back(best);
    }
  }
  return parents;
}

struct DyadicCube {
  int generation = 0;
  int index = 0;  // alpha, the position among the generation's cubes
  PointId center = 0;
  std::vector<PointId> members;
  int parent = -1;            // alpha in the previous generation, -1 at the coarsest
  std::vector<int> children;  // alphas in the next generation
};

struct PropertyReport {
  bool p1 = false;       // nesting across generations
  bool p2 = false;       // each generation partitions the space
  double c_emp = 0.0;    // largest inner-ball constant that holds for every cube
  double C_emp = 0.0;    // smallest outer-ball constant that holds for every cube
  bool p3_pass = false;  // c_emp > 0 and C_emp finite
  bool p4 = false;       // outer balls of descendants stay inside the ancestor's
};

struct DyadicSystem {
  std::shared_ptr<const PointCloudSpace> space;
  DyadicParams params;
  std::vector<std::vector<DyadicCube>> generations;  // indexed by k - k_min
  std::vector<std::vector<int>> point_to_cube;       // [k - k_min][point] -> alpha
  // Stored pair keeps inner <= outer; verify_properties() reports the
  // unclamped per-side optima.
  double inner_constant = 1.0;
  double outer_constant = 1.0;

  int generation_count() const { return static_cast<int>(generations.size()); }

  const std::vector<DyadicCube>& generation(int k) const {
    if (k < params.k_min || k > params.k_max)
      throw UnknownGeneration("generation " + std::to_string(k) + " not in [" +
                              std::to_string(params.k_min) + ", " +
                              std::to_string(params.k_max) + "]");
    return generations[k - params.k_min];
  }

  const DyadicCube& cube(int k, int alpha) const {
    const auto& gen = generation(k);
    if (alpha < 0 || alpha >= static_cast<int>(gen.size()))
      throw UnknownCube("cube (" + std::to_string(k) + ", " + std::to_string(alpha) +
                        ") does not exist");
    return gen[alpha];
  }
};

namespace detail {

// Tight per-side ball constants. inner: largest c with
// ball(center, c*r_k) ∩ X ⊆ members for every cube (open balls make the
// optimum attainable). outer: smallest C with every member within C*r_k of
// the center, closed-ball convention. Cubes with no constraint (all points
// members, or singleton members) contribute nothing; 1.0 when nothing
// constrains a side.
inline void ball_constants(const DyadicSystem& sys, double& c_raw, double& C_raw) {
  const PointCloudSpace& space = *sys.space;
  double c = std::numeric_limits<double>::infinity();
  double C = 0.0;
  bool c_bound = false, C_bound = false;
  std::vector<char> member(space.size(), 0);
  for (int g = 0; g < sys.generation_count(); ++g) {
    const double r = generation_radius(sys.params, sys.params.k_min + g);
    for (const DyadicCube& q : sys.generations[g]) {
      std::fill(member.begin(), member.end(), 0);
      for (PointId p : q.members) member[p] = 1;
      double far_member = 0.0;
      double near_outside = std::numeric_limits<double>::infinity();
      for (PointId p = 0; p < space.size(); ++p) {
        const double d = space.distance(q.center, p);
        if (member[p])
          far_member = std::max(far_member, d);
        else
          near_outside = std::min(near_outside, d);
      }
      if (far_member > 0.0) {
        C = std::max(C, far_member / r);
        C_bound = true;
      }
      if (std::isfinite(near_outside)) {
        c = std::min(c, near_outside / r);
        c_bound = true;
      }
    }
  }
  c_raw = c_bound ? c : 1.0;
  C_raw = C_bound ? C : 1.0;
}

}  // namespace detail

// Builds the cube family over nested nets: every point joins its nearest
// finest-generation center (ties to the lowest id) and coarser cubes are the
// unions along parent chains, so nesting and the per-generation partition
// hold by construction.
inline DyadicSystem build_dyadic_system(std::shared_ptr<const PointCloudSpace> space,
                                        const DyadicParams& params) {
  if (!space) throw InvalidParams("null space");
  validate_params(*space, params);
  const int n = space->size();
  const auto nets = build_nested_nets(*space, params);
  const auto parents = assign_parents(nets, *space, params);
  const int gens = static_cast<int>(nets.size());

  DyadicSystem sys;
  sys.space = space;
  sys.params = params;
  sys.generations.resize(gens);
  sys.point_to_cube.assign(gens, std::vector<int>(n, -1));

  // alpha = rank of the center id within its generation
  std::vector<std::vector<int>> alpha_of(gens, std::vector<int>(n, -1));
  for (int g = 0; g < gens; ++g)
    for (std::size_t i = 0; i < nets[g].size(); ++i)
      alpha_of[g][nets[g][i]] = static_cast<int>(i);

  // nearest finest center per point
  std::vector<PointId> assigned(n);
  for (PointId p = 0; p < n; ++p) {
    PointId best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (PointId c : nets[gens - 1]) {
      const double d = space->distance(p, c);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
    assigned[p] = best;
  }

  // centers along each point's ancestor chain
  std::vector<std::vector<PointId>> chain(gens, std::vector<PointId>(n));
  chain[gens - 1] = assigned;
  for (int g = gens - 2; g >= 0; --g)
    for (PointId p = 0; p < n; ++p) {
      const PointId child_center = chain[g + 1][p];
      chain[g][p] = parents[g + 1][alpha_of[g + 1][child_center]];
    }

  for (int g = 0; g < gens; ++g) {
    auto& gen = sys.generations[g];
    gen.resize(nets[g].size());
    for (std::size_t i = 0; i < nets[g].size(); ++i) {
      gen[i].generation = params.k_min + g;
      gen[i].index = static_cast<int>(i);
      gen[i].center = nets[g][i];
      if (g > 0) gen[i].parent = alpha_of[g - 1][parents[g][i]];
    }
    for (PointId p = 0; p < n; ++p) {
      const int a = alpha_of[g][chain[g][p]];
      gen[a].members.push_back(p);
      sys.point_to_cube[g][p] = a;
    }
    if (g > 0)
      for (std::size_t i = 0; i < gen.size(); ++i)
        sys.generations[g - 1][gen[i].parent].children.push_back(static_cast<int>(i));
  }

  double c_raw = 1.0, C_raw = 1.0;
  detail::ball_constants(sys, c_raw, C_raw);
  sys.inner_constant = std::min(c_raw, C_raw);
  sys.outer_constant = C_raw;
  return sys;
}

inline const std::vector<PointId>& cube_members(const DyadicSystem& system, int k, int alpha) {
  return system.cube(k, alpha).members;
}

// Exhaustive check of the four structural properties. p1 and p2 must pass
// for any system produced by build_dyadic_system; p3 reports the tight ball
// constants; p4 is not guaranteed by the nested-net construction and is
// reported rather than enforced.
inline PropertyReport verify_properties(const DyadicSystem& sys) {
  const PointCloudSpace& space = *sys.space;
  const int n = space.size();
  const int gens = sys.generation_count();
  PropertyReport rep;

  rep.p2 = true;
  for (int g = 0; g < gens && rep.p2; ++g) {
    std::vector<PointId> all;
    for (const DyadicCube& q : sys.generations[g]) {
      if (q.members.empty() || !std::binary_search(q.members.begin(), q.members.end(), q.center))
        rep.p2 = false;
      all.insert(all.end(), q.members.begin(), q.members.end());
    }
    std::sort(all.begin(), all.end());
    if (static_cast<int>(all.size()) != n) rep.p2 = false;
    for (PointId p = 0; p < n && rep.p2; ++p)
      if (all[p] != p) rep.p2 = false;
  }

  rep.p1 = true;
  for (int gl = 1; gl < gens && rep.p1; ++gl)
    for (int gk = 0; gk < gl && rep.p1; ++gk)
      for (const DyadicCube& q : sys.generations[gl]) {
        int holder = -1;
        for (PointId p : q.members) {
          const int a = sys.point_to_cube[gk][p];
          if (holder == -1) holder = a;
          if (a != holder) {
            rep.p1 = false;
            break;
          }
        }
        if (!rep.p1) break;
      }

  detail::ball_constants(sys, rep.c_emp, rep.C_emp);
  rep.p3_pass = rep.c_emp > 0.0 && std::isfinite(rep.C_emp);

  // Closed balls here: the outer constant is tight in the closed sense, so
  // an open-ball reading would fail on every system whose constraining
  // member sits exactly at distance C*r from its center.
  const double C = sys.outer_constant;
  rep.p4 = true;
  for (int gl = 1; gl < gens && rep.p4; ++gl) {
    const double rl = generation_radius(sys.params, sys.params.k_min + gl);
    for (const DyadicCube& q : sys.generations[gl]) {
      int a = q.index;
      for (int gk = gl - 1; gk >= 0 && rep.p4; --gk) {
        a = sys.generations[gk + 1][a].parent;
        const DyadicCube& anc = sys.generations[gk][a];
        const double rk = generation_radius(sys.params, sys.params.k_min + gk);
        for (PointId p = 0; p < n; ++p)
          if (space.distance(q.center, p) <= C * rl &&
              !(space.distance(anc.center, p) <= C * rk)) {
            rep.p4 = false;
            break;
          }
      }
      if (!rep.p4) break;
    }
  }
  return rep;
}

}  // namespace indicatrix
