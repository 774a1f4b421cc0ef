#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "indicatrix/errors.hpp"
#include "indicatrix/rng.hpp"

namespace indicatrix {

using PointId = int;

enum class Metric { euclidean, manhattan, explicit_matrix };

inline const char* metric_name(Metric m) {
  switch (m) {
    case Metric::euclidean: return "euclidean";
    case Metric::manhattan: return "manhattan";
    case Metric::explicit_matrix: return "matrix";
  }
  return "?";
}

// Finite metric measure space with point-mass weights: the stand-in for the
// doubling spaces the dyadic construction runs on. Point ids are dense in
// [0, n). Immutable after construction; build via build_point_cloud().
struct PointCloudSpace {
  Metric metric = Metric::euclidean;
  std::vector<std::vector<double>> coords;  // one row per point; empty for matrix spaces
  std::vector<double> matrix;               // row-major n*n, explicit_matrix only
  std::vector<double> weights;
  double diameter = 0.0;

  int size() const { return static_cast<int>(weights.size()); }
  int dim() const { return coords.empty() ? 0 : static_cast<int>(coords.front().size()); }

  void require_point(PointId id) const {
    if (id < 0 || id >= size())
      throw UnknownPoint("point id " + std::to_string(id) + " not in [0, " +
                         std::to_string(size()) + ")");
  }

  double distance(PointId a, PointId b) const {
    require_point(a);
    require_point(b);
    if (metric == Metric::explicit_matrix)
      return matrix[static_cast<std::size_t>(a) * size() + b];
    const auto& pa = coords[a];
    const auto& pb = coords[b];
    double acc = 0.0;
    if (metric == Metric::euclidean) {
      for (std::size_t i = 0; i < pa.size(); ++i) {
        const double d = pa[i] - pb[i];
        acc += d * d;
      }
      return std::sqrt(acc);
    }
    for (std::size_t i = 0; i < pa.size(); ++i) acc += std::abs(pa[i] - pb[i]);
    return acc;
  }

  double total_weight() const {
    return std::accumulate(weights.begin(), weights.end(), 0.0);
  }

  // +inf on singletons
  double min_pairwise_distance() const {
    double best = std::numeric_limits<double>::infinity();
    for (PointId a = 0; a < size(); ++a)
      for (PointId b = a + 1; b < size(); ++b) best = std::min(best, distance(a, b));
    return best;
  }
};

struct DoublingEstimate {
  int lambda_hat = 1;
  int trials = 0;
  PointId worst_center = 0;  // ball that needed the most half-radius balls
  double worst_radius = 0.0;
};

namespace detail {

inline void check_weights(const std::vector<double>& w) {
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w[i])) throw SchemaError("weight " + std::to_string(i) + " is not finite");
    if (w[i] < 0.0)
      throw NegativeWeight("weight " + std::to_string(i) + " = " + std::to_string(w[i]));
  }
}

inline std::vector<double> resolve_weights(std::size_t n, const std::vector<double>& weights) {
  if (weights.empty()) return std::vector<double>(n, 1.0);
  if (weights.size() != n)
    throw SchemaError("expected " + std::to_string(n) + " weights, got " +
                      std::to_string(weights.size()));
  check_weights(weights);
  return weights;
}

inline double compute_diameter(const PointCloudSpace& s) {
  double d = 0.0;
  for (PointId a = 0; a < s.size(); ++a)
    for (PointId b = a + 1; b < s.size(); ++b) d = std::max(d, s.distance(a, b));
  return d;
}

}  // namespace detail

// Coordinate-based space. Zero-distance duplicates (identical coordinate
// rows) are merged into one point with summed weight, so every surviving
// pair of points is at positive distance.
inline PointCloudSpace build_point_cloud(const std::vector<std::vector<double>>& points,
                                         const std::vector<double>& weights = {},
                                         Metric metric = Metric::euclidean) {
  if (metric == Metric::explicit_matrix)
    throw InvalidParams("use build_point_cloud_from_matrix for explicit distance matrices");
  if (points.empty()) throw EmptySpace("a point cloud needs at least one point");
  const std::size_t d = points.front().size();
  if (d == 0) throw SchemaError("points need at least one coordinate");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].size() != d)
      throw SchemaError("point " + std::to_string(i) + " has " +
                        std::to_string(points[i].size()) + " coordinates, expected " +
                        std::to_string(d));
    for (double c : points[i])
      if (!std::isfinite(c))
        throw SchemaError("point " + std::to_string(i) + " has a non-finite coordinate");
  }
  const std::vector<double> w = detail::resolve_weights(points.size(), weights);

  PointCloudSpace space;
  space.metric = metric;
  std::map<std::vector<double>, int> seen;
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto it = seen.find(points[i]);
    if (it == seen.end()) {
      seen.emplace(points[i], static_cast<int>(space.coords.size()));
      space.coords.push_back(points[i]);
      space.weights.push_back(w[i]);
    } else {
      space.weights[it->second] += w[i];
    }
  }
  space.diameter = detail::compute_diameter(space);
  return space;
}

// Explicit-matrix space. The matrix must be square, symmetric, nonnegative
// and zero on the diagonal; zero off-diagonal entries are treated as
// duplicate points and merged (weights summed). The triangle inequality is
// checked on the merged matrix with 1e-12 relative slack.
inline PointCloudSpace build_point_cloud_from_matrix(
    const std::vector<std::vector<double>>& matrix, const std::vector<double>& weights = {}) {
  const std::size_t n = matrix.size();
  if (n == 0) throw EmptySpace("a point cloud needs at least one point");
  for (std::size_t i = 0; i < n; ++i)
    if (matrix[i].size() != n)
      throw SchemaError("distance matrix row " + std::to_string(i) + " has " +
                        std::to_string(matrix[i].size()) + " entries, expected " +
                        std::to_string(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (matrix[i][i] != 0.0)
      throw MetricViolation("d(" + std::to_string(i) + "," + std::to_string(i) + ") = " +
                            std::to_string(matrix[i][i]) + ", diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(matrix[i][j]))
        throw MetricViolation("d(" + std::to_string(i) + "," + std::to_string(j) +
                              ") is not finite");
      if (matrix[i][j] < 0.0)
        throw MetricViolation("d(" + std::to_string(i) + "," + std::to_string(j) + ") = " +
                              std::to_string(matrix[i][j]) + " is negative");
      if (matrix[i][j] != matrix[j][i])
        throw MetricViolation("d(" + std::to_string(i) + "," + std::to_string(j) +
                              ") != d(" + std::to_string(j) + "," + std::to_string(i) + ")");
    }
  }
  const std::vector<double> w = detail::resolve_weights(n, weights);

  // d(i,j) = 0 forces the rows of i and j to coincide (triangle inequality at
  // distance zero); verify before merging the pair
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matrix[i][j] != 0.0) continue;
      for (std::size_t k = 0; k < n; ++k)
        if (std::abs(matrix[i][k] - matrix[j][k]) >
            1e-12 * std::max(matrix[i][k], matrix[j][k]))
          throw MetricViolation("triangle inequality fails for points (" + std::to_string(i) +
                                "," + std::to_string(j) + "," + std::to_string(k) +
                                "): d(" + std::to_string(i) + "," + std::to_string(j) +
                                ") = 0 but rows differ at " + std::to_string(k));
    }

  // merge zero-distance groups; representative = smallest original index
  std::vector<int> rep(n);
  std::iota(rep.begin(), rep.end(), 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (matrix[i][j] == 0.0 && rep[i] == static_cast<int>(i)) rep[i] = rep[j];
  std::vector<int> newid(n, -1);
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i)
    if (rep[i] == static_cast<int>(i)) {
      newid[i] = static_cast<int>(keep.size());
      keep.push_back(i);
    }

  PointCloudSpace space;
  space.metric = Metric::explicit_matrix;
  const std::size_t m = keep.size();
  space.matrix.assign(m * m, 0.0);
  space.weights.assign(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) space.weights[newid[rep[i]]] += w[i];
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) space.matrix[a * m + b] = matrix[keep[a]][keep[b]];

  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) {
        const double direct = space.matrix[i * m + k];
        const double via = space.matrix[i * m + j] + space.matrix[j * m + k];
        if (direct > via + 1e-12 * std::max(direct, via))
          throw MetricViolation("triangle inequality fails for points (" + std::to_string(i) +
                                "," + std::to_string(j) + "," + std::to_string(k) + "): d(" +
                                std::to_string(i) + "," + std::to_string(k) + ") = " +
                                std::to_string(direct) + " > " + std::to_string(via));
      }
  space.diameter = detail::compute_diameter(space);
  return space;
}

// Open ball {z : d(center, z) < radius}, as a sorted id list.
inline std::vector<PointId> ball(const PointCloudSpace& space, PointId center, double radius) {
  space.require_point(center);
  std::vector<PointId> out;
  for (PointId p = 0; p < space.size(); ++p)
    if (space.distance(center, p) < radius) out.push_back(p);
  return out;
}

// Sum of point masses over a set of ids. Repeated ids count once.
inline double measure(const PointCloudSpace& space, const std::vector<PointId>& ids) {
  std::vector<char> seen(space.size(), 0);
  double total = 0.0;
  for (PointId id : ids) {
    space.require_point(id);
    if (seen[id]) continue;
    seen[id] = 1;
    total += space.weights[id];
  }
  return total;
}

// Number of half-radius balls a greedy cover of B(center, radius) uses.
// Candidates are picked farthest-first (from the ball center, then from the
// chosen cover centers), ties broken by lowest id.
inline int cover_count_half_radius(const PointCloudSpace& space, PointId center, double radius) {
  const std::vector<PointId> members = ball(space, center, radius);
  if (members.empty()) return 0;
  std::vector<char> covered(space.size(), 0);
  std::vector<PointId> chosen;
  int count = 0;
  std::size_t ncovered = 0;
  while (ncovered < members.size()) {
    PointId best = -1;
    double best_d = -1.0;
    for (PointId p : members) {
      if (covered[p]) continue;
      double ref;
      if (chosen.empty()) {
        ref = space.distance(center, p);
      } else {
        ref = std::numeric_limits<double>::infinity();
        for (PointId q : chosen) ref = std::min(ref, space.distance(q, p));
      }
      if (ref > best_d) {
        best_d = ref;
        best = p;
      }
    }
    chosen.push_back(best);
    ++count;
    for (PointId p : members)
      if (!covered[p] && space.distance(best, p) < radius / 2.0) {
        covered[p] = 1;
        ++ncovered;
      }
  }
  return count;
}

// Empirical witness of the doubling constant: samples (center, radius) pairs
// and reports the worst greedy half-radius cover seen. Diagnostic only; the
// greedy cover is not a certified minimum.
inline DoublingEstimate estimate_doubling(const PointCloudSpace& space, int trials,
                                          std::uint64_t seed) {
  if (trials < 1) throw InvalidParams("estimate_doubling needs trials >= 1");
  Rng rng(seed);
  DoublingEstimate est;
  est.trials = trials;
  est.lambda_hat = 0;
  for (int t = 0; t < trials; ++t) {
    const PointId c = static_cast<PointId>(rng.index(static_cast<std::size_t>(space.size())));
    const double r =
        space.diameter > 0.0 ? space.diameter * (1.0 - rng.real01()) : 1.0;  // (0, diam]
    const int used = cover_count_half_radius(space, c, r);
    if (used > est.lambda_hat) {
      est.lambda_hat = used;
      est.worst_center = c;
      est.worst_radius = r;
    }
  }
  est.lambda_hat = std::max(est.lambda_hat, 1);
  return est;
}

}  // namespace indicatrix
