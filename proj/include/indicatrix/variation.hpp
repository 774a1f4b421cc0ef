#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "indicatrix/errors.hpp"
#include "indicatrix/rng.hpp"

namespace indicatrix {

// 1-D function given by samples; between samples the function is the
// piecewise-linear interpolant. That convention makes the level-crossing
// count finite and the variation identities exactly checkable.
struct Sampled1DFunction {
  std::vector<double> xs;
  std::vector<double> ys;

  int segment_count() const { return static_cast<int>(xs.size()) - 1; }
  double domain_min() const { return xs.front(); }
  double domain_max() const { return xs.back(); }

  double eval(double x) const {
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return ys[i] + t * (ys[i + 1] - ys[i]);
  }
};

inline Sampled1DFunction make_sampled_function(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw SchemaError("xs and ys must have equal length");
  if (xs.size() < 2) throw SchemaError("a sampled function needs at least two samples");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw SchemaError("sample " + std::to_string(i) + " is not finite");
    if (i > 0 && !(xs[i] > xs[i - 1]))
      throw SchemaError("xs must be strictly increasing (violated at index " +
                        std::to_string(i) + ")");
  }
  return Sampled1DFunction{std::move(xs), std::move(ys)};
}

struct IdentityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_diff = 0.0;
  double rel_diff = 0.0;
  long long resolution = 0;
  double tolerance_used = 0.0;
};

namespace detail {

inline IdentityReport make_report(double lhs, double rhs, long long resolution,
                                  double tolerance) {
  IdentityReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  r.abs_diff = std::abs(lhs - rhs);
  const double denom = std::max(std::abs(lhs), std::abs(rhs));
  r.rel_diff = denom > 0.0 ? r.abs_diff / denom : 0.0;
  r.resolution = resolution;
  r.tolerance_used = tolerance;
  return r;
}

}  // namespace detail

// Exact total variation of the interpolant.
inline double total_variation(const Sampled1DFunction& f) {
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < f.ys.size(); ++i) tv += std::abs(f.ys[i + 1] - f.ys[i]);
  return tv;
}

// Solutions of interpolant(x) = y. Interior crossings count once per
// segment; a segment endpoint exactly at y counts on its left segment only
// (half-open convention, so adjacent segments never double-count); a
// constant segment at level y counts as one solution.
inline int crossing_count(const Sampled1DFunction& f, double y) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < f.ys.size(); ++i) {
    const double a = f.ys[i], b = f.ys[i + 1];
    if (a == b) {
      if (a == y) ++count;
    } else if (y == a) {
      ++count;
    } else if (y > std::min(a, b) && y < std::max(a, b)) {
      ++count;
    }
  }
  return count;
}

using Interval = std::pair<double, double>;

// Clips to [lo, hi], drops empty pieces, merges overlaps. Throws when
// nothing with positive length remains.
inline std::vector<Interval> normalize_intervals(const std::vector<Interval>& raw, double lo,
                                                 double hi) {
  std::vector<Interval> clipped;
  for (const Interval& iv : raw) {
    if (!std::isfinite(iv.first) || !std::isfinite(iv.second))
      throw SchemaError("interval bounds must be finite");
    if (iv.first > iv.second)
      throw SchemaError("interval start " + std::to_string(iv.first) + " exceeds end " +
                        std::to_string(iv.second));
    const double a = std::max(iv.first, lo);
    const double b = std::min(iv.second, hi);
    if (b > a) clipped.emplace_back(a, b);
  }
  if (clipped.empty())
    throw DegenerateInterval("the requested subset of the domain has zero total length");
  std::sort(clipped.begin(), clipped.end());
  std::vector<Interval> merged;
  for (const Interval& iv : clipped) {
    if (!merged.empty() && iv.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, iv.second);
    else
      merged.push_back(iv);
  }
  return merged;
}

inline bool intervals_contain(const std::vector<Interval>& A, double x) {
  for (const Interval& iv : A)
    if (x >= iv.first && x <= iv.second) return true;
  return false;
}

// crossing_count restricted to solutions lying in A (sorted disjoint
// intervals). A constant segment at level y counts once when it overlaps A.
inline int crossing_count_within(const Sampled1DFunction& f, double y,
                                 const std::vector<Interval>& A) {
  int count = 0;
  for (std::size_t i = 0; i + 1 < f.ys.size(); ++i) {
    const double a = f.ys[i], b = f.ys[i + 1];
    if (a == b) {
      if (a == y)
        for (const Interval& iv : A)
          if (iv.first < f.xs[i + 1] && iv.second >= f.xs[i]) {
            ++count;
            break;
          }
    } else if (y == a) {
      if (intervals_contain(A, f.xs[i])) ++count;
    } else if (y > std::min(a, b) && y < std::max(a, b)) {
      const double x = f.xs[i] + (y - a) / (b - a) * (f.xs[i + 1] - f.xs[i]);
      if (intervals_contain(A, x)) ++count;
    }
  }
  return count;
}

namespace detail {

// Midpoint-rule cells over [lo, hi]: `resolution` uniform cells, refined by
// cutting at every sample level. The crossing count is constant between
// consecutive sample levels, so once the levels sit on cell boundaries the
// midpoint rule integrates it exactly.
inline std::vector<double> refined_cells(const Sampled1DFunction& f, int resolution, double lo,
                                         double hi) {
  std::vector<double> cuts;
  cuts.reserve(static_cast<std::size_t>(resolution) + f.ys.size() + 1);
  for (int j = 0; j <= resolution; ++j)
    cuts.push_back(lo + (hi - lo) * static_cast<double>(j) / resolution);
  for (double level : f.ys)
    if (level > lo && level < hi) cuts.push_back(level);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

// Midpoints never coincide with a sample level after refinement; the nudge
// guards the pathological float coincidence anyway.
inline double safe_midpoint(double a, double b, const std::vector<double>& sorted_levels) {
  double mid = 0.5 * (a + b);
  if (std::binary_search(sorted_levels.begin(), sorted_levels.end(), mid))
    mid += (b - a) * 1e-9;
  return mid;
}

}  // namespace detail

// ∫ N(y, f) dy over the attained range, by the midpoint rule on the refined
// cell grid. Exact for the interpolant once the refinement separates all
// jump levels of the crossing count.
inline double integrate_indicatrix(const Sampled1DFunction& f, int y_resolution) {
  if (y_resolution < 1) throw InvalidParams("y_resolution must be >= 1");
  const double lo = *std::min_element(f.ys.begin(), f.ys.end());
  const double hi = *std::max_element(f.ys.begin(), f.ys.end());
  if (hi == lo) return 0.0;
  std::vector<double> levels = f.ys;
  std::sort(levels.begin(), levels.end());
  const std::vector<double> cuts = detail::refined_cells(f, y_resolution, lo, hi);
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
    const double w = cuts[j + 1] - cuts[j];
    acc += w * crossing_count(f, detail::safe_midpoint(cuts[j], cuts[j + 1], levels));
  }
  return acc;
}

// Banach's identity at the interpolant level: ∫ N dy against the exact
// total variation.
inline IdentityReport banach_check(const Sampled1DFunction& f, int y_resolution,
                                   double tolerance = 1e-6) {
  const double lhs = integrate_indicatrix(f, y_resolution);
  const double rhs = total_variation(f);
  return detail::make_report(lhs, rhs, y_resolution, tolerance);
}

// Polynomial c0 + c1 y + c2 y^2 + ...
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double y) const {
    double acc = 0.0;
    for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * y + coeffs[i];
    return acc;
  }

  Polynomial antiderivative() const {
    Polynomial out;
    out.coeffs.assign(coeffs.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      out.coeffs[i + 1] = coeffs[i] / static_cast<double>(i + 1);
    return out;
  }
};

inline Polynomial make_polynomial(std::vector<double> coeffs) {
  for (double c : coeffs)
    if (!std::isfinite(c)) throw SchemaError("polynomial coefficient is not finite");
  if (coeffs.empty()) coeffs.push_back(0.0);
  return Polynomial{std::move(coeffs)};
}

// ∫_A u(f(x)) |f'(x)| dx = ∫ u(y) N(y, f, A) dy for the interpolant. The
// left side is closed-form per linear segment via the antiderivative of u;
// the right side is the refined midpoint rule. A is clipped to the domain.
inline IdentityReport change_of_variables_check(const Sampled1DFunction& f,
                                                const Polynomial& u,
                                                const std::vector<Interval>& A,
                                                int y_resolution, double tolerance = 1e-6) {
  if (y_resolution < 1) throw InvalidParams("y_resolution must be >= 1");
  const std::vector<Interval> AN = normalize_intervals(A, f.domain_min(), f.domain_max());
  const Polynomial U = u.antiderivative();

  double lhs = 0.0;
  for (std::size_t i = 0; i + 1 < f.xs.size(); ++i) {
    const double x0 = f.xs[i], x1 = f.xs[i + 1];
    const double slope = (f.ys[i + 1] - f.ys[i]) / (x1 - x0);
    if (slope == 0.0) continue;
    for (const Interval& iv : AN) {
      const double p = std::max(x0, iv.first);
      const double q = std::min(x1, iv.second);
      if (q <= p) continue;
      const double fp = f.ys[i] + slope * (p - x0);
      const double fq = f.ys[i] + slope * (q - x0);
      lhs += slope > 0.0 ? U(fq) - U(fp) : U(fp) - U(fq);
    }
  }

  const double lo = *std::min_element(f.ys.begin(), f.ys.end());
  const double hi = *std::max_element(f.ys.begin(), f.ys.end());
  double rhs = 0.0;
  if (hi > lo) {
    std::vector<double> levels = f.ys;
    std::sort(levels.begin(), levels.end());
    const std::vector<double> cuts = detail::refined_cells(f, y_resolution, lo, hi);
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double w = cuts[j + 1] - cuts[j];
      const double mid = detail::safe_midpoint(cuts[j], cuts[j + 1], levels);
      const int count = crossing_count_within(f, mid, AN);
      if (count > 0) rhs += w * u(mid) * count;
    }
  }
  return detail::make_report(lhs, rhs, y_resolution, tolerance);
}

// Builtin sample families shared by the command-line tool and the tests.

inline std::vector<double> uniform_grid(double a, double b, int samples) {
  if (samples < 2) throw InvalidParams("need at least two samples");
  std::vector<double> xs(samples);
  for (int i = 0; i < samples; ++i)
    xs[i] = a + (b - a) * static_cast<double>(i) / (samples - 1);
  return xs;
}

inline Sampled1DFunction builtin_sine(int samples) {
  const std::vector<double> xs = uniform_grid(0.0, 2.0 * std::acos(-1.0), samples);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = std::sin(xs[i]);
  return make_sampled_function(xs, ys);
}

inline Sampled1DFunction builtin_abs(int samples) {
  const std::vector<double> xs = uniform_grid(-1.0, 1.0, samples);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = std::abs(xs[i]);
  return make_sampled_function(xs, ys);
}

inline Sampled1DFunction builtin_quadratic(int samples) {
  const std::vector<double> xs = uniform_grid(-1.0, 1.0, samples);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = xs[i] * xs[i];
  return make_sampled_function(xs, ys);
}

// Random piecewise-linear function on [0,1] with values in [-1,1].
inline Sampled1DFunction builtin_random_pl(std::uint64_t seed, int segments) {
  if (segments < 1) throw InvalidParams("need at least one segment");
  Rng rng(seed);
  const std::vector<double> xs = uniform_grid(0.0, 1.0, segments + 1);
  std::vector<double> ys(xs.size());
  for (double& y : ys) y = rng.real_in(-1.0, 1.0);
  return make_sampled_function(xs, ys);
}

}  // namespace indicatrix
