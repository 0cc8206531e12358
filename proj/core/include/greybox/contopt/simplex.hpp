#pragma once

// Initial simplices for Nelder-Mead and their conditioning diagnostics.

#include <string>

#include "greybox/contopt/domain.hpp"

namespace greybox::contopt {

struct InitRule {
  enum class Kind { Pfeffer, NashOptim, RegionOfInterest };
  Kind kind = Kind::RegionOfInterest;
  /// Step of the region-of-interest rule.
  double h = 0.25;

  static InitRule pfeffer() { return {Kind::Pfeffer, 0.0}; }
  static InitRule nash() { return {Kind::NashOptim, 0.0}; }
  /// Throws Error{InvalidConfig} unless h > 0 and finite.
  static InitRule region_of_interest(double h);

  /// "pfeffer", "nash" or "roi:<h>"; parse() accepts the same strings.
  std::string label() const;
  static InitRule parse(const std::string& label);

  friend bool operator==(const InitRule&, const InitRule&) = default;
};

struct Simplex {
  /// n+1 points in construction order; points[0] is the starting point.
  std::vector<Vector> points;
  InitRule provenance;

  std::size_t dimension() const noexcept { return points.empty() ? 0 : points.front().size(); }
};

/// Point i (i = 1..n) is x1 with coordinate i-1 changed:
///   Pfeffer: 1.05 * x1[i-1], or 0.00025 when x1[i-1] == 0
///   Nash:    x1[i-1] + 0.1 * max_j |x1[j]|
///   ROI:     x1[i-1] + h
/// Throws Error{DimensionZero} for an empty x1.
Simplex build_simplex(const InitRule& rule, const Vector& x1);

struct SimplexQuality {
  double diameter = 0.0;
  double min_edge = 0.0;
  double max_edge = 0.0;
  /// max_edge / min_edge; infinity when min_edge is 0.
  double edge_ratio = 0.0;
  /// |det(edges)| / n!
  double volume = 0.0;
  bool degenerate = false;
};

inline constexpr double kDegenerateEdgeRatio = 1e6;

/// Edges are measured from points[0]; the diameter over all pairs.
SimplexQuality simplex_quality(const Simplex& s);

double simplex_diameter(const std::vector<Vector>& points);
double simplex_volume(const std::vector<Vector>& points);

}  // namespace greybox::contopt
