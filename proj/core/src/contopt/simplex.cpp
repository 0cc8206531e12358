#include "greybox/contopt/simplex.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "greybox/errors.hpp"

namespace greybox::contopt {

InitRule InitRule::region_of_interest(double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw Error(ErrorKind::InvalidConfig, "region-of-interest step h must be > 0", {{"h", h}});
  return {Kind::RegionOfInterest, h};
}

std::string InitRule::label() const {
  switch (kind) {
    case Kind::Pfeffer: return "pfeffer";
    case Kind::NashOptim: return "nash";
    case Kind::RegionOfInterest: {
      char buf[32];
      auto [end, ec] = std::to_chars(buf, buf + sizeof buf, h);
      return "roi:" + std::string(buf, end);
    }
  }
  return "";
}

InitRule InitRule::parse(const std::string& label) {
  if (label == "pfeffer") return pfeffer();
  if (label == "nash") return nash();
  if (label.rfind("roi:", 0) == 0) {
    double h = 0;
    const char* first = label.data() + 4;
    const char* last = label.data() + label.size();
    auto [end, ec] = std::from_chars(first, last, h);
    if (ec == std::errc() && end == last) return region_of_interest(h);
  }
  throw Error(ErrorKind::InvalidConfig,
              "unknown initialization rule '" + label + "' (pfeffer, nash or roi:<h>)", {{"rule", label}});
}

Simplex build_simplex(const InitRule& rule, const Vector& x1) {
  const std::size_t n = x1.size();
  if (n == 0) throw Error(ErrorKind::DimensionZero, "the starting point has no coordinates");
  if (rule.kind == InitRule::Kind::RegionOfInterest) InitRule::region_of_interest(rule.h);

  double nash_step = 0.0;
  for (double v : x1) nash_step = std::max(nash_step, std::abs(v));
  nash_step *= 0.1;

  Simplex s;
  s.provenance = rule;
  s.points.assign(n + 1, x1);
  for (std::size_t i = 1; i <= n; ++i) {
    double& c = s.points[i][i - 1];
    switch (rule.kind) {
      case InitRule::Kind::Pfeffer: c = x1[i - 1] != 0.0 ? 1.05 * x1[i - 1] : 0.00025; break;
      case InitRule::Kind::NashOptim: c = x1[i - 1] + nash_step; break;
      case InitRule::Kind::RegionOfInterest: c = x1[i - 1] + rule.h; break;
    }
  }
  return s;
}

namespace {

double distance(const Vector& a, const Vector& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) sum += (a[j] - b[j]) * (a[j] - b[j]);
  return std::sqrt(sum);
}

}  // namespace

double simplex_diameter(const std::vector<Vector>& points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t k = i + 1; k < points.size(); ++k) d = std::max(d, distance(points[i], points[k]));
  return d;
}

double simplex_volume(const std::vector<Vector>& points) {
  const std::size_t n = points.size() - 1;
  Eigen::MatrixXd edges(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) edges(i, j) = points[i + 1][j] - points[0][j];
  double volume = std::abs(edges.partialPivLu().determinant());
  for (std::size_t k = 2; k <= n; ++k) volume /= static_cast<double>(k);
  return volume;
}

SimplexQuality simplex_quality(const Simplex& s) {
  SimplexQuality q;
  q.diameter = simplex_diameter(s.points);
  q.min_edge = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < s.points.size(); ++i) {
    const double e = distance(s.points[i], s.points[0]);
    q.min_edge = std::min(q.min_edge, e);
    q.max_edge = std::max(q.max_edge, e);
  }
  q.edge_ratio = q.min_edge == 0.0 ? std::numeric_limits<double>::infinity() : q.max_edge / q.min_edge;
  q.volume = simplex_volume(s.points);
  q.degenerate = q.volume == 0.0 || q.edge_ratio > kDegenerateEdgeRatio;
  return q;
}

}  // namespace greybox::contopt
