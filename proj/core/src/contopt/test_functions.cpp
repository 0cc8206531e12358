#include "greybox/contopt/test_functions.hpp"

#include <cmath>

#include "greybox/errors.hpp"

namespace greybox::contopt {

TestFunction sphere(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::DimensionZero, "sphere needs n >= 1");
  return {"sphere", n,
          [](const Vector& x) {
            double s = 0.0;
            for (double v : x) s += v * v;
            return s;
          },
          Vector(n, 0.0), 0.0};
}

TestFunction shifted_sphere(Vector center) {
  if (center.empty()) throw Error(ErrorKind::DimensionZero, "shifted sphere needs a center");
  const std::size_t n = center.size();
  return {"shifted_sphere", n,
          [center](const Vector& x) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) s += (x[j] - center[j]) * (x[j] - center[j]);
            return s;
          },
          center, 0.0};
}

TestFunction rosenbrock(std::size_t n) {
  if (n < 2) throw Error(ErrorKind::InvalidConfig, "rosenbrock needs n >= 2", {{"n", n}});
  return {"rosenbrock", n,
          [](const Vector& x) {
            double s = 0.0;
            for (std::size_t j = 0; j + 1 < x.size(); ++j) {
              const double a = x[j + 1] - x[j] * x[j];
              const double b = 1.0 - x[j];
              s += 100.0 * a * a + b * b;
            }
            return s;
          },
          Vector(n, 1.0), 0.0};
}

TestFunction ellipsoid(std::size_t n, double condition) {
  if (n == 0) throw Error(ErrorKind::DimensionZero, "ellipsoid needs n >= 1");
  Vector scale(n, 1.0);
  for (std::size_t j = 0; j < n && n > 1; ++j)
    scale[j] = std::pow(condition, static_cast<double>(j) / static_cast<double>(n - 1));
  return {"ellipsoid", n,
          [scale](const Vector& x) {
            double s = 0.0;
            for (std::size_t j = 0; j < x.size(); ++j) s += scale[j] * x[j] * x[j];
            return s;
          },
          Vector(n, 0.0), 0.0};
}

TestFunction make_test_function(const std::string& name, std::size_t n, const Vector& center) {
  if (name == "sphere") return sphere(n);
  if (name == "shifted_sphere") {
    if (center.size() != n)
      throw Error(ErrorKind::InvalidConfig, "shifted_sphere needs a center of dimension " + std::to_string(n));
    return shifted_sphere(center);
  }
  if (name == "rosenbrock") return rosenbrock(n);
  if (name == "ellipsoid") return ellipsoid(n);
  throw Error(ErrorKind::InvalidConfig, "unknown test function '" + name + "'", {{"function", name}});
}

}  // namespace greybox::contopt
