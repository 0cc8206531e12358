#pragma once

// Box domains, the affine map onto the unit hypercube, and counted objective
// functions.

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace greybox::contopt {

using Vector = std::vector<double>;

class BoxDomain {
 public:
  /// Throws Error{InvalidDomain} unless both vectors have the same non-zero
  /// length, are finite and lower[j] < upper[j].
  BoxDomain(Vector lower, Vector upper);

  /// [lo, hi]^n
  static BoxDomain cube(std::size_t n, double lo, double hi);

  std::size_t dimension() const noexcept { return lower_.size(); }
  const Vector& lower() const noexcept { return lower_; }
  const Vector& upper() const noexcept { return upper_; }
  bool contains(const Vector& x) const;

 private:
  Vector lower_;
  Vector upper_;
};

struct Normalized {
  Vector u;
  /// x was outside the domain; u is still the affine image.
  bool out_of_domain = false;
};

/// u[j] = (x[j] - lower[j]) / (upper[j] - lower[j])
class AffineNormalization {
 public:
  explicit AffineNormalization(BoxDomain domain);

  const BoxDomain& domain() const noexcept { return domain_; }

  /// Throws Error{InvalidArgument} on a dimension mismatch.
  Normalized forward(const Vector& x) const;
  /// Exact at both ends: inverse(0) = lower and inverse(1) = upper.
  Vector inverse(const Vector& u) const;

 private:
  BoxDomain domain_;
  Vector width_;
};

AffineNormalization normalization_map(const BoxDomain& domain);

/// An objective function with an evaluation counter. Copies and wrapped
/// versions share the counter.
class Objective {
 public:
  using Fn = std::function<double(const Vector&)>;

  Objective(std::size_t dimension, Fn fn);

  double operator()(const Vector& x) const;
  std::size_t dimension() const noexcept { return dimension_; }
  std::uint64_t evaluations() const noexcept { return counter_->load(); }
  void reset_evaluations() const noexcept { counter_->store(0); }

 private:
  friend Objective wrap_objective(const Objective& f, const AffineNormalization& map);
  Objective(std::size_t dimension, Fn fn, std::shared_ptr<std::atomic<std::uint64_t>> counter);

  std::size_t dimension_;
  Fn fn_;
  std::shared_ptr<std::atomic<std::uint64_t>> counter_;
};

/// g(u) = f(inverse(map, u)); each call of g counts as one evaluation of f.
Objective wrap_objective(const Objective& f, const AffineNormalization& map);

}  // namespace greybox::contopt
