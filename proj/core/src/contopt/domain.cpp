#include "greybox/contopt/domain.hpp"

#include <cmath>

#include "greybox/errors.hpp"

namespace greybox::contopt {

namespace {

void check_dimension(std::size_t want, std::size_t got) {
  if (want != got)
    throw Error(ErrorKind::InvalidArgument,
                "expected a vector of dimension " + std::to_string(want) + ", got " + std::to_string(got),
                {{"expected", want}, {"actual", got}});
}

}  // namespace

BoxDomain::BoxDomain(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.empty() || lower_.size() != upper_.size())
    throw Error(ErrorKind::InvalidDomain, "lower and upper bounds need the same non-zero length",
                {{"lower", lower_.size()}, {"upper", upper_.size()}});
  for (std::size_t j = 0; j < lower_.size(); ++j) {
    if (!std::isfinite(lower_[j]) || !std::isfinite(upper_[j]) || !(lower_[j] < upper_[j]))
      throw Error(ErrorKind::InvalidDomain,
                  "bounds of coordinate " + std::to_string(j) + " must be finite with lower < upper",
                  {{"index", j}, {"lower", lower_[j]}, {"upper", upper_[j]}});
  }
}

BoxDomain BoxDomain::cube(std::size_t n, double lo, double hi) {
  return BoxDomain(Vector(n, lo), Vector(n, hi));
}

bool BoxDomain::contains(const Vector& x) const {
  if (x.size() != dimension()) return false;
  for (std::size_t j = 0; j < x.size(); ++j)
    if (!(x[j] >= lower_[j] && x[j] <= upper_[j])) return false;
  return true;
}

AffineNormalization::AffineNormalization(BoxDomain domain) : domain_(std::move(domain)) {
  width_.resize(domain_.dimension());
  for (std::size_t j = 0; j < width_.size(); ++j) width_[j] = domain_.upper()[j] - domain_.lower()[j];
}

Normalized AffineNormalization::forward(const Vector& x) const {
  check_dimension(domain_.dimension(), x.size());
  Normalized out{Vector(x.size()), !domain_.contains(x)};
  for (std::size_t j = 0; j < x.size(); ++j) out.u[j] = (x[j] - domain_.lower()[j]) / width_[j];
  return out;
}

Vector AffineNormalization::inverse(const Vector& u) const {
  check_dimension(domain_.dimension(), u.size());
  Vector x(u.size());
  for (std::size_t j = 0; j < u.size(); ++j) {
    // Interpolate from the nearer end so that both endpoints map exactly.
    if (u[j] <= 0.5)
      x[j] = std::fma(u[j], width_[j], domain_.lower()[j]);
    else
      x[j] = std::fma(-(1.0 - u[j]), width_[j], domain_.upper()[j]);
  }
  return x;
}

AffineNormalization normalization_map(const BoxDomain& domain) { return AffineNormalization(domain); }

Objective::Objective(std::size_t dimension, Fn fn)
    : Objective(dimension, std::move(fn), std::make_shared<std::atomic<std::uint64_t>>(0)) {}

Objective::Objective(std::size_t dimension, Fn fn, std::shared_ptr<std::atomic<std::uint64_t>> counter)
    : dimension_(dimension), fn_(std::move(fn)), counter_(std::move(counter)) {
  if (dimension_ == 0) throw Error(ErrorKind::DimensionZero, "objective dimension must be >= 1");
}

double Objective::operator()(const Vector& x) const {
  check_dimension(dimension_, x.size());
  counter_->fetch_add(1);
  return fn_(x);
}

Objective wrap_objective(const Objective& f, const AffineNormalization& map) {
  check_dimension(f.dimension(), map.domain().dimension());
  auto inner = f.fn_;
  return Objective(f.dimension(), [inner, map](const Vector& u) { return inner(map.inverse(u)); },
                   f.counter_);
}

}  // namespace greybox::contopt
