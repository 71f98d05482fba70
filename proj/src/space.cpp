#include "adabo/space.hpp"

#include <cmath>
#include <set>

#include "adabo/errors.hpp"

namespace adabo {
namespace {

bool is_integral(double v) { return std::floor(v) == v; }

}  // namespace

ParamSpace::ParamSpace(std::vector<Dimension> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) throw ValidationError("space: needs at least one dimension");
  std::set<std::string> names;
  for (const auto& d : dims_) {
    if (d.name.empty()) throw ValidationError("space: dimension with empty name");
    if (!names.insert(d.name).second)
      throw ValidationError("space: duplicate dimension name '" + d.name + "'");
    if (!std::isfinite(d.low) || !std::isfinite(d.high))
      throw ValidationError("space: bounds of '" + d.name + "' must be finite");
    if (!(d.low < d.high))
      throw ValidationError("space: bounds of '" + d.name + "' must satisfy low < high");
    if (d.kind == DimKind::Integer && (!is_integral(d.low) || !is_integral(d.high)))
      throw ValidationError("space: integer dimension '" + d.name + "' needs integral bounds");
  }
}

void ParamSpace::validate_point(const Point& p) const {
  if (p.values.size() != dims_.size())
    throw ValidationError("point: expected " + std::to_string(dims_.size()) + " values, got " +
                          std::to_string(p.values.size()));
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const Dimension& d = dims_[i];
    const double v = p.values[i];
    if (!std::isfinite(v))
      throw ValidationError("point: dimension '" + d.name + "' is not finite");
    if (v < d.low || v > d.high)
      throw ValidationError("point: dimension '" + d.name + "' out of bounds");
    if (d.kind == DimKind::Integer && !is_integral(v))
      throw ValidationError("point: dimension '" + d.name + "' must be integral");
  }
}

UnitVector ParamSpace::normalize(const Point& p) const {
  validate_point(p);
  UnitVector u(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const Dimension& d = dims_[i];
    u[i] = (p.values[i] - d.low) / (d.high - d.low);
  }
  return u;
}

Point ParamSpace::denormalize(const UnitVector& u) const {
  if (u.size() != dims_.size())
    throw ValidationError("denormalize: expected " + std::to_string(dims_.size()) +
                          " coordinates, got " + std::to_string(u.size()));
  Point p;
  p.values.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const Dimension& d = dims_[i];
    if (!(u[i] >= 0.0 && u[i] <= 1.0))
      throw ValidationError("denormalize: coordinate for '" + d.name + "' outside [0, 1]");
    double v = d.low + u[i] * (d.high - d.low);
    if (d.kind == DimKind::Integer) {
      v = static_cast<double>(std::llround(v));
      if (v < d.low) v = d.low;
      if (v > d.high) v = d.high;
    }
    p.values[i] = v;
  }
  return p;
}

Point ParamSpace::sample(RandomSource& rng) const {
  Point p;
  p.values.resize(dims_.size());
  for (std::size_t i = 0; i < dims_.size(); ++i) {
    const Dimension& d = dims_[i];
    if (d.kind == DimKind::Integer) {
      p.values[i] = static_cast<double>(
          rng.uniform_int(static_cast<std::int64_t>(d.low), static_cast<std::int64_t>(d.high)));
    } else {
      p.values[i] = rng.uniform(d.low, d.high);
    }
  }
  return p;
}

}  // namespace adabo
