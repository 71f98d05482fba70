#pragma once

#include <string>
#include <vector>

#include "adabo/random.hpp"

namespace adabo {

enum class DimKind { Integer, Real };

// One bounded search dimension. Integer bounds are inclusive on both ends.
struct Dimension {
  std::string name;
  DimKind kind = DimKind::Real;
  double low = 0.0;
  double high = 1.0;
};

// A point in parameter units, one entry per dimension of the owning space.
struct Point {
  std::vector<double> values;

  bool operator==(const Point&) const = default;
};

// Coordinates of a point mapped onto the unit cube.
using UnitVector = std::vector<double>;

// Rectangular search space over integer and real dimensions. Models work on
// the continuous relaxation: every dimension is scaled to [0, 1], and integer
// dimensions snap back to the nearest lattice value on the way out.
class ParamSpace {
 public:
  ParamSpace() = default;
  explicit ParamSpace(std::vector<Dimension> dims);

  std::size_t size() const { return dims_.size(); }
  const Dimension& dim(std::size_t i) const { return dims_.at(i); }
  const std::vector<Dimension>& dims() const { return dims_; }

  // Throws ValidationError naming the offending dimension.
  void validate_point(const Point& p) const;

  UnitVector normalize(const Point& p) const;

  // Accepts any u in [0, 1]^d; integer dimensions round half up.
  Point denormalize(const UnitVector& u) const;

  // Uniform draw: one uniform per dimension, in dimension order.
  Point sample(RandomSource& rng) const;

 private:
  std::vector<Dimension> dims_;
};

}  // namespace adabo
