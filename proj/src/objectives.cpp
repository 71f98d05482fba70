#include "adabo/objectives.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "adabo/errors.hpp"

namespace adabo {
namespace {

constexpr double kPi = std::numbers::pi;

const std::array<double, 5> kMixedTarget = {0.5, 1.0 / 3.0, 2.0 / 3.0, 0.5, 0.25};

void need_dims(const Point& p, std::size_t d, const char* name) {
  if (p.values.size() != d)
    throw ValidationError(std::string(name) + ": expected " + std::to_string(d) + " dimensions");
}

}  // namespace

double sphere(const Point& p) {
  double s = 0.0;
  for (double v : p.values) s += v * v;
  return s;
}

double branin(const Point& p) {
  need_dims(p, 2, "branin");
  const double x1 = p.values[0], x2 = p.values[1];
  const double b = 5.1 / (4.0 * kPi * kPi);
  const double c = 5.0 / kPi;
  const double t = 1.0 / (8.0 * kPi);
  const double inner = x2 - b * x1 * x1 + c * x1 - 6.0;
  return inner * inner + 10.0 * (1.0 - t) * std::cos(x1) + 10.0;
}

double hartmann6(const Point& p) {
  need_dims(p, 6, "hartmann6");
  static const std::array<double, 4> alpha = {1.0, 1.2, 3.0, 3.2};
  static const double A[4][6] = {
      {10.0, 3.0, 17.0, 3.5, 1.7, 8.0},
      {0.05, 10.0, 17.0, 0.1, 8.0, 14.0},
      {3.0, 3.5, 1.7, 10.0, 17.0, 8.0},
      {17.0, 8.0, 0.05, 10.0, 0.1, 14.0},
  };
  static const double P[4][6] = {
      {0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
      {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
      {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
      {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381},
  };
  double sum = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int k = 0; k < 6; ++k) {
      const double d = p.values[static_cast<std::size_t>(k)] - P[i][k];
      e += A[i][k] * d * d;
    }
    sum += alpha[static_cast<std::size_t>(i)] * std::exp(-e);
  }
  return -sum;
}

double mixed_int_demo(const Point& p, const ParamSpace& space) {
  need_dims(p, 5, "mixed_int_demo");
  const UnitVector u = space.normalize(p);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) {
    const double d = u[i] - kMixedTarget[i];
    s += d * d;
  }
  return s;
}

bool is_builtin_objective(const std::string& name) {
  return name == "sphere" || name == "branin" || name == "hartmann6" ||
         name == "mixed_int_demo";
}

void check_builtin_space(const std::string& name, const ParamSpace& space) {
  if (name == "sphere") return;  // any dims
  if (name == "branin") {
    if (space.size() != 2) throw ConfigError("branin needs a 2-dimensional space");
    return;
  }
  if (name == "hartmann6") {
    if (space.size() != 6) throw ConfigError("hartmann6 needs a 6-dimensional space");
    return;
  }
  if (name == "mixed_int_demo") {
    if (space.size() != 5) throw ConfigError("mixed_int_demo needs a 5-dimensional space");
    for (std::size_t i = 0; i < 5; ++i) {
      const DimKind want = i < 3 ? DimKind::Integer : DimKind::Real;
      if (space.dim(i).kind != want)
        throw ConfigError("mixed_int_demo needs 3 integer then 2 real dimensions");
    }
    return;
  }
  throw ConfigError("unknown builtin objective '" + name + "'");
}

double builtin_objective(const std::string& name, const Point& p, const ParamSpace& space) {
  if (name == "sphere") return sphere(p);
  if (name == "branin") return branin(p);
  if (name == "hartmann6") return hartmann6(p);
  if (name == "mixed_int_demo") return mixed_int_demo(p, space);
  throw ConfigError("unknown builtin objective '" + name + "'");
}

ParamSpace branin_space() {
  return ParamSpace({{"x1", DimKind::Real, -5.0, 10.0}, {"x2", DimKind::Real, 0.0, 15.0}});
}

ParamSpace hartmann6_space() {
  std::vector<Dimension> dims;
  for (int i = 1; i <= 6; ++i)
    dims.push_back({"x" + std::to_string(i), DimKind::Real, 0.0, 1.0});
  return ParamSpace(std::move(dims));
}

ParamSpace mixed_demo_space() {
  return ParamSpace({{"num_leaves", DimKind::Integer, 4, 100},
                     {"min_child_samples", DimKind::Integer, 1, 100},
                     {"n_estimators", DimKind::Integer, 1, 100},
                     {"subsample", DimKind::Real, 0.1, 1.0},
                     {"colsample", DimKind::Real, 0.1, 1.0}});
}

}  // namespace adabo
