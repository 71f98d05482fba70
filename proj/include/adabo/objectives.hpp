#pragma once

#include <string>

#include "adabo/space.hpp"

namespace adabo {

// Synthetic minimization benchmarks standing in for expensive real
// objectives. All values are plain function evaluations, no noise.

double sphere(const Point& p);     // any dims, minimum 0 at the origin
double branin(const Point& p);     // 2 dims, minimum 0.397887
double hartmann6(const Point& p);  // 6 dims on the unit cube, minimum -3.32237

// Quadratic bowl over normalized coordinates of a mixed integer/real space;
// exactly 0 at an attainable lattice target.
double mixed_int_demo(const Point& p, const ParamSpace& space);

bool is_builtin_objective(const std::string& name);

// Throws ConfigError for unknown names and for spaces whose shape does not
// fit the chosen function.
double builtin_objective(const std::string& name, const Point& p, const ParamSpace& space);
void check_builtin_space(const std::string& name, const ParamSpace& space);

// Conventional domains, used by tests and the sample configs.
ParamSpace branin_space();
ParamSpace hartmann6_space();
ParamSpace mixed_demo_space();

}  // namespace adabo
