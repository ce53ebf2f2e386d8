#pragma once

#include <map>
#include <string>
#include <vector>

#include "descent/objective.hpp"

namespace descent {

using Params = std::map<std::string, double>;

/// Construct a corpus objective by name.
///
/// Names and their parameter keys:
///   example1        f(x,y) = x^3 sin(1/x) + y^3 sin(1/y)        (no params)
///   example2        f(x,y) = a x^p sin^q(1/x) + b y^p sin^q(1/y)
///                   params: a, b (default 1), p >= 3, q >= 1 (integers,
///                   default p=4, q=2)
///   power_abs       f(x) = |x|^(1+gamma), params: gamma in (0,1)
///   quadratic_form  f(x) = x' A x / 2, params: a00, a01, ... (symmetric
///                   entries, single-digit indices) or dim for identity
///   double_well     f(x,y) = x^4/4 - x^2/2 + y^2/2              (no params)
///   rosenbrock      f(x,y) = (a-x)^2 + b (y-x^2)^2, params: a=1, b=100
///
/// example1/example2 define f and grad on the coordinate axes by continuous
/// extension (the normal component of the gradient is 0 there) and flag the
/// axes via smooth_at; their Lipschitz fields are Hessian bounds evaluated
/// at the worst corner of the ball, with r = half the distance to the axes.
Objective corpus_get(const std::string& name, const Params& params = {});

const std::vector<std::string>& corpus_names();

} // namespace descent
