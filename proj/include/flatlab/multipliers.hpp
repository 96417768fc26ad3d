#pragma once

#include <string>
#include <vector>

#include "flatlab/lpspace.hpp"

namespace flatlab {

/// A parsed "name(arg, ...)" expression.
struct NamedSpec {
  std::string name;
  std::vector<double> args;
};

NamedSpec parse_named_spec(const std::string& text);

/// Named multiplier family, evaluated at atom centres (t = x coordinate):
///   identity          t
///   const(c)          c (default 1)
///   plateau(a,b)      t below a, a on [a,b], t-(b-a) above b
///   affine(s,o)       s*t + o
///   staircase(k)      floor(k t)/k
///   x, y              coordinate projections (y needs a grid)
///   csv:<path>        values read from a function CSV
/// The result carries p = inf.
LpFunction make_multiplier(const MeasureSpace& space, const std::string& spec);

}  // namespace flatlab
