#include "flatlab/multipliers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "flatlab/errors.hpp"

namespace flatlab {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

void expect_args(const NamedSpec& spec, std::size_t lo, std::size_t hi) {
  if (spec.args.size() < lo || spec.args.size() > hi)
    throw ParseError("'" + spec.name + "' takes " + std::to_string(lo) +
                     (lo == hi ? "" : "-" + std::to_string(hi)) + " arguments, got " +
                     std::to_string(spec.args.size()));
}

}  // namespace

NamedSpec parse_named_spec(const std::string& text) {
  const std::string s = trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos) {
    if (s.empty()) throw ParseError("empty specification");
    return {s, {}};
  }
  if (s.back() != ')') throw ParseError("missing ')' in '" + s + "'");
  NamedSpec spec{trim(s.substr(0, open)), {}};
  std::istringstream args(s.substr(open + 1, s.size() - open - 2));
  std::string item;
  while (std::getline(args, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw ParseError("bad numeric argument '" + item + "'");
    spec.args.push_back(v);
  }
  return spec;
}

LpFunction make_multiplier(const MeasureSpace& space, const std::string& text) {
  const Exponent inf = Exponent::infinity();
  if (text.rfind("csv:", 0) == 0) {
    std::ifstream in(text.substr(4));
    if (!in) throw ParseError("cannot open multiplier file '" + text.substr(4) + "'");
    return read_csv(in, space).with_exponent(inf);
  }
  const NamedSpec spec = parse_named_spec(text);
  const auto& a = spec.args;
  if (spec.name == "identity" || spec.name == "x") {
    expect_args(spec, 0, 0);
    return LpFunction::sample(space, [](Point c) { return c.x; }, inf);
  }
  if (spec.name == "y") {
    expect_args(spec, 0, 0);
    if (space.geometry() != Geometry::Grid)
      throw GeometryMismatch("multiplier 'y' needs a product grid");
    return LpFunction::sample(space, [](Point c) { return c.y; }, inf);
  }
  if (spec.name == "const") {
    expect_args(spec, 0, 1);
    return LpFunction::constant(space, a.empty() ? 1.0 : a[0], inf);
  }
  if (spec.name == "plateau") {
    expect_args(spec, 2, 2);
    const double lo = a[0], hi = a[1];
    if (!(lo < hi)) throw ParseError("plateau(a,b) needs a < b");
    return LpFunction::sample(
        space,
        [lo, hi](Point c) {
          if (c.x < lo) return c.x;
          if (c.x <= hi) return lo;
          return c.x - (hi - lo);
        },
        inf);
  }
  if (spec.name == "affine") {
    expect_args(spec, 2, 2);
    const double s = a[0], o = a[1];
    return LpFunction::sample(space, [s, o](Point c) { return s * c.x + o; }, inf);
  }
  if (spec.name == "staircase") {
    expect_args(spec, 1, 1);
    const double k = a[0];
    if (!(k >= 1.0)) throw ParseError("staircase(k) needs k >= 1");
    return LpFunction::sample(space, [k](Point c) { return std::floor(k * c.x) / k; }, inf);
  }
  throw ParseError("unknown multiplier '" + spec.name + "'");
}

}  // namespace flatlab
