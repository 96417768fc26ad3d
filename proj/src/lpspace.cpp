#include "flatlab/lpspace.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "flatlab/errors.hpp"

namespace flatlab {

Exponent::Exponent(double p) : p_(p) {
  if (!(p >= 1.0)) throw PreconditionError("exponent p must lie in [1, inf]");
}

std::string Exponent::to_string() const {
  if (is_infinite()) return "inf";
  std::ostringstream os;
  os << std::setprecision(17) << p_;
  return os.str();
}

Exponent Exponent::parse(const std::string& text) {
  if (text == "inf" || text == "infinity") return infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParseError("cannot parse exponent '" + text + "'");
  }
  if (used != text.size()) throw ParseError("cannot parse exponent '" + text + "'");
  return Exponent(v);
}

LpFunction::LpFunction(MeasureSpace space, Vector values, Exponent p)
    : space_(std::move(space)), values_(std::move(values)), p_(p) {
  if (static_cast<std::size_t>(values_.size()) != space_.size())
    throw SpaceMismatch("value vector length differs from atom count");
  if (!values_.allFinite()) throw PreconditionError("function values must be finite");
}

LpFunction LpFunction::zero(const MeasureSpace& space, Exponent p) {
  return {space, Vector::Zero(static_cast<Eigen::Index>(space.size())), p};
}

LpFunction LpFunction::constant(const MeasureSpace& space, double c, Exponent p) {
  return {space, Vector::Constant(static_cast<Eigen::Index>(space.size()), c), p};
}

LpFunction LpFunction::indicator(const MeasurableSet& e, Exponent p) {
  Vector v = Vector::Zero(static_cast<Eigen::Index>(e.space().size()));
  for (std::size_t i : e.indices()) v[static_cast<Eigen::Index>(i)] = 1.0;
  return {e.space(), std::move(v), p};
}

LpFunction LpFunction::sample(const MeasureSpace& space,
                              const std::function<double(Point)>& f, Exponent p) {
  Vector v(static_cast<Eigen::Index>(space.size()));
  for (std::size_t i = 0; i < space.size(); ++i)
    v[static_cast<Eigen::Index>(i)] = f(space.center(i));
  return {space, std::move(v), p};
}

double LpFunction::sup_norm() const {
  return values_.size() == 0 ? 0.0 : values_.cwiseAbs().maxCoeff();
}

double LpFunction::norm() const {
  if (p_.is_infinite()) return sup_norm();
  const double m = sup_norm();
  if (m == 0.0) return 0.0;
  // Scale by the max entry so |f|^p neither overflows nor underflows.
  const double p = p_.value();
  CompensatedSum s;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double r = std::abs(values_[i]) / m;
    if (r != 0.0) s.add(space_.weight(static_cast<std::size_t>(i)) * (p == 1.0 ? r : std::pow(r, p)));
  }
  return m * (p == 1.0 ? s.value() : std::pow(s.value(), 1.0 / p));
}

double LpFunction::norm_pow() const {
  if (p_.is_infinite()) return sup_norm();
  const double p = p_.value();
  CompensatedSum s;
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    const double a = std::abs(values_[i]);
    if (a != 0.0) s.add(space_.weight(static_cast<std::size_t>(i)) * (p == 1.0 ? a : std::pow(a, p)));
  }
  return s.value();
}

LpFunction LpFunction::abs() const { return {space_, values_.cwiseAbs(), p_}; }

LpFunction LpFunction::pow(unsigned n) const {
  Vector v = Vector::Ones(values_.size());
  for (unsigned k = 0; k < n; ++k) v = v.cwiseProduct(values_);
  return {space_, std::move(v), p_};
}

void require_compatible(const LpFunction& f, const LpFunction& g, const char* what) {
  require_same_space(f.space(), g.space(), what);
  if (!(f.p() == g.p()))
    throw SpaceMismatch(std::string(what) + ": exponents differ (" + f.p().to_string() +
                        " vs " + g.p().to_string() + ")");
}

LpFunction LpFunction::operator+(const LpFunction& g) const {
  require_compatible(*this, g, "add");
  return {space_, values_ + g.values_, p_};
}

LpFunction LpFunction::operator-(const LpFunction& g) const {
  require_compatible(*this, g, "subtract");
  return {space_, values_ - g.values_, p_};
}

LpFunction LpFunction::operator*(double s) const { return {space_, values_ * s, p_}; }

LpFunction LpFunction::pointwise(const LpFunction& g) const {
  require_same_space(space_, g.space_, "pointwise product");
  return {space_, values_.cwiseProduct(g.values_), p_};
}

LpFunction restrict(const LpFunction& f, const MeasurableSet& e) {
  require_same_space(f.space(), e.space(), "restrict");
  Vector v = Vector::Zero(f.values().size());
  for (std::size_t i : e.indices())
    v[static_cast<Eigen::Index>(i)] = f[i];
  return {f.space(), std::move(v), f.p()};
}

MeasurableSet support(const LpFunction& f, double tol) {
  if (!(tol >= 0.0)) throw PreconditionError("support tolerance must be >= 0");
  return MeasurableSet::where(f.space(), [&](std::size_t i) { return std::abs(f[i]) > tol; });
}

bool disjoint(const LpFunction& f, const LpFunction& g, double tol) {
  require_same_space(f.space(), g.space(), "disjoint");
  return !support(f, tol).intersects(support(g, tol));
}

void write_csv(std::ostream& out, const LpFunction& f) {
  out << "p,space,atoms\n"
      << f.p().to_string() << ',' << f.space().fingerprint_hex() << ',' << f.size() << '\n';
  out << std::setprecision(17);
  for (std::size_t i = 0; i < f.size(); ++i) out << f[i] << '\n';
}

LpFunction read_csv(std::istream& in, const MeasureSpace& space) {
  std::string line;
  if (!std::getline(in, line) || line != "p,space,atoms")
    throw ParseError("function CSV: missing header 'p,space,atoms'");
  if (!std::getline(in, line)) throw ParseError("function CSV: missing metadata row");
  std::istringstream meta(line);
  std::string p_text, hash, atoms;
  if (!std::getline(meta, p_text, ',') || !std::getline(meta, hash, ',') ||
      !std::getline(meta, atoms))
    throw ParseError("function CSV: malformed metadata row");
  if (hash != space.fingerprint_hex())
    throw SpaceMismatch("function CSV was written for a different space (" + hash + ")");
  const std::size_t n = std::stoul(atoms);
  if (n != space.size()) throw SpaceMismatch("function CSV atom count mismatch");
  Vector v(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("function CSV: too few values");
    try {
      v[static_cast<Eigen::Index>(i)] = std::stod(line);
    } catch (const std::exception&) {
      throw ParseError("function CSV: bad value '" + line + "'");
    }
  }
  return {space, std::move(v), Exponent::parse(p_text)};
}

}  // namespace flatlab
