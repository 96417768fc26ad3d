#pragma once

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "flatlab/measure.hpp"

namespace flatlab {

/// Exponent p in [1, inf].
class Exponent {
 public:
  explicit Exponent(double p);
  static Exponent infinity() { return Exponent(std::numeric_limits<double>::infinity()); }

  double value() const noexcept { return p_; }
  bool is_infinite() const noexcept { return p_ == std::numeric_limits<double>::infinity(); }
  std::string to_string() const;
  static Exponent parse(const std::string& text);

  friend bool operator==(Exponent a, Exponent b) noexcept { return a.p_ == b.p_; }

 private:
  double p_;
};

using Vector = Eigen::VectorXd;

/// An element of L_p(mu): one value per atom.
class LpFunction {
 public:
  LpFunction(MeasureSpace space, Vector values, Exponent p);

  static LpFunction zero(const MeasureSpace& space, Exponent p);
  static LpFunction constant(const MeasureSpace& space, double c, Exponent p);
  static LpFunction indicator(const MeasurableSet& e, Exponent p);
  /// Samples f at every atom centre.
  static LpFunction sample(const MeasureSpace& space,
                           const std::function<double(Point)>& f, Exponent p);

  const MeasureSpace& space() const noexcept { return space_; }
  const Vector& values() const noexcept { return values_; }
  Exponent p() const noexcept { return p_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

  /// (sum_i w_i |f_i|^p)^(1/p), or max_i |f_i| for p = inf.
  double norm() const;
  /// ||f||^p for finite p; ||f|| for p = inf.
  double norm_pow() const;
  double sup_norm() const;

  /// Same values viewed in a different L_p.
  LpFunction with_exponent(Exponent p) const { return {space_, values_, p}; }
  LpFunction abs() const;
  LpFunction pow(unsigned n) const;

  LpFunction operator+(const LpFunction& g) const;
  LpFunction operator-(const LpFunction& g) const;
  LpFunction operator*(double s) const;
  /// Pointwise product; the exponent of the left operand is kept.
  LpFunction pointwise(const LpFunction& g) const;

 private:
  MeasureSpace space_;
  Vector values_;
  Exponent p_;
};

inline LpFunction operator*(double s, const LpFunction& f) { return f * s; }

inline double norm(const LpFunction& f) { return f.norm(); }

/// f * chi_E. Zeroes are written exactly.
LpFunction restrict(const LpFunction& f, const MeasurableSet& e);

/// Atoms with |f_i| > tol.
MeasurableSet support(const LpFunction& f, double tol = 0.0);

bool disjoint(const LpFunction& f, const LpFunction& g, double tol = 0.0);

/// Throws SpaceMismatch on different spaces or exponents.
void require_compatible(const LpFunction& f, const LpFunction& g, const char* what);

/// CSV layout: a header line "p,space,atoms" followed by one data line with
/// those fields, then one value per line.
void write_csv(std::ostream& out, const LpFunction& f);
LpFunction read_csv(std::istream& in, const MeasureSpace& space);

}  // namespace flatlab
