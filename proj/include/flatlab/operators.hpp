#pragma once

#include <functional>
#include <iosfwd>
#include <string_view>

#include <Eigen/Core>

#include "flatlab/lpspace.hpp"

namespace flatlab {

using Matrix = Eigen::MatrixXd;

/// Dense operator on an atomic L_p: (Tf)_i = sum_j a_ij f_j.
class LinearOperator {
 public:
  LinearOperator(MeasureSpace space, Matrix matrix, Exponent p);

  static LinearOperator identity(const MeasureSpace& space, Exponent p);
  static LinearOperator zero(const MeasureSpace& space, Exponent p);
  static LinearOperator diagonal(const MeasureSpace& space, const Vector& d, Exponent p);

  const MeasureSpace& space() const noexcept { return space_; }
  const Matrix& matrix() const noexcept { return matrix_; }
  Exponent p() const noexcept { return p_; }
  std::size_t size() const noexcept { return space_.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

  bool is_diagonal() const noexcept { return diagonal_; }
  /// All entries >= 0; on an atomic space this is positivity.
  bool is_positive() const;
  bool is_zero() const;

  LpFunction apply(const LpFunction& f) const;
  Vector apply(const Vector& v) const;

  /// Entrywise absolute value; the least positive operator dominating *this.
  LinearOperator modulus() const;
  LinearOperator with_exponent(Exponent p) const { return {space_, matrix_, p}; }

  LinearOperator operator*(const LinearOperator& other) const;
  LinearOperator operator+(const LinearOperator& other) const;
  LinearOperator operator-(const LinearOperator& other) const;
  LinearOperator operator*(double s) const;

 private:
  MeasureSpace space_;
  Matrix matrix_;
  Exponent p_;
  bool diagonal_ = false;
};

/// M_phi f = phi f; acts on L_p for the given exponent.
LinearOperator multiplication(const LpFunction& phi, Exponent p);
LinearOperator multiplication(const LpFunction& phi);

/// (Rf)(x,y) = integral over t of f(t,y). Commutes with M_y but does not
/// preserve disjointness.
LinearOperator averaging_counterexample(const MeasureSpace& grid, Exponent p);

using Kernel = std::function<double(Point, Point)>;

/// Quadrature discretisation a_ij = k(c_i, c_j) * w_j.
LinearOperator kernel_operator(const MeasureSpace& space, const Kernel& k, Exponent p);
Kernel gaussian_kernel(double width);  // exp(-(s-t)^2 / width) on x coordinates
Kernel constant_kernel(double c);

/// Averaging projection onto a flat A of phi:
///   Pf = (1/mu(A)) (sum_{i in A} w_i f_i) chi_A.
/// Throws NotAFlat when A is empty or phi varies by more than tol on A.
LinearOperator rank_one_flat(const LpFunction& phi, const MeasurableSet& flat, Exponent p,
                             double tol = 0.0);

/// S dominates T iff |t_ij| <= s_ij for all i, j (exact comparison).
bool dominates(const LinearOperator& s, const LinearOperator& t);

/// Upper estimate of ||AB - BA|| valid simultaneously for every p:
/// max of the exact weighted 1- and inf-norms (Riesz-Thorin). Zero iff the
/// commutator is exactly zero.
double commutator_norm(const LinearOperator& a, const LinearOperator& b);

enum class NormMethod { ExactP1, ExactPInf, ExactMultiplication, PowerIterationP2, BoydIteration };
std::string_view to_string(NormMethod m);

struct OperatorNormEstimate {
  double lower = 0.0;
  double upper = 0.0;
  NormMethod method = NormMethod::ExactP1;
  int iterations = 0;
  bool converged = true;

  bool exact() const noexcept { return lower == upper; }
};

struct NormOptions {
  int max_iterations = 1000;
  double rel_tol = 1e-14;
};

/// Induced norm of T on L_p(mu). p defaults to the operator's exponent.
OperatorNormEstimate operator_norm(const LinearOperator& t, NormOptions opts = {});
OperatorNormEstimate operator_norm(const LinearOperator& t, Exponent p, NormOptions opts = {});

/// Exact weighted induced norms.
double norm_l1(const LinearOperator& t);
double norm_linf(const LinearOperator& t);

/// CSV layout: header "p,space,rows", one metadata row, then one matrix row
/// per line.
void write_csv(std::ostream& out, const LinearOperator& t);
LinearOperator read_operator_csv(std::istream& in, const MeasureSpace& space);

}  // namespace flatlab
