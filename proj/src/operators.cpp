#include "flatlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "flatlab/errors.hpp"

namespace flatlab {

namespace {

using Index = Eigen::Index;

bool scan_diagonal(const Matrix& m) {
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i)
      if (i != j && m(i, j) != 0.0) return false;
  return true;
}

void require_same_operand_space(const LinearOperator& a, const LinearOperator& b,
                                const char* what) {
  require_same_space(a.space(), b.space(), what);
}

Vector weights_of(const MeasureSpace& s) {
  Vector w(static_cast<Index>(s.size()));
  for (std::size_t i = 0; i < s.size(); ++i) w[static_cast<Index>(i)] = s.weight(i);
  return w;
}

// W^{1/p} A W^{-1/p}: the same operator acting on unweighted l_p.
Matrix unweighted(const LinearOperator& t, double p) {
  const Vector w = weights_of(t.space());
  const Vector left = w.array().pow(1.0 / p);
  const Vector right = w.array().pow(-1.0 / p);
  return left.asDiagonal() * t.matrix() * right.asDiagonal();
}

double lp_norm(const Vector& v, double p) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0) return 0.0;
  return m * std::pow((v.cwiseAbs() / m).array().pow(p).sum(), 1.0 / p);
}

// sign(v)|v|^(e)
Vector signed_power(const Vector& v, double e) {
  Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    out[i] = a == 0.0 ? 0.0 : std::copysign(std::pow(a, e), v[i]);
  }
  return out;
}

Vector start_vector(Index n) {
  // Positive and generic so it overlaps every singular direction.
  Vector v(n);
  for (Index i = 0; i < n; ++i)
    v[i] = 1.0 + 0.25 * std::sin(0.6180339887498949 * static_cast<double>(i + 1) * 7.0);
  return v;
}

OperatorNormEstimate power_iteration_p2(const Matrix& m, double upper, NormOptions opts) {
  OperatorNormEstimate est;
  est.method = NormMethod::PowerIterationP2;
  est.upper = upper;
  Vector v = start_vector(m.cols());
  v.normalize();
  double prev = 0.0;
  est.converged = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector mv = m * v;
    const double value = mv.norm();
    est.lower = std::max(est.lower, value);
    est.iterations = it;
    if (value == 0.0) {
      est.converged = true;
      break;
    }
    Vector next = m.transpose() * mv;
    const double nn = next.norm();
    if (nn == 0.0) {
      est.converged = true;
      break;
    }
    v = next / nn;
    if (std::abs(value - prev) <= opts.rel_tol * value) {
      est.converged = true;
      break;
    }
    prev = value;
  }
  est.lower = std::min(est.lower, est.upper);
  return est;
}

OperatorNormEstimate boyd_iteration(const Matrix& m, double p, double upper, NormOptions opts) {
  OperatorNormEstimate est;
  est.method = NormMethod::BoydIteration;
  est.upper = upper;
  const double q = p / (p - 1.0);
  Vector x = start_vector(m.cols());
  x /= lp_norm(x, p);
  double prev = 0.0;
  est.converged = false;
  for (int it = 1; it <= opts.max_iterations; ++it) {
    const Vector y = m * x;
    const double value = lp_norm(y, p);
    est.lower = std::max(est.lower, value);
    est.iterations = it;
    if (value == 0.0) {
      est.converged = true;
      break;
    }
    const Vector z = m.transpose() * signed_power(y, p - 1.0);
    Vector next = signed_power(z, q - 1.0);
    const double nn = lp_norm(next, p);
    if (nn == 0.0) {
      est.converged = true;
      break;
    }
    x = next / nn;
    if (std::abs(value - prev) <= opts.rel_tol * value) {
      est.converged = true;
      break;
    }
    prev = value;
  }
  est.lower = std::min(est.lower, est.upper);
  return est;
}

}  // namespace

LinearOperator::LinearOperator(MeasureSpace space, Matrix matrix, Exponent p)
    : space_(std::move(space)), matrix_(std::move(matrix)), p_(p) {
  const auto n = static_cast<Index>(space_.size());
  if (matrix_.rows() != n || matrix_.cols() != n)
    throw ShapeMismatch("operator matrix must be " + std::to_string(n) + "x" +
                        std::to_string(n));
  if (!matrix_.allFinite()) throw PreconditionError("operator entries must be finite");
  diagonal_ = scan_diagonal(matrix_);
}

LinearOperator LinearOperator::identity(const MeasureSpace& space, Exponent p) {
  const auto n = static_cast<Index>(space.size());
  return {space, Matrix::Identity(n, n), p};
}

LinearOperator LinearOperator::zero(const MeasureSpace& space, Exponent p) {
  const auto n = static_cast<Index>(space.size());
  return {space, Matrix::Zero(n, n), p};
}

LinearOperator LinearOperator::diagonal(const MeasureSpace& space, const Vector& d, Exponent p) {
  if (static_cast<std::size_t>(d.size()) != space.size())
    throw ShapeMismatch("diagonal length differs from atom count");
  return {space, Matrix(d.asDiagonal()), p};
}

bool LinearOperator::is_positive() const { return (matrix_.array() >= 0.0).all(); }

bool LinearOperator::is_zero() const { return (matrix_.array() == 0.0).all(); }

Vector LinearOperator::apply(const Vector& v) const {
  if (v.size() != matrix_.cols()) throw ShapeMismatch("vector length differs from operator size");
  if (diagonal_) return matrix_.diagonal().cwiseProduct(v);
  return matrix_ * v;
}

LpFunction LinearOperator::apply(const LpFunction& f) const {
  require_same_space(space_, f.space(), "apply");
  if (!(f.p() == p_))
    throw SpaceMismatch("apply: operator acts on L_" + p_.to_string() + " but f is in L_" +
                        f.p().to_string());
  return {space_, apply(f.values()), p_};
}

LinearOperator LinearOperator::modulus() const { return {space_, matrix_.cwiseAbs(), p_}; }

LinearOperator LinearOperator::operator*(const LinearOperator& other) const {
  require_same_operand_space(*this, other, "compose");
  if (diagonal_) return {space_, matrix_.diagonal().asDiagonal() * other.matrix_, p_};
  if (other.diagonal_) return {space_, matrix_ * other.matrix_.diagonal().asDiagonal(), p_};
  return {space_, matrix_ * other.matrix_, p_};
}

LinearOperator LinearOperator::operator+(const LinearOperator& other) const {
  require_same_operand_space(*this, other, "add");
  return {space_, matrix_ + other.matrix_, p_};
}

LinearOperator LinearOperator::operator-(const LinearOperator& other) const {
  require_same_operand_space(*this, other, "subtract");
  return {space_, matrix_ - other.matrix_, p_};
}

LinearOperator LinearOperator::operator*(double s) const { return {space_, matrix_ * s, p_}; }

LinearOperator multiplication(const LpFunction& phi, Exponent p) {
  return LinearOperator::diagonal(phi.space(), phi.values(), p);
}

LinearOperator multiplication(const LpFunction& phi) { return multiplication(phi, phi.p()); }

LinearOperator averaging_counterexample(const MeasureSpace& grid, Exponent p) {
  if (grid.geometry() != Geometry::Grid)
    throw GeometryMismatch("averaging counterexample needs a product grid");
  const auto n = static_cast<Index>(grid.size());
  const double dx = 1.0 / static_cast<double>(grid.nx());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t iy = 0; iy < grid.ny(); ++iy)
    for (std::size_t i = 0; i < grid.nx(); ++i)
      for (std::size_t t = 0; t < grid.nx(); ++t)
        m(static_cast<Index>(grid.atom_at(i, iy)), static_cast<Index>(grid.atom_at(t, iy))) = dx;
  return {grid, std::move(m), p};
}

LinearOperator kernel_operator(const MeasureSpace& space, const Kernel& k, Exponent p) {
  const auto n = static_cast<Index>(space.size());
  Matrix m(n, n);
  for (Index j = 0; j < n; ++j) {
    const Point cj = space.center(static_cast<std::size_t>(j));
    const double wj = space.weight(static_cast<std::size_t>(j));
    for (Index i = 0; i < n; ++i) m(i, j) = k(space.center(static_cast<std::size_t>(i)), cj) * wj;
  }
  return {space, std::move(m), p};
}

Kernel gaussian_kernel(double width) {
  if (!(width > 0.0)) throw PreconditionError("gaussian kernel width must be > 0");
  return [width](Point s, Point t) {
    const double d = s.x - t.x;
    return std::exp(-d * d / width);
  };
}

Kernel constant_kernel(double c) {
  return [c](Point, Point) { return c; };
}

LinearOperator rank_one_flat(const LpFunction& phi, const MeasurableSet& flat, Exponent p,
                             double tol) {
  require_same_space(phi.space(), flat.space(), "rank_one_flat");
  const auto members = flat.indices();
  if (members.empty()) throw NotAFlat("flat set is empty");
  const double ref = phi[members.front()];
  for (std::size_t i : members)
    if (std::abs(phi[i] - ref) > tol)
      throw NotAFlat("multiplier varies on the candidate set (|" + std::to_string(phi[i]) +
                     " - " + std::to_string(ref) + "| > tol)");
  const double mu = flat.measure();
  const auto n = static_cast<Index>(phi.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t j : members) {
    const double a = phi.space().weight(j) / mu;
    for (std::size_t i : members) m(static_cast<Index>(i), static_cast<Index>(j)) = a;
  }
  return {phi.space(), std::move(m), p};
}

bool dominates(const LinearOperator& s, const LinearOperator& t) {
  require_same_operand_space(s, t, "dominates");
  return (t.matrix().cwiseAbs().array() <= s.matrix().array()).all();
}

double norm_l1(const LinearOperator& t) {
  const auto& sp = t.space();
  double best = 0.0;
  for (Index j = 0; j < t.matrix().cols(); ++j) {
    CompensatedSum s;
    for (Index i = 0; i < t.matrix().rows(); ++i)
      s.add(sp.weight(static_cast<std::size_t>(i)) * std::abs(t.matrix()(i, j)));
    best = std::max(best, s.value() / sp.weight(static_cast<std::size_t>(j)));
  }
  return best;
}

double norm_linf(const LinearOperator& t) {
  return t.matrix().size() == 0 ? 0.0 : t.matrix().cwiseAbs().rowwise().sum().maxCoeff();
}

namespace {

double commutator_bound(const Matrix& c, const MeasureSpace& sp) {
  LinearOperator op(sp, c, Exponent(1.0));
  return std::max(norm_l1(op), norm_linf(op));
}

}  // namespace

double commutator_norm(const LinearOperator& a, const LinearOperator& b) {
  require_same_operand_space(a, b, "commutator_norm");
  const auto n = static_cast<Index>(a.size());
  Matrix c(n, n);
  if (a.is_diagonal() || b.is_diagonal()) {
    // [D, B]_ij = (d_i - d_j) b_ij, and [B, D] = -[D, B].
    const bool a_diag = a.is_diagonal();
    const Vector d = (a_diag ? a : b).matrix().diagonal();
    const Matrix& other = (a_diag ? b : a).matrix();
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) c(i, j) = (d[i] - d[j]) * other(i, j);
  } else {
    c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  }
  return commutator_bound(c, a.space());
}

std::string_view to_string(NormMethod m) {
  switch (m) {
    case NormMethod::ExactP1: return "exact-p1";
    case NormMethod::ExactPInf: return "exact-pinf";
    case NormMethod::ExactMultiplication: return "exact-multiplication";
    case NormMethod::PowerIterationP2: return "power-iteration-p2";
    case NormMethod::BoydIteration: return "boyd-iteration";
  }
  return "unknown";
}

OperatorNormEstimate operator_norm(const LinearOperator& t, NormOptions opts) {
  return operator_norm(t, t.p(), opts);
}

OperatorNormEstimate operator_norm(const LinearOperator& t, Exponent p, NormOptions opts) {
  OperatorNormEstimate est;
  if (t.is_diagonal()) {
    const double v = t.matrix().size() == 0 ? 0.0 : t.matrix().diagonal().cwiseAbs().maxCoeff();
    est.lower = est.upper = v;
    est.method = NormMethod::ExactMultiplication;
    return est;
  }
  if (p.is_infinite()) {
    est.lower = est.upper = norm_linf(t);
    est.method = NormMethod::ExactPInf;
    return est;
  }
  if (p.value() == 1.0) {
    est.lower = est.upper = norm_l1(t);
    est.method = NormMethod::ExactP1;
    return est;
  }

  const double pv = p.value();
  const double n1 = norm_l1(t);
  const double ninf = norm_linf(t);
  const Matrix m = unweighted(t, pv);
  if (pv == 2.0) {
    const double upper = std::min(m.norm(), std::sqrt(n1 * ninf));
    return power_iteration_p2(m, upper, opts);
  }
  // Riesz-Thorin between L_1 and L_inf, and through a certified L_2 bound.
  double upper = std::pow(n1, 1.0 / pv) * std::pow(ninf, 1.0 - 1.0 / pv);
  const Matrix m2 = unweighted(t, 2.0);
  const double upper2 = std::min(m2.norm(), std::sqrt(n1 * ninf));
  if (pv < 2.0) {
    const double theta = 2.0 / pv - 1.0;  // 1/p = theta/1 + (1-theta)/2
    upper = std::min(upper, std::pow(n1, theta) * std::pow(upper2, 1.0 - theta));
  } else {
    const double theta = 2.0 / pv;  // 1/p = theta/2 + (1-theta)/inf
    upper = std::min(upper, std::pow(upper2, theta) * std::pow(ninf, 1.0 - theta));
  }
  return boyd_iteration(m, pv, upper, opts);
}

void write_csv(std::ostream& out, const LinearOperator& t) {
  out << "p,space,rows\n"
      << t.p().to_string() << ',' << t.space().fingerprint_hex() << ',' << t.size() << '\n';
  out << std::setprecision(17);
  for (Index i = 0; i < t.matrix().rows(); ++i) {
    for (Index j = 0; j < t.matrix().cols(); ++j) {
      if (j) out << ',';
      out << t.matrix()(i, j);
    }
    out << '\n';
  }
}

LinearOperator read_operator_csv(std::istream& in, const MeasureSpace& space) {
  std::string line;
  if (!std::getline(in, line) || line != "p,space,rows")
    throw ParseError("operator CSV: missing header 'p,space,rows'");
  if (!std::getline(in, line)) throw ParseError("operator CSV: missing metadata row");
  std::istringstream meta(line);
  std::string p_text, hash, rows;
  if (!std::getline(meta, p_text, ',') || !std::getline(meta, hash, ',') ||
      !std::getline(meta, rows))
    throw ParseError("operator CSV: malformed metadata row");
  if (hash != space.fingerprint_hex())
    throw SpaceMismatch("operator CSV was written for a different space (" + hash + ")");
  const auto n = static_cast<Index>(space.size());
  if (std::stol(rows) != n) throw ShapeMismatch("operator CSV row count mismatch");
  Matrix m(n, n);
  for (Index i = 0; i < n; ++i) {
    if (!std::getline(in, line)) throw ParseError("operator CSV: too few rows");
    std::istringstream row(line);
    std::string cell;
    for (Index j = 0; j < n; ++j) {
      if (!std::getline(row, cell, ',')) throw ParseError("operator CSV: short row");
      try {
        m(i, j) = std::stod(cell);
      } catch (const std::exception&) {
        throw ParseError("operator CSV: bad entry '" + cell + "'");
      }
    }
  }
  return {space, std::move(m), Exponent::parse(p_text)};
}

}  // namespace flatlab
