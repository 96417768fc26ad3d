#pragma once

#include <cmath>
#include <random>

#include "flatlab/operators.hpp"

namespace flatlab::testing {

inline MeasurableSet random_set(const MeasureSpace& s, std::mt19937_64& rng, double density = 0.5) {
  std::bernoulli_distribution coin(density);
  return MeasurableSet::where(s, [&](std::size_t) { return coin(rng); });
}

inline LpFunction random_function(const MeasureSpace& s, Exponent p, std::mt19937_64& rng,
                                  double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(static_cast<Eigen::Index>(s.size()));
  for (auto& x : v) x = u(rng);
  return {s, v, p};
}

inline Matrix random_matrix(std::size_t n, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = u(rng);
  return m;
}

inline MeasureSpace random_weight_space(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  std::vector<double> w(n);
  for (auto& x : w) x = u(rng);
  return MeasureSpace::from_weights(std::move(w));
}

/// Brute-force AB - BA by explicit triple loops.
inline Matrix naive_commutator(const Matrix& a, const Matrix& b) {
  const auto n = a.rows();
  Matrix c = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      double s = 0.0;
      for (Eigen::Index k = 0; k < n; ++k) s += a(i, k) * b(k, j) - b(i, k) * a(k, j);
      c(i, j) = s;
    }
  return c;
}

inline bool all_zero(const Matrix& m) { return (m.array() == 0.0).all(); }

}  // namespace flatlab::testing
