#include "flatlab/commutant.hpp"

#include <cmath>
#include <random>

#include "flatlab/errors.hpp"

namespace flatlab {

StarIdentityReport star_identity_check(const LinearOperator& r, const LpFunction& phi,
                                       const LpFunction& x, unsigned n_max) {
  require_same_space(r.space(), phi.space(), "star_identity_check");
  require_same_space(r.space(), x.space(), "star_identity_check");
  const LpFunction xr = x.with_exponent(r.p());
  const double r_norm = operator_norm(r).upper;
  const double phi_norm = phi.sup_norm();
  const double x_norm = xr.norm();
  const LpFunction rx = r.apply(xr);

  StarIdentityReport report;
  Vector power = Vector::Ones(phi.values().size());  // phi^n
  double phi_pow = 1.0;
  for (unsigned n = 1; n <= n_max; ++n) {
    power = power.cwiseProduct(phi.values());
    phi_pow *= phi_norm;
    if (phi_pow > 1e100) {
      report.overflow_stop = true;
      break;
    }
    const LpFunction pn(phi.space(), power, r.p());
    const LpFunction lhs = r.apply(pn.pointwise(xr));
    const LpFunction rhs = pn.pointwise(rx);
    const double diff = (lhs - rhs).norm();
    const double scale = r_norm * phi_pow * x_norm;
    const double dev = scale > 0.0 ? diff / scale : diff;
    report.deviations.push_back(dev);
    report.max_deviation = std::max(report.max_deviation, dev);
    report.powers_checked = n;
  }
  return report;
}

GrowthProbe growth_contradiction_probe(const LinearOperator& r, const LpFunction& phi,
                                       const LpFunction& x, double gamma, unsigned n) {
  require_same_space(r.space(), phi.space(), "growth_contradiction_probe");
  if (!(gamma > 1.0)) throw PreconditionError("growth probe needs gamma > 1");
  const auto sub_level = level_set(phi, LevelKind::AtMost, 1.0).set;
  if (!support(x).is_subset_of(sub_level))
    throw PreconditionError("x must be supported in {phi <= 1}");

  const LpFunction xr = x.with_exponent(r.p());
  const LpFunction rx = r.apply(xr);
  GrowthProbe probe;
  probe.bound = operator_norm(r).upper * xr.norm();
  probe.commutator = commutator_norm(r, multiplication(phi, r.p()));
  probe.leak_mass = restrict(rx, level_set(phi, LevelKind::Above, gamma).set).norm();

  Vector power = Vector::Ones(phi.values().size());
  for (unsigned k = 0; k <= n; ++k) {
    const LpFunction pk(phi.space(), power, r.p());
    probe.image_of_powers.push_back(r.apply(pk.pointwise(xr)).norm());
    const double grown = pk.pointwise(rx).norm();
    probe.powers_of_image.push_back(grown);
    if (!std::isfinite(grown) || grown > 1e100) break;
    power = power.cwiseProduct(phi.values());
  }
  return probe;
}

namespace {

std::optional<DisjointnessWitness> check_pair(const LinearOperator& t, const LpFunction& f,
                                              const LpFunction& g, double tol,
                                              const char* source) {
  const LpFunction tf = t.apply(f);
  const LpFunction tg = t.apply(g);
  const Vector overlap = tf.values().cwiseAbs().cwiseMin(tg.values().cwiseAbs());
  if ((overlap.array() > tol).any())
    return DisjointnessWitness{f, g, LpFunction(t.space(), overlap, t.p()), source};
  return std::nullopt;
}

}  // namespace

DisjointnessResult disjointness_preservation_test(const LinearOperator& t, std::size_t trials,
                                                  std::uint64_t seed, double tol) {
  const auto& sp = t.space();
  const Exponent p = t.p();
  DisjointnessResult result;
  auto record = [&](std::optional<DisjointnessWitness> w) {
    ++result.pairs_tested;
    if (!w) return false;
    result.preserves = false;
    result.witness = std::move(w);
    return true;
  };

  // Complementary half-space indicators, x-split first.
  const bool two_axes = sp.geometry() == Geometry::Grid;
  for (int axis = 0; axis < (two_axes ? 2 : 1); ++axis) {
    auto lower = MeasurableSet::where(sp, [&](std::size_t i) {
      const Point c = sp.center(i);
      return (axis == 0 ? c.x : c.y) < 0.5;
    });
    if (lower.is_empty() || lower.count() == sp.size()) continue;
    if (record(check_pair(t, LpFunction::indicator(lower, p),
                          LpFunction::indicator(lower.complement(), p), tol,
                          axis == 0 ? "half-split-x" : "half-split-y")))
      return result;
  }

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(0.5);
  std::uniform_real_distribution<double> value(0.5, 1.5);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Vector f = Vector::Zero(static_cast<Eigen::Index>(sp.size()));
    Vector g = f;
    for (Eigen::Index i = 0; i < f.size(); ++i) (coin(rng) ? f[i] : g[i]) = value(rng);
    if (record(check_pair(t, LpFunction(sp, f, p), LpFunction(sp, g, p), tol, "random")))
      return result;
  }

  // Exact sweep: T preserves disjointness iff no row has two entries above tol.
  const auto& m = t.matrix();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Eigen::Index first = -1;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) <= tol) continue;
      if (first < 0) {
        first = j;
        continue;
      }
      Vector f = Vector::Zero(m.cols()), g = Vector::Zero(m.cols());
      f[first] = 1.0;
      g[j] = 1.0;
      record(check_pair(t, LpFunction(sp, f, p), LpFunction(sp, g, p), tol, "atom-pair"));
      if (!result.preserves) return result;
    }
  }
  return result;
}

std::vector<ScenarioCheck> counterexample_checks(const LinearOperator& r,
                                                 std::size_t alpha_samples, std::size_t trials,
                                                 std::uint64_t seed) {
  const MeasureSpace& g = r.space();
  if (g.geometry() != Geometry::Grid)
    throw GeometryMismatch("counterexample checks need a product grid");
  const LpFunction phi =
      LpFunction::sample(g, [](Point c) { return c.y; }, Exponent::infinity());
  std::vector<ScenarioCheck> out;

  const double comm = commutator_norm(r, multiplication(phi, r.p()));
  out.push_back({"commutes_with_multiplier", comm <= 1e-12, comm, 1e-12});

  const auto dis = disjointness_preservation_test(r, trials, seed);
  const double overlap = dis.witness ? dis.witness->overlap.sup_norm() : 0.0;
  out.push_back({"not_disjointness_preserving", !dis.preserves, overlap, 0.0});

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (std::size_t k = 0; k < alpha_samples; ++k) {
    const auto e = level_set(phi, LevelKind::AtMost, unit(rng)).set;
    worst = std::max(worst, leaves_invariant(r, e).violation);
  }
  out.push_back({"level_sets_invariant", worst <= 1e-12, worst, 1e-12});

  const auto vertical = MeasurableSet::where(g, [&](std::size_t i) { return g.center(i).x < 0.5; });
  const double v = leaves_invariant(r, vertical).violation;
  out.push_back({"vertical_band_not_invariant", v >= 0.1, v, 0.1});
  return out;
}

}  // namespace flatlab

